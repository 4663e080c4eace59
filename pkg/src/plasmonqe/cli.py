"""Command-line entry point.

    plasmonqe <subcommand> [--config PATH] [--preset NAME] [--out DIR]

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import pipeline
from .config import PRESETS, ConfigError, RunConfig, from_dict, load_config, preset
from .numerics import NumericalError
from .output import write_csv, write_json

SUBCOMMANDS = ("dispersion", "farfield", "transmission", "populations", "g2", "sweep", "report")
G2_COLUMNS = ["gamma_tau", "g2", "numerator_re", "numerator_im", "denominator"]
POP_COLUMNS = ["gamma_t", "P_ee", "P_eg", "P_ge", "P_gg"]


# -- subcommands -----------------------------------------------------------

def cmd_dispersion(cfg, out):
    _, summary = pipeline.run_dispersion(cfg)
    return {"dispersion": summary}, [write_json(out / "dispersion.json", summary, cfg.digest())]


def cmd_farfield(cfg, out):
    spectra, summary = pipeline.run_farfield(cfg)
    files = []
    for comp, spec in spectra.items():
        rows = zip(spec.theta, spec.intensity)
        files.append(write_csv(out / f"farfield_{comp}.csv", ["theta_rad", "intensity_norm"],
                               rows, cfg.digest()))
    files.append(write_json(out / "farfield.json", summary, cfg.digest()))
    return {"farfield": summary}, files


def cmd_transmission(cfg, out):
    modes, summary = pipeline.run_transmission(cfg)
    files = [
        write_csv(out / "modes.csv", ["m", "q_over_k0", "T_re", "T_im", "flux_weight"],
                  modes.rows(), cfg.digest()),
        write_json(out / "scattering_summary.json", summary, cfg.digest()),
    ]
    return {"transmission": summary}, files


def cmd_populations(cfg, out, mode=None):
    mode = mode or cfg.run_mode
    pops, summary = pipeline.run_populations(cfg, mode)
    files = [
        write_csv(out / f"populations_{mode}.csv", POP_COLUMNS, pops.as_array(), cfg.digest()),
        write_json(out / f"populations_{mode}.json", summary, cfg.digest()),
    ]
    return {f"populations_{mode}": summary}, files


def cmd_g2(cfg, out, mode=None):
    mode = mode or cfg.run_mode
    series, summary = pipeline.run_g2(cfg, mode)
    files = [
        write_csv(out / f"g2_{mode}.csv", G2_COLUMNS, series.as_rows(), cfg.digest()),
        write_json(out / f"g2_{mode}.json", summary, cfg.digest()),
    ]
    return {f"g2_{mode}": summary}, files


def cmd_sweep(cfg, out, mode=None):
    mode = mode or cfg.run_mode
    results = pipeline.run_sweep(cfg, mode, max_workers=min(4, len(cfg.omega12_values())))
    rows, summaries = [], []
    for val, series, summary in results:
        for row in series.as_rows():
            rows.append((val, *row))
        summary = dict(summary)
        summary["overshoot"] = pipeline.monotone_overshoot(series.g2)
        summary["slope_sign_changes"] = pipeline.slope_sign_changes(series.g2)
        summaries.append(summary)
    files = [
        write_csv(out / f"g2_sweep_{mode}.csv", ["omega12_over_gamma"] + G2_COLUMNS, rows,
                  cfg.digest()),
        write_json(out / f"sweep_{mode}.json", {"series": summaries}, cfg.digest()),
    ]
    return {f"sweep_{mode}": summaries}, files


HANDLERS = {
    "dispersion": cmd_dispersion,
    "farfield": cmd_farfield,
    "transmission": cmd_transmission,
    "populations": cmd_populations,
    "g2": cmd_g2,
    "sweep": cmd_sweep,
}


# -- comparison report -----------------------------------------------------

def _entry(claim, reference, computed, tolerance=None, source="", note="", relative=False):
    if reference is None or tolerance is None:
        status = "informational"
    else:
        values = computed.values() if isinstance(computed, dict) else [computed]
        flat = []
        for v in values:
            flat.extend(v.values() if isinstance(v, dict) else [v])
        scale = abs(reference) if relative else 1.0
        ok = all(v is not None and abs(v - reference) <= tolerance * scale for v in flat)
        status = "match" if ok else "deviation"
    return {"claim": claim, "reference": reference, "tolerance": tolerance,
            "relative_tolerance": relative, "source": source, "computed": computed,
            "status": status, "note": note}


def build_report(results):
    """Turn the preset results into comparison entries, one per claim."""
    r2, r3, r4, r5 = (results[p] for p in PRESETS)
    disp = r2["dispersion"]
    entries = [
        _entry("lambda_sp_over_lambda0", 0.91, disp["lambda_sp_over_lambda0"], 0.005, "fig2"),
        _entry("L_prop_nm", 16000.0, disp["L_prop_nm"], 0.1, "fig2", relative=True,
               note="formula value from n_eff (about 2.7 um)"),
        _entry("delta_diel_nm", 180.0, disp["delta_diel_nm"], 0.1, "fig2", relative=True,
               note="formula value 1/Im(k_z2) (about 156 nm)"),
        _entry("gamma_over_gamma0", 1.2, disp["decay_budget"]["gamma_over_gamma0"], 1e-12,
               "fig5", note="parametric budget calibrated to this ratio"),
        _entry("total_transmissivity", 0.68, r2["transmission"]["total_transmissivity"], 0.10,
               "fig2", note=f"doubled-resolution value {r2['convergence']['doubled']:.6f}"),
    ]
    theta = {c: max((abs(x) for x in lobes), default=None)
             for c, lobes in r3["farfield"]["theta0_list"].items()}
    entries.append(_entry("theta0_rad", 0.13, theta, 0.01, "fig3",
                          note="outermost far-field lobe per facet component"))

    sweeps = {m: r4[f"sweep_{m}"] for m in ("driven", "pulsed")}
    g2_zero = {m: {f"{s['omega12_over_gamma']:g}": s["g2_0"] for s in sweeps[m]}
               for m in sweeps}
    entries.append(_entry("g2_zero", 0.0, g2_zero, 0.01, "fig4",
                          note="pulsed mode correlates from the initial state; coupling values chosen by this package"))
    g2_long = {f"{s['omega12_over_gamma']:g}": s["g2_tau_max"] for s in sweeps["driven"]}
    entries.append(_entry("g2_long_delay", 1.0, g2_long, 0.05, "fig4",
                          note="driven mode at the largest delay; coupling values chosen by this package"))
    spread = float(np.ptp([s["g2_0"] for s in sweeps["driven"]]))
    entries.append(_entry("g2_zero_spread_over_omega12", 0.0, spread, 0.01, "fig4",
                          note="driven mode; coupling values chosen by this package"))
    by_val = {s["omega12_over_gamma"]: s for s in sweeps["driven"]}
    lo, hi = min(by_val), max(by_val)
    entries.append(_entry(f"g2_overshoot_omega12_{lo:g}", 0.0, by_val[lo]["overshoot"], 0.01,
                          "fig4", note="largest drop below the running maximum"))
    entries.append(_entry(f"g2_slope_sign_changes_omega12_{hi:g}", None,
                          by_val[hi]["slope_sign_changes"], source="fig4",
                          note="oscillation requires at least 2"))
    p_gg = {m: r5[f"populations_{m}"]["steady_state"]["P_gg"] for m in ("driven", "pulsed")}
    entries.append(_entry("steady_state_P_gg", 1.0, p_gg, 1e-6, "fig5"))
    return {"entries": entries}


def format_report(report):
    lines = []
    for e in report["entries"]:
        comp = json.dumps(e["computed"], sort_keys=True, default=float)
        ref = "-" if e["reference"] is None else f"{e['reference']:g}"
        lines.append(f"[{e['status']:>13}] {e['claim']}: reference {ref} ({e['source']}), "
                     f"computed {comp}" + (f"  # {e['note']}" if e["note"] else ""))
    return "\n".join(lines) + "\n"


def cmd_report(overrides, out):
    results = {}
    files = []
    for name in PRESETS:
        cfg = from_dict(overrides, base=preset(name))
        cfg.name = name
        sub = out / name
        sub.mkdir(parents=True, exist_ok=True)
        res = {}
        steps = {
            "fig2": [cmd_dispersion, cmd_transmission],
            "fig3": [cmd_farfield],
            "fig4": [lambda c, o: cmd_sweep(c, o, "driven"), lambda c, o: cmd_sweep(c, o, "pulsed")],
            "fig5": [lambda c, o: cmd_populations(c, o, "driven"),
                     lambda c, o: cmd_populations(c, o, "pulsed"),
                     lambda c, o: cmd_g2(c, o, "driven"),
                     lambda c, o: cmd_g2(c, o, "pulsed")],
        }[name]
        for step in steps:
            summary, written = step(cfg, sub)
            res.update(summary)
            files.extend(written)
        if name == "fig2":
            doubled = dataclasses.replace(cfg, n_modes=2 * cfg.n_modes - 1,
                                          n_points=2 * cfg.n_points)
            _, dsum = pipeline.run_transmission(doubled)
            res["convergence"] = {"base": res["transmission"]["total_transmissivity"],
                                  "doubled": dsum["total_transmissivity"],
                                  "base_residual": res["transmission"]["residual"],
                                  "doubled_residual": dsum["residual"]}
        results[name] = res
    report = build_report(results)
    digest = RunConfig().digest() if not overrides else from_dict(overrides).digest()
    files.append(write_json(out / "report.json", report, digest))
    (out / "report.txt").write_text(format_report(report))
    files.append(out / "report.txt")
    return report, files


# -- entry point -----------------------------------------------------------

def _parser():
    p = argparse.ArgumentParser(prog="plasmonqe", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--preset", choices=PRESETS, help="start from a named preset")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    return p


def _raw_overrides(path):
    if path is None:
        return {}
    cfg_path = Path(path)
    load_config(cfg_path)  # full validation first
    return json.loads(cfg_path.read_text())


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        overrides = _raw_overrides(args.config)
        if args.subcommand == "report":
            cfg = from_dict(overrides)
        elif args.preset:
            cfg = from_dict(overrides, base=preset(args.preset))
        elif args.config:
            cfg = load_config(args.config)
        else:
            raise ConfigError("config", "give --config or --preset")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1

    out = Path(args.out or cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.subcommand == "report":
            report, files = cmd_report(overrides, out)
            sys.stdout.write(format_report(report))
        else:
            _, files = HANDLERS[args.subcommand](cfg, out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure in {exc.module} ({exc.invariant}): {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    for f in files:
        print(f, file=sys.stderr)
    return 0
