"""Run configuration, JSON loading and the named presets."""

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

RUN_MODES = ("driven", "pulsed")
DENOMINATORS = ("product", "literal")
DETECTOR_K = ("free_space", "sp")
EVOLVE_METHODS = ("expm", "integrate")

# Coupling sweep of the fig4 preset; the values are a design choice of this package.
FIG4_OMEGA12 = (0.1, 0.5, 1.0, 2.0, 5.0)


class ConfigError(ValueError):
    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class RunConfig:
    name: str = "custom"
    # interface
    lambda0_nm: float = 450.0
    material: str | None = None
    eps1_re: float = -5.65
    eps1_im: float = 0.65
    eps2: float = 1.0
    # emitters
    z0_nm: float = 10.0
    r12_nm: float = 20.0
    gamma_hz: float = 2.9e10
    gamma12_over_gamma: float = 1.0
    omega12_over_gamma: float | list = 1.0
    omega_drive_over_gamma: list = field(default_factory=lambda: [1.0, 1.0])
    detuning_over_gamma: float = 0.0
    run_mode: str = "driven"
    initial_state: str = "ee"
    evolve_method: str = "expm"
    t_max_over_gamma: float = 5.0
    n_t: int = 201
    # correlations
    tau_max_over_gamma: float = 20.0
    n_tau: int = 401
    denominator: str = "product"
    detector_k: str = "free_space"
    theta0_rad: float | None = None
    # far field and mode matching
    theta_min_rad: float = -1.5
    theta_max_rad: float = 1.5
    n_theta: int = 2001
    n_modes: int = 33
    n_points: int = 401
    z_extent_nm: float = 1200.0
    # decay budget
    gamma_over_gamma0: float = 1.2
    c_rad_over_gamma0: float = 0.1
    c_nr_over_gamma0: float = 0.05
    output_dir: str = "out"

    def validate(self):
        def positive(name):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(name, f"must be a positive number, got {v!r}")

        def non_negative(name, v=None):
            v = getattr(self, name) if v is None else v
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                raise ConfigError(name, f"must be a non-negative number, got {v!r}")

        for name in ("lambda0_nm", "z0_nm", "r12_nm", "gamma_hz", "t_max_over_gamma",
                     "tau_max_over_gamma", "z_extent_nm", "gamma_over_gamma0"):
            positive(name)
        for name in ("gamma12_over_gamma", "c_rad_over_gamma0", "c_nr_over_gamma0"):
            non_negative(name)
        if self.gamma12_over_gamma > 1:
            raise ConfigError("gamma12_over_gamma", "must lie in [0, 1]")
        for v in self.omega12_values():
            non_negative("omega12_over_gamma", v)
        if not (isinstance(self.omega_drive_over_gamma, list)
                and len(self.omega_drive_over_gamma) == 2):
            raise ConfigError("omega_drive_over_gamma", "must be a list of two values")
        for v in self.omega_drive_over_gamma:
            non_negative("omega_drive_over_gamma", v)
        if not (isinstance(self.detuning_over_gamma, (int, float))
                and math.isfinite(self.detuning_over_gamma)):
            raise ConfigError("detuning_over_gamma", "must be finite")
        for name, lo in (("n_t", 2), ("n_tau", 2), ("n_theta", 3), ("n_modes", 2),
                         ("n_points", 4)):
            v = getattr(self, name)
            if not (isinstance(v, int) and v >= lo):
                raise ConfigError(name, f"must be an integer >= {lo}, got {v!r}")
        for name, allowed in (("run_mode", RUN_MODES), ("denominator", DENOMINATORS),
                              ("detector_k", DETECTOR_K), ("evolve_method", EVOLVE_METHODS)):
            if getattr(self, name) not in allowed:
                raise ConfigError(name, f"must be one of {allowed}")
        if not (isinstance(self.initial_state, str) and len(self.initial_state) == 2
                and set(self.initial_state) <= {"e", "g"}):
            raise ConfigError("initial_state", "must be one of ee, eg, ge, gg")
        if self.theta_min_rad >= self.theta_max_rad or self.theta_min_rad <= -math.pi / 2 \
                or self.theta_max_rad >= math.pi / 2:
            raise ConfigError("theta_min_rad", "theta range must lie inside (-pi/2, pi/2)")
        if self.theta0_rad is not None and not (
                isinstance(self.theta0_rad, (int, float)) and 0 <= self.theta0_rad < math.pi / 2):
            raise ConfigError("theta0_rad", "must be null or lie in [0, pi/2)")
        if self.material is not None and self.material != "silver_jc" \
                and not Path(self.material).is_file():
            raise ConfigError("material", f"table file {self.material!r} not found")
        return self

    def omega12_values(self):
        v = self.omega12_over_gamma
        return list(v) if isinstance(v, (list, tuple)) else [v]

    def to_dict(self):
        return dataclasses.asdict(self)

    def digest(self):
        """Hash of every field that affects results (not ``output_dir``)."""
        d = self.to_dict()
        d.pop("output_dir")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def from_dict(data, base=None):
    cfg = dataclasses.replace(base) if base is not None else RunConfig()
    names = {f.name for f in dataclasses.fields(RunConfig)}
    for key, value in data.items():
        if key not in names:
            raise ConfigError(key, "unknown field")
        if isinstance(getattr(RunConfig, key, None), float) and isinstance(value, int) \
                and not isinstance(value, bool):
            value = float(value)
        setattr(cfg, key, value)
    return cfg.validate()


def load_config(path, base=None):
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"file {str(path)!r} not found")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a JSON object")
    return from_dict(data, base=base)


def preset(name):
    """Named parameter sets fig2, fig3, fig4 and fig5."""
    base = RunConfig(name=name)
    if name == "fig2":
        return base.validate()
    if name == "fig3":
        return base.validate()
    if name == "fig4":
        return dataclasses.replace(base, omega12_over_gamma=list(FIG4_OMEGA12)).validate()
    if name == "fig5":
        return dataclasses.replace(base, omega12_over_gamma=1.0).validate()
    raise ConfigError("preset", f"unknown preset {name!r}; choose fig2, fig3, fig4 or fig5")


PRESETS = ("fig2", "fig3", "fig4", "fig5")
