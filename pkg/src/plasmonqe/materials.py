"""Complex permittivities: constants or linearly interpolated tables.

Tables are CSV files with a ``lambda_nm,eps_re,eps_im`` header. Lines
starting with ``#`` are ignored.
"""

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

HEADER = ("lambda_nm", "eps_re", "eps_im")


class TableError(ValueError):
    pass


@dataclass(frozen=True)
class PermittivityTable:
    wavelength_nm: np.ndarray
    eps: np.ndarray
    name: str = ""

    def __post_init__(self):
        wl = np.asarray(self.wavelength_nm, dtype=float)
        eps = np.asarray(self.eps, dtype=complex)
        if wl.ndim != 1 or wl.shape != eps.shape:
            raise TableError("wavelength and permittivity columns differ in length")
        if wl.size < 2:
            raise TableError(f"table needs at least 2 rows, got {wl.size}")
        if not np.all(np.isfinite(wl)) or not np.all(np.isfinite(eps)):
            raise TableError("table contains non-finite values")
        if np.any(np.diff(wl) <= 0):
            raise TableError("wavelengths must be strictly increasing")
        object.__setattr__(self, "wavelength_nm", wl)
        object.__setattr__(self, "eps", eps)

    def __len__(self):
        return self.wavelength_nm.size

    @property
    def passive(self):
        return bool(np.all(self.eps.imag >= 0))

    @property
    def range_nm(self):
        return float(self.wavelength_nm[0]), float(self.wavelength_nm[-1])

    def __call__(self, lambda0_nm):
        return permittivity_at(self, lambda0_nm)


@dataclass(frozen=True)
class ConstantMaterial:
    """Wavelength-independent medium, e.g. air with ``eps = 1``."""

    eps: complex
    name: str = ""

    def __call__(self, lambda0_nm):
        return complex(self.eps)


AIR = ConstantMaterial(1.0, "air")


def _read_rows(lines, source):
    rows = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.reader(rows)
    try:
        header = next(reader)
    except StopIteration:
        raise TableError(f"{source}: empty file") from None
    if tuple(h.strip() for h in header) != HEADER:
        raise TableError(f"{source}: expected header {','.join(HEADER)}, got {','.join(header)}")
    data = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != 3:
            raise TableError(f"{source}: row {lineno} has {len(row)} fields")
        try:
            data.append([float(x) for x in row])
        except ValueError as exc:
            raise TableError(f"{source}: row {lineno}: {exc}") from None
    return np.array(data, dtype=float).reshape(-1, 3)


def load_table(path):
    path = Path(path)
    with open(path, newline="") as fh:
        arr = _read_rows(fh.read().splitlines(), str(path))
    return PermittivityTable(arr[:, 0], arr[:, 1] + 1j * arr[:, 2], name=path.stem)


def load_silver():
    """Bundled silver table ``silver_jc.csv``."""
    text = resources.files("plasmonqe").joinpath("data/silver_jc.csv").read_text()
    arr = _read_rows(text.splitlines(), "silver_jc.csv")
    return PermittivityTable(arr[:, 0], arr[:, 1] + 1j * arr[:, 2], name="silver_jc")


def permittivity_at(table, lambda0_nm):
    """Linearly interpolate real and imaginary parts at ``lambda0_nm``.

    Accepts scalars or arrays; raises ``ValueError`` outside the table range.
    """
    lam = np.asarray(lambda0_nm, dtype=float)
    lo, hi = table.range_nm
    if np.any(lam < lo) or np.any(lam > hi) or not np.all(np.isfinite(lam)):
        raise ValueError(f"wavelength {lambda0_nm} nm outside table range [{lo}, {hi}] nm")
    wl = table.wavelength_nm
    out = np.interp(lam, wl, table.eps.real) + 1j * np.interp(lam, wl, table.eps.imag)
    return complex(out) if out.ndim == 0 else out


def permittivity(material, lambda0_nm):
    """Permittivity of a table, a constant material or a bare number."""
    if isinstance(material, (PermittivityTable, ConstantMaterial)):
        return material(lambda0_nm)
    return complex(material)
