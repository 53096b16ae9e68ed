"""Result containers used across modules."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

REAL_IM_TOL = 1e-7


@dataclass(frozen=True)
class Eigenvalue:
    value: complex
    kind: str  # "real" or "pair"
    residual: float = 0.0

    @property
    def is_real(self):
        return self.kind == "real"


def classify(E, tol=REAL_IM_TOL):
    E = complex(E)
    return "real" if abs(E.imag) <= tol * max(1.0, abs(E)) else "pair"


def sort_key(E):
    """Order by real part, then put the +Im member of a pair first."""
    E = complex(E)
    return (round(E.real, 9), -E.imag)


def make_eigenvalues(values, residuals=None, tol=REAL_IM_TOL):
    vals = [complex(v) for v in values]
    if residuals is None:
        residuals = [0.0] * len(vals)
    out = []
    for v, r in zip(vals, residuals):
        kind = classify(v, tol)
        if kind == "real":
            v = complex(v.real, 0.0)
        out.append(Eigenvalue(v, kind, float(r)))
    out.sort(key=lambda e: sort_key(e.value))
    return out


@dataclass
class Spectrum:
    potential: str
    g: complex
    branch: int
    eigenvalues: list
    method: str
    pt_broken: bool = field(init=False)

    def __post_init__(self):
        self.pt_broken = any(not e.is_real for e in self.eigenvalues)

    @property
    def values(self):
        return [e.value for e in self.eigenvalues]

    @property
    def real_values(self):
        return [e.value.real for e in self.eigenvalues if e.is_real]


@dataclass(frozen=True)
class ExceptionalPoint:
    g_c: float
    E_c: float
    pair_index: int = 0
    ground_jump: Optional[float] = None
    ground_below: Optional[float] = None
    ground_above: Optional[float] = None
    residuals: tuple = (0.0, 0.0)


@dataclass(frozen=True)
class EnergyBand:
    g: complex
    E_lo: float
    E_hi: float
    norm_threshold: float
