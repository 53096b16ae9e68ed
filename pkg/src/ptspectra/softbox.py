"""Soft box: V = igx for |x| < 1 and V = 0 outside.

Inside, psi = a Ai(z) + b Bi(z) with z = (E - igx)/q, q^3 = g^2.  Outside,
psi ~ exp(-+kappa x).  Matching psi'/psi at x = -1 (z = s) and x = +1 (z = t)
gives the determinant

    F(E) = [kq Ai(s) + ig Ai'(s)][kq Bi(t) - ig Bi'(t)]
         - [kq Bi(s) + ig Bi'(s)][kq Ai(t) - ig Ai'(t)],

with k = +sqrt(-E) for exterior solutions that decay away from the box and
k = -sqrt(-E) for exterior solutions that grow.  For real g and E < 0 the
two products are complex conjugates, so F is purely imaginary.

The exterior convention is a problem parameter.  The "growing" choice is the
default because it produces the tabulated soft-box levels (see README); with
"decaying" exteriors no real bound state exists in the range studied.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi

import numpy as np
from scipy.optimize import minimize_scalar

from . import rootfind
from .airy import airy_arrays
from .errors import NoConvergence

EXTERIORS = ("growing", "decaying")
U_LOG_BELOW = 0.1
U_MIN = 1e-5          # E = -1e-10
U_STEP = 2e-3
ROOT_REL = 1e-8


@dataclass(frozen=True)
class SoftBoxProblem:
    g: float
    exterior: str = "growing"

    def __post_init__(self):
        if self.exterior not in EXTERIORS:
            raise ValueError(f"exterior must be one of {EXTERIORS}")
        if not np.isfinite(self.g):
            raise ValueError("g must be finite")

    @property
    def sign(self):
        return 1.0 if self.exterior == "decaying" else -1.0


@dataclass
class BoundStateReport:
    g: float
    exterior: str
    eigenvalues: list
    residuals: list
    decaying: list = field(default_factory=list)

    @property
    def merged(self):
        """True when no real level survives (the pair has become complex)."""
        return len(self.eigenvalues) == 0


def _q(g):
    return abs(g) ** (2.0 / 3.0)


def _matching_rows(E, problem, kappa):
    g = float(problem.g)
    q = _q(g)
    E = np.asarray(E, dtype=complex)
    s = (E + 1j * g) / q
    t = (E - 1j * g) / q
    ais, dais, bis, dbis = airy_arrays(s)
    ait, dait, bit, dbit = airy_arrays(t)
    A = kappa * q * ais + 1j * g * dais
    B = kappa * q * bis + 1j * g * dbis
    Ac = kappa * q * ait - 1j * g * dait
    Bc = kappa * q * bit - 1j * g * dbit
    return A, B, Ac, Bc


def bound_determinant(E, problem):
    """Complex determinant F(E) and its scale |A Bc| + |B Ac|."""
    if problem.g == 0:
        raise ValueError("g must be nonzero")
    E = np.asarray(E, dtype=float)
    kappa = problem.sign * np.sqrt(-E.astype(complex))
    A, B, Ac, Bc = _matching_rows(E, problem, kappa)
    return A * Bc - B * Ac, np.abs(A * Bc) + np.abs(B * Ac)


def bound_characteristic(E, problem):
    """Im F(E), the real function whose roots are the bound states."""
    F, _ = bound_determinant(E, problem)
    return float(F.imag[0]) if np.ndim(E) == 0 else F.imag


def u_grid(u_max, step=U_STEP):
    lo = np.geomspace(U_MIN, U_LOG_BELOW, 200)
    hi = np.arange(U_LOG_BELOW, u_max + step, step)
    return np.unique(np.concatenate([lo, hi]))


def bound_spectrum(problem, E_max=None):
    """Negative real levels, solved in u = sqrt(-E) on [1e-5, sqrt(E_max)]."""
    if problem.g == 0:
        raise ValueError("g must be nonzero")
    E_max = E_max if E_max is not None else problem.g ** 2 + 10.0
    f = lambda u: bound_characteristic(-np.asarray(u) ** 2, problem)
    grid = u_grid(np.sqrt(E_max))
    br = rootfind.scan_brackets(f, None, grid=grid, vectorized=True)
    levels, res, dec = [], [], []
    for b in br:
        u = rootfind.refine_real(f, b, 1e-15)
        E = -u * u
        F, sc = bound_determinant(np.array([E]), problem)
        levels.append(E)
        res.append(float(abs(F[0]) / sc[0]))
        dec.append(decays(E, problem))
    order = np.argsort(levels)
    return BoundStateReport(problem.g, problem.exterior, [levels[i] for i in order],
                            [res[i] for i in order], [dec[i] for i in order])


def wavefunction(E, problem, x):
    """Bound-state function on x (any real points) from the matched coefficients."""
    x = np.asarray(x, dtype=float)
    g = float(problem.g)
    q = _q(g)
    kappa = problem.sign * np.sqrt(-E)
    A, B, _, _ = _matching_rows(np.array([E]), problem, kappa)
    a, b = B[0], -A[0]

    def inside(xx):
        ai, _, bi, _ = airy_arrays((E - 1j * g * xx) / q)
        return a * ai + b * bi

    left, right = inside(np.array([-1.0, 1.0]))
    psi = np.empty(x.shape, dtype=complex)
    m = np.abs(x) < 1
    if np.any(m):
        psi[m] = inside(x[m])
    lm = x <= -1
    psi[lm] = left * np.exp(kappa * (x[lm] + 1.0))
    rm = x >= 1
    psi[rm] = right * np.exp(-kappa * (x[rm] - 1.0))
    return psi


def decays(E, problem):
    """|psi(+-2)| < |psi(+-1)|."""
    p = np.abs(wavefunction(E, problem, np.array([-2.0, -1.0, 1.0, 2.0])))
    return bool(p[0] < p[1] and p[3] < p[2])


def soft_critical(g_range=(1.0, 1.5), E_window=(-2.0, -1e-9), exterior="growing"):
    """Coalescence of the two bound levels."""
    f = lambda g, E: bound_characteristic(np.asarray(E, dtype=float), SoftBoxProblem(g, exterior))
    # the pair must be present at the lower end; use bound_spectrum to bracket
    ga, gb = g_range
    if len(bound_spectrum(SoftBoxProblem(ga, exterior)).eigenvalues) < 2:
        raise NoConvergence("no bound pair at the lower end of the coupling range")
    if bound_spectrum(SoftBoxProblem(gb, exterior)).eigenvalues:
        raise NoConvergence("bound levels persist at the upper end of the coupling range")
    return rootfind.find_coalescence(f, (ga, gb), E_window, vectorized=True)


def free_limit_check(g_seq, E_grid=None, exterior="growing"):
    """Normalised spread (max - min)/mean of |Im F| over a fixed energy grid."""
    if E_grid is None:
        E_grid = np.linspace(-5.0, -0.5, 50)
    out = []
    for g in g_seq:
        if g <= 0:
            raise ValueError("all g must be positive")
        v = np.abs(bound_characteristic(np.asarray(E_grid), SoftBoxProblem(g, exterior)))
        out.append(float((v.max() - v.min()) / v.mean()))
    return out


# ------------------------------------------------------------ reflectionless states

def reflectionless_residual(E, g):
    """Complex residual of the k = sqrt(E) continuation and its scale."""
    E = np.asarray(E, dtype=float)
    k = np.sqrt(E)
    q = _q(g)
    s = (E + 1j * g) / q
    t = (E - 1j * g) / q
    ais, dais, bis, dbis = airy_arrays(s)
    ait, dait, bit, dbit = airy_arrays(t)
    lhs = (k * q * ais + g * dais) * (k * q * bit - g * dbit)
    rhs = (k * q * bis + g * dbis) * (k * q * ait - g * dait)
    return lhs - rhs, np.abs(lhs) + np.abs(rhs)


def _complex_real_zeros(fun, lo, hi, n, rel=ROOT_REL):
    """Real zeros of a complex function: local minima of |f|/scale refined by Brent."""
    grid = np.linspace(lo, hi, n)
    v, sc = fun(grid)
    r = np.abs(v) / sc
    roots = []
    for i in range(1, len(grid) - 1):
        if r[i] <= r[i - 1] and r[i] <= r[i + 1]:
            obj = lambda x: float((lambda a: np.abs(a[0][0]) / a[1][0])(fun(np.array([x]))))
            m = minimize_scalar(obj, bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                                options={"xatol": 1e-14})
            if m.fun <= rel:
                roots.append(float(m.x))
    k = int(np.argmin(r))
    return roots, float(np.min(np.abs(v))), float(grid[k]), float(r[k])


def reflectionless_scan(g, E_lo, E_hi, step=1e-3):
    """Search (E_lo, E_hi] for real solutions; returns roots and the smallest residual."""
    if not 0 < E_lo < E_hi:
        raise ValueError("need 0 < E_lo < E_hi")
    n = int(np.ceil((E_hi - E_lo) / step)) + 1
    roots, min_abs, argmin, _ = _complex_real_zeros(lambda E: reflectionless_residual(E, g),
                                                    E_lo, E_hi, n)
    return roots, min_abs, argmin


# ------------------------------------------------------------ companion wells

def _transfer(psi, dpsi, K, L):
    c = np.cos(K * L)
    s = np.sinc(K * L / pi) * L     # sin(KL)/K, finite at K = 0
    return psi * c + dpsi * s, -psi * K * np.sin(K * L) + dpsi * c


def _exterior_match(E, pieces):
    """psi'(1) + kappa psi(1) after propagating exp(kappa x) through the pieces."""
    E = np.asarray(E, dtype=complex)
    kappa = np.sqrt(-E)
    psi = np.ones_like(E)
    dpsi = kappa.copy()
    for V, L in pieces:
        K = np.sqrt(E - V)
        psi, dpsi = _transfer(psi, dpsi, K, L)
    val = dpsi + kappa * psi
    return val, np.abs(dpsi) + np.abs(kappa * psi)


def _well_levels(pieces, depth):
    """Negative real levels of a piecewise-constant well inside the soft box."""
    u_max = np.sqrt(depth + 10.0)
    grid = u_grid(u_max)
    fun = lambda u: _exterior_match(-np.asarray(u) ** 2, pieces)
    v, sc = fun(grid)
    mag = np.abs(v)
    if np.max(np.abs(v.imag) / mag) <= 1e-10:
        part = lambda u: fun(u)[0].real
    elif np.max(np.abs(v.real) / mag) <= 1e-10:
        part = lambda u: fun(u)[0].imag
    else:
        part = None
    roots = []
    if part is not None:
        for b in rootfind.scan_brackets(part, None, grid=grid, vectorized=True):
            roots.append(rootfind.refine_real(part, b, 1e-15))
    else:
        r = mag / sc
        for i in range(1, len(grid) - 1):
            if r[i] <= r[i - 1] and r[i] <= r[i + 1]:
                obj = lambda u: float(np.abs(fun(np.array([u]))[0][0]) / fun(np.array([u]))[1][0])
                m = minimize_scalar(obj, bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                                    options={"xatol": 1e-15})
                if m.fun <= ROOT_REL:
                    roots.append(float(m.x))
    return sorted(-u * u for u in roots)


def rect_well_spectrum(v1, v2):
    """Bound levels of V = -v1 + i v2 in |x| < 1, zero outside."""
    if v1 < 0:
        raise ValueError("v1 must be non-negative")
    if v1 == 0 and v2 == 0:
        return []
    return _well_levels([(-v1 + 1j * v2, 2.0)], v1 + abs(v2))


def step_well_spectrum(v0):
    """Bound levels of V = -i v0 on (-1, 0], +i v0 on (0, 1), zero outside."""
    if v0 == 0:
        return []
    return _well_levels([(-1j * v0, 1.0), (1j * v0, 1.0)], abs(v0))
