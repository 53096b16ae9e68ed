"""The three cube-root branches of q and the spectra they generate.

Replacing q_0 by q_k = w^k q_0 (w = exp(2 pi i/3)) rotates every Airy argument
by w^-k.  Ai(w^-k z) and Bi(w^-k z) are again two independent solutions of
the same equation, so in exact arithmetic the characteristic function of
branch k is a constant multiple of that of branch 0 and the eigenfunctions
differ by constant factors.  In floating point, however, both rotated
functions can grow with the same exponential along the box; the boundary
system then loses rank and the residual is pure rounding noise.  Those
energies show up as null-eigenvector bands rather than as levels.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi

import numpy as np

from . import hardbox, rootfind
from .airy import airy_scaled_arrays
from .errors import DegenerateDenominator, NoConvergence, NonFinite
from .hardbox import HardBoxProblem, cube_roots
from .results import Spectrum, make_eigenvalues

OMEGA = np.exp(2j * pi / 3)
MATCH_TOL = 1e-6
IM_TOL = 1e-8
RESOLUTION = 1e-8
NOISE = 1e-15


@dataclass(frozen=True)
class BranchSet:
    q0: complex
    q1: complex
    q2: complex

    def __iter__(self):
        return iter((self.q0, self.q1, self.q2))


@dataclass
class BranchComparison:
    g: complex
    spectra: dict
    repeated: dict
    bands: dict
    proportionality: dict = field(default_factory=dict)


def branch_values(g, negate=False):
    """Roots of q^3 = g^2 (or -g^2 with negate=True)."""
    if g == 0:
        raise ValueError("g must be nonzero")
    return BranchSet(*cube_roots(g, negate))


def _problem(g, k):
    return HardBoxProblem(complex(g), k)


def _fixed_scale_fn(problem, E0):
    _, m0, sc0 = hardbox.characteristic_parts(np.array([E0]), problem)
    m0, sc0 = float(m0[0]), float(sc0[0])

    def fn(E):
        mant, m, _ = hardbox.characteristic_parts(np.array([E]), problem)
        return complex(mant[0] * np.exp(m[0] - m0)) / sc0

    return fn, sc0


def _accept(problem, E):
    """Genuine real level: real to IM_TOL, resolvable above noise, non-null eigenvector."""
    if abs(E.imag) > IM_TOL * max(1.0, abs(E)):
        return False
    Er = E.real
    fn, _ = _fixed_scale_fn(problem, Er)
    slope = abs(rootfind.complex_derivative(fn, complex(Er)))
    # fn is normalised by the scale at Er, so rounding noise is about NOISE
    if slope == 0 or NOISE / slope > RESOLUTION * max(1.0, abs(Er)):
        return False
    return hardbox.null_vector_norm(Er, problem) >= hardbox.NULL_NORM


def branch_real_levels(problem, E_lo, E_hi, step=hardbox.SCAN_STEP):
    """Real levels on one branch from minima of |f| along the real axis."""
    grid = np.arange(E_lo, E_hi + 0.5 * step, step)
    mant, m, scale = hardbox.characteristic_parts(grid, problem)
    logf = np.log(np.abs(mant) + 1e-300) + m
    ratio = np.abs(mant) / scale
    found = []
    for i in range(1, len(grid) - 1):
        if not (logf[i] <= logf[i - 1] and logf[i] <= logf[i + 1]):
            continue
        # a minimum inside rounding noise cannot be resolved; skip it
        if min(ratio[i - 1], ratio[i + 1]) < 1e3 * NOISE:
            continue
        try:
            fn, _ = _fixed_scale_fn(problem, grid[i])
            E = rootfind.newton_complex(fn, complex(grid[i]), tol=1e-13, xtol=1e-15)
        except (NoConvergence, NonFinite):
            continue
        if not (E_lo - step <= E.real <= E_hi + step):
            continue
        if _accept(problem, E) and all(abs(E.real - f) > 1e-9 * max(1, abs(f)) for f in found):
            found.append(E.real)
    return sorted(found)


def _default_hi(g, count):
    g = complex(g)
    if g.imag == 0:
        ref = hardbox.spectrum(HardBoxProblem(g.real), count)
        return max(e.value.real for e in ref.eigenvalues) + 5.0
    gp = (1j * g).real
    ref = hardbox.hermitian_spectrum(gp, count)
    return max(v.real for v in ref.values) + 5.0


def spectrum_on_branch(g, k, count=5, E_window=None):
    """Real levels produced by branch q_k of the Dirichlet matching.

    Branch 0 with real g is the ordinary hard-box spectrum.  Purely imaginary
    g = -i g' selects the Hermitian problem V = g'x, whose branch 0 has real
    Airy arguments.
    """
    g = complex(g)
    if k not in (0, 1, 2):
        raise ValueError("branch must be 0, 1 or 2")
    problem = _problem(g, k)
    if k == 0 and g.imag == 0:
        return hardbox.spectrum(problem, count)
    if E_window is None:
        lo = -abs(g) - 1.0 if problem.is_imaginary else 0.0
        E_window = (lo, _default_hi(g, count))
    levels = branch_real_levels(problem, *E_window)[:count]
    res = [float(hardbox.cancellation_ratio(np.array([E]), problem)[0]) for E in levels]
    return Spectrum("igx-hard" if g.imag == 0 else "gx-hard", g, k,
                    make_eigenvalues(levels, res), "branch")


def proportionality_check(E, g, j, k, x_grid=None):
    """max |r(x) - median r| / |median r| for r = psi_j / psi_k."""
    if x_grid is None:
        x_grid = np.linspace(-1.0, 1.0, 201)
    x = np.asarray(x_grid, dtype=float)
    pj = hardbox.normalized_eigenfunction(E, _problem(g, j), x)
    pk = hardbox.normalized_eigenfunction(E, _problem(g, k), x)
    ok = np.abs(pk) > 1e-8 * np.max(np.abs(pk))
    if np.count_nonzero(ok) < 3:
        raise DegenerateDenominator("too few grid points with a usable denominator")
    r = pj[ok] / pk[ok]
    med = complex(np.median(r.real), np.median(r.imag))
    return float(np.max(np.abs(r - med)) / abs(med))


def pt_phase(E, g, k, n_grid=201):
    """lambda in conj(psi(-x)) = lambda psi(x), psi = C Ai(z) + Bi(z) on branch k.

    Returns (lambda, deviation of the relation from exactness).
    """
    problem = _problem(g, k)
    x = np.linspace(-1.0, 1.0, n_grid)
    zl = problem.z(E, -1.0)
    z = problem.z(E, x)
    al, _, bl, _, zetl = airy_scaled_arrays(np.array([zl]))
    az, _, bz, _, zz = airy_scaled_arrays(z)
    # C Ai(z) with C = -Bi(zl)/Ai(zl), kept in exponent form
    x1 = np.abs(zetl[0].real) + zetl[0] - zz
    x2 = np.abs(zz.real).astype(complex)
    m = max(np.max(x1.real), np.max(x2.real))
    psi = -bl[0] / al[0] * az * np.exp(x1 - m) + bz * np.exp(x2 - m)
    rev = np.conj(psi[::-1])
    i = int(np.argmax(np.abs(psi)))
    lam = rev[i] / psi[i]
    dev = float(np.max(np.abs(rev - lam * psi)) / np.max(np.abs(psi)))
    return complex(lam), dev


def classical_turning_points(g, E):
    """Solutions of E = igx: the single point x = -iE/g.

    Returns ([x], pair_criterion); the +-a + ib pair configuration needs two
    turning points, which a linear potential never provides.
    """
    g = complex(g)
    if g == 0:
        raise ValueError("g must be nonzero")
    return [-1j * complex(E) / g], False


def compare_branches(g, count=5, E_window=None):
    """Per-branch spectra, repeated levels, null bands and proportionality."""
    g = complex(g)
    spectra = {k: spectrum_on_branch(g, k, count, E_window) for k in range(3)}
    base = [e.value.real for e in spectra[0].eigenvalues if e.is_real]
    repeated = {}
    for E0 in base:
        hits = [k for k in (1, 2)
                if any(abs(E0 - v.real) <= MATCH_TOL for v in spectra[k].values)]
        repeated[E0] = hits
    if E_window is None:
        lo = -abs(g) - 1.0 if g.imag != 0 else 0.0
        E_window = (lo, max(base) + 5.0 if base else 100.0)
    bands = {k: hardbox.detect_null_bands(_problem(g, k), *E_window) for k in range(3)}
    prop = {}
    for E0, hits in repeated.items():
        for k in hits:
            prop[(E0, k)] = proportionality_check(E0, g, k, 0)
    return BranchComparison(g, spectra, repeated, bands, prop)


def negated_reading_levels(g, count=5):
    """Real levels when q is taken as the real root of q^3 = -g^2 with z = (E - igx)/q.

    This reading turns the equation into the one for energy -E, so the levels
    come out as the negatives of the q^3 = g^2 spectrum.
    """
    g = float(np.real(g))
    q = -abs(g) ** (2.0 / 3.0)
    ref = hardbox.spectrum(HardBoxProblem(g), count)
    hi = max(abs(v) for v in ref.values) + 5.0

    def f(E):
        Ec = np.asarray(E, dtype=complex)
        mant, m, _ = hardbox.wronskian_parts((Ec + 1j * g) / q, (Ec - 1j * g) / q)
        out = (mant * np.exp(m)).imag
        return float(out[0]) if np.ndim(E) == 0 else out

    br = rootfind.scan_brackets(f, (-hi, hi), hardbox.SCAN_STEP, vectorized=True)
    return [rootfind.refine_real(f, b, 1e-12) for b in br]
