"""Hard box: V = igx for |x| < 1 with Dirichlet walls at x = +-1.

With z(x) = (E - igx)/q and q^3 = g^2, the solution is a combination of
Ai(z) and Bi(z).  The walls at x = -1 and x = +1 sit at s = (E+ig)/q and
t = (E-ig)/q, and the eigenvalue condition is

    f(E) = Ai(s) Bi(t) - Ai(t) Bi(s) = 0.

All Airy products are formed from the scaled functions so that levels far
above the exponential range of Ai and Bi separately are still accessible.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from . import rootfind
from .airy import EXP_LIMIT, airy_scaled_arrays
from .eigensolve import DEFAULT_N, build_hardbox_matrix, eigenvalues
from .errors import (InconsistentC, InsufficientData, NoConvergence, Overflow,
                     PoleAtAiZero, SeedMismatch)
from .results import (EnergyBand, ExceptionalPoint, Spectrum,
                      make_eigenvalues)

OMEGA = np.exp(2j * pi / 3)
G_ZERO = 1e-6
SCAN_STEP = rootfind.SCAN_STEP
SEED_TOL = 1e-2
NULL_NORM = 1e-6
ROOT_TOL = 1e-10
DEFAULT_WINDOW = (0.0, 25 * pi ** 2 / 4 + 10)


def cube_roots(g, negate=False):
    """The three q with q^3 = g^2 (or -g^2), branch 0 first.

    Branch 0 is the root closest to the positive real axis, ties broken
    towards arg q = (2/3) arg g; then q1 = w q0 and q2 = w^2 q0.
    """
    g = complex(g)
    a = -g * g if negate else g * g
    r0 = np.cbrt(abs(a)) * np.exp(1j * np.angle(a) / 3.0)
    cands = [r0 * OMEGA ** k for k in range(3)]
    pref = 2.0 / 3.0 * np.angle(g)
    q0 = min(cands, key=lambda q: (round(abs(np.angle(q)), 12), abs(np.angle(q) - pref)))
    if abs(q0.imag) <= 1e-15 * abs(q0):
        q0 = complex(q0.real, 0.0)
    return q0, q0 * OMEGA, q0 * OMEGA ** 2


@dataclass(frozen=True)
class HardBoxProblem:
    g: complex
    branch: int = 0
    negate: bool = False

    def __post_init__(self):
        if self.branch not in (0, 1, 2):
            raise ValueError("branch must be 0, 1 or 2")
        object.__setattr__(self, "g", complex(self.g))

    @property
    def q(self):
        return cube_roots(self.g, self.negate)[self.branch]

    def z(self, E, x):
        """Airy argument at position x.

        (E - igx)/q_k in general; for purely imaginary g = -i g' (V = g'x) the
        Hermitian form (g'x - E)/q_k with q_k^3 = g'^2 is used, so that branch 0
        has real arguments.
        """
        E = np.asarray(E, dtype=complex)
        x = np.asarray(x, dtype=float)
        if self.is_imaginary and not self.negate:
            gp = (1j * self.g).real
            q = cube_roots(gp)[self.branch]
            return (gp * x - E) / q
        return (E - 1j * self.g * x) / self.q

    @property
    def is_real(self):
        return self.g.imag == 0.0

    @property
    def is_imaginary(self):
        return self.g.real == 0.0 and self.g.imag != 0.0


# ------------------------------------------------------------ Airy products

def wronskian_parts(s, t):
    """Ai(s)Bi(t) - Ai(t)Bi(s) as mantissa*exp(shift).

    Returns (mantissa, shift, scale) where scale = |Ai(s)Bi(t)| + |Ai(t)Bi(s)|
    in the same units as the mantissa; |mantissa|/scale measures how far the
    two products are from cancelling.
    """
    as_, _, bs, _, zs = airy_scaled_arrays(s)
    at, _, bt, _, zt = airy_scaled_arrays(t)
    x1 = -zs + np.abs(zt.real)
    x2 = -zt + np.abs(zs.real)
    m = np.maximum(x1.real, x2.real)
    t1 = as_ * bt * np.exp(x1 - m)
    t2 = at * bs * np.exp(x2 - m)
    return t1 - t2, m, np.abs(t1) + np.abs(t2)


def _endpoints(E, problem):
    return problem.z(E, -1.0), problem.z(E, 1.0)


def characteristic_parts(E, problem):
    _check_g(problem)
    s, t = _endpoints(E, problem)
    return wronskian_parts(s, t)


def _check_g(problem):
    if abs(problem.g) < G_ZERO:
        raise ValueError("characteristic undefined for g = 0; use the box formula")


def _unscale(mant, m):
    if np.any(m > EXP_LIMIT):
        raise Overflow("characteristic exceeds the double range")
    return mant * np.exp(m)


def characteristic(E, problem):
    """Ai(s)Bi(t) - Ai(t)Bi(s) on the selected branch of q."""
    mant, m, _ = characteristic_parts(E, problem)
    out = _unscale(mant, m)
    return complex(out[0]) if np.ndim(E) == 0 else out


def real_characteristic(E, problem):
    """Im f(E): for real g and real E on branch 0, f is i times a real function."""
    if not problem.is_real or problem.branch != 0 or problem.negate:
        raise ValueError("real_characteristic needs real g on branch 0")
    mant, m, _ = characteristic_parts(np.asarray(E, dtype=float), problem)
    out = _unscale(mant, m).imag
    return float(out[0]) if np.ndim(E) == 0 else out


def cancellation_ratio(E, problem):
    mant, _, scale = characteristic_parts(E, problem)
    return np.abs(mant) / scale


def box_levels(count):
    n = np.arange(1, count + 1)
    return n * n * pi ** 2 / 4.0


# ------------------------------------------------------------ spectra

def real_roots(problem, E_lo, E_hi, step=SCAN_STEP, tol=1e-12):
    f = lambda E: real_characteristic(E, problem)
    br = rootfind.scan_brackets(f, (E_lo, E_hi), step, vectorized=True)
    return [rootfind.refine_real(f, b, tol) for b in br]


def _newton_fixed_scale(problem, seed, tol=1e-12):
    """Complex Newton on f scaled by a constant fixed at the seed."""
    _, m0, sc0 = characteristic_parts(np.array([seed]), problem)
    m0, sc0 = float(m0[0]), float(sc0[0])

    def fn(E):
        mant, m, _ = characteristic_parts(np.array([E]), problem)
        return complex(mant[0] * np.exp(m[0] - m0)) / sc0

    return rootfind.newton_complex(fn, seed, tol=tol, xtol=1e-15)


def _residual(E, problem):
    return float(cancellation_ratio(np.array([E]), problem)[0])


def spectrum(problem, count=5, window=None):
    """Lowest `count` eigenvalues of the hard box.

    Matrix eigenvalues supply the expected count and the complex seeds; real
    levels come from a sign-change scan of the real characteristic, complex
    ones from Newton iteration.  Every level is checked against its seed.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if abs(problem.g) < G_ZERO:
        ev = make_eigenvalues(box_levels(count))
        return Spectrum("igx-hard", problem.g, problem.branch, ev, "exact")
    if problem.is_imaginary and not problem.negate:
        gp = (1j * problem.g).real
        sp = hermitian_spectrum(gp, count, branch=problem.branch)
        return Spectrum("igx-hard", problem.g, problem.branch, sp.eigenvalues, sp.method)
    if not problem.is_real or problem.branch != 0 or problem.negate:
        raise ValueError("use branches.spectrum_on_branch for complex branches")

    N = max(DEFAULT_N, 2 * count + 10)
    seeds = [e.value for e in eigenvalues(build_hardbox_matrix(problem.g, N), tol=1e-8)][:count]
    re = [s.real for s in seeds]
    lo = min(0.0, min(re) - 5.0)
    hi = max(re) + 5.0
    if window is not None:
        lo, hi = min(lo, window[0]), max(hi, window[1])
    found = [complex(r, 0.0) for r in real_roots(problem, lo, hi)]
    for s in seeds:
        if s.imag > 0 and abs(s.imag) > 1e-7 * max(1.0, abs(s)):
            z = _newton_fixed_scale(problem, s)
            found += [z, z.conjugate()]
    ev = make_eigenvalues(found, [_residual(z, problem) for z in found])[:count]
    for e in ev:
        d = min(abs(e.value - s) for s in seeds)
        if d > SEED_TOL:
            raise SeedMismatch(f"level {e.value:.6g} is {d:.2e} from the nearest matrix eigenvalue")
    for s in seeds:
        d = min(abs(e.value - s) for e in ev)
        if d > SEED_TOL:
            raise SeedMismatch(f"matrix eigenvalue {s:.6g} has no transcendental partner")
    return Spectrum("igx-hard", problem.g, problem.branch, ev, "transcendental")


def matrix_spectrum(g, count=5, n=DEFAULT_N):
    ev = eigenvalues(build_hardbox_matrix(g, n), tol=1e-8)[:count]
    return Spectrum("igx-hard", complex(g), 0, ev, "matrix")


# ------------------------------------------------------------ eigenfunctions

def _scaled_airy(z):
    return airy_scaled_arrays(np.asarray(z, dtype=complex))


def coefficient_C(E, problem):
    """Both expressions -Bi(s)/Ai(s) and -Bi(t)/Ai(t) and their relative difference."""
    s, t = _endpoints(np.array([E]), problem)
    out = []
    for z in (s, t):
        ai, dai, bi, _, zt = _scaled_airy(z)
        ai, dai, bi, zt = ai[0], dai[0], bi[0], zt[0]
        # distance to the nearest Airy zero is about |Ai/Ai'|
        if ai == 0 or abs(ai) <= 1e-12 * abs(dai):
            raise PoleAtAiZero(f"Ai vanishes at {z[0]}")
        ex = zt + abs(zt.real)
        if ex.real > EXP_LIMIT:
            raise Overflow("coefficient C exceeds the double range")
        out.append(-bi / ai * np.exp(ex))
    c1, c2 = out
    rel = abs(c1 - c2) / max(abs(c1), abs(c2))
    return complex(c1), complex(c2), float(rel)


def psi_parts(z_left, z):
    """psi = Bi(zl)Ai(z) - Ai(zl)Bi(z), which vanishes where z = zl, with a common scale.

    z_left has shape (...) and z shape (..., n).  Returns psi/exp(shift) and
    max|term1|, max|term2| over the last axis, all in the same units.
    """
    zl = np.asarray(z_left, dtype=complex)[..., None]
    z = np.asarray(z, dtype=complex)
    as_, _, bs, _, zs = _scaled_airy(zl)
    az, _, bz, _, zz = _scaled_airy(z)
    x1 = np.abs(zs.real) - zz
    x2 = -zs + np.abs(zz.real)
    m = np.maximum(np.max(x1.real, axis=-1), np.max(x2.real, axis=-1))[..., None]
    t1 = bs * az * np.exp(x1 - m)
    t2 = as_ * bz * np.exp(x2 - m)
    return t1 - t2, np.max(np.abs(t1), axis=-1), np.max(np.abs(t2), axis=-1)


def _psi_parts(E, problem, x):
    return psi_parts(complex(problem.z(E, -1.0)), problem.z(E, x))


def normalized_eigenfunction(E, problem, x):
    """Eigenfunction scaled to max|psi| = 1, phase fixed by the largest entry."""
    psi, _, _ = _psi_parts(E, problem, x)
    k = int(np.argmax(np.abs(psi)))
    return psi / psi[k]


def null_vector_norm(E, problem, n_grid=201):
    """max|psi| relative to |a| max|Ai| + |b| max|Bi| for the boundary null vector.

    Accepts a scalar or an array of energies.
    """
    x = np.linspace(-1.0, 1.0, n_grid)
    Ea = np.atleast_1d(np.asarray(E, dtype=complex))
    psi, m1, m2 = psi_parts(problem.z(Ea, -1.0), problem.z(Ea[:, None], x[None, :]))
    out = np.max(np.abs(psi), axis=-1) / (m1 + m2)
    return float(out[0]) if np.ndim(E) == 0 else out


def eigenfunction(E, problem, x_grid):
    """psi(x) = C Ai(z) + Bi(z) with C = -Bi(s)/Ai(s)."""
    c1, c2, rel = coefficient_C(E, problem)
    if rel > 1e-6:
        raise InconsistentC(f"the two expressions for C differ by {rel:.2e}")
    z = problem.z(E, x_grid)
    ai, _, bi, _, zt = _scaled_airy(z)
    if np.any(np.abs(zt.real) > EXP_LIMIT):
        raise Overflow("eigenfunction exceeds the double range")
    return c1 * ai * np.exp(-zt) + bi * np.exp(np.abs(zt.real))


def pt_deviation(E, problem, n_grid=201):
    """Deviation from psi(-x) = c conj(psi(x)) with |c| = 1."""
    x = np.linspace(-1.0, 1.0, n_grid)
    psi = normalized_eigenfunction(E, problem, x)
    rev = psi[::-1]
    k = int(np.argmax(np.abs(psi)))
    c = rev[k] / np.conj(psi[k])
    return float(max(np.max(np.abs(rev - c * np.conj(psi))), abs(abs(c) - 1.0)))


# ------------------------------------------------------------ exceptional points

def _match(prev, cur):
    """Indices of prev roots without a partner in cur (greedy nearest matching)."""
    pairs = sorted(((abs(p - c), i, j) for i, p in enumerate(prev) for j, c in enumerate(cur)))
    used_p, used_c = set(), set()
    for d, i, j in pairs:
        if i in used_p or j in used_c:
            continue
        used_p.add(i)
        used_c.add(j)
    return [i for i in range(len(prev)) if i not in used_p]


def ground_level(g, window=DEFAULT_WINDOW):
    """Lowest real eigenvalue at real coupling g."""
    if abs(g) < G_ZERO:
        return pi ** 2 / 4
    lo, hi = window
    while True:
        r = real_roots(HardBoxProblem(g), lo, hi)
        if r:
            return r[0]
        lo, hi = hi, 2 * hi


def exceptional_points(g_lo, g_hi, dg=0.25, jump_offset=0.005, E_max=None):
    """Coalescences of adjacent real levels for g in [g_lo, g_hi]."""
    if not 0 < g_lo < g_hi:
        raise ValueError("need 0 < g_lo < g_hi")
    E_lo = 0.0
    E_hi = E_max if E_max is not None else max(DEFAULT_WINDOW[1], 1.5 * g_hi)
    n = max(1, int(np.ceil((g_hi - g_lo) / dg)))
    gs = np.linspace(g_lo, g_hi, n + 1)
    f = lambda g, E: real_characteristic(E, HardBoxProblem(g))
    prev = real_roots(HardBoxProblem(gs[0]), E_lo, E_hi)
    out = []
    for i in range(1, len(gs)):
        cur = real_roots(HardBoxProblem(gs[i]), E_lo, E_hi)
        lost = _match(prev, cur)
        # ignore roots that simply moved out of the top of the window
        lost = [k for k in lost if prev[k] < E_hi - 2.0]
        k = 0
        while k + 1 < len(lost):
            a, b = lost[k], lost[k + 1]
            if b != a + 1:
                k += 1
                continue
            lo = 0.5 * (prev[a] + prev[a - 1]) if a > 0 else max(E_lo, prev[a] - 1.0)
            hi = 0.5 * (prev[b] + prev[b + 1]) if b + 1 < len(prev) else prev[b] + 1.0
            try:
                ep = rootfind.find_coalescence(f, (gs[i - 1], gs[i]), (lo, hi), vectorized=True)
            except NoConvergence as exc:
                raise rootfind.LostRoot(f"coalescence search failed: {exc}",
                                        gs[i - 1], prev[a]) from exc
            below = ground_level(ep.g_c - jump_offset)
            above = ground_level(ep.g_c + jump_offset)
            out.append(ExceptionalPoint(ep.g_c, ep.E_c, a, above - below, below, above,
                                        ep.residuals))
            k += 2
        prev = cur
    return out


# ------------------------------------------------------------ null bands

def detect_null_bands(problem, E_lo, E_hi, step=SCAN_STEP, root_tol=ROOT_TOL,
                      norm_threshold=NULL_NORM):
    """Energy intervals whose boundary system is numerically singular without a state.

    A grid energy is flagged when the two Airy products in f cancel to within
    root_tol (so f is numerically zero) while the null vector of the boundary
    system reconstructs a function with max|psi| below norm_threshold times
    the size of its Airy components.  Runs of two or more flagged points are
    merged into bands.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    grid = np.arange(E_lo, E_hi + 0.5 * step, step)
    ratio = cancellation_ratio(grid, problem)
    flag = np.zeros(grid.shape, dtype=bool)
    cand = np.nonzero(ratio <= root_tol)[0]
    if len(cand):
        flag[cand] = null_vector_norm(grid[cand], problem) < norm_threshold
    bands = []
    i = 0
    while i < len(grid):
        if flag[i]:
            j = i
            while j + 1 < len(grid) and flag[j + 1]:
                j += 1
            if j > i:
                bands.append(EnergyBand(problem.g, float(grid[i]), float(grid[j]), norm_threshold))
            i = j + 1
        else:
            i += 1
    return bands


# ------------------------------------------------------------ Hermitian counterpart

def hermitian_problem(gp, branch=0):
    """V = gp x written as igx with g = -i gp."""
    return HardBoxProblem(-1j * float(gp), branch)


def hermitian_parts(E, gp, branch=0):
    """Ai(s)Bi(t) - Ai(t)Bi(s) for V = gp x with s, t = (-+gp - E)/q, q^3 = gp^2."""
    return characteristic_parts(E, hermitian_problem(gp, branch))


def hermitian_cancellation(E, gp, branch=0):
    mant, _, scale = hermitian_parts(E, gp, branch)
    return np.abs(mant) / scale


def hermitian_characteristic(E, gp, branch=0):
    mant, m, _ = hermitian_parts(E, gp, branch)
    out = _unscale(mant, m)
    return complex(out[0]) if np.ndim(E) == 0 else out


def hermitian_spectrum(gp, count=5, branch=0):
    """Levels of V = gp x in the box (real gp), all real."""
    gp = float(np.real(gp))
    if abs(gp) < G_ZERO:
        return Spectrum("gx-hard", gp, branch, make_eigenvalues(box_levels(count)), "exact")
    if branch != 0:
        from .branches import spectrum_on_branch
        return spectrum_on_branch(-1j * gp, branch, count)
    f = lambda E: hermitian_characteristic(np.asarray(E, dtype=float), gp).real
    lo = -abs(gp) - 1.0
    hi = count * count * pi ** 2 / 4 + abs(gp) + 10.0
    while True:
        br = rootfind.scan_brackets(f, (lo, hi), SCAN_STEP, vectorized=True)
        if len(br) >= count:
            break
        hi *= 1.5
    roots = [rootfind.refine_real(f, b, 1e-12) for b in br[:count]]
    res = [float(hermitian_cancellation(np.array([r]), gp)[0]) for r in roots]
    return Spectrum("gx-hard", gp, 0, make_eigenvalues(roots, res), "transcendental")


# ------------------------------------------------------------ asymptotics

def asymptotic_check(s):
    """Slope of log E_n against log n over the upper half of the real levels."""
    levels = [(n + 1, e.value.real) for n, e in enumerate(s.eigenvalues) if e.is_real]
    if len(levels) < 10:
        raise InsufficientData("need at least 10 real levels")
    top = levels[len(levels) // 2:]
    n = np.log([a for a, _ in top])
    E = np.log([b for _, b in top])
    return float(np.polyfit(n, E, 1)[0])
