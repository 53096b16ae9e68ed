"""Real and complex root location, continuation in a parameter, coalescence."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi

import numpy as np
from scipy.optimize import brentq

from .errors import LostRoot, NoConvergence, NonFinite, RootOnContour, ToleranceNotMet
from .results import ExceptionalPoint

SCAN_STEP = 0.05
COALESCE_TOL = 1e-4
FD_REL = 1e-6
FD_JAC = 1e-4


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float


@dataclass
class RootPath:
    g: list = field(default_factory=list)
    E: list = field(default_factory=list)
    coalesced: bool = False
    coalescence: tuple | None = None


def scan_brackets(f, interval, step=SCAN_STEP, grid=None, vectorized=False):
    """Sign-change brackets of f on a uniform grid (or on `grid` if given).

    Roots closer together than about 2*step can be missed.  With
    vectorized=True, f is called once on the whole grid.
    """
    if grid is None:
        lo, hi = interval
        if step <= 0:
            raise ValueError("step must be positive")
        n = max(1, int(np.ceil((hi - lo) / step)))
        grid = np.linspace(lo, hi, n + 1)
    grid = np.asarray(grid, dtype=float)
    if vectorized:
        vals = np.asarray(f(grid), dtype=float)
    else:
        vals = np.array([f(x) for x in grid], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFinite("function returned non-finite values on the scan grid")
    out = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            # exact zero on a node: report a degenerate bracket once
            if i == 0 or vals[i - 1] != 0.0:
                out.append(Bracket(grid[i], grid[i], a, a))
            continue
        if np.sign(a) != np.sign(b) and b != 0.0:
            out.append(Bracket(grid[i], grid[i + 1], a, b))
    if len(grid) > 1 and vals[-1] == 0.0 and vals[-2] != 0.0:
        out.append(Bracket(grid[-1], grid[-1], 0.0, 0.0))
    return out


def refine_real(f, bracket, tol=1e-12):
    """Brent's method inside a sign-change bracket."""
    if bracket.lo == bracket.hi:
        return bracket.lo
    try:
        x, res = brentq(f, bracket.lo, bracket.hi, xtol=tol, rtol=4 * np.finfo(float).eps,
                        maxiter=500, full_output=True)
    except ValueError as exc:
        raise ToleranceNotMet(str(exc)) from exc
    if not res.converged or not np.isfinite(f(x)):
        raise ToleranceNotMet("Brent iteration did not converge")
    return min(max(x, bracket.lo), bracket.hi)


def complex_derivative(f, z, rel=FD_REL):
    h = rel * max(1.0, abs(z))
    return (f(z + h) - f(z - h)) / (2 * h)


def newton_complex(f, seed, tol=1e-10, maxiter=100, xtol=0.0):
    """Newton iteration with a central-difference derivative.

    Converged when |f| <= tol, or when the step falls below xtol*max(1,|z|).
    """
    z = complex(seed)
    if not np.isfinite(z):
        raise NonFinite("seed is not finite")
    for _ in range(maxiter):
        fz = f(z)
        if not np.isfinite(fz):
            raise NonFinite(f"non-finite value at {z}")
        if abs(fz) <= tol:
            return z
        d = complex_derivative(f, z)
        if abs(d) < 1e-14:
            raise NoConvergence(f"derivative vanished near {z}")
        dz = fz / d
        z = z - dz
        if abs(dz) <= xtol * max(1.0, abs(z)):
            return z
    if abs(f(z)) <= tol:
        return z
    raise NoConvergence(f"Newton did not converge from seed {seed}")


def _phase_change(f, a, b, depth=0):
    fa, fb = f(a), f(b)
    d = np.angle(fb / fa)
    if abs(d) < pi / 4 or depth > 30:
        return d
    m = 0.5 * (a + b)
    return _phase_change(f, a, m, depth + 1) + _phase_change(f, m, b, depth + 1)


def count_roots_rect(f, rect, samples_per_edge=64):
    """Winding number of f around the rectangle (re_lo, re_hi, im_lo, im_hi)."""
    x0, x1, y0, y1 = rect
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    pts = []
    for k in range(4):
        a, b = corners[k], corners[(k + 1) % 4]
        t = np.linspace(0.0, 1.0, samples_per_edge, endpoint=False)
        pts.extend(a + (b - a) * t)
    pts.append(corners[0])
    vals = np.array([f(p) for p in pts])
    if not np.all(np.isfinite(vals)):
        raise NonFinite("non-finite value on the contour")
    if np.min(np.abs(vals)) < 1e-12:
        raise RootOnContour("f vanishes on the contour")
    total = 0.0
    for i in range(len(pts) - 1):
        d = np.angle(vals[i + 1] / vals[i])
        if abs(d) >= pi / 4:
            d = _phase_change(f, pts[i], pts[i + 1])
        total += d
    return int(round(total / (2 * pi)))


def _local_real_roots(f1, center, half, n=41):
    grid = np.linspace(center - half, center + half, n)
    roots = []
    for b in scan_brackets(f1, None, grid=grid):
        roots.append(refine_real(f1, b, 1e-13))
    return roots


def track_root(f, E0, g0, g1, steps=50, window=None):
    """Continue a real root of f(g, E) from g0 to g1.

    A coalescence is flagged when the nearest other root comes within
    COALESCE_TOL, or when the root disappears between two steps; in the second
    case the exceptional point is located with find_coalescence.
    """
    gs = np.linspace(g0, g1, steps + 1)
    path = RootPath(g=[float(gs[0])], E=[float(E0)])
    bound = window if window is not None else max(0.5, 10 * abs(g1 - g0) / steps + 0.2)
    E = E0
    for i in range(1, len(gs)):
        g = gs[i]
        f1 = lambda x, g=g: f(g, x)
        roots = _local_real_roots(f1, E, bound)
        if not roots:
            # lost the root: check for a coalescence inside the last step
            try:
                ep = find_coalescence(f, (gs[i - 1], g), (E - bound, E + bound))
            except NoConvergence as exc:
                raise LostRoot(str(exc), gs[i - 1], E) from exc
            path.g.append(ep.g_c)
            path.E.append(ep.E_c)
            path.coalesced = True
            path.coalescence = (ep.g_c, ep.E_c)
            return path
        k = int(np.argmin([abs(r - E) for r in roots]))
        E_new = roots[k]
        path.g.append(float(g))
        path.E.append(E_new)
        others = [r for j, r in enumerate(roots) if j != k]
        if others and min(abs(r - E_new) for r in others) < COALESCE_TOL:
            path.coalesced = True
            path.coalescence = (g, E_new)
            return path
        E = E_new
    return path


def _pair_present(f, g, window, n=400, vectorized=False):
    lo, hi = window
    grid = np.linspace(lo, hi, n + 1)
    return len(scan_brackets(lambda x: f(g, x), None, grid=grid, vectorized=vectorized)) >= 2


def find_coalescence(f, g_bracket, E_window, tol=1e-8, scan_points=400, vectorized=False):
    """Exceptional point of f(g, E): simultaneous f = 0 and df/dE = 0.

    The pair of real roots must exist at g_bracket[0] and be absent at
    g_bracket[1].  Bisection on g (pair present / absent) narrows the bracket,
    then a 2-D Newton iteration with a finite-difference Jacobian refines.
    With vectorized=True, f(g, E) must accept an array of E.
    """
    ga, gb = map(float, g_bracket)
    lo, hi = map(float, E_window)
    if not _pair_present(f, ga, (lo, hi), scan_points, vectorized):
        raise NoConvergence("no root pair at the start of the coalescence bracket")
    if _pair_present(f, gb, (lo, hi), scan_points, vectorized):
        raise NoConvergence("root pair still present at the end of the bracket")
    E_guess = 0.5 * (lo + hi)
    for _ in range(40):
        gm = 0.5 * (ga + gb)
        grid = np.linspace(lo, hi, scan_points + 1)
        br = scan_brackets(lambda x: f(gm, x), None, grid=grid, vectorized=vectorized)
        if len(br) >= 2:
            ga = gm
            r = [refine_real(lambda x: f(gm, x), b, 1e-13) for b in br[:2]]
            E_guess = 0.5 * (r[0] + r[1])
            w = max(abs(r[1] - r[0]), 1e-6)
            lo, hi = E_guess - 2 * w, E_guess + 2 * w
        else:
            gb = gm
        if gb - ga < 1e-7 * max(1.0, abs(ga)):
            break
    g, E = 0.5 * (ga + gb), E_guess
    return _newton_ep(f, g, E, tol)


def _fs(f, g, E):
    h = FD_REL * max(1.0, abs(E))
    fv = f(g, E)
    fe = (f(g, E + h) - f(g, E - h)) / (2 * h)
    return np.array([fv, fe], dtype=float)


def _newton_ep(f, g, E, tol):
    # residuals are measured against the size of f a short distance away
    d = 0.05 * max(1.0, abs(E))
    scale = max(abs(f(g, E + d)), abs(f(g, E - d)), 1e-300)
    norm = np.array([1.0 / scale, d / scale])
    for _ in range(60):
        F = _fs(f, g, E)
        if np.all(np.abs(F * norm) <= tol):
            break
        hg = FD_JAC * max(1.0, abs(g))
        hE = FD_JAC * max(1.0, abs(E))
        J = np.column_stack([(_fs(f, g + hg, E) - _fs(f, g - hg, E)) / (2 * hg),
                             (_fs(f, g, E + hE) - _fs(f, g, E - hE)) / (2 * hE)])
        try:
            dg, dE = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence("singular Jacobian at the exceptional point") from exc
        g, E = g + dg, E + dE
        if abs(dg) < 1e-15 * max(1, abs(g)) and abs(dE) < 1e-15 * max(1, abs(E)):
            break
    res = np.abs(_fs(f, g, E) * norm)
    if np.all(res <= tol):
        return ExceptionalPoint(g_c=float(g), E_c=float(E), residuals=tuple(res))
    raise NoConvergence(f"exceptional point residuals {res} above {tol}")
