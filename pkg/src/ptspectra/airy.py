"""Airy functions Ai, Bi and derivatives for complex argument.

Three regimes, chosen by |z|:

* |z| <= R_SERIES: Maclaurin series.
* R_SERIES < |z| < R_ASYM: Taylor stepping of w'' = z w along a ray, started
  from the series (outward) or from the asymptotic expansion (inward), so that
  the integrated solution is always the growing one.
* |z| >= R_ASYM: asymptotic expansion of Ai, rotated into |arg| <= 2pi/3
  with the connection formula.

Bi outside the series disk is built from Ai(w z) and Ai(w^2 z).

Besides plain values a scaled form is available, Ai = eai*exp(-zeta) and
Bi = ebi*exp(|Re zeta|) with zeta = (2/3) z^(3/2), which stays finite far
beyond the double precision range of the plain functions.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gamma, pi, sqrt

import numpy as np

from .errors import NonFinite, Overflow

R_SERIES = 3.0
R_ASYM = 14.0
STEP_MAX = 0.5
SERIES_RTOL = 1e-17
SERIES_CAP = 200
ASYM_TERMS = 10
TAYLOR_TERMS = 32
# exp overflows near 709.78
EXP_LIMIT = 700.0

OMEGA = np.exp(2j * pi / 3)
_C1 = 3.0 ** (-2.0 / 3.0) / gamma(2.0 / 3.0)
_C2 = 3.0 ** (-1.0 / 3.0) / gamma(1.0 / 3.0)
_SQ3 = sqrt(3.0)
_SQPI2 = 2.0 * sqrt(pi)
_EP6 = np.exp(1j * pi / 6)
_EP56 = np.exp(5j * pi / 6)


def _asym_coeffs(n):
    u = [1.0]
    for k in range(1, n + 1):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k))
    v = [1.0] + [-(6 * k + 1) / (6.0 * k - 1) * u[k] for k in range(1, n + 1)]
    return np.array(u), np.array(v)


_U, _V = _asym_coeffs(ASYM_TERMS)


def zeta(z):
    """(2/3) z^(3/2) on the principal branch."""
    # +0j turns a signed -0.0 imaginary part into +0.0 (principal side of the cut)
    z = np.asarray(z, dtype=complex) + 0j
    return 2.0 / 3.0 * z * np.sqrt(z)


@dataclass(frozen=True)
class AiryValues:
    ai: complex
    dai: complex
    bi: complex
    dbi: complex

    @property
    def wronskian(self):
        return self.ai * self.dbi - self.dai * self.bi


@dataclass(frozen=True)
class ScaledAiry:
    """Ai = ai*exp(-zeta), Bi = bi*exp(|Re zeta|), same factors on derivatives."""
    ai: complex
    dai: complex
    bi: complex
    dbi: complex
    zeta: complex

    def unscaled(self):
        ea = np.exp(-self.zeta)
        eb = np.exp(abs(self.zeta.real))
        return AiryValues(self.ai * ea, self.dai * ea, self.bi * eb, self.dbi * eb)


# ---------------------------------------------------------------- regimes

def _series(z):
    """Maclaurin series; returns Ai, Ai', Bi, Bi' as arrays."""
    z3 = z ** 3
    tf = np.ones_like(z)          # f terms
    tg = z.copy()                 # g terms
    df = np.zeros_like(z)         # f' terms (start at k=1)
    dg = np.ones_like(z)          # g' terms
    f, g, fp, gp = tf.copy(), tg.copy(), df.copy(), dg.copy()
    df = z * z / 2.0
    fp = fp + df
    for k in range(SERIES_CAP):
        tf = tf * z3 / ((3 * k + 2) * (3 * k + 3))
        tg = tg * z3 / ((3 * k + 3) * (3 * k + 4))
        dg = dg * z3 / ((3 * k + 1) * (3 * k + 3))
        if k >= 1:
            df = df * z3 / ((3 * k) * (3 * k + 2))
            fp = fp + df
        f = f + tf
        g = g + tg
        gp = gp + dg
        small = (np.abs(tf) <= SERIES_RTOL * np.abs(f)) & (np.abs(tg) <= SERIES_RTOL * np.abs(g))
        small &= (np.abs(df) <= SERIES_RTOL * np.abs(fp)) & (np.abs(dg) <= SERIES_RTOL * np.abs(gp))
        if np.all(small | (z == 0)):
            break
    ai = _C1 * f - _C2 * g
    dai = _C1 * fp - _C2 * gp
    bi = _SQ3 * (_C1 * f + _C2 * g)
    dbi = _SQ3 * (_C1 * fp + _C2 * gp)
    return ai, dai, bi, dbi


def _asym_ai(z):
    """Ai(z) = S*exp(-zeta), Ai'(z) = Sd*exp(-zeta) for |arg z| <= 2pi/3."""
    zt = zeta(z)
    r = 1.0 / zt
    s = np.zeros_like(z)
    sd = np.zeros_like(z)
    p = np.ones_like(z)
    last = np.full(z.shape, np.inf)
    for k in range(ASYM_TERMS + 1):
        term = (-1) ** k * _U[k] * p
        mag = np.abs(term)
        # stop at the smallest term of the divergent series
        use = mag < last
        s = s + np.where(use, term, 0)
        sd = sd + np.where(use, (-1) ** k * _V[k] * p, 0)
        last = np.where(use, mag, 0.0)
        p = p * r
    q4 = z ** 0.25
    return s / (_SQPI2 * q4), -q4 * sd / _SQPI2, -zt


def _outer_ai(z, target):
    """Ai(z)*exp(-target), Ai'(z)*exp(-target) for |z| >= R_ASYM, any arg."""
    ang = np.abs(np.angle(z))
    direct = ang <= 2 * pi / 3
    ai = np.zeros_like(z)
    dai = np.zeros_like(z)
    if np.any(direct):
        s, sd, ex = _asym_ai(z[direct])
        e = np.exp(ex - target[direct])
        ai[direct] = s * e
        dai[direct] = sd * e
    rot = ~direct
    if np.any(rot):
        zr = z[rot]
        tr = target[rot]
        # Ai(z) = -w Ai(wz) - w^2 Ai(w^2 z); Ai'(z) = -w^2 Ai'(wz) - w Ai'(w^2 z)
        acc_a = np.zeros_like(zr)
        acc_d = np.zeros_like(zr)
        for w, ca, cd in ((OMEGA, -OMEGA, -OMEGA ** 2), (OMEGA ** 2, -OMEGA ** 2, -OMEGA)):
            s, sd, ex = _asym_ai(w * zr)
            e = np.exp(ex - tr)
            acc_a += ca * s * e
            acc_d += cd * sd * e
        ai[rot] = acc_a
        dai[rot] = acc_d
    return ai, dai


def _taylor_step(w, dw, z0, h):
    """Advance (w, w') of w'' = z w from z0 to z0+h with a local Taylor series."""
    a = [w, dw * h, z0 * w * h * h / 2.0]
    zh2 = z0 * h * h
    h3 = h ** 3
    for n in range(1, TAYLOR_TERMS):
        a.append((zh2 * a[n] + h3 * a[n - 1]) / ((n + 1) * (n + 2)))
    val = np.zeros_like(w)
    der = np.zeros_like(w)
    for n, an in enumerate(a):
        val = val + an
        if n:
            der = der + n * an
    return val, der / h


def _integrate(w, dw, z_from, z_to):
    dist = np.abs(z_to - z_from)
    nsteps = np.maximum(1, np.ceil(dist / STEP_MAX).astype(int))
    h = (z_to - z_from) / nsteps
    zc = z_from.copy()
    for i in range(int(nsteps.max())):
        act = i < nsteps
        if not np.any(act):
            break
        nv, nd = _taylor_step(w[act], dw[act], zc[act], h[act])
        w[act] = nv
        dw[act] = nd
        zc[act] = zc[act] + h[act]
    return w, dw


def _annulus_ai(z):
    """Unscaled Ai, Ai' for R_SERIES < |z| < R_ASYM."""
    u = z / np.abs(z)
    inward = np.abs(np.angle(z)) <= pi / 3
    ai = np.zeros_like(z)
    dai = np.zeros_like(z)
    if np.any(inward):
        zs = R_ASYM * u[inward]
        w, dw = _outer_ai(zs, np.zeros(zs.shape, dtype=complex))
        ai[inward], dai[inward] = _integrate(w, dw, zs, z[inward])
    out = ~inward
    if np.any(out):
        zs = R_SERIES * u[out]
        w, dw, _, _ = _series(zs)
        ai[out], dai[out] = _integrate(w, dw, zs, z[out])
    return ai, dai


def _ai_scaled_to(z, target):
    """Ai(z)*exp(-target), Ai'(z)*exp(-target), any z."""
    r = np.abs(z)
    ai = np.zeros_like(z)
    dai = np.zeros_like(z)
    far = r >= R_ASYM
    if np.any(far):
        ai[far], dai[far] = _outer_ai(z[far], target[far])
    near = ~far
    if np.any(near):
        zn = z[near]
        inner = np.abs(zn) <= R_SERIES
        a = np.zeros_like(zn)
        d = np.zeros_like(zn)
        if np.any(inner):
            s = _series(zn[inner])
            a[inner], d[inner] = s[0], s[1]
        mid = ~inner
        if np.any(mid):
            a[mid], d[mid] = _annulus_ai(zn[mid])
        e = np.exp(-target[near])
        ai[near] = a * e
        dai[near] = d * e
    return ai, dai


# ---------------------------------------------------------------- public

def airy_scaled_arrays(z):
    """Vectorised scaled Airy functions.

    Returns (eai, edai, ebi, edbi, zeta) with Ai = eai*exp(-zeta) and
    Bi = ebi*exp(|Re zeta|).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if not np.all(np.isfinite(z)):
        raise NonFinite("Airy argument is not finite")
    shape = z.shape
    z = z.ravel() + 0j
    # real Taylor coefficients: evaluate the upper half-plane, reflect the rest
    lower = z.imag < 0
    z = np.where(lower, z.conj(), z)
    zt = zeta(z)
    eai, edai = _ai_scaled_to(z, -zt)
    tb = np.abs(zt.real).astype(complex)
    ebi = np.zeros_like(z)
    edbi = np.zeros_like(z)
    inner = np.abs(z) <= R_SERIES
    if np.any(inner):
        _, _, b, db = _series(z[inner])
        e = np.exp(-tb[inner])
        ebi[inner] = b * e
        edbi[inner] = db * e
    out = ~inner
    if np.any(out):
        zo = z[out]
        to = tb[out]
        a1, d1 = _ai_scaled_to(OMEGA * zo, to)
        a2, d2 = _ai_scaled_to(OMEGA.conjugate() * zo, to)
        ebi[out] = _EP6 * a1 + _EP6.conjugate() * a2
        edbi[out] = _EP56 * d1 + _EP56.conjugate() * d2
    # Ai, Bi are real on the real axis; zeta is imaginary for z < 0
    real = z.imag == 0
    if np.any(real):
        ph = np.exp(1j * zt[real].imag)
        eai[real] = (eai[real] / ph).real * ph
        edai[real] = (edai[real] / ph).real * ph
        ebi[real] = ebi[real].real
        edbi[real] = edbi[real].real
    out = [eai, edai, ebi, edbi, zt]
    for a in out:
        a[lower] = a[lower].conj()
    return tuple(a.reshape(shape) for a in out)


def airy_arrays(z):
    """Vectorised plain Ai, Ai', Bi, Bi'. Raises Overflow when out of range."""
    eai, edai, ebi, edbi, zt = airy_scaled_arrays(z)
    if np.any(np.abs(zt.real) > EXP_LIMIT):
        raise Overflow("Airy function magnitude exceeds the double range")
    ea = np.exp(-zt)
    eb = np.exp(np.abs(zt.real))
    out = [eai * ea, edai * ea, ebi * eb, edbi * eb]
    real = (np.atleast_1d(np.asarray(z, dtype=complex)).imag == 0).reshape(out[0].shape)
    if np.any(real):
        for a in out:
            a[real] = a[real].real
    return tuple(out)


def airy_scaled(z) -> ScaledAiry:
    eai, edai, ebi, edbi, zt = airy_scaled_arrays(z)
    return ScaledAiry(complex(eai[0]), complex(edai[0]), complex(ebi[0]),
                      complex(edbi[0]), complex(zt[0]))


def airy_eval(z) -> AiryValues:
    """Ai, Ai', Bi, Bi' at a single complex point."""
    ai, dai, bi, dbi = airy_arrays(z)
    return AiryValues(complex(ai[0]), complex(dai[0]), complex(bi[0]), complex(dbi[0]))


def airy_ode_residual(z, h=1e-3):
    """Finite-difference residual of w'' = z w for Ai and Bi (max of the two)."""
    if not 0 < h <= 1e-2:
        raise ValueError("h must lie in (0, 1e-2]")
    z = complex(z)
    ai, _, bi, _ = airy_arrays(np.array([z - h, z, z + h]))
    r_ai = abs((ai[2] - 2 * ai[1] + ai[0]) / h ** 2 - z * ai[1])
    r_bi = abs((bi[2] - 2 * bi[1] + bi[0]) / h ** 2 - z * bi[1])
    return float(max(r_ai, r_bi))


def wronskian_errors(z):
    """Wronskian error |W - 1/pi| and its conditioning scale |Ai Bi'| + |Ai' Bi|."""
    ai, dai, bi, dbi = airy_arrays(z)
    err = np.abs(ai * dbi - dai * bi - 1.0 / pi)
    scale = np.abs(ai * dbi) + np.abs(dai * bi)
    return err, scale
