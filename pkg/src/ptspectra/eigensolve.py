"""Box-basis matrix Hamiltonian for V = igx in |x| < 1 and its eigenvalues."""
from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .errors import NoConvergence
from .results import make_eigenvalues

DEFAULT_N = 40


@dataclass(frozen=True)
class HMatrix:
    n: int
    entries: np.ndarray
    g: complex


def build_hardbox_matrix(g, n=DEFAULT_N):
    """H_rs = r^2 pi^2/4 delta_rs + 16 i g r s (-1)^(t/2) / (pi^2 (r^2-s^2)^2), t = r+s+1 even."""
    if n < 1:
        raise ValueError("n must be at least 1")
    g = complex(g)
    r = np.arange(1, n + 1)
    R, S = np.meshgrid(r, r, indexing="ij")
    t = R + S + 1
    even = (t % 2 == 0)
    denom = np.where(even, (R * R - S * S) ** 2, 1).astype(float)
    sign = np.where((t // 2) % 2 == 0, 1.0, -1.0)
    off = np.where(even, sign * 16.0 * R * S / (pi ** 2 * denom), 0.0)
    H = 1j * g * off.astype(complex)
    H[np.diag_indices(n)] = r * r * pi ** 2 / 4.0
    return HMatrix(n, H, g)


def _residuals(H, vals, vecs):
    hn = np.linalg.norm(H, 2)
    out = []
    for k, E in enumerate(vals):
        v = vecs[:, k]
        out.append(np.linalg.norm(H @ v - E * v) / (hn * np.linalg.norm(v)))
    return out


def eigenvalues(h, tol=1e-10):
    """All eigenvalues, sorted by real part (positive-imaginary member of a pair first).

    Each carries the relative residual ||Hv - Ev|| / (||H|| ||v||).
    """
    H = h.entries
    try:
        vals, vecs = np.linalg.eig(H)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence("QR iteration failed") from exc
    res = _residuals(H, vals, vecs)
    if max(res) > tol:
        raise NoConvergence(f"eigenvalue residual {max(res):.2e} above {tol:.1e}")
    return make_eigenvalues(vals, res)


def det_characteristic(h, E):
    """det(H - E I) by LU factorisation with partial pivoting."""
    A = h.entries - complex(E) * np.eye(h.n)
    return complex(np.linalg.det(A))


def parity(n):
    return np.diag((-1.0) ** np.arange(1, n + 1))


def pseudo_hermiticity_residual(h):
    """max |P H P - H^dagger| with P = diag((-1)^r)."""
    P = parity(h.n)
    return float(np.max(np.abs(P @ h.entries @ P - h.entries.conj().T)))


def symmetry_residual(h):
    return float(np.max(np.abs(h.entries - h.entries.T)))


def det_root(h, seed, tol=1e-12, maxiter=50):
    """Newton on det(H - E I)/det(H - seed I), an eigenvalue independent of LAPACK eig."""
    I = np.eye(h.n)
    E = complex(seed)
    for _ in range(maxiter):
        # d/dE log det(H - E I) = -tr((H - E I)^{-1})
        A = h.entries - E * I
        tr = np.trace(np.linalg.inv(A))
        step = -1.0 / tr
        E = E - step
        if abs(step) <= tol * max(1.0, abs(E)):
            return E
    raise NoConvergence(f"determinant Newton did not converge from {seed}")
