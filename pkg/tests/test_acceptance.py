"""Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned."""
import time

import numpy as np

from ptspectra.airy import wronskian_errors
from ptspectra.branches import (compare_branches, proportionality_check, spectrum_on_branch)
from ptspectra.eigensolve import (build_hardbox_matrix, eigenvalues, pseudo_hermiticity_residual,
                                  symmetry_residual)
from ptspectra.hardbox import (HardBoxProblem, asymptotic_check, box_levels,
                               characteristic_parts, detect_null_bands, exceptional_points,
                               ground_level, hermitian_spectrum, spectrum)
from ptspectra.softbox import (SoftBoxProblem, bound_determinant, bound_spectrum,
                               free_limit_check, rect_well_spectrum, reflectionless_scan,
                               soft_critical, step_well_spectrum)
from scipy.optimize import brentq


def report(capsys, label, ok, detail):
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} {label}: {detail}")
    assert ok, detail


def close(got, want, tol):
    return len(got) == len(want) and all(abs(a - b) <= tol for a, b in zip(got, want))


def test_c01_hard_g1231(capsys):
    want = [7.03165, 7.1848, 21.7217, 39.1884, 61.4929]
    t0 = time.perf_counter()
    got = spectrum(HardBoxProblem(12.31), 5).values
    dt = time.perf_counter() - t0
    ok = close(got, want, 1e-3) and dt < 5.0
    report(capsys, "criterion 1 (hard box g=12.31)", ok,
           f"{[round(v.real, 6) for v in got]} in {dt:.2f} s")


def test_c02_hard_g1232(capsys):
    want = [7.1097 + 0.1342j, 7.1097 - 0.1342j, 21.7209, 39.1880, 61.4926]
    got = spectrum(HardBoxProblem(12.32), 5).values
    report(capsys, "criterion 2 (hard box g=12.32)", close(got, want, 1e-3),
           f"{np.round(got, 5).tolist()}")


def test_c03_hard_g53_g54(capsys):
    want = {53.0: [16.4942 + 24.4311j, 16.4942 - 24.4311j, 29.7350, 31.6153, 58.2078],
            54.0: [16.7009 + 25.0725j, 16.7009 - 25.0725j, 30.8513 + 1.9732j,
                   30.8513 - 1.9732j, 58.0801]}
    got = {g: spectrum(HardBoxProblem(g), 5).values for g in want}
    ok = all(close(got[g], want[g], 5e-3) for g in want)
    report(capsys, "criterion 3 (hard box g=53, 54)", ok,
           "; ".join(f"g={g}: {np.round(v, 4).tolist()}" for g, v in got.items()))


def test_c04_first_exceptional_point(capsys):
    (ep,) = exceptional_points(12.0, 12.5)
    e_lo, e_hi = ground_level(12.31), ground_level(12.32)
    ok = (abs(ep.g_c - 12.3124556046) <= 1e-4 * 12.3124556046
          and abs(ep.E_c - 7.1086) <= 1e-2
          and abs(e_lo - 7.0316) <= 1e-3 and abs(e_hi - 21.7209) <= 1e-3)
    report(capsys, "criterion 4 (first exceptional point)", ok,
           f"g1={ep.g_c:.10f} E={ep.E_c:.6f} ground {e_lo:.5f} -> {e_hi:.5f}")


def test_c05_higher_exceptional_points(capsys):
    (e2,) = exceptional_points(52.0, 54.0)
    (e3,) = exceptional_points(121.0, 124.0)
    ok = abs(e2.g_c - 53.18) <= 0.05 and abs(e3.g_c - 122.90) <= 0.2
    report(capsys, "criterion 5 (g2, g3)", ok, f"g2={e2.g_c:.6f} g3={e3.g_c:.6f}")


def test_c06_null_bands(capsys):
    cases = {3.4: (23.2, 26.5), 5j: (32.8, 34.2)}
    found = {g: detect_null_bands(HardBoxProblem(g), 0.0, 70.0) for g in cases}
    ok = all(len(found[g]) == 1 and abs(found[g][0].E_lo - lo) <= 0.3
             and abs(found[g][0].E_hi - hi) <= 0.3 for g, (lo, hi) in cases.items())
    report(capsys, "criterion 6 (null bands)", ok,
           "; ".join(f"g={g}: {[(b.E_lo, b.E_hi) for b in v]}" for g, v in found.items()))


def test_c07_matrix_method(capsys):
    h40 = build_hardbox_matrix(12.31, 40)
    h30 = build_hardbox_matrix(12.31, 30)
    v40 = [e.value for e in eigenvalues(h40)][:5]
    v30 = [e.value for e in eigenvalues(h30)][:5]
    ref = [7.03165, 7.1848, 21.7217, 39.1884, 61.4929]
    ph, sy = pseudo_hermiticity_residual(h40), symmetry_residual(h40)
    dn = max(abs(a - b) for a, b in zip(v30, v40))
    ok = close(v40, ref, 1e-3) and ph <= 1e-14 and sy <= 1e-14 and dn < 1e-4
    report(capsys, "criterion 7 (matrix method)", ok,
           f"{np.round(np.real(v40), 5).tolist()} PH={ph:.1e} sym={sy:.1e} dN={dn:.1e}")


def test_c08_soft_box(capsys):
    want = {1.2: [-0.40891, -0.14426], 0.6: [-2.58012, -0.00275]}
    got = {g: bound_spectrum(SoftBoxProblem(g)).eigenvalues for g in (1.2, 0.6, 0.1)}
    ok = all(close(got[g], want[g], 1e-4) for g in want)
    ok &= (len(got[0.1]) == 2 and abs(got[0.1][0] + 9.29466) <= 1e-4
           and abs(got[0.1][1] + 1.7849e-6) <= 0.1 * 1.7849e-6)
    ep = soft_critical()
    ok &= 1.22 <= ep.g_c <= 1.23 and abs(abs(ep.E_c) - 0.24994) <= 1e-3
    none = {g: bound_spectrum(SoftBoxProblem(g)).eigenvalues for g in (1.3, 2.0)}
    ok &= all(v == [] for v in none.values())
    report(capsys, "criterion 8 (soft box)", ok,
           f"{got} g_c={ep.g_c:.8f} E_c={ep.E_c:.6f} g=1.3,2: {list(none.values())}")


def test_c09_reflectionless(capsys):
    out = {g: reflectionless_scan(g, 1e-3, 50.0) for g in (0.5, 1.0)}
    ok = all(r[0] == [] and r[1] > 0 for r in out.values())
    report(capsys, "criterion 9 (reflectionless)", ok,
           "; ".join(f"g={g}: roots={r[0]} min|res|={r[1]:.3e} at E={r[2]:.3f}"
                     for g, r in out.items()))


def test_c10_null_spectrum_companions(capsys):
    rect = {v2: rect_well_spectrum(0.0, v2) for v2 in (1.0, 5.0, 20.0)}
    step = {v0: step_well_spectrum(v0) for v0 in (3.0, 10.0)}
    f = lambda E: np.sqrt(E + 2) * np.tan(np.sqrt(E + 2)) - np.sqrt(-E)
    oracle = brentq(f, -1.99, -0.01, xtol=1e-15)
    got = rect_well_spectrum(2.0, 0.0)
    ok = (all(v == [] for v in rect.values()) and all(v == [] for v in step.values())
          and len(got) == 1 and abs(got[0] - oracle) <= 1e-8)
    report(capsys, "criterion 10 (null-spectrum companions)", ok,
           f"rect(0,v2)={list(rect.values())} step={list(step.values())} "
           f"rect(2,0)={got} oracle={oracle:.12f}")


def test_c11_wronskian(capsys):
    rng = np.random.default_rng(2024)
    z = 20 * np.sqrt(rng.random(10_000)) * np.exp(2j * np.pi * rng.random(10_000))
    err, scale = wronskian_errors(z)
    rel = err * np.pi
    ok = rel.max() <= 1e-10
    report(capsys, "criterion 11a (Airy Wronskian, relative to 1/pi)", ok,
           f"max {rel.max():.2e}, {np.mean(rel <= 1e-10) * 100:.1f}% of points within 1e-10; "
           f"relative to |Ai Bi'|+|Ai' Bi| max {np.max(err / scale):.2e}")


def test_c11_properties(capsys):
    E = np.linspace(0.0, 100.0, 4001)
    mant, _, sc = characteristic_parts(E, HardBoxProblem(12.31))
    hard = float(np.max(np.abs(mant.real) / sc))
    F, fs = bound_determinant(np.linspace(-10.0, -1e-6, 4001), SoftBoxProblem(1.2))
    soft = float(np.max(np.abs(F.real) / fs))
    a = spectrum(HardBoxProblem(12.32), 5).values
    b = spectrum(HardBoxProblem(-12.32), 5).values
    sym = max(abs(x - y) for x, y in zip(a, b))
    vals = [e.value for e in eigenvalues(build_hardbox_matrix(54.0, 40))]
    clos = max(min(abs(np.conj(v) - w) for w in vals) for v in vals)
    g0 = max(abs(x - y) for x, y in zip(spectrum(HardBoxProblem(0.0), 5).values, box_levels(5)))
    free = free_limit_check([0.5, 0.2, 0.1])
    ok = (hard <= 1e-10 and soft <= 1e-10 and sym <= 1e-8 and clos <= 1e-8 and g0 == 0
          and free[0] > free[1] > free[2])
    report(capsys, "criterion 11b (imaginary characteristics, symmetries, g=0)", ok,
           f"hard {hard:.1e} soft {soft:.1e} +-g {sym:.1e} conj {clos:.1e} g=0 {g0} "
           f"free-limit spread {np.round(free, 4).tolist()}")


def test_c12_branches(capsys):
    ref = hermitian_spectrum(1.0, 5).values
    herm = max(max(abs(a - b) for a, b in zip(spectrum_on_branch(-1j, k, 5).values, ref))
               for k in (1, 2))
    E0 = spectrum(HardBoxProblem(12.31), 5).values[0].real
    prop = max(proportionality_check(E0, 12.31, k, 0) for k in (1, 2))
    cmp_ = compare_branches(12.31, 5)
    base = [v.real for v in cmp_.spectra[0].values]
    extra = [v for k in (1, 2) for v in cmp_.spectra[k].values
             if min(abs(v - b) for b in base) > 1e-6]
    slope = asymptotic_check(spectrum(HardBoxProblem(12.31), 20))
    ok = herm <= 1e-8 and prop <= 1e-6 and not extra and abs(slope - 2.0) <= 0.02
    report(capsys, "criterion 12 (branches, asymptotics)", ok,
           f"hermitian {herm:.1e} proportionality {prop:.1e} extra {extra} exponent {slope:.6f}")
