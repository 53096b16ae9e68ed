import math

import mpmath as mp
import numpy as np
import pytest

from ptspectra.errors import InsufficientData, Overflow, PoleAtAiZero
from ptspectra.hardbox import (HardBoxProblem, asymptotic_check, characteristic, coefficient_C,
                               cube_roots, eigenfunction, exceptional_points, ground_level,
                               hermitian_spectrum, matrix_spectrum, null_vector_norm, pt_deviation,
                               real_characteristic, spectrum)

# 30-digit mpmath roots of Ai(s)Bi(t) - Ai(t)Bi(s), frozen
ORACLE = {
    12.31: [7.03164945184485, 7.18479684683571, 21.7217444392035, 39.1884327910578,
            61.4928891349702],
    12.32: [7.10975659166611 + 0.134251545917294j, 7.10975659166611 - 0.134251545917294j,
            21.7209442183701, 39.1879608938844, 61.4925770766527],
    53.0: [16.4941514161197 + 24.4310778352344j, 16.4941514161197 - 24.4310778352344j,
           29.7349914948467, 31.6153134511145, 58.2077589600199],
    54.0: [16.7009136937779 + 25.0725386757274j, 16.7009136937779 - 25.0725386757274j,
           30.8513270289061 + 1.97317554247815j, 30.8513270289061 - 1.97317554247815j,
           58.0800687027628],
}
G1 = 12.3124556722605250529570836728
E1 = 7.10859959676494879724341896467


def mp_characteristic(E, g):
    mp.mp.dps = 40
    q = mp.cbrt(mp.mpf(g) ** 2)
    s = (E + 1j * mp.mpf(g)) / q
    t = (E - 1j * mp.mpf(g)) / q
    return mp.airyai(s) * mp.airybi(t) - mp.airyai(t) * mp.airybi(s)


def test_cube_roots():
    q = cube_roots(8.0)
    assert q[0] == 4.0
    for r in q:
        assert r ** 3 == pytest.approx(64.0, rel=1e-14)


def test_characteristic_is_imaginary_on_real_axis():
    p = HardBoxProblem(12.31)
    for E in (1.0, 7.1, 30.0, 200.0):
        f = characteristic(E, p)
        assert abs(f.real) <= 1e-12 * abs(f)


def test_characteristic_against_mpmath():
    p = HardBoxProblem(12.31)
    for E in (3.0, 10.0 + 2j, 45.0):
        ref = complex(mp_characteristic(E, 12.31))
        assert abs(characteristic(E, p) - ref) <= 1e-11 * abs(ref)


@pytest.mark.parametrize("g", sorted(ORACLE))
def test_spectrum_against_oracle(g):
    s = spectrum(HardBoxProblem(g), 5)
    got = s.values
    assert len(got) == 5
    for a, b in zip(got, ORACLE[g]):
        assert abs(a - b) <= 1e-9 * max(1, abs(b))


@pytest.mark.parametrize("g", sorted(ORACLE))
def test_matrix_route_close(g):
    m = matrix_spectrum(g, 5, 40).values
    for a, b in zip(m, ORACLE[g]):
        assert abs(a - b) <= 1e-5 * max(1, abs(b))


def test_pt_broken_flag():
    assert not spectrum(HardBoxProblem(12.31), 5).pt_broken
    assert spectrum(HardBoxProblem(12.32), 5).pt_broken


def test_zero_coupling_exact_levels():
    s = spectrum(HardBoxProblem(0.0), 4)
    assert s.values == pytest.approx([n * n * math.pi ** 2 / 4 for n in range(1, 5)], rel=1e-15)


def test_negative_coupling_same_spectrum():
    a = spectrum(HardBoxProblem(12.31), 5).values
    b = spectrum(HardBoxProblem(-12.31), 5).values
    assert np.allclose(a, b, rtol=1e-10)


def test_ground_shift_sign_pt():
    # the ground level is pushed up; the top of a 20-level list sits slightly below n^2 pi^2/4
    s = spectrum(HardBoxProblem(5.0), 20)
    E = np.array([e.value.real for e in s.eigenvalues])
    free = np.arange(1, 21) ** 2 * math.pi ** 2 / 4
    assert E[0] > free[0]
    assert np.all(E[5:] < free[5:])
    assert abs(E[-1] - free[-1]) < 0.01


def test_hermitian_ground_goes_down():
    s = hermitian_spectrum(1.0, 5)
    E = np.array([e.value.real for e in s.eigenvalues])
    free = np.arange(1, 6) ** 2 * math.pi ** 2 / 4
    assert E[0] < free[0]
    assert np.all(E[1:] > free[1:])


def test_imaginary_coupling_routes_to_hermitian():
    a = spectrum(HardBoxProblem(5j), 5).values
    b = hermitian_spectrum(5.0, 5).values
    m = matrix_spectrum(5j, 5, 40).values
    assert np.allclose(a, b, rtol=1e-12)
    assert np.allclose(a, m, rtol=1e-6)


def test_asymptotic_exponent():
    s = spectrum(HardBoxProblem(12.31), 20)
    assert asymptotic_check(s) == pytest.approx(2.0, abs=0.02)
    with pytest.raises(InsufficientData):
        asymptotic_check(spectrum(HardBoxProblem(12.31), 5))


def test_eigenfunction_boundary_and_pt():
    p = HardBoxProblem(12.31)
    E = ORACLE[12.31][0]
    x = np.linspace(-1, 1, 101)
    psi = eigenfunction(E, p, x)
    assert max(abs(psi[0]), abs(psi[-1])) <= 1e-8 * np.max(np.abs(psi))
    assert pt_deviation(E, p) <= 1e-10
    assert null_vector_norm(E, p) > 1e-2


def test_coefficient_c_consistency():
    p = HardBoxProblem(12.31)
    assert coefficient_C(ORACLE[12.31][0], p)[2] <= 1e-8
    assert coefficient_C(5.0, p)[2] > 1e-2


def test_pole_at_ai_zero():
    # s = (E + ig)/q is an Airy zero when E + ig = a1 q; pick g small and complex E
    g = 0.5
    q = cube_roots(g)[0]
    a1 = -2.338107410459767
    with pytest.raises(PoleAtAiZero):
        coefficient_C(a1 * q - 1j * g, HardBoxProblem(g))


def test_overflow_raised():
    with pytest.raises(Overflow):
        characteristic(1.0, HardBoxProblem(1e6))


def test_real_characteristic_requires_real_branch0():
    with pytest.raises(ValueError):
        real_characteristic(1.0, HardBoxProblem(12.31, branch=1))


def test_first_exceptional_point():
    (ep,) = exceptional_points(12.0, 12.5, dg=0.25)
    assert ep.g_c == pytest.approx(G1, abs=1e-8)
    assert ep.E_c == pytest.approx(E1, abs=1e-4)
    assert ep.ground_below == pytest.approx(ground_level(G1 - 0.005), abs=1e-10)
    assert ep.ground_above > 20
