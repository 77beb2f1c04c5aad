"""Spectral validation, iteration, lifts, and the local product bracket."""

import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, strategies as st

from holonomy_lab.errors import (ComplexSpectrum, HorizonExceeded, NotHyperbolic,
                                 NotUnimodular, RepeatedEigenvalue, TooFarApart)
from holonomy_lab.torus import (TorusLeafPoint, bracket_torus,
                                characteristic_polynomial, count_real_roots,
                                exact_determinant, exact_inverse, iterate,
                                nearest_lift_displacement, validate_real_anosov)

from conftest import CAT, THREE_D, origin

GOLDEN = (1 + 5 ** 0.5) / 2


# ---------------------------------------------------------------------------
# exact linear algebra
# ---------------------------------------------------------------------------

def test_determinant_is_exact_on_int_matrices():
    assert exact_determinant(CAT) == 1
    assert exact_determinant(THREE_D) == -1
    assert exact_determinant([[3, 1], [1, 1]]) == 2


def test_exact_inverse_roundtrip():
    inv = exact_inverse(THREE_D)
    prod = np.array(THREE_D, dtype=object) @ inv
    assert np.array_equal(prod, np.eye(3, dtype=object) + Fraction(0))


def test_characteristic_polynomial_known_cases():
    # t^2 - 3t + 1 and t^3 - t^2 - 2t + 1, constant term first
    assert characteristic_polynomial(CAT) == (1, -3, 1)
    assert characteristic_polynomial(THREE_D) == (1, -2, -1, 1)


def test_sturm_root_count():
    assert count_real_roots((1, -3, 1)) == 2
    assert count_real_roots((1, 0, 1)) == 0          # t^2 + 1
    assert count_real_roots((1, -2, -1, 1)) == 3


# ---------------------------------------------------------------------------
# validation and splitting data
# ---------------------------------------------------------------------------

def test_cat_map_splitting(cat):
    assert cat.expanding_factor == pytest.approx((3 + 5 ** 0.5) / 2, abs=1e-12)
    assert cat.stable_rates[0] == pytest.approx(0.3819660113, abs=1e-10)
    assert cat.stable_exponents == (1.0,)
    assert cat.unstable_exponents == (1.0,)
    # eigenvector residual
    v = cat.unstable_dirs[:, 0]
    assert np.linalg.norm(np.array(CAT) @ v - cat.unstable_values[0] * v) < 1e-12


def test_three_d_splitting(three_d):
    assert three_d.stable_rates[0] == pytest.approx(0.4450418679126288, abs=1e-12)
    assert three_d.unstable_rates == pytest.approx((1.246979603717467,
                                                    1.8019377358048383), abs=1e-12)
    assert three_d.expanding_factor == pytest.approx(2.246979603717467, abs=1e-12)
    # lambda comes from the stable side: 1/|a_1|
    assert three_d.expanding_factor == pytest.approx(1 / three_d.stable_rates[0],
                                                     abs=1e-12)
    assert three_d.stable_exponents[0] == 1.0
    assert three_d.unstable_exponents == pytest.approx(
        (3.6678647449688997, 1.374831595899236), abs=1e-12)


def test_rates_are_sorted_and_split_by_the_unit_circle(three_d):
    rates = three_d.stable_rates + three_d.unstable_rates
    assert all(0 < r < 1 for r in three_d.stable_rates)
    assert all(r > 1 for r in three_d.unstable_rates)
    assert list(rates) == sorted(rates)


def test_eigenvector_normalization(three_d):
    for col in range(3):
        v = three_d.basis[:, col]
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
        first_nonzero = v[np.nonzero(np.abs(v) > 1e-9)[0][0]]
        assert first_nonzero > 0


def test_non_unimodular_rejected():
    with pytest.raises(NotUnimodular):
        validate_real_anosov([[2, 0], [0, 3]])


def test_rotation_has_complex_spectrum():
    with pytest.raises(ComplexSpectrum):
        validate_real_anosov([[0, -1], [1, 0]])


def test_parabolic_shear_not_hyperbolic():
    with pytest.raises(NotHyperbolic):
        validate_real_anosov([[1, 1], [0, 1]])


def test_identity_not_hyperbolic():
    with pytest.raises(NotHyperbolic):
        validate_real_anosov([[1, 0], [0, 1]])


def test_repeated_off_circle_eigenvalues_rejected():
    # block diag of two cat maps: eigenvalues repeat with multiplicity 2
    m = np.zeros((4, 4), dtype=int)
    m[:2, :2] = CAT
    m[2:, 2:] = CAT
    with pytest.raises(RepeatedEigenvalue):
        validate_real_anosov(m)


def test_inverse_matrix_swaps_roles(three_d):
    inv = np.array(exact_inverse(THREE_D), dtype=object)
    swapped = validate_real_anosov([[int(v) for v in row] for row in inv])
    assert swapped.expanding_factor == pytest.approx(three_d.expanding_factor,
                                                     rel=1e-12)
    assert swapped.stable_rates == pytest.approx(
        tuple(1 / r for r in reversed(three_d.unstable_rates)), rel=1e-12)
    assert swapped.unstable_rates == pytest.approx(
        tuple(1 / r for r in reversed(three_d.stable_rates)), rel=1e-12)


# ---------------------------------------------------------------------------
# iteration
# ---------------------------------------------------------------------------

def test_iterate_scales_stable_coordinate(cat):
    p = TorusLeafPoint.from_eigen(cat, np.array([0.1, 0.0]))
    q = iterate(p, 1)
    assert q.eigen_coords[0] == pytest.approx(0.1 * cat.stable_values[0], abs=1e-15)
    assert q.eigen_coords[1] == 0.0


def test_iterate_identity_and_roundtrip(cat):
    p = TorusLeafPoint.from_eigen(cat, np.array([0.03, -0.02]))
    assert np.array_equal(iterate(p, 0).eigen_coords, p.eigen_coords)
    back = iterate(iterate(p, -1), 1)
    assert np.max(np.abs(back.eigen_coords - p.eigen_coords)) < 1e-12


def test_iterate_is_the_matrix_action_on_lifts(cat):
    p = TorusLeafPoint.from_lift(cat, np.array([0.2, 0.7]))
    q = iterate(p, 3)
    want = np.linalg.matrix_power(np.array(CAT), 3) @ p.lift
    assert np.max(np.abs(q.lift - want)) < 1e-9


def test_iterate_horizon(cat):
    p = origin(cat)
    with pytest.raises(HorizonExceeded):
        iterate(p, 65)
    iterate(p, 64)  # boundary is allowed


# ---------------------------------------------------------------------------
# lifts and the bracket
# ---------------------------------------------------------------------------

def test_nearest_lift_cases(cat):
    x = origin(cat)

    def disp(pos):
        return nearest_lift_displacement(x, TorusLeafPoint.from_lift(cat, np.array(pos)))

    assert disp([0.1, 0.05]) == pytest.approx([0.1, 0.05], abs=1e-15)
    assert disp([0.9, 0.0]) == pytest.approx([-0.1, 0.0], abs=1e-15)
    # tie at 1/2 goes to the lexicographically smallest integer offset
    assert disp([0.5, 0.0]) == pytest.approx([0.5, 0.0], abs=1e-15)


@given(st.lists(st.floats(-4, 4, allow_nan=False), min_size=2, max_size=2))
def test_nearest_lift_is_within_half(coords):
    spl = validate_real_anosov(CAT)
    x = origin(spl)
    y = TorusLeafPoint.from_lift(spl, np.array(coords))
    w = nearest_lift_displacement(x, y)
    assert np.max(np.abs(w)) <= 0.5 + 1e-12
    assert np.max(np.abs((y.lift - x.lift - w) - np.round(y.lift - x.lift - w))) < 1e-9


def test_bracket_example(cat):
    x = origin(cat)
    y = TorusLeafPoint.from_lift(cat, np.array([0.1, 0.05]))
    z = bracket_torus(x, y, 0.2)
    assert z.torus_position() == pytest.approx([0.00527864, 0.99145898], abs=1e-8)
    # z on x's stable leaf and y's unstable leaf, exactly in eigen coords
    k = cat.num_stable
    assert abs((z.eigen_coords - x.eigen_coords)[k:]).max() < 1e-12
    assert abs((z.eigen_coords - y.eigen_coords)[:k]).max() < 1e-12


def test_bracket_identities(cat):
    x = TorusLeafPoint.from_lift(cat, np.array([0.3, 0.4]))
    assert np.array_equal(bracket_torus(x, x, 0.05).lift, x.lift)
    s = x.displaced(0.02 * cat.stable_dirs[:, 0])
    u = x.displaced(0.02 * cat.unstable_dirs[:, 0])
    # y already on x's stable leaf: bracket lands on y; on unstable: stays at x
    assert np.max(np.abs(bracket_torus(x, s, 0.05).lift - s.lift)) < 1e-14
    assert np.max(np.abs(bracket_torus(x, u, 0.05).lift - x.lift)) < 1e-14


def test_bracket_too_far(cat):
    x = origin(cat)
    y = TorusLeafPoint.from_lift(cat, np.array([0.4, 0.4]))
    with pytest.raises(TooFarApart):
        bracket_torus(x, y, 0.05)


def test_bracket_equivariance(cat):
    x = TorusLeafPoint.from_lift(cat, np.array([0.11, 0.07]))
    y = TorusLeafPoint.from_lift(cat, np.array([0.13, 0.02]))
    lhs = iterate(bracket_torus(x, y, 0.3), 1)
    rhs = bracket_torus(iterate(x, 1), iterate(y, 1), 0.8)
    assert np.max(np.abs(lhs.eigen_coords - rhs.eigen_coords)) < 1e-10


@pytest.mark.parametrize("n", [1, 10, 40])
def test_bracket_forward_backward_convergence(cat, n):
    lam = cat.expanding_factor
    x = TorusLeafPoint.from_lift(cat, np.array([0.02, 0.01]))
    y = TorusLeafPoint.from_lift(cat, np.array([0.05, 0.03]))
    z = bracket_torus(x, y, 0.3)
    # stable displacement z - x contracts at exactly lambda^-1 per forward step
    s0 = (z.eigen_coords - x.eigen_coords)[0]
    sn = (iterate(z, n).eigen_coords - iterate(x, n).eigen_coords)[0]
    assert abs(abs(sn) - lam ** (-n) * abs(s0)) <= 1e-12 * abs(s0)
    # unstable displacement z - y contracts backward
    u0 = (z.eigen_coords - y.eigen_coords)[1]
    un = (iterate(z, -n).eigen_coords - iterate(y, -n).eigen_coords)[1]
    assert abs(abs(un) - lam ** (-n) * abs(u0)) <= 1e-12 * abs(u0)


@given(st.integers(-3, 3), st.integers(-3, 3),
       st.floats(-0.2, 0.2), st.floats(-0.2, 0.2))
def test_lift_choice_does_not_change_the_bracket(di, dj, a, b):
    spl = validate_real_anosov(CAT)
    x = TorusLeafPoint.from_lift(spl, np.array([0.5, 0.5]))
    y = TorusLeafPoint.from_lift(spl, np.array([0.5 + a, 0.5 + b]))
    y_far = TorusLeafPoint.from_lift(spl, y.lift + np.array([di, dj], dtype=float))
    z1 = bracket_torus(x, y, 0.9)
    z2 = bracket_torus(x, y_far, 0.9)
    assert np.max(np.abs(z1.torus_position() - z2.torus_position())) < 1e-12
