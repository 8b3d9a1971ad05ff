import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmfactor.cubic import CubicInteger
from cmfactor.heegner import (
    J_AT_CM,
    NonSquareDiscriminant,
    check_j_at_cm,
    count_by_scan,
    enumerate_heegner,
    evaluate_at_cm,
    hauptmodul_j23,
    heegner_discriminants,
    heegner_polynomial,
    j23_value,
    j23_value_eta,
)
from cmfactor.quadclass import class_group

BITS = 160


def test_hauptmodul_shape():
    j = hauptmodul_j23(30).series
    assert j.coefficient(-1) == 1 and j.coefficient(0) == 0
    assert all(j.coefficient(n).denominator == 1 for n in range(1, 30))


@given(st.floats(-0.5, 0.5), st.floats(0.02, 1.5))
def test_series_and_eta_routes_agree(x, y):
    z = mpmath.mpc(x, y)
    with mpmath.workprec(BITS):
        a = j23_value(z, BITS)
        b = j23_value_eta(z, BITS)
        assert abs(a - b) < mpmath.mpf(10) ** -30 * (1 + abs(a))


@given(st.floats(-0.5, 0.5), st.floats(0.05, 1.0), st.integers(-3, 3), st.integers(-3, 3))
def test_gamma0_and_fricke_invariance(x, y, b, e):
    z = mpmath.mpc(x, y)
    with mpmath.workprec(BITS):
        v = j23_value(z, BITS)
        # ((1, b), (23 c, 1 + 23 b c)) with c = 1 is in Gamma_0(23)
        a_, b_, c_, d_ = 1, b, 23, 1 + 23 * b
        w = (a_ * z + b_) / (c_ * z + d_)
        assert abs(j23_value(w, BITS) - v) < 1e-30 * (1 + abs(v))
        f = -1 / (23 * z)
        assert abs(j23_value(f, BITS) - v) < 1e-30 * (1 + abs(v))


def test_value_at_cm_point():
    assert check_j_at_cm() < 1e-50
    with mpmath.workprec(BITS):
        z = mpmath.mpc(0.5, mpmath.sqrt(23) / 46)
        assert abs(j23_value(z, BITS) - J_AT_CM.real(BITS)) < 1e-40


@pytest.mark.parametrize("d", [7, 11, 15, 20, 23, 28, 44, 56, 92, 115, 203])
def test_orbit_count_matches_scan(d):
    assert len(enumerate_heegner(23, d).forms) == count_by_scan(23, d, 80)


@pytest.mark.parametrize("d", [7, 11, 15, 19, 20, 40, 43])
def test_orbit_size_primitive(d):
    """For fundamental -d prime to 23: two roots beta, -beta times h(-d) classes."""
    G = class_group(d) if d % 4 == 3 and all(d % p for p in range(2, math.isqrt(d) + 1)) else None
    orbit = enumerate_heegner(23, d)
    assert all(s == 1 for s in orbit.stabilizers)
    if G is not None:
        assert len(orbit.forms) == 2 * G.h


def test_non_square_rejected():
    with pytest.raises(NonSquareDiscriminant):
        enumerate_heegner(23, 8)
    with pytest.raises(NonSquareDiscriminant):
        enumerate_heegner(23, 5)


def test_discriminant_list():
    expected = [d for d in range(1, 51) if any((b * b + d) % 92 == 0 for b in range(92))]
    assert heegner_discriminants(23, 50) == expected == [7, 11, 15, 19, 20, 23, 28, 40, 43, 44]


@pytest.mark.parametrize("d", [7, 20, 56])
def test_heegner_polynomial_integral_and_square(d):
    H = heegner_polynomial(23, d, 192)
    assert H.residual < 1e-40
    assert H.coeffs[-1] == 1
    # beta and -beta give the same polynomial, so H_d is a square
    import sympy

    X = sympy.Symbol("X")
    poly = sympy.Poly(sum(c * X**i for i, c in enumerate(H.coeffs)), X)
    _, factors = sympy.factor_list(poly)
    assert all(e % 2 == 0 for _, e in factors)


def test_cm_root():
    H = heegner_polynomial(23, 23, 192)
    assert evaluate_at_cm(H).is_zero()
    assert not evaluate_at_cm(heegner_polynomial(23, 7, 192)).is_zero()


def test_evaluate_at_cm_is_horner():
    assert evaluate_at_cm([5, 4, 1]) == CubicInteger(5, 0, 0) + J_AT_CM * 4 + J_AT_CM * J_AT_CM
