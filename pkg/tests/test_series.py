from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmfactor.series import PrecisionError, QExpansion, ZeroLeadingCoefficient, eta_product, series_invert

coeff = st.integers(-20, 20)


def series_st(M=1, prec=12, low=-3):
    return st.dictionaries(st.integers(low * M, prec - 1), coeff, max_size=8).map(lambda d: QExpansion(d, M, prec))


def naive_eta(P):
    """prod (1 - q^n) by repeated multiplication of dense lists."""
    c = [1] + [0] * (P - 1)
    for n in range(1, P):
        new = c[:]
        for i in range(n, P):
            new[i] -= c[i - n]
        c = new
    return c


def test_eta_matches_direct_product():
    P = 80
    e = eta_product(P)
    assert [e.coefficient(n) for n in range(P)] == naive_eta(P)


def test_eta_power_24_gives_ramanujan_tau():
    d = eta_product(10, 24).shift(1)
    # tau(1..6) from the standard table
    assert [d.coefficient(n) for n in range(1, 7)] == [1, -24, 252, -1472, 4830, -6048]


@given(series_st(), series_st(), series_st())
def test_multiplication_associative_and_commutative(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)


@given(series_st(), series_st(), series_st())
def test_distributive(a, b, c):
    # cancellation can change valuations, hence the known precision; compare on the common range
    lhs, rhs = a * (b + c), a * b + a * c
    p = min(lhs.prec, rhs.prec)
    assert lhs.truncate(p) == rhs.truncate(p)


@given(st.dictionaries(st.integers(1, 11), coeff, max_size=6), st.integers(-3, 3), st.sampled_from([1, -1, 2, 3]))
def test_inverse(rest, v, lead):
    terms = {n + v: c for n, c in rest.items()}
    terms[v] = lead
    a = QExpansion(terms, 1, 12 + v)
    inv = series_invert(a)
    one = (a * inv).truncate(inv.prec + v)
    assert one == QExpansion({0: 1}, 1, one.prec)


def test_invert_zero_raises():
    with pytest.raises(ZeroLeadingCoefficient):
        series_invert(QExpansion({}, 1, 5))


def test_precision_tracked():
    a = QExpansion({0: 1, 1: 2}, 1, 5)
    b = QExpansion({-2: 1}, 1, None)
    assert (a * b).prec == 3
    with pytest.raises(PrecisionError):
        (a * b).coefficient(3)


def test_fractional_exponents_mix():
    a = QExpansion.monomial(Fraction(1, 4))
    b = QExpansion.monomial(Fraction(1, 3))
    assert (a * b).coefficient(Fraction(7, 12)) == 1


@given(series_st(prec=10, low=0), series_st(prec=10, low=0))
def test_evaluate_is_a_ring_map(a, b):
    tau = mpmath.mpc(0.13, 1.7)
    with mpmath.workprec(100):
        lhs = (a * b).evaluate(tau)
        # both factors are exact up to q^10, so the product is exact up to q^10
        full = QExpansion(a.terms, 1) * QExpansion(b.terms, 1)
        rhs = a.evaluate(tau) * b.evaluate(tau)
        assert abs(full.evaluate(tau) - rhs) < 1e-20 * (1 + abs(rhs))
        tail = full.truncate(10)
        assert abs(tail.evaluate(tau) - lhs) < 1e-20 * (1 + abs(lhs))


def test_json_round_trip():
    a = QExpansion({-3: Fraction(1, 3), 5: 7}, 4, 40)
    assert QExpansion.from_json(a.to_json()) == a
