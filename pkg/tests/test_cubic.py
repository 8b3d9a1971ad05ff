import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cmfactor.cubic import (
    BASIS_ELEMENTS,
    ONE,
    RHO,
    CubicInteger,
    Factorization,
    PiBasis,
    factor_in_pibasis,
    horner,
    prime_ideals,
    rho_real,
    valuation,
)

small = st.integers(-12, 12)
elts = st.builds(CubicInteger, small, small, small)


def test_rho_relation():
    assert RHO**3 == RHO + ONE
    with mpmath.workprec(120):
        assert abs(rho_real(120) - mpmath.mpf("1.32471795724474602596090885447809734")) < 1e-30


@given(elts, elts, elts)
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(elts, elts)
def test_norm_multiplicative(a, b):
    assert (a * b).norm() == a.norm() * b.norm()


@given(elts)
def test_norm_is_product_of_embeddings(a):
    with mpmath.workprec(120):
        roots = mpmath.polyroots([1, 0, -1, -1], extraprec=200)
        val = mpmath.fprod([a.x + a.y * r + a.z * r * r for r in roots])
    assert abs(val - a.norm()) < 1e-20


@given(elts, elts)
def test_exact_division(a, b):
    assume(not b.is_zero())
    assert (a * b).divide(b) == a


def test_unit_powers():
    assert (RHO**5) * (RHO**-5) == ONE
    assert RHO.inverse_unit() * RHO == ONE
    with pytest.raises(ArithmeticError):
        CubicInteger(2, 0, 0).inverse_unit()


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 59])
def test_prime_decomposition_degrees(p):
    Ps = prime_ideals(p)
    assert sum(P.e * P.f for P in Ps) == 3


def test_splitting_types():
    # 23 ramifies; 59 splits completely (X^3 - X - 1 has three roots mod 59)
    assert sorted((P.e, P.f) for P in prime_ideals(23)) == [(1, 1), (2, 1)]
    assert [P.f for P in prime_ideals(59)] == [1, 1, 1]
    for p in (5, 7, 11, 17, 19):
        assert sorted(P.f for P in prime_ideals(p)) == [1, 2]


def test_basis_norms():
    basis = PiBasis.default()
    assert {n: abs(e.norm()) for n, e in basis.elements.items()} == {
        "pi5": 5, "pi7": 7, "pi11": 11, "pi17": 17, "pi19": 19, "varpi23": 23, "pi25": 25, "pi49": 49}


@given(st.dictionaries(st.sampled_from(sorted(BASIS_ELEMENTS)), st.integers(0, 4), max_size=4),
       st.integers(-20, 20), st.sampled_from([1, -1]))
def test_factorization_round_trip(ex, k, sign):
    basis = PiBasis.default()
    v = CubicInteger(sign, 0, 0) * RHO**k
    for n, e in ex.items():
        v = v * basis.elements[n] ** e
    fac = factor_in_pibasis(v, basis)
    assert fac.exponents == {n: e for n, e in ex.items() if e}
    assert fac.unit_exponent == k and fac.sign == sign
    assert fac.value(basis) == v


@given(elts)
def test_valuations_add_up_to_norm(a):
    assume(not a.is_zero())
    N = abs(a.norm())
    for p in (2, 3, 5, 7, 23):
        vp = 0
        n = N
        while n % p == 0:
            n //= p
            vp += 1
        assert sum(P.f * valuation(a, P) for P in prime_ideals(p)) == vp


def test_merge_and_log():
    basis = PiBasis.default()
    a = Factorization({"pi5": 2}, 3, 1)
    b = Factorization({"pi5": -1, "pi7": 1}, -1, -1)
    m = a.merge(b, 2)
    assert m.exponents == {"pi7": 2} and m.unit_exponent == 1 and m.sign == 1
    with mpmath.workprec(100):
        assert abs(m.log_abs(basis, 100) - mpmath.log(abs(m.value(basis).real(100)))) < 1e-25


def test_horner():
    assert horner([1, 1, 1], RHO) == ONE + RHO + RHO * RHO
