from fractions import Fraction

import pytest

from cmfactor.classical import (
    KNotSupported,
    delta,
    delta_and_j,
    eisenstein,
    example_form,
    jacobi_thetas,
    rankin_cohen,
    weak_jacobi_components,
    weakly_holo_gk,
)
from cmfactor.quadclass import class_group
from cmfactor.series import QExpansion

P = 40


def sigma(k, n):
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def test_eisenstein_first_terms():
    e4 = eisenstein(4, 5).series
    e6 = eisenstein(6, 5).series
    assert [e4.coefficient(n) for n in range(4)] == [1, 240, 2160, 6720]
    assert [e6.coefficient(n) for n in range(3)] == [1, -504, -16632]


def test_e4_squared_is_e8():
    e4 = eisenstein(4, P).series
    e8 = QExpansion({n: (480 * sigma(7, n) if n else 1) for n in range(P)}, 1, P)
    assert (e4 * e4).truncate(P) == e8


def test_delta_from_e4_e6():
    e4, e6 = eisenstein(4, P).series, eisenstein(6, P).series
    d = delta(P).series
    assert (e4 * e4 * e4 - e6 * e6).truncate(P) == d.scale(1728).truncate(P)


def test_j_coefficients():
    _, _, j = delta_and_j(5)
    assert [j.series.coefficient(n) for n in range(-1, 3)] == [1, 744, 196884, 21493760]


def test_weak_jacobi_identities_300():
    psi0, psi1, phi0, phi1 = weak_jacobi_components(301)
    t0, t1 = jacobi_thetas(301)
    a = (psi0.series * t0.series + psi1.series * t1.series).truncate(300)
    b = (phi0.series * t0.series + phi1.series * t1.series).truncate(300)
    assert a.is_zero() and a.precision >= 300
    assert b == QExpansion({0: 12}, 1, 300)


def test_rankin_cohen_e4_e6():
    e4, e6 = eisenstein(4, P), eisenstein(6, P)
    d = delta(P).series
    br = rankin_cohen(e4, e6, 1)
    assert br.weight == 12
    # 6 E4' E6 - 4 E4 E6' in the sign convention used here
    assert br.series.truncate(P - 1) == d.scale(3456).truncate(P - 1)


def test_rankin_cohen_antisymmetry_odd_n():
    e4, e6 = eisenstein(4, P), eisenstein(6, P)
    assert rankin_cohen(e4, e6, 1).series == rankin_cohen(e6, e4, 1).series.scale(-1)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 7])
def test_gk_principal_part(k):
    g = weakly_holo_gk(k, 20)
    assert g.weight == 2 - 2 * k
    assert g.series.principal_part() == {Fraction(-1): 1}


def test_g2_constant_term():
    assert weakly_holo_gk(2, 5).series.coefficient(0) == -240


def test_g6_rejected():
    with pytest.raises(KNotSupported):
        weakly_holo_gk(6, 10)


def test_example_form_shape():
    G = class_group(23)
    f = example_form(G, G.get("J"), 30)
    assert f.weight == 1
    assert f[0].coefficient(0) == 0
    for s in f.components.values():
        for e, c in s.items():
            if e < 0:
                assert c.denominator == 1
            assert (e * 23).denominator == 1
