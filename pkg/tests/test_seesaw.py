from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmfactor.quadclass import class_group
from cmfactor.seesaw import (
    LatticeL,
    MVector,
    find_m_vector,
    orthogonal_lattice,
    seesaw_scalar_sides,
    split_data,
    tln_map,
)

import _shared

G = class_group(23)
L = LatticeL(23)


def test_lattice_signature_and_discriminant():
    import numpy as np

    ev = np.linalg.eigvalsh(np.array(L.gram, dtype=float))
    assert sorted(np.sign(ev)) == [-1, 1, 1]
    assert round(abs(np.linalg.det(np.array(L.gram, dtype=float)))) == 2 * 23
    assert L.discriminant_group().order == 46


@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30))
def test_q_is_minus_d_det(A, B, C):
    (p, r), (_, s) = L.matrix((A, B, C))
    assert L.q((A, B, C)) == -23 * (p * s - r * r)
    assert L.coords(L.matrix((A, B, C))) == (A, B, C)


@pytest.mark.parametrize("label", ["O", "J", "Jinv"])
def test_m_vector_per_class(label):
    C = G.get(label)
    m = find_m_vector(G, C)
    assert L.q(m.coords) == Fraction(-1, 4)
    assert m.ideal_class(G) == C
    assert L.in_dual(m.coords)


def test_principal_m_vector():
    assert find_m_vector(G, G.identity) == MVector(23, 23, -23, 6)


def test_m_vector_validation():
    with pytest.raises(ValueError):
        MVector(23, 23, -23, 7)
    with pytest.raises(ValueError):
        MVector(23, 1, 1, 6)


@pytest.mark.parametrize("label", ["O", "J", "Jinv"])
def test_orthogonal_lattice(label):
    m = find_m_vector(G, G.get(label))
    orth = orthogonal_lattice(m)
    assert orth.det == 23
    for x in orth.basis:
        assert L.in_lattice(x) and L.bilinear(x, m.coords) == 0
    # N is isometric to the ideal class of m
    assert orth.form == G.get(label).form


@pytest.mark.parametrize("label", ["O", "J", "Jinv"])
def test_split_respects_q(label):
    S = split_data(find_m_vector(G, G.get(label)))
    grp = S.l_group
    for (kappa, nu), lam in S.to_lambda.items():
        assert grp.q(lam) == (Fraction(-kappa * kappa, 4) + Fraction(nu * nu, 23)) % 1
    assert sorted(S.to_lambda.values()) == list(range(46))


def test_tln_of_preimage_is_f_at_200():
    pre = _shared.preimage(300)
    f = _shared.example_f(300)
    T = tln_map(pre.h, pre.split)
    assert T.precision >= 200
    assert T.equal_to_precision(f, 200)


def test_preimage_principal_part_integral_at_scale_24():
    pre = _shared.preimage(300)
    assert pre.integral_scale() == 24
    assert all(Fraction(v).denominator == 1 for v in pre.b_table().values())


def test_preimage_corrections():
    pre = _shared.preimage(300)
    assert pre.corrections == {1: Fraction(-7107, 2), 2: Fraction(115, 48)}


@pytest.mark.parametrize("tau", [mpmath.mpc(0.1, 1.1), mpmath.mpc(-0.3, 0.9), mpmath.mpc(0.45, 1.6)])
def test_scalar_seesaw_identity(tau):
    pre = _shared.ctx().preimage(80)
    with mpmath.workprec(120):
        lhs, rhs = seesaw_scalar_sides(pre, tau)
        assert abs(lhs) > 1
        assert abs(lhs - rhs) < 1e-15


def test_scalar_seesaw_against_f():
    """The N side evaluated with f itself; a perturbed f is detected."""
    from cmfactor.series import QExpansion
    from cmfactor.vvforms import VectorForm

    pre = _shared.ctx().preimage(80)
    f = _shared.ctx().example_f(80)
    tau = mpmath.mpc(0.1, 1.1)
    with mpmath.workprec(120):
        lhs, rhs = seesaw_scalar_sides(pre, tau, g=f)
        assert abs(lhs - rhs) < 1e-15
        comps = dict(f.components)
        s = comps[(3,)]
        e = next(e for e, c in s.items() if e > 0)
        comps[(3,)] = s + QExpansion.monomial(e, 1, s.precision)
        lhs, rhs = seesaw_scalar_sides(pre, tau, g=VectorForm(f.weight, f.group, comps, f.dual))
        assert abs(lhs - rhs) > 1e-6
