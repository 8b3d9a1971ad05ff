from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmfactor.classical import jacobi_thetas, theta_tilde, weak_jacobi_components
from cmfactor.quadclass import class_group
from cmfactor.seesaw import LatticeL, s_group
from cmfactor.series import QExpansion
from cmfactor.vvforms import (
    DiscriminantGroup,
    Embedding,
    GroupMismatch,
    SignatureMismatch,
    VectorForm,
    modularity_check,
    norm_group,
    res_map,
    theta_series,
    tr_map,
    weil_rep,
)

import _shared

SAMPLES = [mpmath.mpc(0.1, 1.05), mpmath.mpc(-0.2, 0.95), mpmath.mpc(0.37, 1.2)]

GROUPS = [
    (norm_group(23), (2, 0)),
    (norm_group(7), (2, 0)),
    (s_group(), (0, 1)),
    (LatticeL(23).discriminant_group(), (2, 1)),
    (s_group() * norm_group(23), (2, 1)),
    (DiscriminantGroup.cyclic(2, Fraction(1, 4)), (1, 0)),
]


@pytest.mark.parametrize("G,sig", GROUPS)
@pytest.mark.parametrize("dual", [False, True])
def test_braid_relation_exact(G, sig, dual):
    W = weil_rep(G, sig, dual)
    assert W.braid_relation()
    assert W.z_action()
    with mpmath.workprec(120):
        assert W.unitarity_defect() < 1e-25


def test_wrong_signature_rejected():
    with pytest.raises(SignatureMismatch):
        weil_rep(norm_group(23), (0, 2))


@given(st.integers(0, 45), st.integers(0, 45))
def test_bilinear_form_symmetric_and_polar(x, y):
    G = LatticeL(23).discriminant_group()
    assert G.bilinear(x, y) == G.bilinear(y, x)
    assert (G.q(G.add(x, y)) - G.q(x) - G.q(y) - G.bilinear(x, y)) % 1 == 0


def test_milgram_gauss_sum():
    for G, sig in GROUPS:
        s = (sig[0] - sig[1]) % 8
        expected = complex(mpmath.sqrt(G.order) * mpmath.expjpi(Fraction(s, 4)))
        assert abs(G.gauss_sum() - expected) < 1e-9


def _check(F, group_sig, dual=False, tol=1e-15):
    W = weil_rep(F.group, group_sig, dual)
    with mpmath.workprec(120):
        assert modularity_check(F, W, SAMPLES) < tol


@pytest.mark.parametrize("label", ["O", "J", "Jinv"])
def test_theta_series_modular(label):
    G = class_group(23)
    _check(theta_series(G, G.get(label), 60), (2, 0))


def test_theta_tilde_modular_cusp_form():
    G = class_group(23)
    tt = theta_tilde(G, 60)
    assert all(s.coefficient(0) == 0 for s in tt.components.values())
    _check(tt, (2, 0))


def test_jacobi_theta_pair_dual():
    Sg = s_group()
    t0, t1 = jacobi_thetas(80)
    _check(VectorForm(Fraction(1, 2), Sg, {(0,): t0.series, (1,): t1.series}), (0, 1), dual=True)


def test_weak_jacobi_forms_modular():
    Sg = s_group()
    psi0, psi1, phi0, phi1 = weak_jacobi_components(80)
    _check(VectorForm(Fraction(-1, 2), Sg, {(0,): phi0.series, (1,): phi1.series}), (0, 1))
    _check(VectorForm(Fraction(-5, 2), Sg, {(0,): psi0.series, (1,): psi1.series}), (0, 1))


def test_example_form_modular():
    f = _shared.ctx().example_f(60)
    _check(f, (2, 0))


def test_preimage_modular_on_both_labellings():
    pre = _shared.ctx().preimage(60)
    _check(pre.h, (2, 1))
    _check(pre.on_l_group(), (2, 1))


def test_non_modular_form_detected():
    G = class_group(23)
    th = theta_series(G, G.identity, 60)
    comps = dict(th.components)
    comps[(1,)] = comps[(1,)] + QExpansion({23: 1}, 23, 60 * 23)
    bad = VectorForm(1, th.group, comps)
    W = weil_rep(bad.group, (2, 0))
    with mpmath.workprec(120):
        assert modularity_check(bad, W, SAMPLES) > 1e-6


def test_res_tr_round_trip():
    G = norm_group(23)
    E = Embedding.identity(G)
    th = theta_series(class_group(23), class_group(23).identity, 10)
    assert tr_map(res_map(th, E), E).equal_to_precision(th, 9)


def test_group_mismatch():
    th = theta_series(class_group(23), class_group(23).identity, 10)
    with pytest.raises(GroupMismatch):
        modularity_check(th, weil_rep(s_group(), (0, 1)), SAMPLES)


def test_vector_form_json_round_trip():
    th = theta_series(class_group(23), class_group(23).get("J"), 10)
    again = VectorForm.from_json(th.to_json())
    assert again.equal_to_precision(th, 9) and again.group == th.group
