from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stringlab.fock import FockVector, apply_alpha, inner_indefinite, level_basis
from stringlab.lorentz import (conjugation, gamma_lift, identity, is_lorentz, rational_boost,
                               rotation, standard_boost)
from stringlab.spectrum import constrained_space
from stringlab.virasoro import apply_L, rational_shell_point

D = 4
BOOST = rational_boost(Fraction(5, 4), Fraction(3, 4), 1, D)
BOOST2 = rational_boost(Fraction(13, 12), Fraction(5, 12), 2, D)


def test_rational_boost_is_lorentz():
    assert is_lorentz(BOOST) and is_lorentz(BOOST2)
    assert is_lorentz(BOOST @ BOOST2)
    assert not is_lorentz(np.diag([2.0, 1.0, 1.0, 1.0]))


def test_rational_boost_rejects_bad_input():
    with pytest.raises(ValueError):
        rational_boost(1, 1, 1, D)
    with pytest.raises(ValueError):
        rational_boost(Fraction(5, 4), Fraction(3, 4), 0, D)


def test_is_lorentz_rejects_nonsquare():
    with pytest.raises(ValueError):
        is_lorentz(np.zeros((2, 3)))


def test_inverse():
    prod = (BOOST @ BOOST.inverse()).matrix
    assert np.all(prod == identity(D).matrix)


def test_rotation_and_float_inverse():
    R = rotation(0.7, 1, 3, D)
    assert is_lorentz(R)
    assert np.allclose((R @ R.inverse()).matrix, np.eye(D))


def test_standard_boost():
    p = [3.0, 1.0, 2.0, 0.5]
    r = p[0] ** 2 - sum(x * x for x in p[1:])
    L = standard_boost(p, r)
    assert is_lorentz(L, 1e-12)
    assert np.allclose(L.matrix @ np.array([np.sqrt(r), 0, 0, 0]), p)
    with pytest.raises(ValueError):
        standard_boost([-3.0, 1.0, 2.0, 0.5], r)
    with pytest.raises(ValueError):
        standard_boost(p, 0.0)


def test_gamma_on_single_oscillator():
    v = FockVector.monomial(D, [(1, 1)])
    # eta Lambda eta column 1 of the boost: (-3/4, 5/4, 0, 0)
    w = gamma_lift(BOOST, v)
    expected = (FockVector.monomial(D, [(0, 1)], Fraction(-3, 4))
                + FockVector.monomial(D, [(1, 1)], Fraction(5, 4)))
    assert w == expected


def _vectors(max_level):
    return [FockVector({occ: 1}, D) for lev in range(max_level + 1) for occ in level_basis(D, lev)]


def test_gamma_preserves_indefinite_pairing():
    vecs = _vectors(2)
    imgs = [gamma_lift(BOOST, v) for v in vecs]
    for i in range(0, len(vecs), 3):
        for j in range(0, len(vecs), 5):
            assert inner_indefinite(imgs[i], imgs[j]) == inner_indefinite(vecs[i], vecs[j])


def test_gamma_is_homomorphism():
    for v in _vectors(2)[::4]:
        assert gamma_lift(BOOST @ BOOST2, v) == gamma_lift(BOOST, gamma_lift(BOOST2, v))


@pytest.mark.parametrize("m", [1, 2, -1])
def test_intertwining(m):
    p = rational_shell_point(2, D)
    q = BOOST.inverse().apply(p)
    for v in _vectors(2):
        assert gamma_lift(BOOST, apply_L(m, q, v)) == apply_L(m, p, gamma_lift(BOOST, v))


def test_constrained_space_maps_to_constrained_space():
    q = rational_shell_point(2, D)
    p = BOOST.apply(q)
    src = constrained_space(D, 2, q)
    for v in src:
        w = gamma_lift(BOOST, v)
        assert not apply_L(1, p, w) and not apply_L(2, p, w)
    assert len(constrained_space(D, 2, p, method="dense")) == len(src)


def test_gamma_commutes_with_alpha_covariantly():
    # Gamma alpha_n^mu Gamma^{-1} = (eta Lambda eta)^mu_nu alpha_n^nu
    v = FockVector.monomial(D, [(0, 1), (2, 2)])
    lhs = gamma_lift(BOOST, apply_alpha(1, -1, v))
    M = BOOST.matrix
    rhs = FockVector.zero(D)
    w = gamma_lift(BOOST, v)
    for mu in range(D):
        coef = M[mu, 1] * (-1 if mu == 0 else 1)
        if coef:
            rhs = rhs + coef * apply_alpha(mu, -1, w)
    assert lhs == rhs


def test_conjugations():
    v = FockVector.monomial(D, [(0, 1)], 1 + 2j) + FockVector.monomial(D, [(1, 1)], 3j)
    c0 = conjugation("C0", v)
    assert c0.coeff(((1, 0, 1),)) == 1 - 2j
    c1 = conjugation("C1", v)
    assert c1.coeff(((1, 0, 1),)) == 1 - 2j and c1.coeff(((1, 1, 1),)) == 3j
    for kind in ("C0", "C1"):
        assert conjugation(kind, conjugation(kind, v)) == v
    with pytest.raises(ValueError):
        conjugation("C2", v)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2), st.data())
def test_c1_antiunitary_on_pairing(level, data):
    basis = level_basis(D, level)
    i, j = data.draw(st.integers(0, len(basis) - 1)), data.draw(st.integers(0, len(basis) - 1))
    a, b = data.draw(st.complex_numbers(max_magnitude=3)), data.draw(st.complex_numbers(max_magnitude=3))
    v, w = FockVector({basis[i]: a}, D), FockVector({basis[j]: b}, D)
    lhs = inner_indefinite(conjugation("C1", v), conjugation("C1", w))
    assert lhs == pytest.approx(np.conj(inner_indefinite(v, w)))
