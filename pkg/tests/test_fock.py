import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from stringlab.fock import (VACUUM, FockVector, apply_alpha, colored_partition_count, eta,
                            inner_definite, inner_indefinite, level_basis, mass_squared,
                            metric_J, number_op, occ_from_json, occ_to_json, partitions,
                            worldsheet_ccr_partial)


def mono(d, *factors, c=1):
    return FockVector.monomial(d, factors, c)


def vac(d, c=1):
    return FockVector.vacuum(d, c)


def test_alpha_examples():
    d = 26
    assert not apply_alpha(0, 1, vac(d))
    assert apply_alpha(1, 1, mono(d, (1, 1))) == vac(d)
    assert apply_alpha(0, 2, mono(d, (0, 2))) == vac(d, -2)


def test_alpha_zero_rejected():
    with pytest.raises(ValueError):
        apply_alpha(0, 0, vac(4))


def test_pairing_examples():
    d = 26
    assert inner_indefinite(mono(d, (0, 1)), mono(d, (0, 1))) == -1
    assert inner_indefinite(mono(d, (1, 2)), mono(d, (1, 2))) == 2
    assert inner_indefinite(vac(d), vac(d)) == 1
    assert inner_definite(mono(d, (0, 1)), mono(d, (0, 1))) == 1
    assert inner_definite(mono(d, (0, 1)), mono(d, (1, 1))) == 0


def test_pairing_is_antilinear_in_first_slot():
    d = 4
    v = mono(d, (2, 1), c=1j)
    assert inner_indefinite(v, mono(d, (2, 1))) == -1j


def test_number_and_mass():
    d = 26
    assert not number_op(vac(d))
    v = mono(d, (1, 2), (0, 1))
    assert number_op(v) == v * 3
    w = mono(d, (0, 1))
    assert number_op(w) == w
    assert mass_squared(vac(d)) == vac(d, -2)
    assert not mass_squared(mono(d, (5, 1)))
    u = mono(d, (3, 3))
    assert mass_squared(u) == u * 4


def test_level_basis_counts():
    assert level_basis(26, 0) == (VACUUM,)
    assert len(level_basis(26, 1)) == 26
    assert len(level_basis(26, 2)) == 26 + 26 * 27 // 2


def _brute_level_basis(d, lev):
    # multisets of modes (n, mu) with total n = lev
    modes = [(n, mu) for n in range(1, lev + 1) for mu in range(d)]
    out = set()
    for k in range(lev + 1):
        for combo in itertools.combinations_with_replacement(modes, k):
            if sum(n for n, _ in combo) == lev:
                out.add(tuple(sorted((n, mu, c) for (n, mu), c in Counter(combo).items())))
    return sorted(out)


@pytest.mark.parametrize("d,lev", [(3, 3), (4, 3), (2, 4)])
def test_level_basis_matches_brute_force(d, lev):
    assert list(level_basis(d, lev)) == _brute_level_basis(d, lev)


def _multiplicity_oracle(colors, lev):
    # sum over partitions of prod_k C(colors + m_k - 1, m_k)
    total = 0
    for lam in partitions(lev):
        term = 1
        for _, m in Counter(lam).items():
            term *= math.comb(colors + m - 1, m)
        total += term
    return total


@pytest.mark.parametrize("colors,lev", [(1, 6), (2, 5), (24, 3), (26, 4), (4, 7)])
def test_colored_partition_count(colors, lev):
    assert colored_partition_count(colors, lev) == _multiplicity_oracle(colors, lev)


def test_occupation_json_roundtrip():
    occ = mono(5, (0, 1), (3, 2), (3, 2)).terms.popitem()[0]
    assert occ_from_json(occ_to_json(occ)) == occ
    with pytest.raises(ValueError):
        occ_from_json("[[0, 0, 1]]")


def test_metric_J_relation():
    d = 4
    v = mono(d, (0, 1), (1, 1), c=Fraction(2)) + mono(d, (0, 2), (0, 2)) + mono(d, (2, 1), c=3)
    w = mono(d, (0, 1), (1, 1)) + mono(d, (0, 2), (0, 2), c=5) + mono(d, (2, 1), c=-1)
    assert inner_indefinite(v, w) == inner_definite(v, metric_J(w))


# -- properties on random monomials --------------------------------------------

D_SMALL = 4


@st.composite
def monomials(draw, d=D_SMALL, max_level=5):
    lev = draw(st.integers(min_value=0, max_value=max_level))
    basis = level_basis(d, lev)
    occ = basis[draw(st.integers(min_value=0, max_value=len(basis) - 1))]
    return FockVector({occ: 1}, d)


modes = st.integers(min_value=-4, max_value=4).filter(lambda n: n != 0)
flavors = st.integers(min_value=0, max_value=D_SMALL - 1)


@settings(max_examples=200, deadline=None)
@given(monomials(), modes, modes, flavors, flavors)
def test_ccr_property(v, m, n, mu, nu):
    lhs = apply_alpha(mu, m, apply_alpha(nu, n, v)) - apply_alpha(nu, n, apply_alpha(mu, m, v))
    expected = v * (m * eta(mu) if (m + n == 0 and mu == nu) else 0)
    assert lhs == expected


@settings(max_examples=150, deadline=None)
@given(monomials(max_level=4), monomials(max_level=4), st.integers(min_value=1, max_value=4), flavors)
def test_adjointness(v, w, n, mu):
    assert inner_indefinite(apply_alpha(mu, -n, v), w) == inner_indefinite(v, apply_alpha(mu, n, w))


@settings(max_examples=100, deadline=None)
@given(monomials())
def test_number_eigenvalue_is_level(v):
    (occ, _), = v.terms.items()
    assert number_op(v) == v * sum(n * c for n, _, c in occ)


# -- world-sheet commutator -------------------------------------------------------

def test_worldsheet_constant_functions():
    f = lambda s: np.full_like(s, 1 / np.pi)
    for K in (0, 1, 5):
        assert worldsheet_ccr_partial(K, f, f) == pytest.approx(1.0, rel=1e-13)


def test_worldsheet_single_mode():
    assert worldsheet_ccr_partial(0, np.cos, np.cos) == pytest.approx(0.0, abs=1e-13)
    for K in (1, 3):
        assert worldsheet_ccr_partial(K, np.cos, np.cos) == pytest.approx(np.pi ** 2 / 2, rel=1e-12)


def test_worldsheet_gaussians_converge():
    f = lambda s: np.exp(-((s - 1.4) / 0.3) ** 2)
    g = lambda s: np.exp(-((s - 1.6) / 0.35) ** 2)
    target = np.pi * quad(lambda s: f(s) * g(s), 0, np.pi, epsabs=1e-14, epsrel=1e-13)[0]
    assert worldsheet_ccr_partial(64, f, g) == pytest.approx(target, rel=1e-6)
