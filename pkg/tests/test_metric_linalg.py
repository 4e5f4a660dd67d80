from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stringlab import metric_linalg as ml
from stringlab.fock import FockVector, inner_indefinite


def F(x):
    return Fraction(x)


def test_diagonal_inertia():
    G = [[F(1), F(0), F(0)], [F(0), F(-1), F(0)], [F(0), F(0), F(0)]]
    assert ml.inertia(G) == ml.Inertia(1, 1, 1)


def test_hyperbolic_plane():
    assert ml.inertia([[F(0), F(1)], [F(1), F(0)]]) == ml.Inertia(1, 0, 1)


def test_level_one_gram():
    d = 26
    vecs = [FockVector.monomial(d, [(mu, 1)]) for mu in range(d)]
    G = [[inner_indefinite(a, b) for b in vecs] for a in vecs]
    assert ml.inertia(G) == ml.Inertia(25, 0, 1)


def test_non_symmetric_rejected():
    with pytest.raises(ml.NotSymmetricError):
        ml.inertia([[F(1), F(2)], [F(3), F(1)]])
    with pytest.raises(ml.NotSymmetricError):
        ml.inertia(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_radical_and_quotient_diagonal():
    G = [[F(1), F(0), F(0)], [F(0), F(-1), F(0)], [F(0), F(0), F(0)]]
    rad = ml.radical_basis(G)
    assert rad == [[F(0), F(0), F(1)]]
    Q = ml.quotient_gram(G, rad)
    assert Q == [[F(1), F(0)], [F(0), F(-1)]]
    assert ml.inertia(Q).n_zero == 0


def test_nondegenerate_has_empty_radical():
    G = [[F(2), F(1)], [F(1), F(2)]]
    assert ml.radical_basis(G) == []
    assert ml.quotient_gram(G, []) == G


def test_quotient_rejects_non_radical():
    G = [[F(1), F(0)], [F(0), F(0)]]
    with pytest.raises(ml.RadicalError):
        ml.quotient_gram(G, [[F(1), F(0)]])


def test_level_one_null_direction():
    # constrained space at p = (1, 1, 0, ...): eps with eps.p = 0
    d = 26
    basis = [FockVector.monomial(d, [(0, 1)]) + FockVector.monomial(d, [(1, 1)])]
    basis += [FockVector.monomial(d, [(mu, 1)]) for mu in range(2, d)]
    G = [[inner_indefinite(a, b) for b in basis] for a in basis]
    rad = ml.radical_basis(G)
    assert len(rad) == 1 and rad[0][0] != 0 and not any(rad[0][1:])
    Q = ml.quotient_gram(G, rad)
    assert ml.inertia(Q) == ml.Inertia(24, 0, 0)


def test_float_mode_matches_exact():
    G = [[F(2), F(1), F(0)], [F(1), F(-3), F(1)], [F(0), F(1), F(0)]]
    Gf = np.array([[float(x) for x in row] for row in G])
    assert ml.inertia(G) == ml.inertia(Gf)
    assert len(ml.radical_basis(Gf)) == ml.inertia(Gf).n_zero


def test_gram_matrix_wrapper():
    g = ml.GramMatrix([[F(1), F(0)], [F(0), F(0)]], ("a", "b"))
    assert g.exact and g.dim == 2
    assert ml.inertia(g) == ml.Inertia(1, 1, 0)


small_ints = st.integers(min_value=-3, max_value=3)


@st.composite
def symmetric_and_change(draw):
    n = draw(st.integers(min_value=1, max_value=5))
    A = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            A[i][j] = A[j][i] = F(draw(small_ints))
    # unit upper triangular times a permutation: always invertible
    S = [[F(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            S[i][j] = F(draw(small_ints))
    perm = draw(st.permutations(range(n)))
    S = [S[p] for p in perm]
    return A, S


@settings(max_examples=60, deadline=None)
@given(symmetric_and_change())
def test_sylvester_invariance(data):
    A, S = data
    assert ml.inertia(ml.congruence(A, S)) == ml.inertia(A)


@settings(max_examples=60, deadline=None)
@given(symmetric_and_change())
def test_quotient_inertia_keeps_signature(data):
    A, _ = data
    i0 = ml.inertia(A)
    rad = ml.radical_basis(A)
    assert len(rad) == i0.n_zero
    q = ml.inertia(ml.quotient_gram(A, rad))
    assert q == ml.Inertia(i0.n_plus, 0, i0.n_minus)


@settings(max_examples=40, deadline=None)
@given(symmetric_and_change())
def test_exact_inertia_matches_eigenvalues(data):
    A, _ = data
    ev = np.linalg.eigvalsh(np.array([[float(x) for x in row] for row in A]))
    expected = ml.Inertia(int(np.sum(ev > 1e-9)), int(np.sum(np.abs(ev) <= 1e-9)), int(np.sum(ev < -1e-9)))
    assert ml.inertia(A) == expected
