"""Linear algebra for symmetric (Hermitian) bilinear forms of indefinite signature.

Two arithmetic modes are supported and chosen from the input:

* exact: entries are ``int`` or ``fractions.Fraction``; no rounding anywhere.
* float: entries are real or complex floats; every zero test uses a threshold
  ``tol * max|entry|`` (default ``tol = 1e-10``).

Inertia is always computed by symmetric congruence (LDL^T with 1x1 and 2x2
pivots), never from eigenvalues.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

DEFAULT_TOL = 1e-10


class Inertia(NamedTuple):
    n_plus: int
    n_zero: int
    n_minus: int

    def __add__(self, other):  # type: ignore[override]
        return Inertia(self.n_plus + other.n_plus,
                       self.n_zero + other.n_zero,
                       self.n_minus + other.n_minus)

    def scaled(self, k: int) -> "Inertia":
        return Inertia(k * self.n_plus, k * self.n_zero, k * self.n_minus)


class NotSymmetricError(ValueError):
    pass


class RadicalError(ValueError):
    pass


class IllConditionedWarning(UserWarning):
    """A float-mode pivot sits close to the zero threshold."""


@dataclass(frozen=True)
class GramMatrix:
    """Matrix of pairings between labelled basis vectors."""

    entries: object
    basis_labels: tuple = ()
    tol: float = DEFAULT_TOL
    exact: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "exact", is_exact(self.entries))

    @property
    def dim(self) -> int:
        return len(self.entries)


def is_exact(G) -> bool:
    if isinstance(G, GramMatrix):
        return G.exact
    if isinstance(G, np.ndarray) and G.dtype != object:
        return False
    return all(isinstance(x, Rational) for row in G for x in row)


def _unwrap(G):
    if isinstance(G, GramMatrix):
        return G.entries, G.tol
    return G, DEFAULT_TOL


def _exact_matrix(G) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in G]


def _check_square(rows, n):
    if any(len(row) != n for row in rows):
        raise ValueError("Gram matrix must be square")


def _check_symmetric_exact(A):
    n = len(A)
    _check_square(A, n)
    for i in range(n):
        for j in range(i + 1, n):
            if A[i][j] != A[j][i]:
                raise NotSymmetricError(f"entries ({i},{j}) and ({j},{i}) differ")


def _float_matrix(G, tol):
    A = np.asarray(G, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("Gram matrix must be square")
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if A.size and np.max(np.abs(A - A.conj().T)) > tol * max(scale, 1.0):
        raise NotSymmetricError("matrix is not Hermitian within tolerance")
    if not np.any(A.imag):
        A = A.real.copy()
    return A, scale


# -- exact congruence -------------------------------------------------------

def _ldl_inertia_exact(A: list[list[Fraction]]) -> Inertia:
    """Symmetric elimination on a copy; pivots picked by first nonzero."""
    A = [row[:] for row in A]
    active = list(range(len(A)))
    plus = minus = 0
    while active:
        k = next((i for i in active if A[i][i] != 0), None)
        if k is not None:
            piv = A[k][k]
            if piv > 0:
                plus += 1
            else:
                minus += 1
            active.remove(k)
            rowk = A[k]
            nz = [i for i in active if rowk[i] != 0]
            for i in nz:
                f = A[i][k] / piv
                Ai = A[i]
                for j in nz:
                    Ai[j] -= f * rowk[j]
            continue
        pair = next(((i, j) for a, i in enumerate(active)
                     for j in active[a + 1:] if A[i][j] != 0), None)
        if pair is None:
            return Inertia(plus, len(active), minus)
        i, j = pair
        # block [[0, b], [b, 0]] has one positive and one negative direction
        b = A[i][j]
        plus += 1
        minus += 1
        active.remove(i)
        active.remove(j)
        ri, rj = A[i], A[j]
        nz = [x for x in active if ri[x] != 0 or rj[x] != 0]
        for x in nz:
            Ax = A[x]
            for y in nz:
                Ax[y] -= (ri[x] * rj[y] + rj[x] * ri[y]) / b
    return Inertia(plus, 0, minus)


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form over the rationals. Returns (rows, pivots)."""
    M = [[Fraction(x) for x in row] for row in rows]
    if ncols is None:
        ncols = len(M[0]) if M else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(M):
            break
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        pr = M[r]
        support = [j for j in range(c, ncols) if pr[j] != 0]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                Mi = M[i]
                for j in support:
                    Mi[j] -= f * pr[j]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def nullspace_exact(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : M x = 0}, one vector per free column."""
    R, pivots = rref(rows, ncols)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        x = [Fraction(0)] * ncols
        x[free] = Fraction(1)
        for row, pc in zip(R, pivots):
            x[pc] = -row[free]
        basis.append(x)
    return basis


# -- float congruence -------------------------------------------------------

def _ldl_inertia_float(A: np.ndarray, scale: float, tol: float) -> Inertia:
    n = A.shape[0]
    if n == 0:
        return Inertia(0, 0, 0)
    thresh = tol * scale
    if scale == 0.0:
        return Inertia(0, n, 0)
    _, D, _ = scipy.linalg.ldl(A, hermitian=True)
    plus = zero = minus = 0
    near = False
    i = 0
    while i < n:
        if i + 1 < n and D[i + 1, i] != 0:
            vals = np.linalg.eigvalsh(D[i:i + 2, i:i + 2])
            i += 2
        else:
            vals = [D[i, i].real]
            i += 1
        for v in vals:
            if abs(v) < thresh:
                zero += 1
            else:
                near |= abs(v) < 1e3 * thresh
                if v > 0:
                    plus += 1
                else:
                    minus += 1
    if near:
        warnings.warn("pivot within three decades of the zero threshold; "
                      "inertia may be unreliable", IllConditionedWarning, stacklevel=3)
    return Inertia(plus, zero, minus)


# -- public operations ------------------------------------------------------

def inertia(G, tol: float | None = None) -> Inertia:
    """Sylvester inertia (n_plus, n_zero, n_minus) of a symmetric matrix."""
    M, gtol = _unwrap(G)
    tol = gtol if tol is None else tol
    if is_exact(M):
        A = _exact_matrix(M)
        _check_symmetric_exact(A)
        return _ldl_inertia_exact(A)
    A, scale = _float_matrix(M, tol)
    return _ldl_inertia_float(A, scale, tol)


def radical_basis(G, tol: float | None = None) -> list:
    """Basis of the kernel of G.

    Exact mode returns lists of Fractions; float mode returns numpy vectors
    orthonormal in the standard (definite) inner product.
    """
    M, gtol = _unwrap(G)
    tol = gtol if tol is None else tol
    if is_exact(M):
        A = _exact_matrix(M)
        _check_symmetric_exact(A)
        return nullspace_exact(A, len(A))
    A, scale = _float_matrix(M, tol)
    if A.shape[0] == 0 or scale == 0.0:
        return list(np.eye(A.shape[0]))
    K = scipy.linalg.null_space(A, rcond=tol)
    return [K[:, j] for j in range(K.shape[1])]


def quotient_gram(G, radical: Sequence, tol: float | None = None):
    """Gram matrix of the induced form on a complement of the radical.

    In exact mode the complement is spanned by the standard basis vectors
    at the non-pivot positions of the radical's echelon form, so the result
    is a principal submatrix of G. In float mode the complement is the
    definite-orthogonal complement of the radical.
    """
    M, gtol = _unwrap(G)
    tol = gtol if tol is None else tol
    if is_exact(M):
        A = _exact_matrix(M)
        _check_symmetric_exact(A)
        n = len(A)
        for v in radical:
            if any(sum(A[i][j] * v[j] for j in range(n)) != 0 for i in range(n)):
                raise RadicalError("radical vector is not in ker(G)")
        _, pivots = rref(radical, n) if radical else ([], [])
        nullity = n - len(rref(A, n)[1])
        if len(pivots) != nullity:
            raise RadicalError(f"radical spans {len(pivots)} dims, kernel has {nullity}")
        keep = [i for i in range(n) if i not in set(pivots)]
        return [[A[i][j] for j in keep] for i in keep]
    A, scale = _float_matrix(M, tol)
    n = A.shape[0]
    R = np.array(radical, dtype=complex).reshape(len(radical), n)
    if len(radical):
        if np.max(np.abs(A @ R.T)) > tol * max(scale, 1.0) * 10:
            raise RadicalError("radical vector is not in ker(G)")
        Q = scipy.linalg.null_space(R.conj(), rcond=tol)
    else:
        Q = np.eye(n)
    Gq = Q.conj().T @ A @ Q
    Gq = 0.5 * (Gq + Gq.conj().T)
    return Gq.real if not np.any(np.abs(Gq.imag) > 0) else Gq


def congruence(G, S):
    """S^T G S (conjugate transpose in float mode)."""
    if is_exact(G) and is_exact(S):
        A = _exact_matrix(G)
        B = _exact_matrix(S)
        n, k = len(B), len(B[0]) if B else 0
        AB = [[sum(A[i][t] * B[t][j] for t in range(n)) for j in range(k)] for i in range(n)]
        return [[sum(B[t][i] * AB[t][j] for t in range(n)) for j in range(k)] for i in range(k)]
    A = np.asarray(G, dtype=complex)
    B = np.asarray(S, dtype=complex)
    return B.conj().T @ A @ B
