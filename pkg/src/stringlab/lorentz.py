"""Lorentz transformations and their lift to the oscillator Fock space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fock import FockVector, apply_alpha, conj, eta
from .virasoro import Momentum


@dataclass(frozen=True)
class LorentzTransform:
    """d x d matrix Lambda^mu_nu acting on contravariant momenta."""

    matrix: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("Lorentz matrix must be square")
        object.__setattr__(self, "matrix", M)

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def exact(self) -> bool:
        return self.matrix.dtype == object

    def __matmul__(self, other: "LorentzTransform") -> "LorentzTransform":
        return LorentzTransform(self.matrix.dot(other.matrix))

    def apply(self, p):
        vec = self.matrix.dot(np.array(list(p), dtype=self.matrix.dtype if self.exact else float))
        return Momentum(vec.tolist())

    def inverse(self) -> "LorentzTransform":
        # Lambda^{-1} = eta Lambda^T eta
        g = metric(self.d, exact=self.exact)
        return LorentzTransform(g.dot(self.matrix.T).dot(g))

    def as_float(self) -> "LorentzTransform":
        return LorentzTransform(self.matrix.astype(float))


def metric(d: int, exact: bool = True) -> np.ndarray:
    if exact:
        g = np.array([[Fraction(0)] * d for _ in range(d)], dtype=object)
        for mu in range(d):
            g[mu, mu] = Fraction(eta(mu))
        return g
    return np.diag([float(eta(mu)) for mu in range(d)])


def identity(d: int) -> LorentzTransform:
    M = np.array([[Fraction(int(i == j)) for j in range(d)] for i in range(d)], dtype=object)
    return LorentzTransform(M)


def is_lorentz(L, tol: float = 1e-12) -> bool:
    M = L.matrix if isinstance(L, LorentzTransform) else np.asarray(L)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("dimension mismatch: matrix is not square")
    d = M.shape[0]
    if M.dtype == object:
        g = metric(d)
        return bool(np.all(M.T.dot(g).dot(M) == g))
    g = metric(d, exact=False)
    return bool(np.max(np.abs(M.T @ g @ M - g)) <= tol)


def rational_boost(c, s, axis: int, d: int) -> LorentzTransform:
    """Boost mixing p^0 and p^axis with [[c, s], [s, c]]; needs c^2 - s^2 = 1."""
    c, s = Fraction(c), Fraction(s)
    if c * c - s * s != 1:
        raise ValueError(f"c^2 - s^2 = {c * c - s * s}, expected 1")
    if not 1 <= axis < d:
        raise ValueError("axis must be a spatial index")
    M = identity(d).matrix.copy()
    M[0, 0] = M[axis, axis] = c
    M[0, axis] = M[axis, 0] = s
    return LorentzTransform(M)


def rotation(theta: float, i: int, j: int, d: int) -> LorentzTransform:
    M = np.eye(d)
    M[i, i] = M[j, j] = math.cos(theta)
    M[i, j], M[j, i] = -math.sin(theta), math.sin(theta)
    return LorentzTransform(M)


def standard_boost(p, r) -> LorentzTransform:
    """The pure boost taking (sqrt(r), 0, ..., 0) to p, for p on the forward r > 0 sheet."""
    r = float(r)
    if r <= 0:
        raise ValueError("standard boost needs r > 0")
    pf = np.array([float(x) for x in p])
    if pf[0] <= 0:
        raise ValueError("p must lie on the forward sheet")
    m = math.sqrt(r)
    if abs(-pf[0] ** 2 + pf[1:] @ pf[1:] + r) > 1e-9 * max(1.0, pf[0] ** 2):
        raise ValueError("p is not on the shell p^2 = -r")
    d = len(pf)
    gamma = pf[0] / m
    u = pf[1:] / m  # = sqrt(gamma^2 - 1) * unit direction
    M = np.eye(d)
    M[0, 0] = gamma
    M[0, 1:] = u
    M[1:, 0] = u
    M[1:, 1:] += np.outer(u, u) / (gamma + 1.0)
    return LorentzTransform(M)


def _polarization_map(L: LorentzTransform) -> np.ndarray:
    """Matrix acting on oscillator coefficients: eta Lambda eta."""
    # eta is diagonal, so (eta L eta)_{mu nu} = eta_mu eta_nu L_{mu nu}
    out = L.matrix.copy()
    out[0, 1:] = -out[0, 1:]
    out[1:, 0] = -out[1:, 0]
    return out


def gamma_lift(L: LorentzTransform, v: FockVector) -> FockVector:
    """Gamma(Lambda): each alpha_{-n}^nu -> sum_mu (eta Lambda eta)_{mu nu} alpha_{-n}^mu."""
    if L.d != v.d:
        raise ValueError("dimension mismatch")
    M = _polarization_map(L)
    cols = [[(mu, M[mu, nu]) for mu in range(L.d) if M[mu, nu] != 0] for nu in range(L.d)]
    out = FockVector.zero(v.d)
    for occ, c in v.terms.items():
        w = FockVector.vacuum(v.d, c)
        for n, nu, k in occ:
            for _ in range(k):
                acc = FockVector.zero(v.d)
                for mu, x in cols[nu]:
                    acc = acc + x * apply_alpha(mu, -n, w)
                w = acc
        out = out + w
    return out


def conjugation(kind: str, v: FockVector) -> FockVector:
    """Antilinear involutions C0 (complex conjugation) and C1.

    C1 also flips the sign of every spatial oscillator, so it commutes with
    alpha^0 and anticommutes with alpha^k.
    """
    if kind == "C0":
        return v.map_coeffs(lambda occ, c: conj(c))
    if kind == "C1":
        def f(occ, c):
            spatial = sum(k for _, mu, k in occ if mu != 0)
            return -conj(c) if spatial % 2 else conj(c)
        return v.map_coeffs(f)
    raise ValueError(f"unknown conjugation {kind!r}")
