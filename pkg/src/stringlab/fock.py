"""Level-truncated oscillator Fock space in an unnormalized PBW basis.

A basis state is a product of creation oscillators ``alpha_{-n}^mu`` applied
to the no-excitation state.  An :data:`Occupation` stores it as a sorted
tuple of ``(n, mu, count)`` triples, ordered by ``(n, mu)``.  Because the
monomials are unnormalized, every matrix element of the oscillators is an
integer multiple of the input coefficient, so rational inputs stay rational.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping

import numpy as np

Occupation = tuple  # tuple[tuple[int, int, int], ...]

VACUUM: Occupation = ()


def eta(mu: int) -> int:
    """Diagonal Minkowski metric with signature (-, +, ..., +)."""
    return -1 if mu == 0 else 1


def conj(z):
    return z.conjugate() if isinstance(z, complex) else z


# -- occupations -------------------------------------------------------------

def level(occ: Occupation) -> int:
    return sum(n * c for n, _, c in occ)


def n_factors(occ: Occupation) -> int:
    return sum(c for _, _, c in occ)


def raise_occ(occ: Occupation, n: int, mu: int) -> Occupation:
    """Occupation with one more alpha_{-n}^mu factor."""
    out = []
    placed = False
    for (k, nu, c) in occ:
        if not placed and (k, nu) >= (n, mu):
            if (k, nu) == (n, mu):
                out.append((k, nu, c + 1))
                placed = True
                continue
            out.append((n, mu, 1))
            placed = True
        out.append((k, nu, c))
    if not placed:
        out.append((n, mu, 1))
    return tuple(out)


def lower_occ(occ: Occupation, n: int, mu: int) -> tuple[Occupation, int]:
    """Remove one alpha_{-n}^mu factor; returns (new occupation, old count)."""
    for i, (k, nu, c) in enumerate(occ):
        if k == n and nu == mu:
            if c == 1:
                return occ[:i] + occ[i + 1:], 1
            return occ[:i] + ((k, nu, c - 1),) + occ[i + 1:], c
    return occ, 0


def occ_norm(occ: Occupation, indefinite: bool = True) -> int:
    """<m, m> for a PBW monomial: product over factors of n^c * c! * eta^c."""
    val = 1
    for n, mu, c in occ:
        val *= n ** c * math.factorial(c)
        if indefinite and mu == 0 and c % 2:
            val = -val
    return val


def relabel(occ: Occupation, perm: Mapping[int, int]) -> Occupation:
    """Apply a flavor relabelling mu -> perm.get(mu, mu)."""
    return tuple(sorted((n, perm.get(mu, mu), c) for n, mu, c in occ))


def occ_to_json(occ: Occupation) -> str:
    return json.dumps([[mu, n, c] for n, mu, c in occ])


def occ_from_json(text: str) -> Occupation:
    triples = json.loads(text)
    out = []
    for mu, n, c in triples:
        if n < 1 or c < 1 or mu < 0:
            raise ValueError(f"invalid occupation triple {[mu, n, c]}")
        out.append((n, mu, c))
    out.sort()
    if len({(n, mu) for n, mu, _ in out}) != len(out):
        raise ValueError("duplicate mode in occupation")
    return tuple(out)


# -- vectors -----------------------------------------------------------------

class FockVector:
    """Finite linear combination of PBW monomials.

    Treated as immutable: operations return new vectors.
    """

    __slots__ = ("terms", "d")

    def __init__(self, terms: Mapping[Occupation, object], d: int):
        self.terms = {occ: c for occ, c in terms.items() if c != 0}
        self.d = d

    @classmethod
    def vacuum(cls, d: int, coeff=1) -> "FockVector":
        return cls({VACUUM: coeff}, d)

    @classmethod
    def monomial(cls, d: int, factors: Iterable[tuple[int, int]], coeff=1) -> "FockVector":
        """Product of alpha_{-n}^mu for (mu, n) in ``factors``, on the vacuum."""
        occ = VACUUM
        for mu, n in factors:
            if not 0 <= mu < d or n < 1:
                raise ValueError(f"bad mode (mu={mu}, n={n}) for d={d}")
            occ = raise_occ(occ, n, mu)
        return cls({occ: coeff}, d)

    @classmethod
    def zero(cls, d: int) -> "FockVector":
        return cls({}, d)

    def __iter__(self) -> Iterator[tuple[Occupation, object]]:
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, occ: Occupation):
        return self.terms.get(occ, 0)

    def _check(self, other: "FockVector"):
        if self.d != other.d:
            raise ValueError(f"dimension mismatch: {self.d} vs {other.d}")

    def __add__(self, other: "FockVector") -> "FockVector":
        self._check(other)
        out = dict(self.terms)
        for occ, c in other.terms.items():
            out[occ] = out.get(occ, 0) + c
        return FockVector(out, self.d)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __mul__(self, s) -> "FockVector":
        return FockVector({occ: s * c for occ, c in self.terms.items()}, self.d)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FockVector):
            return NotImplemented
        return self.d == other.d and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return f"FockVector(0, d={self.d})"
        parts = []
        for occ, c in sorted(self.terms.items()):
            ops = " ".join(f"a{-n}^{mu}" + (f"^{k}" if k > 1 else "") for n, mu, k in occ)
            parts.append(f"({c}) {ops or '|0>'}")
        return " + ".join(parts)

    def levels(self) -> set[int]:
        return {level(occ) for occ in self.terms}

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def map_coeffs(self, f: Callable) -> "FockVector":
        return FockVector({occ: f(occ, c) for occ, c in self.terms.items()}, self.d)

    def level_component(self, lev: int) -> "FockVector":
        return FockVector({o: c for o, c in self.terms.items() if level(o) == lev}, self.d)

    def to_array(self, basis: list[Occupation], dtype=complex) -> np.ndarray:
        index = basis_index(tuple(basis))
        out = np.zeros(len(basis), dtype=dtype)
        for occ, c in self.terms.items():
            out[index[occ]] = c
        return out

    @classmethod
    def from_array(cls, arr, basis: list[Occupation], d: int) -> "FockVector":
        return cls({occ: c for occ, c in zip(basis, arr)}, d)


@lru_cache(maxsize=64)
def basis_index(basis: tuple) -> dict:
    return {occ: i for i, occ in enumerate(basis)}


def _accumulate(out: dict, occ: Occupation, c):
    if c:
        out[occ] = out.get(occ, 0) + c


# -- oscillator action -------------------------------------------------------

def apply_alpha(mu: int, n: int, v: FockVector) -> FockVector:
    """alpha_n^mu v using [alpha_m^mu, alpha_n^nu] = m delta_{m+n} eta^{mu nu}."""
    if n == 0:
        raise ValueError("alpha_0 is the momentum; it is not an oscillator")
    if not 0 <= mu < v.d:
        raise ValueError(f"index mu={mu} out of range for d={v.d}")
    out: dict = {}
    if n < 0:
        for occ, c in v.terms.items():
            _accumulate(out, raise_occ(occ, -n, mu), c)
    else:
        factor = n * eta(mu)
        for occ, c in v.terms.items():
            new, cnt = lower_occ(occ, n, mu)
            if cnt:
                _accumulate(out, new, factor * cnt * c)
    return FockVector(out, v.d)


def _pairing(v: FockVector, w: FockVector, indefinite: bool):
    v._check(w)
    small, large = (v, w) if len(v) <= len(w) else (w, v)
    total = 0
    for occ in small.terms:
        if occ in large.terms:
            total += conj(v.terms[occ]) * w.terms[occ] * occ_norm(occ, indefinite)
    return total


def inner_indefinite(v: FockVector, w: FockVector):
    """<v, w> = (v, J w); antilinear in v."""
    return _pairing(v, w, True)


def inner_definite(v: FockVector, w: FockVector):
    """(v, w) with every eta replaced by +1; positive definite."""
    return _pairing(v, w, False)


def norm_definite(v: FockVector) -> float:
    return math.sqrt(abs(inner_definite(v, v)))


def metric_J(v: FockVector) -> FockVector:
    """The Fock lift of J: flips the sign of monomials with odd mu=0 content."""
    return v.map_coeffs(lambda occ, c: -c if occ_norm(occ) < 0 else c)


def number_op(v: FockVector) -> FockVector:
    return v.map_coeffs(lambda occ, c: level(occ) * c)


def mass_squared(v: FockVector) -> FockVector:
    return v.map_coeffs(lambda occ, c: 2 * (level(occ) - 1) * c)


# -- basis enumeration -------------------------------------------------------

@lru_cache(maxsize=None)
def partitions(n: int, max_part: int | None = None) -> tuple:
    """Partitions of n as non-increasing tuples."""
    if max_part is None:
        max_part = n
    if n == 0:
        return ((),)
    out = []
    for k in range(min(n, max_part), 0, -1):
        for rest in partitions(n - k, k):
            out.append((k,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def level_basis(d: int, lev: int, flavors: tuple | None = None) -> tuple:
    """All occupations of the given level, sorted lexicographically.

    ``flavors`` restricts the allowed mu values (default: all of 0..d-1).
    """
    if lev < 0:
        raise ValueError("level must be >= 0")
    mus = tuple(range(d)) if flavors is None else tuple(sorted(flavors))
    modes = [(n, mu) for n in range(1, lev + 1) for mu in mus]
    out: list[Occupation] = []

    def rec(i: int, remaining: int, acc: list):
        if remaining == 0:
            out.append(tuple(acc))
            return
        if i == len(modes):
            return
        n, mu = modes[i]
        if n > remaining:
            return
        for c in range(remaining // n, 0, -1):
            acc.append((n, mu, c))
            rec(i + 1, remaining - n * c, acc)
            acc.pop()
        rec(i + 1, remaining, acc)

    rec(0, lev, [])
    out.sort()
    return tuple(out)


def colored_partition_count(colors: int, lev: int) -> int:
    """Coefficient of q^lev in prod_{n>=1} (1 - q^n)^(-colors)."""
    if lev < 0:
        return 0
    series = [1] + [0] * lev
    for n in range(1, lev + 1):
        # multiply by (1 - q^n)^(-1), `colors` times
        for _ in range(colors):
            for k in range(n, lev + 1):
                series[k] += series[k - n]
    return series[lev]


# -- world-sheet commutator --------------------------------------------------

def worldsheet_ccr_partial(K: int, f: Callable, g: Callable, nodes: int = 400) -> float:
    """Double smearing of the mode-truncated [X, P] kernel on [0, pi].

    C_K(s, s') = 1 + 2 sum_{n=1}^K cos(n s) cos(n s'); the eta^{mu nu}
    factor is left out.  As K grows this tends to pi * int f g.
    """
    if K < 0:
        raise ValueError("cutoff must be >= 0")
    x, w = np.polynomial.legendre.leggauss(nodes)
    s = 0.5 * np.pi * (x + 1.0)
    w = 0.5 * np.pi * w
    fs, gs = np.asarray(f(s), dtype=float), np.asarray(g(s), dtype=float)
    total = np.dot(w, fs) * np.dot(w, gs)
    for n in range(1, K + 1):
        c = np.cos(n * s)
        total += 2.0 * np.dot(w, fs * c) * np.dot(w, gs * c)
    return float(total)
