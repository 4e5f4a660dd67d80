"""Physical state spaces H'(p), H''(p) and H_phys(p) level by level.

Exact computations at rational on-shell momenta.  For p lying in the span
of a few coordinate axes, every spatial index mu with p^mu = 0 ("free"
flavor) gives a reflection alpha^mu -> -alpha^mu that commutes with all
L_m(p) and preserves the metric.  The level space therefore splits into
sectors labelled by the set of free flavors occurring an odd number of
times; sectors whose odd sets have equal size are related by a flavor
permutation.  The ``"sector"`` method solves one representative per size
and multiplies by the binomial orbit count.  The ``"dense"`` method works on
the whole level space and serves as a cross-check.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.linalg

from . import metric_linalg as ml
from .fock import (FockVector, Occupation, colored_partition_count, conj,
                   inner_indefinite, level_basis, relabel)
from .metric_linalg import Inertia
from .virasoro import Momentum, apply_L, free_flavors, rational_shell_point


class OffShellError(ValueError):
    pass


@dataclass
class PhysicalLevelReport:
    d: int
    level: int
    r: Fraction
    p: Momentum
    dim_total: int
    dim_constrained: int
    dim_null: int
    dim_physical: int
    inertia: Inertia
    method: str = "sector"

    def as_dict(self) -> dict:
        return {
            "d": self.d, "level": self.level, "r": self.r,
            "p": list(self.p.components),
            "dim_total": self.dim_total, "dim_constrained": self.dim_constrained,
            "dim_null": self.dim_null, "dim_physical": self.dim_physical,
            "inertia": list(self.inertia), "method": self.method,
        }

    @property
    def ghost_free(self) -> bool:
        return self.inertia.n_minus == 0 and self.inertia.n_zero == 0


def shell_r(level: int) -> int:
    return 2 * (level - 1)


def _check_on_shell(d: int, level: int, p: Momentum):
    if p.d != d:
        raise ValueError(f"momentum has d={p.d}, expected {d}")
    target = -shell_r(level)
    p2 = p.minkowski_square()
    ok = p2 == target if p.exact else abs(p2 - target) < 1e-9 * max(1.0, abs(target))
    if not ok:
        raise OffShellError(f"p^2 = {p2}, level {level} needs p^2 = {target}")


def transverse_count(d: int, level: int) -> int:
    """Number of states built from d - 2 oscillator flavors at this level."""
    if d < 3:
        raise ValueError("need d >= 3")
    return colored_partition_count(d - 2, level)


# -- constraint kernels ------------------------------------------------------

def _constraint_rows(cols: list[Occupation], d: int, level: int, p: Momentum):
    row_index: dict = {}
    entries: list[tuple[int, int, object]] = []
    for j, occ in enumerate(cols):
        v = FockVector({occ: 1}, d)
        for m in range(1, level + 1):
            for out, c in apply_L(m, p, v).terms.items():
                i = row_index.setdefault((m, out), len(row_index))
                entries.append((i, j, c))
    return row_index, entries


def _kernel(cols: list[Occupation], d: int, level: int, p: Momentum) -> list[list]:
    """Coefficient vectors (over ``cols``) spanning the joint kernel of L_1..L_level."""
    row_index, entries = _constraint_rows(cols, d, level, p)
    n = len(cols)
    if p.exact:
        rows = [[Fraction(0)] * n for _ in range(len(row_index))]
        for i, j, c in entries:
            rows[i][j] += c
        return ml.nullspace_exact(rows, n)
    A = np.zeros((len(row_index), n), dtype=complex)
    for i, j, c in entries:
        A[i, j] += c
    if A.shape[0] == 0:
        return [e for e in np.eye(n)]
    scale = max(1.0, float(np.max(np.abs(A))))
    K = scipy.linalg.null_space(A / scale, rcond=1e-10)
    return [K[:, k] for k in range(K.shape[1])]


def _to_vectors(kernel, cols, d) -> list[FockVector]:
    return [FockVector(dict(zip(cols, vec)), d) for vec in kernel]


def _parity_key(occ: Occupation, free: frozenset) -> tuple:
    counts: dict = {}
    for _, mu, k in occ:
        if mu in free:
            counts[mu] = counts.get(mu, 0) + k
    return tuple(sorted(mu for mu, k in counts.items() if k % 2))


@lru_cache(maxsize=64)
def _sectors(d: int, level: int, free: tuple) -> dict:
    """Level basis split by odd-flavor set."""
    fs = frozenset(free)
    out: dict = {}
    for occ in level_basis(d, level):
        out.setdefault(_parity_key(occ, fs), []).append(occ)
    return out


def _representative_sectors(d: int, level: int, free: tuple):
    """(odd-set size j, representative columns, orbit size) for each nonempty j."""
    sectors = _sectors(d, level, free)
    reps = []
    for j in range(min(level, len(free)) + 1):
        key = free[:j]
        if key in sectors:
            reps.append((j, sectors[key], math.comb(len(free), j)))
    return reps


def _sector_perm(free: tuple, target: tuple) -> dict:
    j = len(target)
    rest_src = free[j:]
    rest_dst = tuple(mu for mu in free if mu not in set(target))
    perm = dict(zip(free[:j], target))
    perm.update(zip(rest_src, rest_dst))
    return perm


def constrained_space(d: int, level: int, p: Momentum, method: str = "sector") -> list[FockVector]:
    """Basis of H'(p) at one level: the joint kernel of L_1, ..., L_level.

    The L_0 constraint is the precondition p^2 = -2(level - 1).
    """
    _check_on_shell(d, level, p)
    if level == 0:
        return [FockVector.vacuum(d)]
    if method == "dense" or not p.exact:
        cols = list(level_basis(d, level))
        return _to_vectors(_kernel(cols, d, level, p), cols, d)
    free = free_flavors(p)
    sectors = _sectors(d, level, free)
    out: list[FockVector] = []
    rep_cache: dict = {}
    for key in sorted(sectors, key=lambda k: (len(k), k)):
        j = len(key)
        if j not in rep_cache:
            cols = sectors[free[:j]]
            rep_cache[j] = _to_vectors(_kernel(cols, d, level, p), cols, d)
        perm = _sector_perm(free, key)
        for v in rep_cache[j]:
            out.append(FockVector({relabel(o, perm): c for o, c in v.terms.items()}, d))
    return out


# -- Gram data ---------------------------------------------------------------

def _gram(vectors: list[FockVector]):
    n = len(vectors)
    G = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            x = inner_indefinite(vectors[a], vectors[b])
            G[a][b] = x
            G[b][a] = conj(x)
    return G


def _components(vectors: list[FockVector]) -> list[list[int]]:
    """Groups of vectors sharing PBW support; distinct groups are orthogonal."""
    parent = list(range(len(vectors)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict = {}
    for i, v in enumerate(vectors):
        for occ in v.terms:
            j = owner.setdefault(occ, i)
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    groups: dict = {}
    for i in range(len(vectors)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _combine(vectors: list[FockVector], coeffs) -> FockVector:
    out = FockVector.zero(vectors[0].d)
    for v, c in zip(vectors, coeffs):
        if c != 0:
            out = out + c * v
    return out


def null_subspace(constrained: list[FockVector], p: Momentum | None = None) -> list[FockVector]:
    """Radical of the indefinite Gram restricted to span(constrained)."""
    out = []
    for group in _components(constrained):
        vecs = [constrained[i] for i in group]
        for coeffs in ml.radical_basis(_gram(vecs)):
            out.append(_combine(vecs, coeffs))
    return out


def _analyse(vectors: list[FockVector]) -> tuple[int, Inertia]:
    """(radical dimension, inertia of the quotient Gram) for a spanning set."""
    null = 0
    total = Inertia(0, 0, 0)
    for group in _components(vectors):
        G = _gram([vectors[i] for i in group])
        rad = ml.radical_basis(G)
        Q = ml.quotient_gram(G, rad)
        null += len(rad)
        total = total + ml.inertia(Q)
    return null, total


def physical_gram(d: int, level: int, p: Momentum | None = None,
                  method: str = "sector") -> PhysicalLevelReport:
    """Dimensions of H', H'', H_phys and the inertia of the physical Gram."""
    if p is None:
        p = rational_shell_point(shell_r(level), d)
    _check_on_shell(d, level, p)
    r = Fraction(shell_r(level))
    dim_total = len(level_basis(d, level))
    if level == 0:
        null, inert = _analyse([FockVector.vacuum(d)])
        return PhysicalLevelReport(d, level, r, p, 1, 1, null, 1 - null, inert, method)
    if method == "dense" or not p.exact:
        cons = constrained_space(d, level, p, method="dense")
        G = _gram(cons)
        rad = ml.radical_basis(G)
        inert = ml.inertia(ml.quotient_gram(G, rad))
        return PhysicalLevelReport(d, level, r, p, dim_total, len(cons), len(rad),
                                   len(cons) - len(rad), inert, "dense")
    if method != "sector":
        raise ValueError(f"unknown method {method!r}")
    free = free_flavors(p)
    dim_c = null = 0
    inert = Inertia(0, 0, 0)
    seen = 0
    for j, cols, mult in _representative_sectors(d, level, free):
        vecs = _to_vectors(_kernel(cols, d, level, p), cols, d)
        n0, q = _analyse(vecs) if vecs else (0, Inertia(0, 0, 0))
        dim_c += mult * len(vecs)
        null += mult * n0
        inert = inert + q.scaled(mult)
        seen += mult * len(cols)
    if seen != dim_total:
        raise AssertionError(f"sectors cover {seen} of {dim_total} states")
    return PhysicalLevelReport(d, level, r, p, dim_total, dim_c, null, dim_c - null, inert, "sector")


def _row(args):
    d, level, p, method = args
    return physical_gram(d, level, p, method)


def spectrum_table(d: int, max_level: int, momenta: dict | None = None,
                   method: str = "sector", jobs: int = 1) -> list[PhysicalLevelReport]:
    """One report per level 0..max_level, at r = 2(level - 1)."""
    momenta = momenta or {}
    tasks = [(d, lev, momenta.get(lev) or rational_shell_point(shell_r(lev), d), method)
             for lev in range(max_level + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_row, tasks))
    return [_row(t) for t in tasks]
