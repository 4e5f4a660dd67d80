"""Constraint operators L_m(p) at fixed center-of-mass momentum."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .fock import (FockVector, Occupation, eta, level_basis, lower_occ,
                   raise_occ)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Momentum:
    components: tuple

    def __init__(self, components: Iterable):
        object.__setattr__(self, "components", tuple(components))

    @property
    def d(self) -> int:
        return len(self.components)

    def __getitem__(self, mu):
        return self.components[mu]

    def __iter__(self):
        return iter(self.components)

    def minkowski_square(self):
        p = self.components
        return -p[0] * p[0] + sum(x * x for x in p[1:])

    @property
    def exact(self) -> bool:
        return all(isinstance(x, (int, Fraction)) for x in self.components)

    def as_float(self) -> tuple:
        return tuple(float(x) for x in self.components)

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.components) + ")"


def _half(c):
    return HALF * c if isinstance(c, (int, Fraction)) else 0.5 * c


def _L_monomial(m: int, p: Momentum, occ: Occupation, c, out: dict) -> None:
    d = p.d

    def acc(o, x):
        if x:
            out[o] = out.get(o, 0) + x

    if m == 0:
        lev = sum(n * k for n, _, k in occ)
        acc(occ, (_half(p.minkowski_square()) + lev) * c)
        return

    # alpha_m . p
    if m > 0:
        for n, mu, k in occ:
            if n == m and p[mu] != 0:
                new, _ = lower_occ(occ, n, mu)
                acc(new, p[mu] * m * k * c)
    else:
        for mu in range(d):
            if p[mu] != 0:
                acc(raise_occ(occ, -m, mu), eta(mu) * p[mu] * c)

    # 1/2 sum_{n not in {0, m}} alpha_{m-n} . alpha_n, annihilators applied first
    for n, mu, k in occ:
        partner = m - n
        if partner == 0:
            continue
        new, _ = lower_occ(occ, n, mu)
        # eta_{mu mu} * (n eta^{mu mu} k): the metric factors cancel
        base = n * k * c
        if partner > 0:
            # both annihilate; the ordered sum visits each ordering once
            new2, k2 = lower_occ(new, partner, mu)
            if k2:
                acc(new2, _half(base * partner * k2 * eta(mu)))
        else:
            # mixed pair: the two orderings combine to weight one
            acc(raise_occ(new, -partner, mu), base)
    if m < 0:
        for n in range(m + 1, 0):
            partner = m - n
            for mu in range(d):
                acc(raise_occ(raise_occ(occ, -n, mu), -partner, mu), _half(eta(mu) * c))


def apply_L(m: int, p: Momentum, v: FockVector) -> FockVector:
    """L_m(p) v.

    L_0 = p^2/2 + N and, for m != 0, L_m = alpha_m . p
    + 1/2 sum_{n not in {0, m}} alpha_{m-n} . alpha_n.
    """
    if p.d != v.d:
        raise ValueError(f"momentum has d={p.d}, vector has d={v.d}")
    out: dict = {}
    for occ, c in v.terms.items():
        _L_monomial(m, p, occ, c, out)
    return FockVector(out, v.d)


# -- bracket verification ----------------------------------------------------

@dataclass
class BracketReport:
    m: int
    n: int
    d: int
    probe_level: int
    n_probes: int
    matches_closure: bool
    central_coefficient: object
    failures: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "d": self.d, "probe_level": self.probe_level,
                "n_probes": self.n_probes, "matches_closure": self.matches_closure,
                "central_coefficient": self.central_coefficient,
                "failures": [str(f) for f in self.failures[:5]]}


def free_flavors(p: Momentum) -> tuple:
    """Spatial indices on which p vanishes.

    Permutations of these indices commute with every L_m(p) and preserve
    the metric.
    """
    return tuple(mu for mu in range(1, p.d) if p[mu] == 0)


def probe_basis(p: Momentum, max_level: int, reduced: bool = True) -> list[Occupation]:
    """PBW monomials of level <= max_level used as probes.

    With ``reduced`` the free flavors are restricted to the first
    ``max_level`` of them; every monomial is a relabelling of one of these,
    and the relabelling commutes with any operator built from the L_m(p).
    """
    d = p.d
    flavors = None
    if reduced:
        free = free_flavors(p)
        keep = set(free[:max_level])
        flavors = tuple(mu for mu in range(d) if mu not in free or mu in keep)
    out = []
    for lev in range(max_level + 1):
        out.extend(level_basis(d, lev, flavors))
    return out


def virasoro_bracket(m: int, n: int, p: Momentum, probe_level: int,
                     reduced: bool = True, probes: Sequence[Occupation] | None = None,
                     tol: float = 1e-9) -> BracketReport:
    """Check ([L_m, L_n] - (m - n) L_{m+n}) v = c delta_{m+n,0} v on probes."""
    if probes is None:
        probes = probe_basis(p, probe_level, reduced)
    exact = p.exact
    central = None
    failures = []
    for occ in probes:
        v = FockVector({occ: 1}, p.d)
        res = (apply_L(m, p, apply_L(n, p, v)) - apply_L(n, p, apply_L(m, p, v))
               - (m - n) * apply_L(m + n, p, v))
        extra = {o: x for o, x in res.terms.items() if o != occ}
        c = res.coeff(occ)
        if not exact:
            extra = {o: x for o, x in extra.items() if abs(x) > tol}
        if extra:
            failures.append(occ)
            continue
        if m + n != 0 and (c if exact else abs(c) > tol):
            failures.append(occ)
            continue
        if central is None:
            central = c
        elif (c != central) if exact else abs(c - central) > tol:
            failures.append(occ)
    if central is None:
        central = 0
    return BracketReport(m, n, p.d, probe_level, len(probes), not failures,
                         central if m + n == 0 else 0, failures)


def expected_central(d, m):
    """d (m^3 - m) / 12, the value the bracket sweep is compared against."""
    return Fraction(d * (m ** 3 - m), 12)


# -- on-shell momenta --------------------------------------------------------

def rational_shell_point(r, d: int, sheet: str = "+", scale=1) -> Momentum:
    """Exact rational p with p^2 = -r, built in the (p^0, p^1) plane.

    Uses p^0 + p^1 = 2s and p^0 - p^1 = r / (2s); ``scale`` picks s and so
    yields distinct points on the same shell.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    if sheet not in ("+", "-", "any"):
        raise ValueError("sheet must be '+', '-' or 'any'")
    r = Fraction(r)
    s = Fraction(scale)
    if s <= 0:
        raise ValueError("scale must be positive")
    if sheet != "any" and s + r / (4 * s) <= 0:
        # p^0 = s + r/(4s) > 0 needs s^2 > -r/4
        s = max(s, Fraction(math.isqrt(int(-r / 4) + 1) + 1))
    p0 = s + r / (4 * s)
    p1 = s - r / (4 * s)
    if sheet == "-":
        p0, p1 = -p0, -p1
    return Momentum((p0, p1) + (Fraction(0),) * (d - 2))
