"""Second quantization over a discretized single-string space.

The single-string space is a finite direct sum of blocks.  A block carries
nodes p_k on one forward shell V_r^+, positive weights w_k, and a list of
PBW monomials at level r/2 + 1.  Entry i = (block, node, monomial) has the
diagonal metric G_i = w_k <m, m>, so the indefinite pairing of two flat
vectors is sum_i conj(u_i) G_i v_i and the definite one uses |G_i|.

Multi-string states are finite maps from multisets of entries to
amplitudes, in the unnormalized basis c_{i1}^+ ... c_{ik}^+ Omega with
[c_i, c_j^+] = G_i delta_ij.  Then a(f) = sum conj(f_i) c_i satisfies
[a(f), a^+(g)] = <f, g>.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from . import metric_linalg as ml
from .fock import FockVector, level_basis, occ_norm
from .lorentz import LorentzTransform, conjugation, gamma_lift, rational_boost
from .mass_shell import ShellSampling, bump
from .propagator import TestFunctionSpec, project_pi
from .spectrum import _kernel
from .virasoro import Momentum, apply_L, rational_shell_point


class BasisMismatch(ValueError):
    pass


class NodeSetNotClosed(ValueError):
    pass


# -- single-string discretization --------------------------------------------

@dataclass
class Block:
    r: int
    momenta: list  # list[Momentum], exact where possible
    weights: np.ndarray
    basis: tuple  # occupations at level r/2 + 1

    @property
    def level(self) -> int:
        return self.r // 2 + 1

    @property
    def sampling(self) -> ShellSampling:
        nodes = np.array([m.as_float() for m in self.momenta])
        return ShellSampling(float(self.r), nodes, np.asarray(self.weights, dtype=float))


class DiscretizedSingleString:
    """Finite stand-in for H_+ = sum over r >= 0 of L^2(V_r^+, F, mu_r)."""

    def __init__(self, d: int, blocks: Sequence[Block], max_entries: int | None = None):
        for b in blocks:
            if b.r < 0:
                raise ValueError("tachyon shell r = -2 is excluded from H_+")
            if b.r % 2:
                raise ValueError("mass levels are r = 0, 2, 4, ...")
            if any(sum(n * c for n, _, c in occ) != b.level for occ in b.basis):
                raise ValueError(f"block r={b.r} basis is not at level {b.level}")
            if len(b.momenta) != len(b.weights):
                raise ValueError("one weight per node")
            b.sampling  # validates on-shell nodes and positive weights
        self.d = d
        self.blocks = list(blocks)
        self.entries = [(bi, k, occ) for bi, b in enumerate(self.blocks)
                        for k in range(len(b.momenta)) for occ in b.basis]
        if max_entries is not None and len(self.entries) > max_entries:
            raise ValueError(f"{len(self.entries)} entries exceeds the cap {max_entries}")
        self.index = {e: i for i, e in enumerate(self.entries)}
        self.G = np.array([float(self.blocks[bi].weights[k]) * occ_norm(occ)
                           for bi, k, occ in self.entries])
        self._cons = None

    def __len__(self):
        return len(self.entries)

    # vectors
    def zero(self) -> np.ndarray:
        return np.zeros(len(self), dtype=complex)

    def from_values(self, fn: Callable[[int, int, Momentum], FockVector]) -> np.ndarray:
        """Flat vector with node values fn(block, node, momentum)."""
        out = self.zero()
        for bi, b in enumerate(self.blocks):
            for k, p in enumerate(b.momenta):
                self._fill(out, bi, k, fn(bi, k, p))
        return out

    def _fill(self, out, bi, k, v: FockVector, tol: float = 1e-13):
        if v is None:
            return
        scale = max(v.max_abs(), 1.0)
        for occ, c in v.terms.items():
            i = self.index.get((bi, k, occ))
            if i is None:
                if abs(c) > tol * scale:
                    raise BasisMismatch(f"component {occ} outside block {bi} basis")
                continue
            out[i] += complex(c)

    def node_value(self, u: np.ndarray, bi: int, k: int) -> FockVector:
        b = self.blocks[bi]
        terms = {occ: u[self.index[(bi, k, occ)]] for occ in b.basis}
        return FockVector(terms, self.d)

    def project(self, F: TestFunctionSpec) -> np.ndarray:
        """Pi F restricted to the nodes."""
        out = self.zero()
        for bi, b in enumerate(self.blocks):
            sv = project_pi(F, b.sampling)
            for k in range(len(b.momenta)):
                vals = sv.at(k)
                if vals:
                    self._fill(out, bi, k, FockVector(vals, self.d) * (1.0 / 1.0))
        # project_pi includes sqrt(2 pi); nothing else to rescale
        return out

    def pairing(self, u: np.ndarray, v: np.ndarray) -> complex:
        return complex(np.sum(np.conj(u) * self.G * v))

    def definite_pairing(self, u: np.ndarray, v: np.ndarray) -> complex:
        return complex(np.sum(np.conj(u) * np.abs(self.G) * v))

    def definite_norm(self, u: np.ndarray) -> float:
        return math.sqrt(max(self.definite_pairing(u, u).real, 0.0))

    # constraints
    def constrained_data(self):
        """(H'_D basis, H''_D basis) as lists of flat vectors, node by node.

        At each node the kernel of L_1 .. L_level on the block's span is
        computed exactly when the node momentum is rational; the radical
        is taken within that kernel.
        """
        if self._cons is None:
            prime, radical = [], []
            for bi, b in enumerate(self.blocks):
                cols = list(b.basis)
                for k, p in enumerate(b.momenta):
                    ker = _kernel(cols, self.d, b.level, p)
                    vecs = [FockVector(dict(zip(cols, v)), self.d) for v in ker]
                    G = [[_inner(x, y) for y in vecs] for x in vecs]
                    rad = ml.radical_basis(G) if vecs else []
                    for v in vecs:
                        prime.append(self._flat(bi, k, v))
                    for coeffs in rad:
                        w = FockVector.zero(self.d)
                        for v, c in zip(vecs, coeffs):
                            if c != 0:
                                w = w + c * v
                        radical.append(self._flat(bi, k, w))
            self._cons = (prime, radical)
        return self._cons

    def _flat(self, bi, k, v: FockVector) -> np.ndarray:
        out = self.zero()
        self._fill(out, bi, k, v)
        return out

    def complement_of_constrained(self) -> np.ndarray:
        """Columns: a definite-orthonormal basis of (H'_D)^perp (definite product)."""
        prime, _ = self.constrained_data()
        s = np.sqrt(np.abs(self.G))
        if not prime:
            return np.diag(1.0 / s).astype(complex)
        B = np.array(prime).T * s[:, None]
        Q = scipy.linalg.null_space(B.conj().T)
        return Q / s[:, None]

    def physical_complement(self, blocks=None) -> list[np.ndarray]:
        """Definite-orthogonal complement of H''_D inside H'_D (the space M).

        With ``blocks`` given, only vectors supported on those blocks enter.
        """
        prime, radical = self.constrained_data()
        if blocks is not None:
            keep = np.array([bi in blocks for bi, _, _ in self.entries])
            prime = [v for v in prime if not np.any(v[~keep])]
            radical = [v for v in radical if not np.any(v[~keep])]
        s = np.sqrt(np.abs(self.G))
        P = scipy.linalg.orth(np.array(prime).T * s[:, None])
        if radical:
            R = scipy.linalg.orth(np.array(radical).T * s[:, None])
            P = P - R @ (R.conj().T @ P)
            P = scipy.linalg.orth(P, rcond=1e-10)
        return [P[:, j] / s for j in range(P.shape[1])]

    def in_constrained(self, u: np.ndarray, tol: float = 1e-9) -> float:
        """Relative definite norm of the component of u outside H'_D."""
        C = self.complement_of_constrained()
        n = self.definite_norm(u)
        if n == 0:
            return 0.0
        comp = C.conj().T @ (np.abs(self.G) * u)
        return float(np.linalg.norm(comp) / n)

    # Poincare
    def node_map(self, L: LorentzTransform) -> dict:
        """(block, node) -> (block, node') with p_{node'} = Lambda p_node, where present."""
        out = {}
        for bi, b in enumerate(self.blocks):
            lookup = {tuple(p.components): k for k, p in enumerate(b.momenta)}
            for k, p in enumerate(b.momenta):
                q = L.apply(p)
                k2 = lookup.get(tuple(q.components))
                if k2 is None and not (L.exact and p.exact):
                    qf = np.array(q.as_float())
                    for kk, pp in enumerate(b.momenta):
                        if np.allclose(qf, pp.as_float(), rtol=1e-12, atol=1e-12):
                            k2 = kk
                if k2 is not None:
                    if not math.isclose(float(b.weights[k]), float(b.weights[k2]), rel_tol=1e-12):
                        raise ValueError("node weights are not boost invariant")
                    out[(bi, k)] = (bi, k2)
        return out

    def single_string_U(self, a, L: LorentzTransform) -> tuple[np.ndarray, np.ndarray]:
        """Matrix of U(a, Lambda) on entries, plus a mask of entries whose image leaves the set.

        (U psi)(p) = exp(-i p.a) Gamma(Lambda) psi(Lambda^{-1} p).
        """
        a = np.zeros(self.d) if a is None else np.asarray(a, dtype=float)
        nmap = self.node_map(L)
        n = len(self)
        U = np.zeros((n, n), dtype=complex)
        leaving = np.zeros(n, dtype=bool)
        for i, (bi, k, occ) in enumerate(self.entries):
            tgt = nmap.get((bi, k))
            if tgt is None:
                leaving[i] = True
                continue
            _, k2 = tgt
            q = np.array(self.blocks[bi].momenta[k2].as_float())
            phase = np.exp(-1j * (-q[0] * a[0] + q[1:] @ a[1:]))
            img = gamma_lift(L, FockVector({occ: 1}, self.d))
            for occ2, c in img.terms.items():
                j = self.index.get((bi, k2, occ2))
                if j is None:
                    if abs(c) > 1e-13:
                        raise BasisMismatch("Gamma(Lambda) leaves the block basis")
                    continue
                U[j, i] += phase * complex(c)
        return U, leaving


def _inner(x: FockVector, y: FockVector):
    from .fock import inner_indefinite
    return inner_indefinite(x, y)


# -- multi-string states -----------------------------------------------------

def _key_norm(key: tuple, G: np.ndarray, definite: bool) -> float:
    """<m, m> for a multi-string monomial: prod over entries of n! G_i^n."""
    val = 1.0
    for i, n in Counter(key).items():
        g = abs(G[i]) if definite else G[i]
        val *= math.factorial(n) * g ** n
    return val


class MultiStringState:
    """Finite superposition of unnormalized multi-string monomials."""

    __slots__ = ("terms", "space", "max_quanta")

    def __init__(self, terms: dict, space: DiscretizedSingleString, max_quanta: int = 3):
        self.terms = {tuple(sorted(k)): v for k, v in terms.items() if v != 0}
        self.space = space
        self.max_quanta = max_quanta

    @classmethod
    def vacuum(cls, space, max_quanta: int = 3):
        return cls({(): 1.0 + 0j}, space, max_quanta)

    @classmethod
    def product(cls, space, vectors: Sequence[np.ndarray], max_quanta: int = 3):
        """a^+(v_1) ... a^+(v_n) Omega."""
        if len(vectors) > max_quanta:
            raise ValueError(f"{len(vectors)} quanta exceeds the cap {max_quanta}")
        st = cls.vacuum(space, max_quanta)
        for v in vectors:
            st = create(v, st)
        return st

    def _same(self, other):
        if self.space is not other.space:
            raise BasisMismatch("states live on different discretizations")

    def __add__(self, other):
        self._same(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return MultiStringState(out, self.space, max(self.max_quanta, other.max_quanta))

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, s):
        return MultiStringState({k: s * v for k, v in self.terms.items()}, self.space, self.max_quanta)

    __rmul__ = __mul__

    def quanta(self) -> set:
        return {len(k) for k in self.terms}

    def inner(self, other, definite: bool = False) -> complex:
        self._same(other)
        G = self.space.G
        small, large = (self, other) if len(self.terms) <= len(other.terms) else (other, self)
        total = 0j
        for k in small.terms:
            if k in large.terms:
                total += np.conj(self.terms[k]) * other.terms[k] * _key_norm(k, G, definite)
        return complex(total)

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self, definite=True).real, 0.0))


def create(f: np.ndarray, psi: MultiStringState) -> MultiStringState:
    """a^+(f) psi."""
    out: dict = {}
    nz = np.nonzero(f)[0]
    for key, amp in psi.terms.items():
        for i in nz:
            k2 = tuple(sorted(key + (int(i),)))
            out[k2] = out.get(k2, 0) + f[i] * amp
    return MultiStringState(out, psi.space, psi.max_quanta)


def annihilate(f: np.ndarray, psi: MultiStringState, definite: bool = False) -> MultiStringState:
    """a(f) psi; with ``definite`` the annihilator of the definite structure."""
    G = psi.space.G
    out: dict = {}
    for key, amp in psi.terms.items():
        counts = Counter(key)
        for i, n in counts.items():
            fi = f[i]
            if fi == 0:
                continue
            g = abs(G[i]) if definite else G[i]
            lst = list(key)
            lst.remove(i)
            k2 = tuple(lst)
            out[k2] = out.get(k2, 0) + np.conj(fi) * n * g * amp
    return MultiStringState(out, psi.space, psi.max_quanta)


def field_apply(f: np.ndarray, psi: MultiStringState) -> MultiStringState:
    """Phi(F) psi = a^+(Pi F) psi + a(Pi F) psi, with f = Pi F on the nodes."""
    if len(f) != len(psi.space):
        raise BasisMismatch("field vector and state use different discretizations")
    return create(f, psi) + annihilate(f, psi)


def field_commutator_residual(f: np.ndarray, g: np.ndarray, psi: MultiStringState) -> float:
    """|| ([Phi(F), Phi(G)] - 2i Im <f, g>) psi || relative to the largest term."""
    space = psi.space
    c = 2j * space.pairing(f, g).imag
    fg = field_apply(f, field_apply(g, psi))
    gf = field_apply(g, field_apply(f, psi))
    res = fg - gf - c * psi
    scale = max(fg.norm(), gf.norm(), abs(c) * psi.norm(), 1e-300)
    return res.norm() / scale


def second_quantize(U: np.ndarray, leaving: np.ndarray, psi: MultiStringState,
                    tol: float = 0.0) -> MultiStringState:
    """Gamma(U) acting quantum by quantum."""
    cols = {}
    out = MultiStringState({}, psi.space, psi.max_quanta)
    for key, amp in psi.terms.items():
        st = MultiStringState({(): amp}, psi.space, psi.max_quanta)
        for i in key:
            if leaving[i]:
                if abs(amp) > tol:
                    raise NodeSetNotClosed("a quantum sits at a node whose image is not in the node set")
                st = MultiStringState({}, psi.space, psi.max_quanta)
                break
            if i not in cols:
                cols[i] = U[:, i]
            st = create(cols[i], st)
        out = out + st
    return out


def poincare_act(a, L: LorentzTransform, psi: MultiStringState, tol: float = 0.0) -> MultiStringState:
    """U(a, Lambda) = Gamma(U(a, Lambda)) on multi-string states."""
    U, leaving = psi.space.single_string_U(a, L)
    return second_quantize(U, leaving, psi, tol)


def poincare_inverse(a, L: LorentzTransform, psi: MultiStringState, tol: float = 0.0):
    """U(a, Lambda)^{-1} = U(-Lambda^{-1} a, Lambda^{-1})."""
    Li = L.inverse()
    a = np.zeros(psi.space.d) if a is None else np.asarray(a, dtype=float)
    ai = -(Li.matrix.astype(float) @ a)
    return poincare_act(ai, Li, psi, tol)


def covariance_residual(F: TestFunctionSpec, a, L: LorentzTransform, psi: MultiStringState) -> float:
    """|| U Phi(F) U^{-1} psi - Phi(F_{a, Lambda}) psi || relative."""
    space = psi.space
    f = space.project(F)
    f_t = space.project(F.transformed(a, L))
    lhs = poincare_act(a, L, field_apply(f, poincare_inverse(a, L, psi)))
    rhs = field_apply(f_t, psi)
    scale = max(lhs.norm(), rhs.norm(), 1e-300)
    return (lhs - rhs).norm() / scale


# -- constrained test functions ---------------------------------------------

def light_cone_rapidity(p) -> float:
    """ln(p^0 + p^1); -inf when p^0 + p^1 <= 0."""
    s = float(p[0]) + float(p[1])
    return math.log(s) if s > 0 else -math.inf


def rapidity_bump(center: float, half_width: float) -> Callable:
    def f(p):
        u = light_cone_rapidity(p)
        return 0.0 if not math.isfinite(u) else float(bump(np.array([(u - center) / half_width]))[0])
    return f


def _boost_01(rapidity: float, d: int) -> LorentzTransform:
    M = np.eye(d)
    M[0, 0] = M[1, 1] = math.cosh(rapidity)
    M[0, 1] = M[1, 0] = math.sinh(rapidity)
    return LorentzTransform(M)


def _rotation_taking_e1_to(n: np.ndarray) -> np.ndarray:
    """Proper rotation of R^{d-1} with e_1 -> n (n a unit vector)."""
    m = len(n)
    e = np.zeros(m)
    e[0] = 1.0
    c = float(n @ e)
    if c > 1 - 1e-15:
        return np.eye(m)
    if c < -1 + 1e-15:
        R = np.eye(m)
        R[0, 0] = R[1, 1] = -1.0
        return R
    v = n - c * e
    v /= np.linalg.norm(v)
    s = math.sqrt(max(0.0, 1 - c * c))
    return (np.eye(m) + s * (np.outer(v, e) - np.outer(e, v))
            + (c - 1) * (np.outer(e, e) + np.outer(v, v)))


def transported_family(v0: FockVector, p_ref: Momentum, r: float) -> Callable:
    """psi0(p) = Gamma(Lambda_p) v0 with Lambda_p p_ref = p.

    ``p_ref`` must lie in the (p^0, p^1) plane on the forward sheet of V_r.
    Lambda_p is a boost along axis 1 followed by a rotation of e_1 onto the
    direction of p_vec; v0 in H'(p_ref) gives psi0(p) in H'(p).
    """
    d = p_ref.d
    ref = np.array(p_ref.as_float())
    if np.any(ref[2:] != 0) or ref[0] <= 0:
        raise ValueError("p_ref must be a forward momentum in the (0, 1) plane")
    u_ref = math.log(ref[0] + ref[1])

    def psi0(p) -> FockVector:
        p = np.asarray(p, dtype=float)
        k = np.linalg.norm(p[1:])
        if k == 0:
            n = np.zeros(d - 1)
            n[0] = 1.0
        else:
            n = p[1:] / k
        # rapidity along the direction of p_vec
        u = math.log(p[0] + k)
        B = _boost_01(u - u_ref, d)
        R = np.eye(d)
        R[1:, 1:] = _rotation_taking_e1_to(n)
        return gamma_lift(LorentzTransform(R @ B.matrix), v0)
    return psi0


def constrained_test_function(r: int, psi0: Callable, chi: Callable, d: int,
                              check_nodes: Sequence = (), tol: float = 1e-9,
                              amplitude: float = 1.0) -> TestFunctionSpec:
    """F with F~(p) = (2 pi)^(-1/2) chi(p^2 + r) h(p_vec).

    h(p_vec) = psi(omega_r(p_vec), p_vec) with the C1-symmetrized family
    psi(p) = psi0(p) + C1 psi0(omega, -p_vec).  Every node in
    ``check_nodes`` is checked for L_m(p) psi(p) = 0, m = 1..level.
    """
    if r < 0 or r % 2:
        raise ValueError("r must be one of 0, 2, 4, ...")
    lev = r // 2 + 1
    if abs(chi(0.0) - 1.0) > 1e-14:
        raise ValueError("chi(0) must be 1")

    def h(pvec) -> FockVector:
        pvec = np.asarray(pvec, dtype=float)
        om = math.sqrt(float(pvec @ pvec) + r)
        a = psi0(np.concatenate([[om], pvec]))
        b = psi0(np.concatenate([[om], -pvec]))
        return amplitude * (a + conjugation("C1", b))

    for p in check_nodes:
        pf = np.asarray(p.as_float() if isinstance(p, Momentum) else p, dtype=float)
        v = h(pf[1:])
        if v.levels() - {lev}:
            raise ValueError(f"psi0 has components off level {lev}")
        mom = Momentum(tuple(pf))
        scale = max(v.max_abs(), 1e-300)
        for m in range(1, lev + 1):
            res = apply_L(m, mom, v)
            if res.max_abs() > tol * scale * max(1.0, float(np.max(np.abs(pf)))):
                raise ValueError(f"psi violates L_{m} at p = {tuple(pf)}")
    return TestFunctionSpec(d, "spectral", spectral_r=r, chi=chi, h=h)


def scaled_bump_chi(width: float = 4.0) -> Callable:
    """chi(t) = b(t / width) / b(0), so chi(0) = 1."""
    b0 = math.exp(-1.0)

    def chi(t):
        return float(bump(np.array([t / width]))[0]) / b0
    return chi


# -- standard discretization --------------------------------------------------

def boost_orbit_space(d: int = 26, spec: Sequence[tuple] = ((0, 5), (2, 3)),
                      flavors: tuple = (0, 1, 2, 3), boost=(Fraction(5, 4), Fraction(3, 4)),
                      max_entries: int | None = 64) -> DiscretizedSingleString:
    """Blocks of nodes on boost orbits Lambda^j p_0, j centred on 0.

    ``spec`` lists (r, node count).  The monomials use only ``flavors``;
    these must contain 0 and 1 so the boost maps the span to itself.  The
    rapidity step is ln(c + s) and every node gets weight step / 2.
    """
    if not {0, 1} <= set(flavors):
        raise ValueError("flavors must include 0 and 1")
    L = rational_boost(boost[0], boost[1], 1, d)
    step = math.log(float(boost[0] + boost[1]))
    Li = L.inverse()
    blocks = []
    for r, K in spec:
        p = rational_shell_point(r, d)
        for _ in range(K // 2):
            p = Li.apply(p)
        momenta = []
        for _ in range(K):
            momenta.append(p)
            p = L.apply(p)
        basis = level_basis(d, r // 2 + 1, tuple(flavors))
        blocks.append(Block(r, momenta, np.full(K, step / 2.0), basis))
    return DiscretizedSingleString(d, blocks, max_entries)


def _block_for(space: DiscretizedSingleString, r: int) -> int:
    for bi, b in enumerate(space.blocks):
        if b.r == r:
            return bi
    raise ValueError(f"no block on the r = {r} shell")


# Reference polarizations in H'(p_ref) built from the transverse flavors 2, 3,
# and constraint-violating controls containing alpha^0_{-1}.
_SCENARIOS = {
    1: (((2, 1),), ((3, 1),), ((0, 1),), 1.6),
    2: (((2, 1), (3, 1)), None, ((0, 1), (2, 1)), 0.8),
}


def standard_constrained_function(space: DiscretizedSingleString, level: int = 1,
                                  center: float = math.log(2.0), half_width: float | None = None,
                                  chi_width: float = 4.0) -> TestFunctionSpec:
    """Constrained F on the r = 2(level - 1) shell with a rapidity bump.

    The default centre keeps the support off the last orbit node, so the
    boosted function still lives on the node set.
    """
    if level not in _SCENARIOS:
        raise ValueError("scenarios exist for levels 1 and 2")
    first, second, _, hw = _SCENARIOS[level]
    d = space.d
    r = 2 * (level - 1)
    v0 = FockVector.monomial(d, first)
    if second is not None:
        v0 = v0 + FockVector.monomial(d, second) * 0.5
    psi0 = transported_family(v0, rational_shell_point(r, d), r)
    bmp = rapidity_bump(center, (half_width or hw) * math.log(2.0))
    block = space.blocks[_block_for(space, r)]
    return constrained_test_function(r, lambda p: psi0(p) * bmp(p), scaled_bump_chi(chi_width), d,
                                     check_nodes=block.momenta)


def unconstrained_control(space: DiscretizedSingleString, level: int = 1,
                          center: float = math.log(2.0), chi_width: float = 4.0) -> TestFunctionSpec:
    """Same shape as the standard function but with a polarization outside H'(p)."""
    _, _, bad, hw = _SCENARIOS[level]
    d = space.d
    v = FockVector.monomial(d, bad)
    bmp = rapidity_bump(center, hw * math.log(2.0))
    r = 2 * (level - 1)

    def h(pvec):
        pvec = np.asarray(pvec, dtype=float)
        om = math.sqrt(float(pvec @ pvec) + r)
        return bmp(np.concatenate([[om], pvec])) * v
    return TestFunctionSpec(d, "spectral", spectral_r=r, chi=scaled_bump_chi(chi_width), h=h)


# -- observable lift ---------------------------------------------------------

@dataclass
class LiftReport:
    preserves_constrained: float
    preserves_radical: float
    annihilator: float
    tol: float
    n_prime_probes: int
    n_radical_probes: int

    @property
    def passed(self) -> dict:
        return {"i": self.preserves_constrained <= self.tol,
                "ii": self.preserves_radical <= self.tol,
                "iii": self.annihilator <= self.tol}

    def as_dict(self) -> dict:
        return {"i_outside_K_prime": self.preserves_constrained,
                "ii_pairing_with_K_prime": self.preserves_radical,
                "iii_annihilator": self.annihilator, "tol": self.tol,
                "passed": self.passed, "n_prime_probes": self.n_prime_probes,
                "n_radical_probes": self.n_radical_probes}


def outside_constrained(psi: MultiStringState) -> float:
    """Relative size of the part of psi outside F(H'_D).

    psi lies in F(H'_D) iff b(h) psi = 0 for every h in the definite
    complement of H'_D, b the definite annihilator.
    """
    n = psi.norm()
    if n == 0:
        return 0.0
    C = psi.space.complement_of_constrained()
    total = 0.0
    for j in range(C.shape[1]):
        total += annihilate(C[:, j], psi, definite=True).norm() ** 2
    return math.sqrt(total) / n


def preimage_mask(space: DiscretizedSingleString, L: LorentzTransform) -> np.ndarray:
    """Entries whose node is Lambda of another node in the set."""
    images = set(space.node_map(L).values())
    return np.array([(bi, k) in images for bi, k, _ in space.entries])


def probe_battery(space: DiscretizedSingleString, kind: str, count: int, seed: int = 0,
                  max_quanta: int = 3, allowed: np.ndarray | None = None) -> list[MultiStringState]:
    """Seeded probe states.

    kind: ``any`` (generic K_f), ``prime`` (K'_f) or ``radical`` (K''_f,
    at least one radical quantum).  ``allowed`` masks the entries quanta
    may occupy.
    """
    rng = np.random.default_rng(seed)
    prime, radical = space.constrained_data()
    if allowed is not None:
        prime = [v for v in prime if not np.any(v[~allowed])]
        radical = [v for v in radical if not np.any(v[~allowed])]
    out = [MultiStringState.vacuum(space, max_quanta)] if kind != "radical" else []

    # quanta are sparse combinations so multi-string supports stay small
    def rand_in(vecs):
        pick = rng.choice(len(vecs), size=min(2, len(vecs)), replace=False)
        c = rng.normal(size=len(pick)) + 1j * rng.normal(size=len(pick))
        return sum(ci * vecs[j] for ci, j in zip(c, pick))

    def generic():
        v = np.zeros(len(space), dtype=complex)
        slots = np.arange(len(space)) if allowed is None else np.nonzero(allowed)[0]
        pick = rng.choice(slots, size=min(4, len(slots)), replace=False)
        v[pick] = rng.normal(size=len(pick)) + 1j * rng.normal(size=len(pick))
        return v

    while len(out) < count:
        nq = 1 + len(out) % max_quanta
        if kind == "any":
            vecs = [generic() for _ in range(nq)]
        elif kind == "prime":
            vecs = [rand_in(prime) for _ in range(nq)]
        elif kind == "radical":
            if not radical:
                raise ValueError("the discretization has no radical")
            vecs = [rand_in(radical)] + [rand_in(prime) for _ in range(nq - 1)]
        else:
            raise ValueError(f"unknown probe kind {kind!r}")
        out.append(MultiStringState.product(space, vecs, max_quanta))
    return out


def observable_lift_check(F: TestFunctionSpec, space: DiscretizedSingleString,
                          prime_probes: Sequence[MultiStringState],
                          radical_probes: Sequence[MultiStringState],
                          ms: Sequence[int] = (1, 2), tol: float = 1e-8) -> LiftReport:
    """(i) Phi(F) K'_f in K'_f, (ii) Phi(F) K''_f orthogonal to K'_f, (iii) a(Pi L^_{-m} F) K'_f = 0."""
    f = space.project(F)
    worst_i = 0.0
    for psi in prime_probes:
        worst_i = max(worst_i, outside_constrained(field_apply(f, psi)))
    worst_ii = 0.0
    for psi in radical_probes:
        x = field_apply(f, psi)
        nx = x.norm()
        if nx == 0:
            continue
        for xi in prime_probes:
            nxi = xi.norm()
            if nxi:
                worst_ii = max(worst_ii, abs(xi.inner(x)) / (nx * nxi))
    worst_iii = 0.0
    for m in ms:
        g = space.project(F.with_constraint(-m))
        ng = space.definite_norm(g)
        if ng == 0:
            continue
        for psi in prime_probes:
            npsi = psi.norm()
            if npsi:
                worst_iii = max(worst_iii, annihilate(g, psi).norm() / (ng * npsi))
    return LiftReport(worst_i, worst_ii, worst_iii, tol, len(prime_probes), len(radical_probes))


def physical_fock_gram(space: DiscretizedSingleString, n_quanta: int = 2, blocks=(0,)):
    """Inertia of the Gram of symmetric products of H'_D basis vectors.

    Returns (inertia of the full family, number of products with at least
    one radical factor).  Built from a basis adapted to H'_D = H''_D + M,
    keeping vectors supported in the listed blocks.
    """
    from itertools import combinations_with_replacement
    _, radical = space.constrained_data()
    keep = np.array([bi in blocks for bi, _, _ in space.entries])
    radical = [v for v in radical if not np.any(v[~keep])]
    phys = space.physical_complement(blocks)
    basis = [("rad", v) for v in radical] + [("phys", v) for v in phys]
    states, n_rad = [], 0
    for combo in combinations_with_replacement(range(len(basis)), n_quanta):
        vecs = [basis[i][1] for i in combo]
        if any(basis[i][0] == "rad" for i in combo):
            n_rad += 1
        states.append(MultiStringState.product(space, vecs, n_quanta))
    G = np.array([[a.inner(b) for b in states] for a in states])
    G = 0.5 * (G + G.conj().T)
    scale = float(np.max(np.abs(G))) if G.size else 1.0
    ev = np.linalg.eigvalsh(G / scale)
    tol = 1e-9
    inert = ml.Inertia(n_plus=int(np.sum(ev > tol)), n_zero=int(np.sum(np.abs(ev) <= tol)),
                       n_minus=int(np.sum(ev < -tol)))
    return inert, n_rad
