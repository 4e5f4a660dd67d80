"""Test functions, the shell projection Pi, and the smeared field commutator.

Fourier convention: F~(p) = (2 pi)^(-d/2) int e^{-i p.x} F(x) dx with the
Minkowski product p.x = -p^0 x^0 + p_vec . x_vec.  A test function is a
scalar profile times a constant Fock polarization, optionally translated and
Lorentz transformed.  The ``spectral`` profile is given directly by its
transform, F~(p) = (2 pi)^(-1/2) chi(p^2 + r) h(p_vec).

Two independent routes reach the commutator -i <F, EG>:

* the momentum route 2i Im <Pi F, Pi G>, valid in any d;
* for d = 2, the position route i int int F(x) D(x - y) G(y) dx dy with the
  Pauli-Jordan function D(x) = -1/2 sgn(x^0) theta(-x^2) J_0(sqrt(r) sqrt(-x^2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import j0

from .fock import FockVector, inner_indefinite, level, occ_norm
from .lorentz import LorentzTransform, gamma_lift
from .mass_shell import ShellSampling, bump
from .virasoro import Momentum, apply_L

SQRT_2PI = math.sqrt(2.0 * math.pi)


class TachyonError(ValueError):
    """A polarization with a level-0 component."""


class SamplingMismatch(ValueError):
    pass


# -- one-dimensional profiles ------------------------------------------------

_BANDS = ((60.0, 160), (300.0, 500), (1000.0, 1200), (2000.0, 2200))


@lru_cache(maxsize=None)
def _bump_rule(n: int):
    s, w = np.polynomial.legendre.leggauss(n)
    return s, w * bump(s)


def bump_transform(kappa) -> np.ndarray:
    """B(k) = int_{-1}^{1} exp(-1/(1-s^2)) cos(k s) ds.

    Gauss-Legendre with a node count banded by |k|; B is below 1e-25 past
    |k| = 2000 and is returned as 0 there.
    """
    k = np.abs(np.asarray(kappa, dtype=float))
    out = np.zeros_like(k)
    lo = -1.0
    for hi, n in _BANDS:
        sel = (k > lo) & (k <= hi)
        if np.any(sel):
            s, wb = _bump_rule(n)
            ks = k[sel]
            acc = np.empty_like(ks)
            for i in range(0, len(ks), 4096):
                chunk = ks[i:i + 4096]
                acc[i:i + 4096] = np.cos(np.outer(chunk, s)) @ wb
            out[sel] = acc
        lo = hi
    return out


def bump_derivative(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ti ** 2)) * (-2.0 * ti / (1.0 - ti ** 2) ** 2)
    return out


def _profile_1d(kind: str, t):
    if kind == "bump":
        return bump(t)
    return np.exp(-0.5 * np.asarray(t, dtype=float) ** 2)


def _profile_1d_deriv(kind: str, t):
    if kind == "bump":
        return bump_derivative(t)
    t = np.asarray(t, dtype=float)
    return -t * np.exp(-0.5 * t ** 2)


def _transform_1d(kind: str, kappa):
    if kind == "bump":
        return bump_transform(kappa)
    return SQRT_2PI * np.exp(-0.5 * np.asarray(kappa, dtype=float) ** 2)


def minkowski_dot(P: np.ndarray, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return -P[..., 0] * x[0] + P[..., 1:] @ x[1:]


# -- test functions ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TestFunctionSpec:
    """F(x) = amplitude * profile(x) * polarization, then F -> F_{a, Lambda}.

    ``polarization=None`` is scalar mode: a single Klein-Gordon field of mass
    squared ``mass_squared``.  ``kg_applied`` replaces F by (-box + M^2) F.
    ``constraint_ops`` lists m values; each applies L_m with p = -i d/dx,
    i.e. multiplies F~(p) by L_m(p), innermost first.
    """

    __test__ = False  # not a pytest class

    d: int
    profile: str = "gaussian"
    center: tuple | None = None
    widths: tuple | None = None
    amplitude: complex = 1.0
    polarization: FockVector | None = None
    mass_squared: float | None = None
    kg_applied: bool = False
    spectral_r: int | None = None
    chi: Callable | None = None
    h: Callable | None = None
    shift: tuple | None = None
    lorentz: LorentzTransform | None = None
    constraint_ops: tuple = ()

    def __post_init__(self):
        if self.profile not in ("gaussian", "bump", "spectral"):
            raise ValueError(f"unknown profile {self.profile!r}")
        if self.center is None:
            object.__setattr__(self, "center", (0.0,) * self.d)
        if self.widths is None:
            object.__setattr__(self, "widths", (1.0,) * self.d)
        object.__setattr__(self, "center", tuple(float(x) for x in self.center))
        object.__setattr__(self, "widths", tuple(float(x) for x in self.widths))
        if len(self.center) != self.d or len(self.widths) != self.d:
            raise ValueError("center and widths need d entries")
        if any(w <= 0 for w in self.widths):
            raise ValueError("widths must be positive")
        if self.profile == "spectral":
            if self.spectral_r is None or self.spectral_r < 0 or self.spectral_r % 2:
                raise ValueError("spectral profile needs r in {0, 2, 4, ...}")
            if self.chi is None or self.h is None:
                raise ValueError("spectral profile needs chi and h")
        elif self.polarization is None:
            if self.mass_squared is None or self.mass_squared < 0:
                raise ValueError("scalar mode needs mass_squared >= 0")
        else:
            if self.polarization.d != self.d:
                raise ValueError("polarization dimension mismatch")
            if 0 in self.polarization.levels():
                raise TachyonError("polarization has a component in F_0")
            if not self.polarization:
                raise ValueError("polarization is zero")
        if self.lorentz is not None and self.lorentz.d != self.d:
            raise ValueError("Lorentz transform dimension mismatch")

    @property
    def scalar(self) -> bool:
        return self.profile != "spectral" and self.polarization is None

    def translated(self, a: Sequence[float]) -> "TestFunctionSpec":
        return self.transformed(a, None)

    def transformed(self, a: Sequence[float] | None, L: LorentzTransform | None) -> "TestFunctionSpec":
        """F_{a, Lambda}(x) = Gamma(Lambda) F(Lambda^{-1}(x - a))."""
        a = np.zeros(self.d) if a is None else np.asarray(a, dtype=float)
        a1 = np.zeros(self.d) if self.shift is None else np.asarray(self.shift)
        if L is None:
            return replace(self, shift=tuple(a + a1))
        Lf = L.as_float() if L.exact else L
        newL = Lf if self.lorentz is None else Lf @ self.lorentz
        return replace(self, shift=tuple(a + Lf.matrix @ a1), lorentz=newL)

    def with_constraint(self, m: int) -> "TestFunctionSpec":
        """The test function L^_m F."""
        if self.scalar:
            raise ValueError("constraint operators need a Fock polarization")
        return replace(self, constraint_ops=self.constraint_ops + (m,))

    def kg(self) -> "TestFunctionSpec":
        """(-box + M^2) F."""
        if self.kg_applied:
            raise ValueError("Klein-Gordon operator already applied")
        return replace(self, kg_applied=True)

    # position space, used by the d = 2 route
    def position_factors(self):
        """Per-axis callables (value, derivative) when F is a product profile."""
        if self.profile == "spectral" or self.lorentz is not None or self.kg_applied \
                or self.constraint_ops:
            raise ValueError("position-space evaluation needs an untransformed product profile")
        c = np.asarray(self.center) + (0.0 if self.shift is None else np.asarray(self.shift))
        out = []
        for mu in range(self.d):
            cm, wm = c[mu], self.widths[mu]
            out.append((lambda t, cm=cm, wm=wm: _profile_1d(self.profile, (t - cm) / wm),
                        lambda t, cm=cm, wm=wm: _profile_1d_deriv(self.profile, (t - cm) / wm) / wm,
                        (cm - wm, cm + wm) if self.profile == "bump" else (cm - 9 * wm, cm + 9 * wm)))
        return out


def _scalar_transform(F: TestFunctionSpec, Q: np.ndarray) -> np.ndarray:
    """Profile transform at momenta Q before shift and Lorentz map."""
    c = np.asarray(F.center)
    val = np.full(Q.shape[0], complex(F.amplitude) * (2.0 * math.pi) ** (-F.d / 2.0))
    for mu in range(F.d):
        w = F.widths[mu]
        val = val * w * _transform_1d(F.profile, Q[:, mu] * w)
    return val * np.exp(-1j * minkowski_dot(Q, c))


def fourier_scalar(F: TestFunctionSpec, P) -> np.ndarray:
    """Scalar factor of F~ at an array of momenta (shape (N, d)).

    For polarized F the full value is this times :func:`polarization_at`.
    """
    if F.profile == "spectral":
        raise ValueError("spectral profiles have no separate scalar factor")
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = P
    if F.lorentz is not None:
        Q = P @ F.lorentz.inverse().matrix.astype(float).T
    val = _scalar_transform(F, Q)
    if F.shift is not None:
        val = val * np.exp(-1j * minkowski_dot(P, F.shift))
    return val


def _p2(p) -> float:
    p = np.asarray(p, dtype=float)
    return float(-p[0] ** 2 + p[1:] @ p[1:])


def polarization_at(F: TestFunctionSpec, p) -> FockVector:
    """Fock-space direction of F~(p) (the full value for spectral profiles)."""
    p = np.asarray(p, dtype=float)
    if F.scalar:
        raise ValueError("scalar mode has no polarization")
    if F.profile == "spectral":
        q = p if F.lorentz is None else F.lorentz.inverse().matrix.astype(float) @ p
        pol = F.h(q[1:])
        pol = (F.chi(_p2(q) + F.spectral_r) / SQRT_2PI) * pol
        if F.shift is not None:
            pol = complex(np.exp(-1j * minkowski_dot(p[None, :], F.shift)[0])) * pol
    else:
        pol = F.polarization
    if F.lorentz is not None:
        pol = gamma_lift(F.lorentz, pol)
    if F.kg_applied:
        p2 = _p2(p)
        pol = pol.map_coeffs(lambda occ, c: (p2 + 2 * (level(occ) - 1)) * c)
    if F.constraint_ops:
        mom = Momentum(tuple(float(x) for x in p))
        for m in F.constraint_ops:
            pol = apply_L(m, mom, pol)
    return pol


def fourier_eval(F: TestFunctionSpec, p):
    """F~(p) as (complex scale, polarization); polarization is None in scalar mode."""
    p = np.asarray(p, dtype=float)
    if F.profile == "spectral":
        return 1.0 + 0j, polarization_at(F, p)
    s = complex(fourier_scalar(F, p[None, :])[0])
    if F.scalar:
        if F.kg_applied:
            s *= _p2(p) + F.mass_squared
        return s, None
    return s, polarization_at(F, p)


# -- shell vectors -----------------------------------------------------------

@dataclass(eq=False)
class ShellVector:
    """Values of a function on the nodes of a ShellSampling.

    ``values`` has shape (N, len(basis)).  In scalar mode ``basis`` is
    ``(None,)`` with metric +1.
    """

    sampling: ShellSampling
    basis: tuple
    values: np.ndarray

    def signs(self) -> np.ndarray:
        return np.array([1.0 if b is None else float(occ_norm(b)) for b in self.basis])

    def at(self, k: int) -> dict:
        return {b: self.values[k, j] for j, b in enumerate(self.basis) if self.values[k, j] != 0}


def _level_for(r) -> int:
    lev = r / 2 + 1
    if lev != int(lev) or lev < 1:
        raise ValueError(f"r = {r} is not a non-tachyonic mass level")
    return int(lev)


def project_pi(F: TestFunctionSpec, sampling: ShellSampling) -> ShellVector:
    """(Pi F)_r(p) = sqrt(2 pi) P_r F~(p) at the nodes of ``sampling`` (all on V_r^+)."""
    P = sampling.nodes
    r = sampling.r
    N = len(sampling)
    if F.d != sampling.d:
        raise SamplingMismatch("dimension mismatch")
    if F.scalar:
        vals = np.zeros((N, 1), dtype=complex)
        if abs(r - F.mass_squared) <= 1e-12 * max(1.0, r):
            s = fourier_scalar(F, P)
            if F.kg_applied:
                s = s * (-P[:, 0] ** 2 + np.sum(P[:, 1:] ** 2, axis=1) + F.mass_squared)
            vals[:, 0] = SQRT_2PI * s
        return ShellVector(sampling, (None,), vals)
    if r < 0:
        # the tachyon shell is never reached from F_+
        return ShellVector(sampling, (), np.zeros((N, 0), dtype=complex))
    lev = _level_for(r)
    if F.profile == "spectral":
        scale = np.ones(N, dtype=complex)
    else:
        scale = fourier_scalar(F, P)
    cols: dict = {}
    rows = []
    for k in range(N):
        pol = polarization_at(F, P[k]).level_component(lev)
        rows.append(pol)
        for occ in pol.terms:
            cols.setdefault(occ, None)
    basis = tuple(sorted(cols))
    index = {b: j for j, b in enumerate(basis)}
    vals = np.zeros((N, len(basis)), dtype=complex)
    for k, pol in enumerate(rows):
        for occ, c in pol.terms.items():
            vals[k, index[occ]] = SQRT_2PI * scale[k] * complex(c)
    return ShellVector(sampling, basis, vals)


def pairing_H(u: ShellVector, v: ShellVector) -> complex:
    """sum_k w_k <u(p_k), v(p_k)> with the indefinite Fock pairing."""
    if u.sampling is not v.sampling:
        same = (u.sampling.r == v.sampling.r and u.sampling.nodes.shape == v.sampling.nodes.shape
                and np.array_equal(u.sampling.nodes, v.sampling.nodes)
                and np.array_equal(u.sampling.weights, v.sampling.weights))
        if not same:
            raise SamplingMismatch("vectors live on different samplings")
    common = [b for b in u.basis if b in set(v.basis)]
    if not common:
        return 0j
    iu = [u.basis.index(b) for b in common]
    iv = [v.basis.index(b) for b in common]
    sign = np.array([1.0 if b is None else float(occ_norm(b)) for b in common])
    per_node = np.sum(np.conj(u.values[:, iu]) * v.values[:, iv] * sign, axis=1)
    return complex(np.sum(u.sampling.weights * per_node))


def smeared_commutator(F: TestFunctionSpec, G: TestFunctionSpec,
                       samplings: Sequence[ShellSampling]) -> complex:
    """2i Im sum_r <(Pi F)_r, (Pi G)_r>, the scalar value of [Phi(F), Phi(G)]."""
    total = 0j
    for s in samplings:
        total += pairing_H(project_pi(F, s), project_pi(G, s))
    return 2j * total.imag


def commutator_pair(F, G, samplings) -> tuple[complex, complex]:
    """([Phi(F), Phi(G)], [Phi(G), Phi(F)]) from one set of projections."""
    total = 0j
    for s in samplings:
        total += pairing_H(project_pi(F, s), project_pi(G, s))
    return 2j * total.imag, -2j * total.imag


# -- d = 2 position route ----------------------------------------------------

def pauli_jordan_oracle(r: float, x, d: int = 2):
    """-1/2 sgn(x^0) J_0(sqrt(r) sqrt(-x^2)) inside the light cone, 0 outside."""
    if d != 2:
        raise ValueError("closed form available for d = 2 only")
    x = np.asarray(x, dtype=float)
    t, s = x[..., 0], x[..., 1]
    tau2 = t * t - s * s
    inside = tau2 > 0
    val = np.where(inside, -0.5 * np.sign(t) * j0(np.sqrt(np.abs(r) * np.where(inside, tau2, 0.0))), 0.0)
    return val if val.ndim else float(val)


def _gl(n: int, lo: float, hi: float):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def _clipped_rule(n: int, lo: np.ndarray, hi: np.ndarray):
    """Gauss-Legendre nodes on many intervals at once; empty intervals get zero weight."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = np.maximum(0.5 * (hi - lo), 0.0)
    T = lo[..., None] + half[..., None] * (x + 1.0)
    W = half[..., None] * w
    return T, W


def _cross_correlation(f: Callable, g: Callable, supp_f, supp_g, s: np.ndarray, n: int) -> np.ndarray:
    """C(s) = int f(t + s) g(t) dt, vectorised over s of any shape."""
    s = np.asarray(s, dtype=float)
    lo = np.maximum(supp_g[0], supp_f[0] - s)
    hi = np.minimum(supp_g[1], supp_f[1] - s)
    T, W = _clipped_rule(n, lo, hi)
    return np.sum(W * f(T + s[..., None]) * g(T), axis=-1)


def _scalar_pairing(F: TestFunctionSpec, G: TestFunctionSpec, r: float) -> complex:
    """conj(A_F) A_G <P_r v_F, P_r v_G> (1 in scalar mode)."""
    amp = np.conj(complex(F.amplitude)) * complex(G.amplitude)
    if F.scalar and G.scalar:
        return amp
    lev = _level_for(r)
    vf = F.polarization.level_component(lev)
    vg = G.polarization.level_component(lev)
    return amp * complex(inner_indefinite(vf, vg))


def pauli_jordan_commutator(F: TestFunctionSpec, G: TestFunctionSpec, r: float,
                            nodes: int = 96) -> complex:
    """i int int conj F(x) D(x - y) G(y) dx dy at d = 2, for product profiles.

    With z = x - y the double integral is int D(z) C0(z^0) C1(z^1) dz, where
    C_mu are one-dimensional cross-correlations; D is smooth inside each
    half of the light cone, so the z^1 integral runs over |z^1| < |z^0|.
    """
    if F.d != 2 or G.d != 2:
        raise ValueError("position route implemented for d = 2")
    fF, fG = F.position_factors(), G.position_factors()
    (f0, _, sf0), (f1, _, sf1) = fF
    (g0, _, sg0), (g1, _, sg1) = fG
    # z^0 = x^0 - y^0 ranges over supp f0 - supp g0
    z0_lo, z0_hi = sf0[0] - sg0[1], sf0[1] - sg0[0]
    z1_lo, z1_hi = sf1[0] - sg1[1], sf1[1] - sg1[0]
    total = 0.0
    for lo, hi, sgn in ((max(z0_lo, 0.0), z0_hi, 1.0), (z0_lo, min(z0_hi, 0.0), -1.0)):
        if hi <= lo:
            continue
        z0, w0 = _gl(nodes, lo, hi)
        c0 = _cross_correlation(f0, g0, sf0, sg0, z0, nodes)
        Z1, W1 = _clipped_rule(nodes, np.maximum(-np.abs(z0), z1_lo), np.minimum(np.abs(z0), z1_hi))
        c1 = _cross_correlation(f1, g1, sf1, sg1, Z1, nodes)
        kern = j0(math.sqrt(r) * np.sqrt(np.maximum(z0[:, None] ** 2 - Z1 ** 2, 0.0)))
        inner = np.sum(W1 * c1 * kern, axis=1)
        total += sgn * (-0.5) * (w0 @ (c0 * inner))
    return 1j * total * _scalar_pairing(F, G, r)


def solution_on_slice(F: TestFunctionSpec, r: float, t: float, xs: np.ndarray,
                      nodes: int = 80) -> tuple[np.ndarray, np.ndarray]:
    """U = EF and dU/dx^0 on the line x^0 = t (d = 2, real product profile, unit polarization).

    E has kernel +1/2 sgn(x^0) theta(-x^2) J_0 = -D, and dU/dx^0 = E(dF/dx^0).
    """
    (f0, df0, s0), (f1, _, s1) = F.position_factors()
    xs = np.asarray(xs, dtype=float)
    U = np.zeros_like(xs)
    dU = np.zeros_like(xs)
    amp = float(np.real(F.amplitude))
    for lo, hi, sgn in ((s0[0], min(s0[1], t), 1.0), (max(s0[0], t), s0[1], -1.0)):
        if hi <= lo:
            continue
        y0, w0 = _gl(nodes, lo, hi)
        ta = np.abs(t - y0)[None, :]
        x1 = xs[:, None]
        Y1, W1 = _clipped_rule(nodes, np.maximum(x1 - ta, s1[0]), np.minimum(x1 + ta, s1[1]))
        k = j0(math.sqrt(r) * np.sqrt(np.maximum(ta[..., None] ** 2 - (x1[..., None] - Y1) ** 2, 0.0)))
        acc = np.sum(W1 * f1(Y1) * k, axis=-1)  # shape (len(xs), nodes)
        U += sgn * 0.5 * amp * (acc @ (w0 * f0(y0)))
        dU += sgn * 0.5 * amp * (acc @ (w0 * df0(y0)))
    return U, dU


def sigma_t(F: TestFunctionSpec, G: TestFunctionSpec, r: float, t: float,
            nodes: int = 80, n_x: int = 120) -> float:
    """sigma_t(EF, EG) = int <U, dV/dx^0> - <dU/dx^0, V> dx^1 on x^0 = t."""
    (_, _, s0f), (_, _, s1f) = F.position_factors()
    (_, _, s0g), (_, _, s1g) = G.position_factors()
    # U(t, .) lives within |x^1 - supp f1| < |t - supp f0|
    reach_f = max(abs(t - s0f[0]), abs(t - s0f[1]))
    reach_g = max(abs(t - s0g[0]), abs(t - s0g[1]))
    lo = max(s1f[0] - reach_f, s1g[0] - reach_g)
    hi = min(s1f[1] + reach_f, s1g[1] + reach_g)
    if hi <= lo:
        return 0.0
    xs, wx = _gl(n_x, lo, hi)
    U, dU = solution_on_slice(F, r, t, xs, nodes)
    V, dV = solution_on_slice(G, r, t, xs, nodes)
    return float(wx @ (U * dV - dU * V)) * float(np.real(_scalar_pairing(
        replace(F, amplitude=1.0), replace(G, amplitude=1.0), r)))


@dataclass
class GreensReport:
    times: list
    sigmas: list
    max_deviation: float
    relative_deviation: float
    coarse: bool = False

    def as_dict(self) -> dict:
        return {"times": self.times, "sigmas": self.sigmas, "max_deviation": self.max_deviation,
                "relative_deviation": self.relative_deviation, "grid_too_coarse": self.coarse}


def greens_conservation_check(F: TestFunctionSpec, G: TestFunctionSpec, t_list: Sequence[float],
                              r: float, d: int = 2, nodes: int = 80, n_x: int = 120) -> GreensReport:
    """sigma_t at each t; the spread should vanish as the grid is refined.

    The same evaluation at half the node count is used as an error estimate;
    if the spread is not well above that estimate the grid is flagged as too
    coarse in the report.
    """
    if d != 2:
        raise ValueError("Green's identity check implemented for d = 2")
    sig = [sigma_t(F, G, r, t, nodes, n_x) for t in t_list]
    dev = max(sig) - min(sig)
    scale = max(abs(s) for s in sig) or 1.0
    coarse_sig = sigma_t(F, G, r, t_list[0], nodes // 2, n_x // 2)
    coarse = abs(coarse_sig - sig[0]) > 1e-3 * scale
    return GreensReport(list(t_list), sig, dev, dev / scale, coarse)


def symplectic_pairing(F: TestFunctionSpec, G: TestFunctionSpec, r: float, nodes: int = 96) -> float:
    """<EF, G> = int <U(x), G(x)> dx by direct quadrature (d = 2)."""
    (g0, _, s0), (g1, _, s1) = G.position_factors()
    x0, w0 = _gl(nodes // 2, *s0)
    x1, w1 = _gl(nodes // 2, *s1)
    total = 0.0
    for t, wt in zip(x0, w0):
        U, _ = solution_on_slice(F, r, t, x1, nodes)
        total += wt * g0(np.array([t]))[0] * (w1 @ (U * g1(x1)))
    return float(total) * float(np.real(G.amplitude)) * float(np.real(_scalar_pairing(
        replace(F, amplitude=1.0), replace(G, amplitude=1.0), r)))


# -- spacelike decay ---------------------------------------------------------

def decay_scan(F: TestFunctionSpec, G: TestFunctionSpec, direction: Sequence[float],
               radii: Sequence[float], samplings: Sequence[ShellSampling],
               eps: float = 0.1) -> list[tuple[float, complex, float]]:
    """(|a|, [Phi(F_a), Phi(G)], reference) for a = R * direction.

    ``direction`` must satisfy |a^0| < (1 - eps) |a_vec|.  The reference is
    the modulus of the commutator at the timelike shift (R_0, 0, ..., 0),
    R_0 = radii[0].
    """
    a = np.asarray(direction, dtype=float)
    if not abs(a[0]) < (1.0 - eps) * np.linalg.norm(a[1:]):
        raise ValueError("direction is not in the spacelike region |a^0| < (1 - eps)|a_vec|")
    a = a / np.linalg.norm(a)
    ref_shift = np.zeros(F.d)
    ref_shift[0] = radii[0]
    ref = abs(smeared_commutator(F.translated(ref_shift), G, samplings))
    table = []
    for R in radii:
        val = smeared_commutator(F.translated(R * a), G, samplings) if R else \
            smeared_commutator(F, G, samplings)
        table.append((float(R), val, ref))
    return table


def loglog_slope(table) -> float:
    R = np.array([row[0] for row in table])
    v = np.array([abs(row[1]) for row in table])
    slope, _ = np.polyfit(np.log(R), np.log(v), 1)
    return float(slope)
