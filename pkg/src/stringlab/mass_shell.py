"""Lorentz-invariant measures on mass shells and their quadrature.

Integrands are vectorised callables ``f(P)`` taking an array of momenta of
shape ``(..., d)`` and returning an array of shape ``(...)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

SQRT2 = math.sqrt(2.0)

REGIONS = ("plus_sheet", "minus_sheet", "lightcone_plus", "lightcone_minus")


class LightConeSingularityWarning(UserWarning):
    """The p+ quadrature range reaches the 1/|p+| singularity."""


@dataclass(frozen=True)
class ShellSpec:
    r: float
    region: str
    d: int

    def __post_init__(self):
        if self.region not in REGIONS:
            raise ValueError(f"region must be one of {REGIONS}")
        if self.region in ("plus_sheet", "minus_sheet") and self.r < 0:
            raise ValueError("the two sheets only exist for r >= 0")
        if self.d < 2:
            raise ValueError("need d >= 2")


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor-product rule over an axis-aligned box.

    ``box`` holds one (lo, hi) interval per integration axis.
    """

    box: tuple
    nodes: int = 200
    rule: str = "gauss_legendre"

    def __post_init__(self):
        if self.rule not in ("gauss_legendre", "tanh_sinh"):
            raise ValueError(f"unknown rule {self.rule!r}")
        object.__setattr__(self, "box", tuple(tuple(map(float, b)) for b in self.box))

    def refined(self, factor: float = 2.0) -> "QuadratureSpec":
        return QuadratureSpec(self.box, int(self.nodes * factor), self.rule)


def rule_1d(rule: str, n: int, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    if rule == "gauss_legendre":
        x, w = np.polynomial.legendre.leggauss(n)
    else:
        # double-exponential nodes on t in [-3.2, 3.2]
        k = np.arange(-(n // 2), n // 2 + 1)
        h = 3.2 / (n // 2)
        t = k * h
        u = 0.5 * np.pi * np.sinh(t)
        x = np.tanh(u)
        w = h * 0.5 * np.pi * np.cosh(t) / np.cosh(u) ** 2
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def tensor_grid(quad: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    """Nodes of shape (N, k) and weights of shape (N,) for a k-dim box."""
    axes = [rule_1d(quad.rule, quad.nodes, lo, hi) for lo, hi in quad.box]
    pts = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    wts = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    X = np.stack([p.ravel() for p in pts], axis=-1)
    W = np.prod(np.stack([w.ravel() for w in wts], axis=-1), axis=-1)
    return X, W


def omega(r: float, pvec: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(pvec * pvec, axis=-1) + r)


def energy_nodes(shell: ShellSpec, quad: QuadratureSpec):
    """On-shell momenta and mu_r weights for the (+/- omega, p_vec) chart."""
    if shell.r < 0:
        raise ValueError("energy parametrisation needs r >= 0")
    if shell.region not in ("plus_sheet", "minus_sheet"):
        raise ValueError("energy parametrisation covers the sheets only")
    if len(quad.box) != shell.d - 1:
        raise ValueError(f"box must have {shell.d - 1} axes")
    X, W = tensor_grid(quad)
    om = omega(shell.r, X)
    sign = 1.0 if shell.region == "plus_sheet" else -1.0
    P = np.concatenate([sign * om[:, None], X], axis=1)
    with np.errstate(divide="ignore"):
        wts = np.where(om > 0, W / (2.0 * om), 0.0)
    return P, wts


def lightcone_nodes(shell: ShellSpec, quad: QuadratureSpec):
    """On-shell momenta and weights for the (p_tilde, p+) chart."""
    if shell.region not in ("lightcone_plus", "lightcone_minus"):
        raise ValueError("light-cone parametrisation needs a light-cone region")
    if len(quad.box) != shell.d - 1:
        raise ValueError(f"box must have {shell.d - 1} axes (p_tilde..., p+)")
    lo, hi = quad.box[-1]
    if shell.region == "lightcone_plus" and lo <= 0 or shell.region == "lightcone_minus" and hi >= 0:
        warnings.warn("p+ range touches p+ = 0", LightConeSingularityWarning, stacklevel=3)
    X, W = tensor_grid(quad)
    pt, pplus = X[:, :-1], X[:, -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        pminus = (np.sum(pt * pt, axis=-1) + shell.r) / (2.0 * pplus)
        wts = W / (2.0 * np.abs(pplus))
    P = np.concatenate([((pplus + pminus) / SQRT2)[:, None], pt,
                        ((pplus - pminus) / SQRT2)[:, None]], axis=1)
    bad = ~np.isfinite(wts) | ~np.all(np.isfinite(P), axis=1)
    wts = np.where(bad, 0.0, wts)
    P[bad] = 0.0
    return P, wts


def _integrate(f: Callable, P: np.ndarray, wts: np.ndarray) -> float:
    vals = np.asarray(f(P))
    return float(np.sum(wts * vals))


def integrate_energy_param(f: Callable, shell: ShellSpec, quad: QuadratureSpec) -> float:
    """int f(+/-omega_r(p), p) dp / (2 omega_r(p))."""
    return _integrate(f, *energy_nodes(shell, quad))


def integrate_lightcone_param(f: Callable, shell: ShellSpec, quad: QuadratureSpec) -> float:
    """int f((|p~|^2 + r) / 2p+, p~, p+) dp~ dp+ / (2|p+|)."""
    return _integrate(f, *lightcone_nodes(shell, quad))


def integrate_shell(f: Callable, shell: ShellSpec, quad: QuadratureSpec) -> float:
    if shell.region in ("plus_sheet", "minus_sheet"):
        return integrate_energy_param(f, shell, quad)
    return integrate_lightcone_param(f, shell, quad)


def check_invariance(f: Callable, shell: ShellSpec, L, quad: QuadratureSpec):
    """(int f dmu_r, int f o Lambda dmu_r, relative difference)."""
    M = np.asarray(getattr(L, "matrix", L), dtype=float)
    base = integrate_shell(f, shell, quad)
    moved = integrate_shell(lambda P: f(P @ M.T), shell, quad)
    return base, moved, _rel(base, moved)


def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def fiber_decomposition_check(f: Callable, r_range: Sequence[float], quad: QuadratureSpec,
                              energy_quad: QuadratureSpec | None = None,
                              lightcone_quad: QuadratureSpec | None = None,
                              r_nodes: int = 120, split: float = 0.0):
    """Compare int f dp with int dr int_{V_r} f dmu_r.

    Fibres with r > split use the forward-sheet energy chart (needs
    ``energy_quad``); the rest use the p+ > 0 light-cone chart.  Both charts
    assume f is supported in p^0 > 0 and p+ > 0 respectively.
    """
    d = len(quad.box)
    lhs = _integrate(f, *tensor_grid(quad))
    rs, wr = rule_1d("gauss_legendre", r_nodes, *r_range)
    rhs = 0.0
    for r, w in zip(rs, wr):
        if r > split and energy_quad is not None:
            g = integrate_energy_param(f, ShellSpec(float(r), "plus_sheet", d), energy_quad)
        else:
            if lightcone_quad is None:
                raise ValueError(f"fibre r={r:.3g} needs a light-cone rule")
            g = integrate_lightcone_param(f, ShellSpec(float(r), "lightcone_plus", d), lightcone_quad)
        rhs += w * g
    return lhs, rhs, _rel(lhs, rhs)


# -- test integrands ----------------------------------------------------------

def bump(t: np.ndarray) -> np.ndarray:
    """exp(-1/(1 - t^2)) on |t| < 1, zero outside."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def radial_bump(center: Sequence[float], radius: float) -> Callable:
    c = np.asarray(center, dtype=float)

    def f(P):
        dist = np.sqrt(np.sum((P - c) ** 2, axis=-1))
        return bump(dist / radius)
    return f


def gaussian(center: Sequence[float], width: float) -> Callable:
    c = np.asarray(center, dtype=float)

    def f(P):
        return np.exp(-np.sum((P - c) ** 2, axis=-1) / (2.0 * width ** 2))
    return f


def bump_boxes(center: Sequence[float], radius: float) -> dict:
    """Tight quadrature boxes for ``radial_bump(center, radius)``.

    Keys: ``lebesgue`` (d axes), ``energy`` (spatial axes), ``lightcone``
    ((p~..., p+) axes) and ``r_range``, the interval swept by -p^2 on the
    support (sampled on a fine sphere grid and padded).
    """
    c = np.asarray(center, dtype=float)
    R = float(radius)
    d = len(c)
    cplus = (c[0] + c[-1]) / SQRT2
    rng = np.random.default_rng(12345)
    dirs = rng.normal(size=(20000, d))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    pts = c + R * dirs
    rv = pts[:, 0] ** 2 - np.sum(pts[:, 1:] ** 2, axis=1)
    pad = 0.02 * (rv.max() - rv.min()) + 1e-3
    return {
        "lebesgue": tuple((x - R, x + R) for x in c),
        "energy": tuple((x - R, x + R) for x in c[1:]),
        "lightcone": tuple((x - R, x + R) for x in c[1:-1]) + ((cplus - R, cplus + R),),
        "r_range": (float(rv.min() - pad), float(rv.max() + pad)),
    }


# -- shell samplings used by the field modules ------------------------------

@dataclass(frozen=True)
class ShellSampling:
    """On-shell nodes on the forward sheet V_r^+ with positive mu_r weights."""

    r: float
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        P = self.nodes
        resid = -P[:, 0] ** 2 + np.sum(P[:, 1:] ** 2, axis=1) + self.r
        if np.max(np.abs(resid), initial=0.0) > 1e-8 * max(1.0, float(np.max(P[:, 0] ** 2, initial=1.0))):
            raise ValueError("nodes are not on the shell")

    @property
    def d(self) -> int:
        return self.nodes.shape[1]

    def __len__(self):
        return len(self.weights)


def grid_sampling(r: float, p_max: float, n: int) -> ShellSampling:
    """d = 2, r > 0: uniform trapezoid grid in p^1 on [-p_max, p_max].

    Spectrally accurate for smooth integrands that have decayed at the ends.
    """
    if r <= 0:
        raise ValueError("grid sampling needs r > 0")
    p1 = np.linspace(-p_max, p_max, n)
    h = p1[1] - p1[0]
    om = np.sqrt(p1 * p1 + r)
    w = np.full(n, h) / (2.0 * om)
    w[0] *= 0.5
    w[-1] *= 0.5
    return ShellSampling(r, np.stack([om, p1], axis=1), w)


def rapidity_sampling(r: float, d: int, n_rapidity: int = 400, u_max: float = 9.0,
                      n_angle: int = 32) -> ShellSampling:
    """Forward-sheet sampling in rapidity u and direction angles.

    With rho = sqrt(r) sinh(u) (r > 0) or rho = e^u (r = 0) one has
    d rho / (2 omega) = du / 2, so the weight is rho^(d-2) du dOmega / 2.
    On the full line the trapezoid rule in u converges geometrically for
    decaying integrands.  For d >= 3 and r > 0 the radial integral starts at
    u = 0, where the integrand need not be even, so Gauss-Legendre is used.
    """
    if r < 0:
        raise ValueError("forward sheet needs r >= 0")
    if r > 0:
        if d == 2:
            u = np.linspace(-u_max, u_max, 2 * n_rapidity + 1)
            hu = np.full_like(u, u[1] - u[0])
        else:
            u, hu = rule_1d("gauss_legendre", n_rapidity, 0.0, u_max)
        rho = math.sqrt(r) * np.sinh(u)
        om = math.sqrt(r) * np.cosh(u)
    else:
        u = np.linspace(-u_max - 6.0, u_max, 2 * n_rapidity + 1)
        hu = np.full_like(u, u[1] - u[0])
        rho = np.exp(u)
        om = rho
    if d == 2:
        if r > 0:
            p1, w = rho, hu / 2.0
            om_all = om
        else:
            p1 = np.concatenate([rho, -rho])
            w = np.concatenate([hu, hu]) / 2.0
            om_all = np.concatenate([om, om])
        return ShellSampling(r, np.stack([om_all, p1], axis=1), w)
    if d == 3:
        phi = 2.0 * np.pi * np.arange(n_angle) / n_angle
        dirs = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        wdir = np.full(n_angle, 2.0 * np.pi / n_angle)
    elif d == 4:
        ct, wct = np.polynomial.legendre.leggauss(n_angle // 2)
        phi = 2.0 * np.pi * np.arange(n_angle) / n_angle
        CT, PH = np.meshgrid(ct, phi, indexing="ij")
        ST = np.sqrt(1.0 - CT ** 2)
        dirs = np.stack([ST * np.cos(PH), ST * np.sin(PH), CT], axis=-1).reshape(-1, 3)
        wdir = (wct[:, None] * np.full(n_angle, 2.0 * np.pi / n_angle)[None, :]).ravel()
    else:
        raise ValueError("rapidity sampling implemented for d in {2, 3, 4}")
    radial_w = rho ** (d - 2) * hu / 2.0
    keep = radial_w > 0
    rho, om, radial_w = rho[keep], om[keep], radial_w[keep]
    pvec = (rho[:, None, None] * dirs[None, :, :]).reshape(-1, d - 1)
    P = np.concatenate([np.repeat(om, len(wdir))[:, None], pvec], axis=1)
    W = (radial_w[:, None] * wdir[None, :]).ravel()
    return ShellSampling(r, P, W)
