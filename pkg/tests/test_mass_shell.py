import warnings
from fractions import Fraction

import numpy as np
import pytest

from stringlab import mass_shell as ms
from stringlab.lorentz import rational_boost

# int_{-8}^{8} exp(-u^2) / (2 sqrt(u^2 + 1)) du, 30-digit quadrature, frozen
ENERGY_ORACLE = 0.76205469288695477
# light-cone chart, r = -2, d = 2, bump of radius 1/2 at (7/4, 9/4), frozen
LIGHTCONE_TACHYON_ORACLE = 0.03910973624086348


def test_shell_spec_validation():
    with pytest.raises(ValueError):
        ms.ShellSpec(1.0, "north", 2)
    with pytest.raises(ValueError):
        ms.ShellSpec(-1.0, "plus_sheet", 2)
    with pytest.raises(ValueError):
        ms.ShellSpec(1.0, "plus_sheet", 1)
    with pytest.raises(ValueError):
        ms.QuadratureSpec(((0, 1),), 10, "simpson")


def test_rule_1d_integrates_polynomials():
    for rule in ("gauss_legendre", "tanh_sinh"):
        x, w = ms.rule_1d(rule, 60, -1.0, 2.0)
        assert np.sum(w * x ** 3) == pytest.approx((16 - 1) / 4, rel=1e-10)


def test_energy_chart_oracle():
    f = lambda P: np.exp(-P[..., 1] ** 2)
    quad = ms.QuadratureSpec(((-8.0, 8.0),), 400)
    val = ms.integrate_energy_param(f, ms.ShellSpec(1.0, "plus_sheet", 2), quad)
    assert val == pytest.approx(ENERGY_ORACLE, rel=1e-12)


def test_minus_sheet_mirrors_plus_sheet():
    f = ms.gaussian([1.0, 0.3], 0.8)
    g = lambda P: f(-P)
    quad = ms.QuadratureSpec(((-8.0, 8.0),), 300)
    a = ms.integrate_energy_param(f, ms.ShellSpec(1.0, "plus_sheet", 2), quad)
    b = ms.integrate_energy_param(g, ms.ShellSpec(1.0, "minus_sheet", 2), quad)
    assert a == pytest.approx(b, rel=1e-13)


@pytest.mark.parametrize("d", [2, 3])
def test_nodes_lie_on_shell(d):
    quad = ms.QuadratureSpec(((0.5, 2.0),) * (d - 1), 8)
    P, _ = ms.lightcone_nodes(ms.ShellSpec(1.5, "lightcone_plus", d), quad)
    assert np.allclose(-P[:, 0] ** 2 + np.sum(P[:, 1:] ** 2, axis=1), -1.5)
    P, _ = ms.energy_nodes(ms.ShellSpec(1.5, "plus_sheet", d), quad)
    assert np.allclose(-P[:, 0] ** 2 + np.sum(P[:, 1:] ** 2, axis=1), -1.5)


@pytest.mark.parametrize("d,center", [(2, [1.6, 0.4]), (3, [1.7, 0.3, 0.5])])
def test_energy_vs_lightcone(d, center):
    R = 0.5
    f = ms.radial_bump(center, R)
    boxes = ms.bump_boxes(center, R)
    en = ms.integrate_energy_param(f, ms.ShellSpec(1.0, "plus_sheet", d),
                                   ms.QuadratureSpec(boxes["energy"], 200))
    lc = ms.integrate_lightcone_param(f, ms.ShellSpec(1.0, "lightcone_plus", d),
                                      ms.QuadratureSpec(boxes["lightcone"], 200))
    assert en > 0
    assert lc == pytest.approx(en, rel=1e-8)


def test_lightcone_tachyonic_shell_oracle():
    c, R = [1.75, 2.25], 0.5
    boxes = ms.bump_boxes(c, R)
    val = ms.integrate_lightcone_param(ms.radial_bump(c, R), ms.ShellSpec(-2.0, "lightcone_plus", 2),
                                       ms.QuadratureSpec(boxes["lightcone"], 200))
    assert val == pytest.approx(LIGHTCONE_TACHYON_ORACLE, rel=1e-8)


def test_lightcone_singularity_warning():
    quad = ms.QuadratureSpec(((-1.0, 1.0),), 20)
    with pytest.warns(ms.LightConeSingularityWarning):
        ms.lightcone_nodes(ms.ShellSpec(1.0, "lightcone_plus", 2), quad)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ms.lightcone_nodes(ms.ShellSpec(1.0, "lightcone_minus", 2), ms.QuadratureSpec(((-2.0, -1.0),), 20))


def test_chart_region_mismatch():
    quad = ms.QuadratureSpec(((0.0, 1.0),), 10)
    with pytest.raises(ValueError):
        ms.energy_nodes(ms.ShellSpec(1.0, "lightcone_plus", 2), quad)
    with pytest.raises(ValueError):
        ms.lightcone_nodes(ms.ShellSpec(1.0, "plus_sheet", 2), quad)
    with pytest.raises(ValueError):
        ms.energy_nodes(ms.ShellSpec(1.0, "plus_sheet", 3), quad)


@pytest.mark.parametrize("d", [2, 3])
def test_boost_invariance(d):
    f = ms.gaussian([1.0, 0.2, -0.1][:d], 0.7)
    quad = ms.QuadratureSpec(((-8.0, 8.0),) * (d - 1), 200)
    L = rational_boost(Fraction(5, 4), Fraction(3, 4), 1, d)
    base, moved, rel = ms.check_invariance(f, ms.ShellSpec(1.0, "plus_sheet", d), L, quad)
    assert base > 0 and rel <= 1e-8


@pytest.mark.parametrize("d,center,R,split", [(2, [2.0, 0.0], 0.8, 0.0),
                                              (3, [1.2, 0.3, 0.9], 0.5, float("inf"))])
def test_fiber_decomposition(d, center, R, split):
    f = ms.radial_bump(center, R)
    boxes = ms.bump_boxes(center, R)
    lhs, rhs, rel = ms.fiber_decomposition_check(
        f, boxes["r_range"], ms.QuadratureSpec(boxes["lebesgue"], 120),
        energy_quad=ms.QuadratureSpec(boxes["energy"], 60),
        lightcone_quad=ms.QuadratureSpec(boxes["lightcone"], 60), r_nodes=80, split=split)
    assert rel <= 1e-6


def test_bump_support():
    f = ms.radial_bump([0.0, 0.0], 1.0)
    vals = f(np.array([[0.0, 0.0], [0.99, 0.0], [1.0, 0.0], [2.0, 1.0]]))
    assert vals[0] == pytest.approx(np.exp(-1.0))
    assert vals[1] > 0 and vals[2] == 0 and vals[3] == 0


def test_grid_sampling_matches_oracle():
    s = ms.grid_sampling(1.0, 8.0, 801)
    assert len(s) == 801 and s.d == 2
    assert np.sum(s.weights * np.exp(-s.nodes[:, 1] ** 2)) == pytest.approx(ENERGY_ORACLE, rel=1e-12)


def test_rapidity_sampling_matches_oracle():
    s = ms.rapidity_sampling(1.0, 2)
    assert np.sum(s.weights * np.exp(-s.nodes[:, 1] ** 2)) == pytest.approx(ENERGY_ORACLE, rel=1e-10)


@pytest.mark.parametrize("d", [3, 4])
def test_rapidity_sampling_matches_energy_chart(d):
    f = ms.gaussian([1.5, 0.4, -0.2, 0.1][:d], 0.9)
    s = ms.rapidity_sampling(1.0, d, n_rapidity=300, u_max=5.0, n_angle=48)
    ref = ms.integrate_energy_param(f, ms.ShellSpec(1.0, "plus_sheet", d),
                                    ms.QuadratureSpec(((-8.0, 8.0),) * (d - 1), 120))
    assert np.sum(s.weights * f(s.nodes)) == pytest.approx(ref, rel=1e-8)


def test_sampling_validation():
    with pytest.raises(ValueError):
        ms.grid_sampling(0.0, 5.0, 11)
    with pytest.raises(ValueError):
        ms.rapidity_sampling(-1.0, 2)
    with pytest.raises(ValueError):
        ms.ShellSampling(1.0, np.array([[2.0, 0.0]]), np.array([1.0]))
