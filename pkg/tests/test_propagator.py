import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import dblquad

from stringlab.fock import FockVector
from stringlab.lorentz import rational_boost
from stringlab.mass_shell import grid_sampling, rapidity_sampling
from stringlab.propagator import (SamplingMismatch, TachyonError, TestFunctionSpec,
                                  bump_transform, decay_scan, fourier_scalar,
                                  greens_conservation_check, loglog_slope, pairing_H,
                                  pauli_jordan_commutator, pauli_jordan_oracle, project_pi,
                                  smeared_commutator, symplectic_pairing)

# 30-digit quadrature of int_{-1}^{1} exp(-1/(1-s^2)) cos(k s) ds, frozen
B_ORACLE = {0.0: 0.443993816168079, 1.0: 0.409859132390344,
            10.0: 0.0146230866551327, 100.0: 2.23500206714152e-6}
J0_2 = 0.22389077914123567


def scalar_bump(center, r=1.0, widths=(1.0, 1.0), **kw):
    return TestFunctionSpec(2, "bump", center=center, widths=widths, mass_squared=r, **kw)


GRID = [grid_sampling(1.0, 200.0, 8001)]


@pytest.mark.parametrize("k", sorted(B_ORACLE))
def test_bump_transform_oracle(k):
    assert bump_transform(np.array([k]))[0] == pytest.approx(B_ORACLE[k], rel=1e-10)
    assert bump_transform(np.array([-k]))[0] == pytest.approx(B_ORACLE[k], rel=1e-10)


def test_bump_transform_far_tail_is_zero():
    assert bump_transform(np.array([5000.0]))[0] == 0.0


def test_pauli_jordan_oracle():
    assert pauli_jordan_oracle(1.0, [2.0, 0.0]) == pytest.approx(-0.5 * J0_2, rel=1e-14)
    assert pauli_jordan_oracle(1.0, [-2.0, 0.0]) == pytest.approx(0.5 * J0_2, rel=1e-14)
    assert pauli_jordan_oracle(1.0, [1.0, 3.0]) == 0.0
    with pytest.raises(ValueError):
        pauli_jordan_oracle(1.0, [1.0, 0.0, 0.0], d=3)


def test_fourier_transform_against_quadrature():
    F = TestFunctionSpec(2, "gaussian", center=(0.3, -0.2), widths=(0.8, 1.1), mass_squared=1.0)
    p = np.array([0.7, -1.3])

    def integrand(x1, x0, part):
        pf = np.exp(-0.5 * ((x0 - 0.3) / 0.8) ** 2 - 0.5 * ((x1 + 0.2) / 1.1) ** 2)
        ph = -(-p[0] * x0 + p[1] * x1)
        return pf * (math.cos(ph) if part == 0 else math.sin(ph))

    re = dblquad(integrand, -9, 9, -11, 11, args=(0,), epsabs=1e-12)[0]
    im = dblquad(integrand, -9, 9, -11, 11, args=(1,), epsabs=1e-12)[0]
    expected = (re + 1j * im) / (2 * math.pi)
    assert fourier_scalar(F, p[None, :])[0] == pytest.approx(expected, rel=1e-9)


def test_translation_and_boost_of_transform():
    F = TestFunctionSpec(3, "gaussian", center=(0.1, 0.2, 0.3), mass_squared=1.0)
    P = np.array([[1.5, 0.2, -0.7], [2.0, 1.0, 1.0]])
    a = np.array([0.5, -1.0, 2.0])
    dot = -P[:, 0] * a[0] + P[:, 1:] @ a[1:]
    assert np.allclose(fourier_scalar(F.translated(a), P), np.exp(-1j * dot) * fourier_scalar(F, P))
    L = rational_boost(Fraction(5, 4), Fraction(3, 4), 1, 3)
    Linv = L.inverse().as_float().matrix
    assert np.allclose(fourier_scalar(F.transformed(None, L), P), fourier_scalar(F, P @ Linv.T))


def test_validation():
    with pytest.raises(ValueError):
        TestFunctionSpec(2, "triangle", mass_squared=1.0)
    with pytest.raises(ValueError):
        TestFunctionSpec(2, "bump")
    with pytest.raises(ValueError):
        TestFunctionSpec(2, "bump", widths=(1.0, -1.0), mass_squared=1.0)
    with pytest.raises(TachyonError):
        TestFunctionSpec(4, "gaussian", polarization=FockVector.vacuum(4))
    with pytest.raises(ValueError):
        scalar_bump((0.0, 0.0)).kg().kg()


def test_commutator_is_antisymmetric_and_imaginary():
    F, G = scalar_bump((0.0, 0.0)), scalar_bump((2.0, 0.3))
    fg = smeared_commutator(F, G, GRID)
    gf = smeared_commutator(G, F, GRID)
    assert fg.real == 0.0 and fg == pytest.approx(-gf)
    assert smeared_commutator(F, F, GRID) == 0


def test_kg_image_has_no_shell_projection():
    F = TestFunctionSpec(2, "gaussian", mass_squared=1.0).kg()
    v = project_pi(F, GRID[0])
    assert np.max(np.abs(v.values)) < 1e-12


@pytest.mark.parametrize("g_center", [(5.0, 0.0), (6.0, 1.0)])
def test_momentum_route_matches_position_route(g_center):
    F, G = scalar_bump((0.0, 0.0)), scalar_bump(g_center)
    mom = smeared_commutator(F, G, GRID)
    pos = pauli_jordan_commutator(F, G, 1.0)
    assert abs(pos) > 1e-4
    assert abs(mom - pos) <= 1e-4 * abs(pos)


def test_greens_identity_and_symplectic_pairing():
    F, G = scalar_bump((0.0, 0.0)), scalar_bump((5.0, 0.5))
    rep = greens_conservation_check(F, G, [-1.0, 0.5, 2.0, 3.5, 7.0], 1.0)
    assert rep.relative_deviation <= 1e-4 and not rep.coarse
    sigma = float(np.mean(rep.sigmas))
    assert symplectic_pairing(F, G, 1.0) == pytest.approx(sigma, rel=1e-4)
    assert smeared_commutator(F, G, GRID) == pytest.approx(1j * sigma, rel=1e-4)


def test_polarized_commutator_scales_with_norm():
    # alpha_{-1}^1 alpha_{-1}^1 Omega has norm 2 and sits on the r = 2 shell
    d = 2
    v = FockVector.monomial(d, [(1, 1), (1, 1)])
    kw = dict(widths=(1.0, 1.0))
    F = TestFunctionSpec(d, "gaussian", polarization=v, **kw)
    G = TestFunctionSpec(d, "gaussian", polarization=v, center=(1.5, 0.4), **kw)
    Fs = TestFunctionSpec(d, "gaussian", mass_squared=2.0, **kw)
    Gs = TestFunctionSpec(d, "gaussian", mass_squared=2.0, center=(1.5, 0.4), **kw)
    s = [rapidity_sampling(2.0, d)]
    assert smeared_commutator(F, G, s) == pytest.approx(2 * smeared_commutator(Fs, Gs, s), rel=1e-12)


def test_pairing_needs_same_sampling():
    F = scalar_bump((0.0, 0.0))
    u = project_pi(F, GRID[0])
    v = project_pi(F, grid_sampling(1.0, 100.0, 101))
    with pytest.raises(SamplingMismatch):
        pairing_H(u, v)


def test_decay_scan_rejects_timelike_direction():
    F = TestFunctionSpec(2, "gaussian", mass_squared=1.0)
    with pytest.raises(ValueError):
        decay_scan(F, F, (1.0, 0.5), [2.0, 4.0], GRID)


def test_loglog_slope_synthetic():
    table = [(R, 3.0 * R ** -7.0 + 0j, 1.0) for R in (2.0, 4.0, 8.0, 16.0)]
    assert loglog_slope(table) == pytest.approx(-7.0, abs=1e-12)


def test_spacelike_bumps_commute():
    F, G = scalar_bump((0.0, 0.0)), scalar_bump((0.0, 5.0))
    ref = abs(smeared_commutator(F, scalar_bump((5.0, 0.0)), GRID))
    assert abs(smeared_commutator(F, G, GRID)) <= 1e-6 * ref
    assert pauli_jordan_commutator(F, G, 1.0) == 0


def test_bump_transform_at_zero_is_total_integral():
    F = TestFunctionSpec(2, "bump", widths=(0.5, 2.0), mass_squared=1.0)
    total = (0.5 * B_ORACLE[0.0]) * (2.0 * B_ORACLE[0.0])
    assert fourier_scalar(F, np.zeros((1, 2)))[0] == pytest.approx(total / (2 * math.pi), rel=1e-12)


def test_level_projection_selects_shell():
    v = FockVector.monomial(2, [(1, 1)])
    F = TestFunctionSpec(2, "gaussian", polarization=v)
    assert project_pi(F, rapidity_sampling(2.0, 2)).values.size == 0
    u = project_pi(F, rapidity_sampling(0.0, 2))
    assert np.max(np.abs(u.values)) > 0


def test_pairing_conjugate_symmetry():
    F, G = scalar_bump((0.0, 0.0)), scalar_bump((1.0, 0.5))
    u, v = project_pi(F, GRID[0]), project_pi(G, GRID[0])
    assert pairing_H(u, v) == pytest.approx(np.conj(pairing_H(v, u)), rel=1e-14)
    assert pairing_H(u, u).real > 0 and abs(pairing_H(u, u).imag) < 1e-15


def test_pauli_jordan_origin():
    assert pauli_jordan_oracle(1.0, [0.0, 0.0]) == 0.0


def test_sigma_of_equal_solutions_vanishes():
    F = scalar_bump((0.0, 0.0))
    rep = greens_conservation_check(F, F, [0.5, 3.0], 1.0)
    assert max(abs(s) for s in rep.sigmas) < 1e-14


def test_decay_scan_at_zero_shift():
    F = TestFunctionSpec(2, "gaussian", mass_squared=1.0)
    G = F.translated([1.0, 0.3])
    table = decay_scan(F, G, (0.0, 1.0), [0.0], GRID)
    assert table[0][1] == smeared_commutator(F, G, GRID)


def test_kg_image_commutes_with_everything():
    H = TestFunctionSpec(2, "gaussian", mass_squared=1.0)
    G = scalar_bump((0.5, 0.5))
    assert abs(smeared_commutator(H.kg(), G, GRID)) < 1e-14
