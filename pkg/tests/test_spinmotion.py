import math
from dataclasses import replace

import numpy as np
import pytest

from ringtrap.errors import ConfigError
from ringtrap.spinmotion import (
    axis_levels,
    calibrate_alpha_scale,
    level_spacings,
    raman_matrix,
    trap_axis_potential,
    zeeman_splitting,
)
from ringtrap.trapmodel import (
    TrapConfig,
    barrier_potential,
    casimir_polder,
    trap_minimum,
)

CFG = TrapConfig()


class TestAxisCuts:
    def test_x_cut_is_symmetric(self):
        u = trap_axis_potential(CFG, "x")
        xs = np.linspace(0.0, 450e-9, 10)
        assert np.allclose(u(-xs), u(xs), rtol=0.0, atol=1e-6)

    def test_y_cut_shape_is_the_guide_envelope(self):
        # along y the barrier and surface terms are constants, so the cut
        # minus them must be a pure transverse gaussian of the beam
        u = trap_axis_potential(CFG, "y")
        z_c, _ = trap_minimum(CFG)
        ys = np.array([0.0, 2e-6, 5e-6])
        fixed = float(barrier_potential(CFG, 0.0, 0.0, z_c)) + float(
            casimir_polder(CFG, z_c)
        )
        guide = u(ys) - fixed
        w2 = CFG.guide_waist**2 * (1.0 + (z_c / CFG.rayleigh_range) ** 2)
        expect = guide[0] * np.exp(-2.0 * ys**2 / w2)
        assert np.allclose(guide, expect, rtol=1e-12)

    def test_z_cut_minimum_position(self):
        u = trap_axis_potential(CFG, "z")
        zs = np.linspace(300e-9, 600e-9, 3001)
        assert zs[np.argmin(u(zs))] == pytest.approx(440e-9, abs=0.5e-9)

    def test_unknown_axis(self):
        with pytest.raises(ConfigError):
            trap_axis_potential(CFG, "r")


class TestLevels:
    def test_axial_spacing_window(self):
        sp = level_spacings(CFG, "z", n_levels=40)
        assert sp.size == 39
        assert sp.min() == pytest.approx(35.293e3, rel=1e-3)
        assert sp.max() == pytest.approx(50.291e3, rel=1e-3)

    def test_axial_spacings_soften_upward(self):
        sp = level_spacings(CFG, "z", n_levels=40)
        assert np.all(np.diff(sp) < 0.0)

    def test_state_counts(self):
        assert axis_levels(CFG, "z").n_states == 76
        assert axis_levels(CFG, "x").n_states == 38

    def test_transverse_spacing_scale(self):
        # the pocket is much narrower across the guide than along it, so
        # the x well is stiffer than z
        spx = level_spacings(CFG, "x", n_levels=10)
        spz = level_spacings(CFG, "z", n_levels=10)
        assert spx[0] == pytest.approx(112.88e3, rel=1e-3)
        assert spx[0] > 2.0 * spz[0]


class TestZeeman:
    def test_splitting_at_default_bias(self):
        assert zeeman_splitting(CFG) == pytest.approx(52485.92, abs=0.01)

    def test_linear_in_bias(self):
        c = replace(CFG, bias_field=3e-5)
        assert zeeman_splitting(c) == pytest.approx(2.0 * zeeman_splitting(CFG), rel=1e-12)


class TestRamanMatrix:
    def test_calibrated_adjacent_rate(self):
        om = raman_matrix(CFG, "z", n_states=2)
        assert abs(om[1, 0]) == pytest.approx(1e4, rel=1e-9)

    def test_adjacent_rates_grow_with_level(self):
        om = raman_matrix(CFG, "z", n_states=12)
        adj = np.abs(np.diag(om, -1))
        assert np.all(np.diff(adj[:8]) > 0.0)
        assert adj.max() < 30e3

    def test_hermitian_overlaps(self):
        om = raman_matrix(CFG, "z", n_states=6)
        assert np.allclose(om, om.T, rtol=1e-10)

    def test_x_parity_forbids_odd_transfers(self):
        om = raman_matrix(CFG, "x", n_states=8)
        scale = np.abs(om).max()
        odd = np.abs(om[(np.indices(om.shape).sum(axis=0) % 2) == 1])
        assert odd.max() < 1e-10 * scale

    def test_x_two_quantum_rate_is_weak(self):
        om = raman_matrix(CFG, "x", n_states=3)
        assert abs(om[2, 0]) == pytest.approx(57.16, rel=1e-2)
        assert abs(om[2, 0]) < 1e3

    def test_y_axis_couples_nothing(self):
        om = raman_matrix(CFG, "y", n_states=5)
        assert om.shape == (5, 5)
        assert not om.any()

    def test_stretched_state_ladder_factors(self):
        om3 = raman_matrix(CFG, "z", n_states=3, m_F=3, delta_m=-1)
        om1 = raman_matrix(CFG, "z", n_states=3, m_F=1, delta_m=-1)
        assert om3[1, 0] / om1[1, 0] == pytest.approx(math.sqrt(6.0 / 12.0), rel=1e-12)

    def test_raising_matches_lowering_symmetry(self):
        up = raman_matrix(CFG, "z", n_states=3, m_F=2, delta_m=+1)
        down = raman_matrix(CFG, "z", n_states=3, m_F=3, delta_m=-1)
        assert np.allclose(up, down, rtol=1e-12)

    def test_raising_out_of_stretched_rejected(self):
        with pytest.raises(ConfigError):
            raman_matrix(CFG, "z", n_states=3, m_F=3, delta_m=+1)

    def test_linear_in_field_scale(self):
        c = replace(CFG, alpha_scale=0.5 * CFG.alpha_scale)
        om_half = raman_matrix(c, "z", n_states=4)
        om_full = raman_matrix(CFG, "z", n_states=4)
        assert np.allclose(om_half, 0.5 * om_full, rtol=1e-12)

    def test_too_many_states_requested(self):
        with pytest.raises(ConfigError):
            raman_matrix(CFG, "x", n_states=100)


class TestAlphaCalibration:
    def test_shipped_scale_is_calibrated(self):
        cal = calibrate_alpha_scale(CFG)
        assert cal.alpha_scale == pytest.approx(CFG.alpha_scale, rel=1e-9)

    def test_custom_target(self):
        cal = calibrate_alpha_scale(CFG, target=5e3)
        om = raman_matrix(cal, "z", n_states=2)
        assert abs(om[1, 0]) == pytest.approx(5e3, rel=1e-9)
