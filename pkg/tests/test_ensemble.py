import numpy as np
import pytest

from ringtrap import ensemble as en
from ringtrap.constants import uK_to_Hz
from ringtrap.errors import ConfigError, DataFormatError, DegenerateFitError, PhysicsError
from ringtrap.trapmodel import TrapConfig, probe_config, trap_minimum

CFG = TrapConfig()
PROBE = probe_config(CFG)

# Shared states so the quadrature geometry is built once per config.
FULL_23 = en.ThermalState(CFG, 23e-6)
PROBE_23 = en.ThermalState(PROBE, 23e-6)


class TestEnergyBracket:
    def test_limits(self):
        assert en.energy_bracket(0.0) == 0.0
        assert en.energy_bracket(-3.0) == 0.0
        assert en.energy_bracket(50.0) == pytest.approx(1.0, abs=1e-12)

    def test_matches_quadrature(self):
        # fraction of a thermal speed distribution with energy below kappa*kT,
        # integrated in the speed variable where the integrand is smooth
        s = np.linspace(0.0, np.sqrt(6.0), 200001)
        pdf = 4.0 / np.sqrt(np.pi) * s**2 * np.exp(-(s**2))
        cdf = np.trapezoid(pdf, s)
        assert en.energy_bracket(6.0) == pytest.approx(cdf, rel=1e-10)

    def test_monotone(self):
        k = np.linspace(0.0, 10.0, 101)
        assert np.all(np.diff(en.energy_bracket(k)) > 0.0)


class TestEscapeEnergy:
    def test_full_power(self):
        assert FULL_23.escape_energy == pytest.approx(3.776381e6, rel=1e-6)

    def test_probe_power(self):
        assert PROBE_23.escape_energy == pytest.approx(2.972480e6, rel=1e-6)

    def test_probe_shallower(self):
        assert PROBE_23.escape_energy < FULL_23.escape_energy


class TestSizes:
    def test_full_power_extents(self):
        sx, sy, sz = en.rms_sizes(FULL_23)
        assert sx == pytest.approx(100.094e-9, rel=1e-4)
        assert sy == pytest.approx(1758.70e-9, rel=1e-4)
        assert sz == pytest.approx(382.363e-9, rel=1e-4)

    def test_probe_power_extents(self):
        sx, sy, sz = en.rms_sizes(PROBE_23)
        assert sx == pytest.approx(64.403e-9, rel=1e-4)
        assert sy == pytest.approx(1624.55e-9, rel=1e-4)
        assert sz == pytest.approx(201.837e-9, rel=1e-4)

    def test_hotter_is_bigger(self):
        cold = en.rms_sizes(FULL_23)
        hot = en.rms_sizes(en.ThermalState(CFG, 38e-6))
        assert np.all(hot > cold)


class TestTruncatedDensity:
    def test_center_values(self):
        z_c, _ = trap_minimum(CFG)
        n = float(en.truncated_density(FULL_23, 0.0, 0.0, z_c))
        assert n == pytest.approx(9.9927e18, rel=1e-4)
        z_p, _ = trap_minimum(PROBE)
        n = float(en.truncated_density(PROBE_23, 0.0, 0.0, z_p))
        assert n == pytest.approx(9.9499e18, rel=1e-4)

    def test_x_symmetry(self):
        z_c, _ = trap_minimum(CFG)
        xs = np.linspace(0.0, 200e-9, 9)
        left = en.truncated_density(FULL_23, -xs, 0.0, z_c)
        right = en.truncated_density(FULL_23, xs, 0.0, z_c)
        assert np.allclose(left, right, rtol=1e-12)

    def test_zero_outside_basin(self):
        # surface attraction region is disconnected from the pocket
        assert float(en.truncated_density(FULL_23, 0.0, 0.0, 55e-9)) == 0.0

    def test_zero_above_escape_energy(self):
        # far down the beam the guide has decayed to a fraction of the well
        # depth, so the local energy sits above the escape energy
        assert float(en.truncated_density(FULL_23, 0.0, 12e-6, 440e-9)) == 0.0


class TestSurvival:
    def test_probe_curve(self):
        du = uK_to_Hz(np.array([0.0, 50.0, 100.0, 143.0, 250.0, 400.0]))
        p = en.survival_probability(PROBE_23, du)
        assert p[0] == 0.0
        assert p[1] == pytest.approx(0.3335, abs=2e-3)
        assert p[2] == pytest.approx(0.7970, abs=2e-3)
        assert np.all(p[3:] == 1.0)
        assert np.all(np.diff(p) >= 0.0)

    def test_scalar_input(self):
        p = en.survival_probability(PROBE_23, uK_to_Hz(100.0))
        assert isinstance(p, float)
        assert 0.0 < p < 1.0


class TestThermometry:
    def test_recovers_temperatures(self):
        rng = np.random.default_rng(7)
        du = uK_to_Hz(
            np.array([5, 15, 30, 50, 70, 90, 110, 130, 150, 200, 250, 300])
        )
        expected = {23e-6: (23.63, 0.62), 38e-6: (37.25, 1.35)}
        for t_true, (t_fit, t_err) in expected.items():
            p = en.survival_probability(en.ThermalState(PROBE, t_true), du)
            sig = np.maximum(0.05 * p, 0.01)
            y = p + sig * rng.standard_normal(p.size)
            fr = en.fit_temperature(PROBE, du, y, sig)
            assert fr.converged
            assert fr.parameters["temperature"] * 1e6 == pytest.approx(t_fit, abs=0.02)
            assert fr.error("temperature") * 1e6 == pytest.approx(t_err, abs=0.02)

    def test_flat_curve_is_degenerate(self):
        du = uK_to_Hz(np.linspace(250.0, 400.0, 8))
        with pytest.raises(DegenerateFitError):
            en.fit_temperature(PROBE, du, np.ones(8), 0.02 * np.ones(8))

    def test_size_mismatch(self):
        with pytest.raises(DataFormatError):
            en.fit_temperature(PROBE, np.ones(3), np.ones(4), np.ones(4))


class TestVibrationalNumbers:
    def test_full_power_at_23uk(self):
        nu = en.mean_vibrational_numbers(CFG, 23e-6)
        assert nu[0] == pytest.approx(4.5215, rel=1e-4)
        assert nu[1] == pytest.approx(131.572, rel=1e-4)
        assert nu[2] == pytest.approx(10.8649, rel=1e-4)

    def test_bad_temperature(self):
        with pytest.raises(ConfigError):
            en.mean_vibrational_numbers(CFG, 0.0)


class TestCoupling:
    def test_shipped_reference_hits_target(self):
        s = en.mean_coupling(PROBE_23)
        assert s.cooperativity == pytest.approx(0.05, rel=1e-9)

    def test_calibration_reproduces_reference(self):
        ref = en.calibrate_coupling_ref(PROBE)
        assert ref == pytest.approx(en.DEFAULT_COUPLING_REF, rel=1e-9)

    def test_cooperativity_drift_with_temperature(self):
        want = [0.049679, 0.051084, 0.052223, 0.052869, 0.053340]
        got = [
            en.mean_coupling(en.ThermalState(PROBE, t * 1e-6)).cooperativity
            for t in (22, 27, 33, 38, 43)
        ]
        assert np.allclose(got, want, rtol=1e-4)
        assert np.all(np.diff(got) > 0.0)

    def test_atom_number(self):
        assert en.atom_number(3.6, 0.05) == pytest.approx(72.0, rel=1e-12)
        with pytest.raises(ConfigError):
            en.atom_number(3.6, 0.0)


class TestMaps:
    def test_shapes(self):
        m = en.density_maps(FULL_23)
        assert m.x.shape == (96,)
        assert m.y.shape == (80,)
        assert m.z.shape == (224,)
        assert m.xz.shape == (96, 224)
        assert m.yz.shape == (80, 224)

    def test_column_totals_agree(self):
        m = en.density_maps(FULL_23)
        g = FULL_23.geometry
        tot = float(np.sum(FULL_23.density * g.weights))
        tot_xz = float(np.einsum("xz,x,z->", m.xz, g.xw, g.zw))
        tot_yz = float(np.einsum("yz,y,z->", m.yz, g.yw, g.zw))
        assert tot_xz == pytest.approx(tot, rel=1e-12)
        assert tot_yz == pytest.approx(tot, rel=1e-12)

    def test_moments_match_rms_sizes(self):
        m = en.density_maps(FULL_23)
        g = FULL_23.geometry
        col = np.einsum("xz,z->x", m.xz, g.zw) * g.xw
        sx = np.sqrt(np.sum(col * m.x**2) / np.sum(col))
        assert sx == pytest.approx(en.rms_sizes(FULL_23)[0], rel=1e-12)


class TestStateValidation:
    def test_bad_temperature(self):
        with pytest.raises(ConfigError):
            en.ThermalState(CFG, -1e-6)

    def test_bad_sublevel(self):
        with pytest.raises(ConfigError):
            en.ThermalState(CFG, 23e-6, m_F=4)
