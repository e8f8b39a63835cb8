import numpy as np
import pytest

from ringtrap.cavity import (
    CollectiveCoupling,
    DecayDataset,
    ResonatorParams,
    SpectrumDataset,
    averaged_spectrum,
    decay_rate_model,
    eta_reduction,
    fit_bare_resonator,
    fit_cooperativity,
    fit_pulsed_decay,
    reflection,
    transmission,
    transmission_to_CN,
)
from ringtrap.errors import (
    ConfigError,
    DataFormatError,
    DomainError,
    InsufficientSignalError,
)
from ringtrap.numerics import gauss_legendre_panels

RP = ResonatorParams(0.76e9, 0.94e9, 0.60e9)


def window_fwhm(rp, cn, span=4e9, n=20001):
    # full width of the transparency window at half its height above the
    # bare-resonator floor
    d = np.linspace(-span, span, n)
    _, T = transmission(d, cn, rp)
    t0 = transmission(0.0, 0.0, rp)[1]
    peak = transmission(0.0, cn, rp)[1]
    half = t0 + 0.5 * (peak - t0)
    i0 = n // 2
    l = i0
    while l > 0 and T[l - 1] >= half:
        l -= 1
    r = i0
    while r < n - 1 and T[r + 1] >= half:
        r += 1
    return d[r] - d[l]


class TestEta:
    def test_reference_triple(self):
        assert eta_reduction(RP) == pytest.approx(0.67, abs=0.005)

    def test_no_backscatter(self):
        assert eta_reduction(ResonatorParams(0.76e9, 0.94e9, 0.0)) == 1.0

    def test_half_point(self):
        rp = ResonatorParams(0.8e9, 0.8e9, 0.8e9)  # beta = kappa/2
        assert eta_reduction(rp) == pytest.approx(0.5, rel=1e-12)


class TestTransmission:
    def test_bare_resonant_floor(self):
        # direct substitution: |1 - 2 k_e eta / k|^2
        a = 2 * RP.kappa_e * RP.eta / RP.kappa
        _, T = transmission(0.0, 0.0, RP)
        assert T == pytest.approx((1 - a) ** 2, rel=1e-12)
        assert T == pytest.approx(0.163, abs=0.001)

    def test_full_transparency_limit(self):
        _, T = transmission(0.0, 1e9, RP)
        assert T == pytest.approx(1.0, abs=1e-6)

    def test_even_in_detuning(self):
        d = np.linspace(1e6, 5e9, 300)
        for cn in (0.0, 1.3, 3.6):
            _, Tp = transmission(d, cn, RP)
            _, Tm = transmission(-d, cn, RP)
            assert np.max(np.abs(Tp - Tm)) < 1e-12

    def test_energy_bookkeeping(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            rp = ResonatorParams(*(10 ** rng.uniform(8, 9.5, 3)))
            _, T = transmission(0.0, 0.0, rp)
            R = reflection(0.0, 0.0, rp)
            assert T + R < 1.0
            assert 0.0 < 1.0 - T - R < 1.0

    def test_window_broadens_with_cn(self):
        widths = [window_fwhm(RP, cn) for cn in (0.5, 1.0, 2.0, 3.6)]
        assert all(b > a for a, b in zip(widths, widths[1:]))


class TestReflection:
    def test_no_backscatter_dark(self):
        rp = ResonatorParams(0.76e9, 0.94e9, 0.0)
        assert reflection(0.0, 0.0, rp) == 0.0

    def test_transparency_kills_reflection(self):
        assert reflection(0.0, 1e9, RP) < 1e-12

    def test_resonant_bare_value(self):
        # |4 k_e eta beta / k^2|^2 by direct substitution
        expect = (4 * RP.kappa_e * RP.eta * RP.beta / RP.kappa**2) ** 2
        assert reflection(0.0, 0.0, RP) == pytest.approx(expect, rel=1e-12)


class TestAveragedSpectrum:
    def test_narrow_distribution_limit(self):
        d = np.linspace(-3e9, 3e9, 41)
        av = averaged_spectrum(d, CollectiveCoupling(3.6, 1e6, 0.0), RP)
        _, direct = transmission(d, 3.6, RP)
        assert np.max(np.abs(av - direct)) < 1e-4

    def test_distribution_mean(self):
        # the quadrature grid integrates c * pdf back to the mean
        from scipy.stats import gamma as gamma_dist

        k, mean = 4.0, 3.6
        nodes, w = gauss_legendre_panels(
            gamma_dist.ppf(1e-13, a=k, scale=mean / k),
            gamma_dist.ppf(1 - 1e-13, a=k, scale=mean / k),
            64,
        )
        got = np.sum(nodes * gamma_dist.pdf(nodes, a=k, scale=mean / k) * w)
        assert got == pytest.approx(mean, rel=1e-9)

    def test_jensen_gap_on_resonance(self):
        av = averaged_spectrum(np.array([0.0]), CollectiveCoupling(3.6, 4.0, 0.0), RP)
        _, direct = transmission(0.0, 3.6, RP)
        assert av[0] < direct

    def test_zero_mean_is_bare(self):
        d = np.linspace(-2e9, 2e9, 21)
        av = averaged_spectrum(d, CollectiveCoupling(0.0, 4.0, 0.0), RP)
        _, bare = transmission(d, 0.0, RP)
        assert np.allclose(av, bare, rtol=0, atol=1e-14)


class TestTransmissionInversion:
    def test_floor_maps_to_zero(self):
        _, t0 = transmission(0.0, 0.0, RP)
        assert transmission_to_CN(float(t0), RP) == pytest.approx(0.0, abs=1e-12)

    def test_round_trip(self):
        for c in np.linspace(0.0, 20.0, 41):
            _, T = transmission(0.0, c, RP)
            assert transmission_to_CN(float(T), RP) == pytest.approx(c, abs=1e-10)

    def test_overflow_cap(self):
        assert transmission_to_CN(0.9999999999999, RP) == np.inf
        assert transmission_to_CN(1.0, RP) == np.inf

    def test_below_floor_rejected(self):
        with pytest.raises(DomainError):
            transmission_to_CN(0.05, RP)


class TestDecayModel:
    def test_baseline(self):
        assert decay_rate_model(0.0, RP) == 1.0

    def test_reference_point(self):
        # beta tuned for eta = 0.67 exactly
        beta = 0.5 * 1.7e9 * np.sqrt(1 / 0.67 - 1.0)
        rp = ResonatorParams(0.76e9, 0.94e9, beta)
        assert decay_rate_model(2.0, rp) == pytest.approx(2.34, abs=1e-6)

    def test_affine_slope(self):
        s = (decay_rate_model(5.0, RP) - decay_rate_model(1.0, RP)) / 4.0
        assert s == pytest.approx(RP.eta, rel=1e-12)


class TestBareResonatorFit:
    def test_noiseless_recovery(self):
        d = np.linspace(-6e9, 6e9, 201)
        _, T = transmission(d, 0.0, RP)
        ds = SpectrumDataset(d, T, np.full_like(d, 0.01))
        rp, res = fit_bare_resonator(ds)
        assert res.converged
        assert rp.kappa_e == pytest.approx(0.76e9, rel=1e-6)
        assert rp.kappa_i == pytest.approx(0.94e9, rel=1e-6)
        assert rp.beta == pytest.approx(0.60e9, rel=1e-6)

    def test_swap_degeneracy_convention(self):
        # with beta=0 the coupling assignment is exactly two-fold degenerate;
        # the reported pair must follow kappa_e < kappa_i
        gen = ResonatorParams(0.94e9, 0.76e9, 1e-12)
        d = np.linspace(-6e9, 6e9, 201)
        _, T = transmission(d, 0.0, gen)
        rp, res = fit_bare_resonator(SpectrumDataset(d, T, np.full_like(d, 0.01)))
        assert rp.kappa_e < rp.kappa_i
        assert rp.kappa == pytest.approx(1.70e9, rel=1e-4)

    def test_zero_beta_recovered_as_zero(self):
        gen = ResonatorParams(0.5e9, 1.1e9, 1e-12)
        d = np.linspace(-6e9, 6e9, 201)
        _, T = transmission(d, 0.0, gen)
        rp, _ = fit_bare_resonator(SpectrumDataset(d, T, np.full_like(d, 0.01)))
        assert rp.beta < 1e-4 * rp.kappa


class TestCooperativityFit:
    def test_noiseless_recovery(self):
        d = np.linspace(-5e9, 5e9, 161)
        y = averaged_spectrum(d, CollectiveCoupling(3.6, 4.0, 0.08e9), RP)
        cc, res = fit_cooperativity(SpectrumDataset(d, y, np.full_like(d, 0.01)), RP)
        assert res.converged
        assert cc.CN_mean == pytest.approx(3.6, rel=1e-6)
        assert cc.gamma_shape == pytest.approx(4.0, rel=1e-4)
        assert cc.detuning_offset == pytest.approx(0.08e9, rel=1e-4)

    def test_flat_spectrum_no_atoms(self):
        d = np.linspace(-5e9, 5e9, 101)
        _, T = transmission(d, 0.0, RP)
        cc, _ = fit_cooperativity(SpectrumDataset(d, T, np.full_like(d, 0.01)), RP)
        assert cc.CN_mean == pytest.approx(0.0, abs=1e-8)

    def test_monotone_recovery(self):
        d = np.linspace(-5e9, 5e9, 161)
        fitted = []
        for gen in (0.5, 1.0, 2.0, 3.6):
            y = averaged_spectrum(d, CollectiveCoupling(gen, 4.0, 0.0), RP)
            cc, _ = fit_cooperativity(SpectrumDataset(d, y, np.full_like(d, 0.01)), RP)
            fitted.append(cc.CN_mean)
        assert all(b > a for a, b in zip(fitted, fitted[1:]))

    def test_noisy_ensemble_recovery(self):
        rng = np.random.default_rng(19)
        d = np.linspace(-5e9, 5e9, 161)
        y0 = averaged_spectrum(d, CollectiveCoupling(3.6, 4.0, 0.0), RP)
        fits = []
        for _ in range(30):
            y = y0 + rng.normal(0.0, 0.005, d.size)
            cc, _ = fit_cooperativity(
                SpectrumDataset(d, y, np.full_like(d, 0.005)), RP
            )
            fits.append(cc.CN_mean)
        fits = np.array(fits)
        assert abs(fits.mean() - 3.6) / 3.6 < 0.05
        assert np.max(np.abs(fits - 3.6) / 3.6) < 0.25


class TestPulsedDecayFit:
    def make_trace(self, rng, ratio, amplitude=400.0, bg=20.0):
        t = np.arange(0.0, 35e-9, 0.5e-9)
        mu = amplitude * np.exp(-2 * np.pi * RP.gamma0 * ratio * t) + bg
        return DecayDataset(t, rng.poisson(mu), background=bg)

    def test_superradiant_recovery(self):
        rng = np.random.default_rng(3)
        data = self.make_trace(rng, 2.33)
        gamma, ratio, res = fit_pulsed_decay(data, RP)
        assert res.converged
        assert ratio == pytest.approx(2.33, abs=3 * res.error("rate") / RP.gamma0)

    def test_unity_ratio(self):
        rng = np.random.default_rng(5)
        data = self.make_trace(rng, 1.0)
        _, ratio, res = fit_pulsed_decay(data, RP)
        assert ratio == pytest.approx(1.0, abs=3 * res.error("rate") / RP.gamma0)

    def test_background_only_rejected(self):
        rng = np.random.default_rng(7)
        t = np.arange(0.0, 35e-9, 0.5e-9)
        data = DecayDataset(t, rng.poisson(20.0, t.size), background=20.0)
        with pytest.raises(InsufficientSignalError):
            fit_pulsed_decay(data, RP)

    def test_window_validation(self):
        rng = np.random.default_rng(9)
        data = self.make_trace(rng, 2.0)
        with pytest.raises(ConfigError):
            fit_pulsed_decay(data, RP, window=(0.0, 50e-9))


class TestDatasets:
    def test_spectrum_csv_round_trip(self, tmp_path):
        path = tmp_path / "spec.csv"
        path.write_text(
            "detuning_Hz,value,sigma\n-1e9,0.5,0.01\n0,0.16,0.01\n1e9,0.5,0.01\n"
        )
        ds = SpectrumDataset.from_csv(path)
        assert ds.detunings.size == 3
        assert ds.transmissions[1] == pytest.approx(0.16)

    def test_spectrum_csv_missing_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("detuning_Hz,value\n0,0.5\n")
        with pytest.raises(DataFormatError):
            SpectrumDataset.from_csv(path)

    def test_spectrum_csv_empty(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("detuning_Hz,value,sigma\n")
        with pytest.raises(DataFormatError):
            SpectrumDataset.from_csv(path)

    def test_non_increasing_detunings(self):
        with pytest.raises(DataFormatError):
            SpectrumDataset(
                np.array([0.0, 0.0, 1.0]), np.ones(3), np.full(3, 0.1)
            )

    def test_decay_nonuniform_bins(self):
        with pytest.raises(DataFormatError):
            DecayDataset(np.array([0.0, 1e-9, 3e-9]), np.array([5.0, 4.0, 3.0]))

    def test_resonator_params_validation(self):
        with pytest.raises(ConfigError):
            ResonatorParams(-1.0, 1e9, 0.0)
        with pytest.raises(ConfigError):
            ResonatorParams(1e9, 1e9, -1e8)
