"""Deterministic synthetic dataset generators.

Each generator takes an explicit seed and is the single source of truth for
the CSVs shipped under data/: write_shipped_datasets regenerates them
byte-for-byte, so the committed files and their generating parameters can
never drift apart.
"""

import os

import numpy as np

from ._tables import write_columns
from .cavity import (
    CollectiveCoupling,
    DecayDataset,
    ResonatorParams,
    SpectrumDataset,
    averaged_spectrum,
    transmission,
)
from .constants import uK_to_Hz
from .ensemble import ThermalState, survival_probability
from .errors import ConfigError
from .kinetics import LossModel, evolve_atom_number
from .trapmodel import TrapConfig, probe_config

PAPER_RESONATOR = ResonatorParams(0.76e9, 0.94e9, 0.60e9)

# Fig.-4-like barrier-minimum grid for spill curves, in uK
SPILL_GRID_UK = (5.0, 15.0, 30.0, 50.0, 70.0, 90.0, 110.0, 130.0, 150.0, 200.0, 250.0, 300.0)


def bare_spectrum(
    rp: ResonatorParams = PAPER_RESONATOR,
    span: float = 5e9,
    n: int = 161,
    noise: float = 0.02,
    seed: int = 0,
) -> SpectrumDataset:
    """Empty-resonator transmission spectrum with multiplicative noise."""
    if span <= 0 or n < 3:
        raise ConfigError("need a positive span and at least 3 points")
    rng = np.random.default_rng(seed)
    d = np.linspace(-span, span, n)
    _, T = transmission(d, 0.0, rp)
    sigma = np.maximum(noise * T, 1e-4)
    y = T + sigma * rng.standard_normal(n) if noise > 0 else T
    return SpectrumDataset(d, y, np.maximum(sigma, 1e-4))


def atom_spectrum(
    cc: CollectiveCoupling,
    rp: ResonatorParams = PAPER_RESONATOR,
    span: float = 5e9,
    n: int = 161,
    noise: float = 0.02,
    seed: int = 0,
) -> SpectrumDataset:
    """Gamma-averaged collective spectrum with multiplicative noise."""
    if span <= 0 or n < 3:
        raise ConfigError("need a positive span and at least 3 points")
    rng = np.random.default_rng(seed)
    d = np.linspace(-span, span, n)
    T = averaged_spectrum(d, cc, rp)
    sigma = np.maximum(noise * T, 1e-4)
    y = T + sigma * rng.standard_normal(n) if noise > 0 else T
    return SpectrumDataset(d, y, np.maximum(sigma, 1e-4))


def pulsed_decay(
    rate_ratio: float = 2.33,
    rp: ResonatorParams = PAPER_RESONATOR,
    bin_width: float = 0.5e-9,
    window: float = 35e-9,
    peak_counts: float = 2000.0,
    background: float = 20.0,
    seed: int = 0,
) -> DecayDataset:
    """Poisson photon-count trace decaying at rate_ratio * gamma0."""
    if rate_ratio <= 0 or peak_counts <= 0:
        raise ConfigError("rate_ratio and peak_counts must be positive")
    rng = np.random.default_rng(seed)
    t = np.arange(bin_width / 2.0, window, bin_width)
    mean = peak_counts * np.exp(-2.0 * np.pi * rate_ratio * rp.gamma0 * t) + background
    return DecayDataset(t, rng.poisson(mean).astype(float), background)


def spill_curve(
    config: TrapConfig,
    temperature: float,
    amplitude: float = 3.6,
    barrier_uK=SPILL_GRID_UK,
    noise: float = 0.05,
    seed: int = 0,
):
    """Spill curve amplitude * P(barrier; T) with additive noise.

    Returns (barrier_uK, values, sigmas); values are in the amplitude's
    units (e.g. collective cooperativity). Noise scale is noise * value
    with a floor of noise / 5 * amplitude, as for a weak-signal readout.
    """
    if amplitude <= 0:
        raise ConfigError("amplitude must be positive")
    rng = np.random.default_rng(seed)
    du = np.asarray(barrier_uK, dtype=float)
    p = survival_probability(ThermalState(config, temperature), uK_to_Hz(du))
    y = amplitude * p
    sigma = np.maximum(noise * y, noise / 5.0 * amplitude)
    if noise > 0:
        y = y + sigma * rng.standard_normal(du.size)
    return du, y, sigma


def loss_series(
    lm: LossModel,
    t_grid,
    noise: float = 0.02,
    seed: int = 0,
):
    """Relative atom-number decay trace with constant additive noise."""
    t = np.asarray(t_grid, dtype=float)
    y = evolve_atom_number(lm, t)
    sigma = np.full(t.size, max(noise, 1e-4) * float(np.max(y)))
    if noise > 0:
        rng = np.random.default_rng(seed)
        y = y + sigma * rng.standard_normal(t.size)
    return t, y, sigma


def write_shipped_datasets(root) -> list:
    """Regenerate every shipped CSV under root; returns the paths written."""
    os.makedirs(root, exist_ok=True)
    paths = []

    def emit(name, header, columns):
        path = os.path.join(root, name)
        write_columns(path, header, columns)
        paths.append(path)

    ds = bare_spectrum(noise=0.02, seed=11)
    emit("spectrum_bare.csv", ("detuning_Hz", "value", "sigma"),
         (ds.detunings, ds.transmissions, ds.uncertainties))

    ds = atom_spectrum(CollectiveCoupling(3.6, 4.0, 0.0), noise=0.02, seed=22)
    emit("spectrum_atoms.csv", ("detuning_Hz", "value", "sigma"),
         (ds.detunings, ds.transmissions, ds.uncertainties))

    dd = pulsed_decay(rate_ratio=2.33, seed=13)
    emit("decay_pulsed.csv", ("time_s", "value"), (dd.times, dd.counts))

    pc = probe_config(TrapConfig())
    du, y, s = spill_curve(pc, 23e-6, amplitude=3.6, noise=0.05, seed=21)
    emit("spill_23uK.csv", ("dU_min_uK", "CN", "sigma"), (du, y, s))
    du, y, s = spill_curve(pc, 38e-6, amplitude=3.6, noise=0.05, seed=24)
    emit("spill_38uK.csv", ("dU_min_uK", "CN", "sigma"), (du, y, s))

    # |3,3>: one-body 230 ms plus three-body L3 = 2.6e-25 cm^6/s at 1e13 cm^-3
    lm = LossModel(tau=0.23, n0=1e19, L3=2.6e-37)
    t, y, s = loss_series(lm, np.linspace(0.0, 0.5, 26), noise=0.02, seed=33)
    emit("lifetime_stretched.csv", ("t_s", "value", "sigma"), (t, y, s))

    # F=4: two-body L2 = 1e-11 cm^3/s
    lm = LossModel(tau=0.23, n0=1e19, L2=1e-17)
    t, y, s = loss_series(lm, np.linspace(0.0, 0.05, 26), noise=0.02, seed=19)
    emit("lifetime_f4.csv", ("t_s", "value", "sigma"), (t, y, s))

    # |4,-4>: two-body L2 = 2.8e-12 cm^3/s
    lm = LossModel(tau=0.23, n0=1e19, L2=2.8e-18)
    t, y, s = loss_series(lm, np.linspace(0.0, 0.15, 26), noise=0.02, seed=29)
    emit("lifetime_4m4.csv", ("t_s", "value", "sigma"), (t, y, s))

    # continuously cooled hold: pure one-body at 690 ms
    lm = LossModel(tau=0.69, n0=1e19)
    t, y, s = loss_series(lm, np.linspace(0.0, 2.0, 26), noise=0.02, seed=19)
    emit("lifetime_cooled.csv", ("t_s", "value", "sigma"), (t, y, s))

    return paths
