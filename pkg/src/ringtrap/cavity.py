"""Atom-microring spectra and decay.

Coupled-mode transmission and reflection of a ring resonator with coherent
back-scattering, collective-coupling averaged spectra, resonator and
cooperativity fits, and superradiant pulsed-decay fitting.

Convention: every rate and detuning in this module is an ordinary frequency
in Hz (divide angular rates by 2*pi before passing them in). All spectrum
formulas are ratios of rates, so the convention cancels; the only place a
2*pi reappears is the pulsed-decay time constant.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import gamma as gamma_dist

from ._tables import read_columns
from .errors import (
    ConfigError,
    DataFormatError,
    DegenerateFitError,
    DomainError,
    InsufficientSignalError,
)
from .numerics import FitResult, fit_nonlinear, gauss_legendre_panels

# Forward-propagating mode only: atoms couple "nearly not" to the
# counter-propagating mode; its residual amplitude asymmetry (about 1/sqrt(45))
# is recorded here for reference and deliberately unused.
COUNTERPROP_AMPLITUDE_RATIO = 45 ** -0.5


@dataclass(frozen=True)
class ResonatorParams:
    """Ring-resonator rates in Hz (ordinary frequency)."""

    kappa_e: float  # Hz, external (taper) coupling rate
    kappa_i: float  # Hz, intrinsic loss rate
    beta: float  # Hz, coherent back-scattering rate
    gamma0: float = 5.2e6  # Hz, atomic free-space linewidth
    gamma_prime: float | None = None  # Hz, in-trap linewidth; defaults to gamma0

    def __post_init__(self):
        if self.kappa_e <= 0 or self.kappa_i <= 0:
            raise ConfigError("kappa_e and kappa_i must be positive")
        if self.beta < 0:
            raise ConfigError("beta must be non-negative")
        if self.gamma0 <= 0:
            raise ConfigError("gamma0 must be positive")
        if self.gamma_prime is None:
            object.__setattr__(self, "gamma_prime", self.gamma0)

    @property
    def kappa(self) -> float:
        return self.kappa_e + self.kappa_i

    @property
    def eta(self) -> float:
        return 1.0 / (1.0 + (2.0 * self.beta / self.kappa) ** 2)


@dataclass(frozen=True)
class SpectrumDataset:
    detunings: np.ndarray  # Hz, strictly increasing
    transmissions: np.ndarray  # dimensionless
    uncertainties: np.ndarray  # per-point sigma

    def __post_init__(self):
        d = np.asarray(self.detunings, dtype=float)
        t = np.asarray(self.transmissions, dtype=float)
        s = np.asarray(self.uncertainties, dtype=float)
        for name, a in (("detunings", d), ("transmissions", t), ("uncertainties", s)):
            object.__setattr__(self, name, a)
        if d.size == 0:
            raise DataFormatError("empty spectrum dataset")
        if not (d.size == t.size == s.size):
            raise DataFormatError("spectrum columns have unequal lengths")
        if np.any(np.diff(d) <= 0):
            raise DataFormatError("detunings must be strictly increasing")
        if np.any(s <= 0):
            raise DataFormatError("uncertainties must be positive")

    @classmethod
    def from_csv(cls, path) -> "SpectrumDataset":
        rows = read_columns(path, ("detuning_Hz", "value", "sigma"))
        return cls(rows[:, 0], rows[:, 1], rows[:, 2])


@dataclass(frozen=True)
class DecayDataset:
    """Photon-count decay trace; times relative to pulse extinction."""

    times: np.ndarray  # s, uniform bin centers
    counts: np.ndarray  # counts per bin
    background: float = 0.0  # counts per bin

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        c = np.asarray(self.counts, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "counts", c)
        if t.size == 0:
            raise DataFormatError("empty decay dataset")
        if t.size != c.size:
            raise DataFormatError("decay columns have unequal lengths")
        if t.size >= 3:
            d = np.diff(t)
            if np.ptp(d) > 1e-9 * np.mean(d):
                raise DataFormatError("decay time bins must be uniform")
        if np.any(c < 0):
            raise DataFormatError("counts must be non-negative")
        if self.background < 0:
            raise DataFormatError("background must be non-negative")

    @classmethod
    def from_csv(cls, path, background: float = 0.0) -> "DecayDataset":
        rows = read_columns(path, ("time_s", "value"), optional=("sigma",))
        return cls(rows[:, 0], rows[:, 1], background)


@dataclass(frozen=True)
class CollectiveCoupling:
    CN_mean: float  # dimensionless mean collective cooperativity
    gamma_shape: float  # shape parameter k of the gamma distribution
    detuning_offset: float = 0.0  # Hz

    def __post_init__(self):
        if self.CN_mean < 0:
            raise ConfigError("CN_mean must be non-negative")
        if self.gamma_shape <= 0:
            raise ConfigError("gamma_shape must be positive")


# ---------------------------------------------------------------------------
# spectra


def eta_reduction(rp: ResonatorParams) -> float:
    """Back-scattering transparency reduction 1/(1 + (2 beta/kappa)^2)."""
    return rp.eta


def _spectral_terms(delta, CN, rp: ResonatorParams):
    delta = np.asarray(delta, dtype=float)
    kt = rp.kappa - 2j * delta  # complex linewidth
    eta_t = 1.0 / (1.0 + (2.0 * rp.beta / kt) ** 2)
    gpt = rp.gamma_prime - 2j * delta
    # detuned collective cooperativity, rescaled from its resonant value
    cnt = CN * (rp.kappa * rp.gamma_prime) / (kt * gpt)
    return kt, eta_t, cnt


def transmission(delta, CN, rp: ResonatorParams):
    """Complex transmission amplitude and |t|^2 at detuning delta (Hz)."""
    kt, eta_t, cnt = _spectral_terms(delta, CN, rp)
    t = 1.0 - (2.0 * rp.kappa_e * eta_t / kt) / (1.0 + eta_t * cnt)
    return t, np.abs(t) ** 2


def reflection(delta, CN, rp: ResonatorParams):
    """|r|^2 at detuning delta (Hz)."""
    kt, eta_t, cnt = _spectral_terms(delta, CN, rp)
    r = (4.0 * rp.kappa_e * eta_t / kt) * (1j * rp.beta / kt) / (1.0 + eta_t * cnt)
    return np.abs(r) ** 2


def averaged_spectrum(deltas, cc: CollectiveCoupling, rp: ResonatorParams, tol=1e-6):
    """Transmission averaged over a gamma distribution of the cooperativity.

    T_bar(delta) = integral T(delta - offset; c) Gamma(c; k, theta=CN_mean/k) dc,
    evaluated by panel-doubled Gauss-Legendre quadrature to relative tol.
    """
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float)) - cc.detuning_offset
    if cc.CN_mean == 0.0:
        _, T = transmission(deltas, 0.0, rp)
        return T
    k = cc.gamma_shape
    theta = cc.CN_mean / k

    def estimates():
        if k <= 60.0:
            # generalized Gauss-Laguerre absorbs the c^(k-1) e^(-c/theta)
            # weight exactly; nodes double until two estimates agree
            from scipy.special import gamma as gamma_fn, roots_genlaguerre

            norm = gamma_fn(k)
            for n in (16, 32, 64, 128, 256):
                x, w = roots_genlaguerre(n, k - 1.0)
                _, T = transmission(deltas[:, None], theta * x[None, :], rp)
                yield T @ (w / norm)
        else:
            # large shape: the distribution is narrow and smooth, plain
            # panels between extreme quantiles converge immediately
            lo = gamma_dist.ppf(1e-13, a=k, scale=theta)
            hi = gamma_dist.ppf(1.0 - 1e-13, a=k, scale=theta)
            m = 2
            while m <= 256:
                nodes, w = gauss_legendre_panels(lo, hi, m)
                pdf = gamma_dist.pdf(nodes, a=k, scale=theta)
                _, T = transmission(deltas[:, None], nodes[None, :], rp)
                yield T @ (w * pdf)
                m *= 2

    prev = None
    for est in estimates():
        if prev is not None and np.max(np.abs(est - prev)) <= tol * max(
            np.max(np.abs(est)), 1e-300
        ):
            return est
        prev = est
    raise DomainError("gamma-averaged spectrum quadrature did not converge")


def transmission_to_CN(T_resonant: float, rp: ResonatorParams) -> float:
    """Invert the on-resonance transmission for the collective cooperativity.

    Valid on the undercoupled branch (2 kappa_e eta < kappa), where t(0, C)
    rises monotonically from 1 - a to 1. Values beyond C = 1e6 are reported
    as inf (transmission indistinguishable from full transparency).
    """
    a = 2.0 * rp.kappa_e * rp.eta / rp.kappa
    if a >= 1.0:
        raise DomainError("inversion requires the undercoupled branch (a < 1)")
    t0 = 1.0 - a
    if T_resonant < t0 * t0 - 1e-12:
        raise DomainError(
            f"transmission {T_resonant:.4f} below bare-resonator floor {t0 * t0:.4f}"
        )
    if T_resonant >= 1.0:
        return np.inf
    c = (a / (1.0 - np.sqrt(T_resonant)) - 1.0) / rp.eta
    c = max(c, 0.0)
    return np.inf if c > 1e6 else c


def decay_rate_model(CN_mean: float, rp: ResonatorParams) -> float:
    """Superradiant rate enhancement Gamma/Gamma0 = 1 + eta * CN_mean."""
    if CN_mean < 0:
        raise ConfigError("CN_mean must be non-negative")
    return 1.0 + rp.eta * CN_mean


# ---------------------------------------------------------------------------
# fits


def fit_bare_resonator(data: SpectrumDataset):
    """Fit (kappa_e, kappa_i, beta) plus a center offset to a no-atom spectrum.

    The near-degenerate coupling assignment is resolved by refitting from a
    swapped initialization; on a chi2 tie the kappa_e < kappa_i branch is
    reported. Returns (ResonatorParams, FitResult).
    """
    d, T, s = data.detunings, data.transmissions, data.uncertainties
    span = d[-1] - d[0]
    t_min = float(np.min(T))
    t_base = float(np.median(T[np.abs(d - d[np.argmin(T)]) > 0.3 * span]))
    center0 = float(d[np.argmin(T)])
    # crude width estimate from the half-depth crossing
    half = t_min + 0.5 * (t_base - t_min)
    below = d[T < half]
    kappa0 = float(below[-1] - below[0]) if below.size >= 2 else span / 6.0
    kappa0 = max(kappa0, span / 50.0)

    def model(x, kappa_e, kappa_i, beta, center):
        rp = ResonatorParams(kappa_e, kappa_i, beta)
        _, tt = transmission(x - center, 0.0, rp)
        return tt

    def model_no_beta(x, kappa_e, kappa_i, center):
        return model(x, kappa_e, kappa_i, 0.0, center)

    results = []
    for split in (0.35, 0.65):
        initial = {
            "kappa_e": split * kappa0,
            "kappa_i": (1.0 - split) * kappa0,
            "beta": 0.25 * kappa0,
            "center": center0,
        }
        bounds = {
            "kappa_e": (1e-6 * kappa0, 10 * kappa0),
            "kappa_i": (1e-6 * kappa0, 10 * kappa0),
            "beta": (0.0, 10 * kappa0),
            "center": (d[0], d[-1]),
        }
        try:
            res = fit_nonlinear(
                model, d, T, s, initial, bounds=bounds, scales={"center": kappa0}
            )
        except DegenerateFitError:
            # beta landed on zero where it has no sensitivity left; pin it
            # there and fit the remaining three honestly
            initial.pop("beta")
            bounds.pop("beta")
            res = fit_nonlinear(
                model_no_beta, d, T, s, initial, bounds=bounds,
                scales={"center": kappa0},
            )
        results.append(res)
    best = min(results, key=lambda r: r.chi2)
    other = results[0] if best is results[1] else results[1]
    if abs(best.chi2 - other.chi2) <= 1e-6 * max(best.chi2, 1e-30) + 1e-20:
        # degenerate pair: report the conventional assignment
        candidates = [r for r in (best, other)
                      if r.parameters["kappa_e"] < r.parameters["kappa_i"]]
        if candidates:
            best = candidates[0]
    p = best.parameters
    rp = ResonatorParams(p["kappa_e"], p["kappa_i"], abs(p.get("beta", 0.0)))
    return rp, best


def fit_cooperativity(data: SpectrumDataset, rp: ResonatorParams, fit_offset=True):
    """Fit (CN_mean, gamma_shape, detuning_offset) of the averaged spectrum.

    The shape parameter is bounded to [0.5, 50]. It is released only when the
    spectrum actually shows atoms (initial CN estimate above 0.05); on a flat
    spectrum the fit reduces to CN and offset with the shape held fixed, since
    the shape is unidentifiable at CN = 0. Returns (CollectiveCoupling,
    FitResult).
    """
    d, T, s = data.detunings, data.transmissions, data.uncertainties
    # seed the offset from the centroid of the dip, not from raw zero detuning:
    # the transparency window rides at the (possibly shifted) dip center, and
    # inverting T off-center reads the cavity shoulder instead of the window
    depth = np.maximum(np.max(T) - T, 0.0)
    w = float(np.sum(depth))
    offset0 = float(np.sum(d * depth) / w) if w > 0 else 0.0
    offset0 = float(np.clip(offset0, -0.9 * rp.kappa, 0.9 * rp.kappa))
    i0 = int(np.argmin(np.abs(d - offset0)))
    try:
        cn0 = transmission_to_CN(float(np.clip(T[i0], 0.0, 0.999999)), rp)
    except DomainError:
        cn0 = 0.0
    cn0 = float(min(cn0, 50.0))
    k0 = 4.0
    scale_cn = max(cn0, 0.5)

    def run(names_model, initial, bounds, scales):
        return fit_nonlinear(names_model, d, T, s, initial, bounds=bounds, scales=scales)

    if fit_offset:
        def model(x, CN_mean, gamma_shape, offset):
            cc = CollectiveCoupling(max(CN_mean, 0.0), gamma_shape, offset)
            return averaged_spectrum(x, cc, rp)
        initial = {"CN_mean": max(cn0, 1e-3), "gamma_shape": k0, "offset": offset0}
        bounds = {"CN_mean": (0.0, 1e3), "gamma_shape": (0.5, 50.0), "offset": (-rp.kappa, rp.kappa)}
        scales = {"CN_mean": scale_cn, "gamma_shape": 1.0, "offset": rp.kappa / 100.0}
    else:
        def model(x, CN_mean, gamma_shape):
            cc = CollectiveCoupling(max(CN_mean, 0.0), gamma_shape, 0.0)
            return averaged_spectrum(x, cc, rp)
        initial = {"CN_mean": max(cn0, 1e-3), "gamma_shape": k0}
        bounds = {"CN_mean": (0.0, 1e3), "gamma_shape": (0.5, 50.0)}
        scales = {"CN_mean": scale_cn, "gamma_shape": 1.0}

    if cn0 <= 0.05:
        # neither the shape nor the offset is identifiable without atoms:
        # freeze both and fit the mean alone
        def flat_model(x, CN_mean):
            cc = CollectiveCoupling(max(CN_mean, 0.0), k0, 0.0)
            return averaged_spectrum(x, cc, rp)

        res = run(flat_model, {"CN_mean": 1e-3}, {"CN_mean": (0.0, 1e3)}, {"CN_mean": 0.5})
        cc = CollectiveCoupling(max(res.parameters["CN_mean"], 0.0), k0, 0.0)
        return cc, res

    res = run(model, initial, bounds, scales)
    p = res.parameters
    cc = CollectiveCoupling(
        max(p["CN_mean"], 0.0), p["gamma_shape"], p.get("offset", 0.0)
    )
    return cc, res


def fit_pulsed_decay(data: DecayDataset, rp: ResonatorParams, window=(0.0, 35e-9)):
    """Exponential fit A exp(-2 pi Gamma t) + background on a count trace.

    Gamma is returned in Hz (ordinary frequency) together with Gamma/gamma0.
    Background is held fixed at the dataset value; counts are weighted by
    sqrt(max(count, 1)). Returns (Gamma, ratio, FitResult).
    """
    if window[0] < 0 or window[1] > 35e-9 + 1e-15 or window[0] >= window[1]:
        raise ConfigError("fit window must lie within [0, 35 ns]")
    sel = (data.times >= window[0]) & (data.times <= window[1])
    t, c = data.times[sel], data.counts[sel]
    if t.size < 3:
        raise DataFormatError("fewer than 3 samples inside the fit window")
    bg = data.background
    if float(np.max(c)) <= bg + 3.0 * np.sqrt(max(bg, 1.0)):
        raise InsufficientSignalError("window counts do not rise above background")
    sig = np.sqrt(np.maximum(c, 1.0))
    a0 = max(float(c[0]) - bg, 1.0)
    # crude rate from the first 1/e crossing of the background-subtracted trace
    above = np.nonzero(c - bg < a0 / np.e)[0]
    t_e = t[above[0]] if above.size else t[-1]
    g0 = 1.0 / (2.0 * np.pi * max(t_e - t[0], t[1] - t[0]))

    def model(x, amplitude, rate):
        return amplitude * np.exp(-2.0 * np.pi * rate * x) + bg

    res = fit_nonlinear(
        model,
        t,
        c,
        sig,
        {"amplitude": a0, "rate": g0},
        bounds={"amplitude": (0.0, np.inf), "rate": (0.0, np.inf)},
    )
    gamma = res.parameters["rate"]
    return gamma, gamma / rp.gamma0, res
