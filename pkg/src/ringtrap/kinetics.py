"""Trap-loss kinetics.

Atom-number rate equations with one-body, two-body, and three-body terms,
and lifetime fits on number-like time series (atom number, collective
cooperativity, or transmission converted through the resonator model).

Density closure: n(t) = n0 * N(t)/N0 at fixed trap volume, so only the
products L2*n0 and L3*n0^2 enter the dynamics. The quoted coefficients are
effective values; no density-shape correction factor is applied.
"""

from dataclasses import dataclass

import numpy as np

from ._tables import read_columns
from .cavity import ResonatorParams, transmission_to_CN
from .errors import ConfigError, DataFormatError
from .numerics import FitResult, fit_nonlinear, integrate_ode

MODEL_FAMILIES = ("one", "one+two", "one+three")


@dataclass(frozen=True)
class LossModel:
    tau: float  # s, one-body lifetime
    n0: float  # atoms/m^3, initial peak density
    N0: float = 1.0  # initial value in the units of the fitted series
    L2: float = 0.0  # m^3/s
    L3: float = 0.0  # m^6/s

    def __post_init__(self):
        if self.tau <= 0:
            raise ConfigError("tau must be positive")
        if self.n0 <= 0:
            raise ConfigError("n0 must be positive")
        if self.L2 < 0 or self.L3 < 0:
            raise ConfigError("loss coefficients must be non-negative")

    @property
    def gamma2(self) -> float:
        return self.L2 * self.n0  # 1/s at t=0

    @property
    def gamma3(self) -> float:
        return self.L3 * self.n0**2  # 1/s at t=0


def _relative_number(t, tau, gamma2=0.0, gamma3=0.0):
    """u(t) = N/N0 for du/dt = -u/tau - gamma2 u^2 - gamma3 u^3, u(0)=1.

    The pure two-body and pure three-body cases are Bernoulli equations with
    closed forms; the mixed case falls back to the ODE integrator.
    """
    t = np.asarray(t, dtype=float)
    e = np.exp(-t / tau)
    if gamma2 == 0.0 and gamma3 == 0.0:
        return e
    if gamma3 == 0.0:
        return e / (1.0 + gamma2 * tau * (1.0 - e))
    if gamma2 == 0.0:
        return e / np.sqrt(1.0 + gamma3 * tau * (1.0 - e * e))
    _, y = integrate_ode(
        lambda s, u: -u / tau - gamma2 * u**2 - gamma3 * u**3,
        [1.0],
        (0.0, float(t[-1])),
        tol=1e-10,
        t_eval=t,
    )
    return y[:, 0]


def evolve_atom_number(lm: LossModel, t_grid) -> np.ndarray:
    """N(t) on t_grid by direct integration of the rate equation."""
    t = np.asarray(t_grid, dtype=float)
    if t[0] < 0 or np.any(np.diff(t) <= 0):
        raise ConfigError("t_grid must increase from 0")
    g2, g3 = lm.gamma2, lm.gamma3

    def rhs(s, N):
        u = N / lm.N0
        return -N / lm.tau - g2 * u * N - g3 * u * u * N

    span = (0.0, float(t[-1])) if t[-1] > 0 else (0.0, 1e-12)
    _, y = integrate_ode(rhs, [lm.N0], span, tol=1e-10, t_eval=t)
    return y[:, 0]


def _converted_series(times, values, sigmas, signal, rp):
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    s = np.asarray(sigmas, dtype=float)
    if not (t.size == v.size == s.size):
        raise DataFormatError("time series columns have unequal lengths")
    if t.size < 5:
        raise DataFormatError("need at least 5 time points")
    if np.any(np.diff(t) <= 0):
        raise DataFormatError("times must be strictly increasing")
    if signal in ("number", "cooperativity"):
        return t, v, s
    if signal != "transmission":
        raise ConfigError(f"unknown signal kind '{signal}'")
    if rp is None:
        raise ConfigError("transmission input needs resonator parameters")
    a = 2.0 * rp.kappa_e * rp.eta / rp.kappa
    floor = (1.0 - a) ** 2
    # noise below the bare floor maps to CN=0; cap short of full transparency
    T = np.clip(v, floor, 0.999)
    cn = np.array([transmission_to_CN(float(x), rp) for x in T])
    # sigma propagated through dC/dT of the resonant inversion
    dcdt = a / (2.0 * np.sqrt(T) * (1.0 - np.sqrt(T)) ** 2) / rp.eta
    return t, cn, s * dcdt


def fit_lifetime(
    times,
    values,
    sigmas,
    model_family: str,
    rp: ResonatorParams | None = None,
    fixed: dict | None = None,
    signal: str = "cooperativity",
):
    """Fit a loss model to a number-proportional time series.

    model_family selects the rate terms: "one", "one+two", or "one+three".
    `fixed` may pin tau and n0; with a collisional family and no fixed n0
    the density is fitted too, which is degenerate with the loss coefficient
    (they enter as a product) and will fail accordingly.

    Returns (LossModel, FitResult). The fitted amplitude is reported as N0.
    """
    if model_family not in MODEL_FAMILIES:
        raise ConfigError(f"model_family must be one of {MODEL_FAMILIES}")
    fixed = fixed or {}
    t, y, s = _converted_series(times, values, sigmas, signal, rp)
    peak = float(np.max(y))
    if peak <= 0:
        raise DataFormatError("series carries no positive signal")

    # crude initial rate from the endpoints; noisy tails may go non-positive
    y_start = max(float(y[0]), 0.1 * peak)
    y_end = max(float(y[-1]), 0.01 * peak)
    r0 = max(np.log(y_start / y_end) / (t[-1] - t[0]), 1e-3 / t[-1])
    amp0 = y_start
    tau_fixed = "tau" in fixed
    n0_fixed = "n0" in fixed
    n0 = float(fixed.get("n0", 0.0))
    if model_family == "one":
        n0_eff = n0 if n0_fixed else 1.0  # unused by the dynamics
    elif not n0_fixed:
        n0_eff = None  # density becomes a fit parameter
    else:
        n0_eff = n0
        if n0_eff <= 0:
            raise ConfigError("fixed n0 must be positive")

    initial = {"amplitude": amp0}
    bounds = {"amplitude": (0.0, np.inf)}
    if not tau_fixed:
        initial["tau"] = 1.0 / r0 if model_family == "one" else 2.0 / r0
        bounds["tau"] = (1e-6 * (t[-1] - t[0]), np.inf)
    if model_family != "one":
        key = "L2" if model_family == "one+two" else "L3"
        power = 1 if model_family == "one+two" else 2
        gamma0_guess = max(0.5 * r0, 1e-3 * r0)
        if n0_eff is not None:
            initial[key] = gamma0_guess / n0_eff**power
            bounds[key] = (0.0, np.inf)
        else:
            initial[key] = gamma0_guess
            bounds[key] = (0.0, np.inf)
            initial["n0"] = 1.0
            bounds["n0"] = (0.0, np.inf)

    def model(x, **p):
        tau = fixed["tau"] if tau_fixed else p["tau"]
        g2 = g3 = 0.0
        if model_family == "one+two":
            dens = p.get("n0", n0_eff)
            g2 = p["L2"] * dens
        elif model_family == "one+three":
            dens = p.get("n0", n0_eff)
            g3 = p["L3"] * dens**2
        return p["amplitude"] * _relative_number(x, tau, g2, g3)

    res = fit_nonlinear(model, t, y, s, initial, bounds=bounds)
    p = res.parameters
    lm = LossModel(
        tau=fixed.get("tau", p.get("tau", np.inf)),
        n0=p.get("n0", n0_eff if n0_eff else 1.0),
        N0=p["amplitude"],
        L2=p.get("L2", 0.0),
        L3=p.get("L3", 0.0),
    )
    return lm, res


def continuous_cooling_lifetime(times, values, sigmas=None):
    """Single-exponential 1/e lifetime of a decay trace.

    Returns (tau_s, FitResult). Constant data yields (inf, None); a
    two-point exact trace is solved algebraically and also returns None
    for the fit report.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.size != y.size or t.size < 2:
        raise DataFormatError("need at least 2 time points")
    if np.any(np.diff(t) <= 0):
        raise DataFormatError("times must be strictly increasing")
    if np.ptp(y) <= 1e-12 * max(abs(float(np.mean(y))), 1e-300):
        return np.inf, None
    if t.size == 2:
        if y[0] <= 0 or y[1] <= 0 or y[1] >= y[0]:
            raise DataFormatError("two-point trace must decay through positive values")
        return float((t[1] - t[0]) / np.log(y[0] / y[1])), None
    s = np.ones_like(y) if sigmas is None else np.asarray(sigmas, dtype=float)
    r0 = max(np.log(max(y[0], 1e-300) / max(y[-1], 1e-300)) / (t[-1] - t[0]), 1e-3 / t[-1])
    res = fit_nonlinear(
        lambda x, amplitude, rate: amplitude * np.exp(-rate * x),
        t,
        y,
        s,
        {"amplitude": float(y[0]), "rate": r0},
        bounds={"amplitude": (0.0, np.inf), "rate": (0.0, np.inf)},
    )
    rate = res.parameters["rate"]
    return (np.inf if rate == 0.0 else 1.0 / rate), res


def load_time_series(path):
    """CSV columns (t_s, value, sigma) -> three arrays."""
    rows = read_columns(path, ("t_s", "value", "sigma"))
    return rows[:, 0], rows[:, 1], rows[:, 2]
