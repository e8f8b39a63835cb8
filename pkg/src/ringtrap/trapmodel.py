"""Trapping potential above the microring membrane.

The model sums four ingredients, all expressed as energies in Hz:

* a red guide beam propagating along z (normal to the membrane, waist on
  its surface) whose intensity above the waveguide carries a near-field
  pocket: a transverse Gaussian column times a two-sided axial bump that
  vanishes exactly at the surface, so the bare Gaussian-beam values at the
  waist are unchanged;
* a blue evanescent barrier decaying exponentially with height, periodic
  across the waveguide and, optionally, weakly corrugated along it;
* an attractive surface potential with an effective short-range power law
  and a retardation length, valid for heights of 50 nm and above;
* a spin-dependent shift from the static bias field combined with the
  barrier's effective magnetic field, which points along -x and shares the
  barrier's decay constant and transverse period.

`calibrate` fixes (guide_depth, barrier_peak, evanescent_decay) against
three anchor conditions: the full-power trap minimum sits at 440 nm, the
minimum at 10 % barrier power sits at 360 nm, and the 10 %-power trap is
250 uK deep. The shipped defaults are the calibrated values for the default
pocket structure.

Lengths are in metres, magnetic fields in tesla.
"""

import math
from dataclasses import dataclass, fields, replace

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .constants import KB_OVER_H, LAMBDA_D2, MU_B_OVER_H, GF_F3
from .errors import CalibrationError, ConfigError, DomainError

# Surface-potential coefficients below are effective values; closer to the
# surface than this the power-law form stops being meaningful.
MIN_HEIGHT = 50e-9  # m

# Vector-shift coefficient for the default resonator (kappa = 1.70 GHz,
# backscattering 0.60 GHz) and the default TE field ratio.
DEFAULT_XI = 0.3291427233681898

# Calibrated against the three anchors for the default pocket structure.
DEFAULT_GUIDE_DEPTH = 2231002.6865311526  # Hz
DEFAULT_BARRIER_PEAK = 147594571.3313892  # Hz
DEFAULT_EVANESCENT_DECAY = 17054875.90095627  # 1/m

# Effective-field scale making the adjacent axial sideband rate 10 kHz at
# full power (see spinmotion.calibrate_alpha_scale).
DEFAULT_ALPHA_SCALE = 0.014096584257244747  # T

# The barrier's effective field points along -x everywhere; only the
# magnitude varies. full_spin_potential relies on it being orthogonal to
# the bias field.
FICTITIOUS_FIELD_DIRECTION = (-1.0, 0.0, 0.0)


def xi_coefficient(kappa: float, beta: float, field_ratio: float) -> float:
    """Vector-shift coefficient of the barrier light.

    Interference of the two circulating directions (set by kappa and the
    backscattering rate beta) and the transverse/longitudinal field ratio
    both dilute the effective field; the two factors multiply.
    """
    if kappa <= 0:
        raise ConfigError("kappa must be positive")
    if beta < 0:
        raise ConfigError("beta must be non-negative")
    circ = (kappa**2 - 4.0 * beta**2) / (kappa**2 + 4.0 * beta**2)
    pol = 2.0 * field_ratio / (1.0 + field_ratio**2)
    return circ * pol


def barrier_visibility(kappa: float, beta: float, field_ratio: float) -> float:
    """Standing-wave modulation depth of the barrier along the guide.

    Built from the same ingredients as xi_coefficient but with the
    quadrature mixing term 4 kappa beta / (kappa^2 + 4 beta^2) and the
    polarization weight (1 - fr^2) / (1 + fr^2).
    """
    if kappa <= 0:
        raise ConfigError("kappa must be positive")
    if beta < 0:
        raise ConfigError("beta must be non-negative")
    mix = 4.0 * kappa * beta / (kappa**2 + 4.0 * beta**2)
    pol = (1.0 - field_ratio**2) / (1.0 + field_ratio**2)
    return mix * pol


@dataclass(frozen=True)
class TrapConfig:
    """Geometry and scales of the membrane trap. Energies in Hz."""

    guide_wavelength: float = 935e-9  # m
    guide_waist: float = 10e-6  # m, 1/e^2 intensity radius at the focus
    guide_depth: float = DEFAULT_GUIDE_DEPTH  # Hz, light shift at the bare focus
    barrier_peak: float = DEFAULT_BARRIER_PEAK  # Hz, barrier extrapolated to z = 0
    evanescent_decay: float = DEFAULT_EVANESCENT_DECAY  # 1/m
    barrier_wavelength: float = 849.552e-9  # m, vacuum wavelength of barrier light
    transverse_wavenumber: float = math.pi / 950e-9  # 1/m, across the waveguide
    corrugation_visibility: float = 0.0  # barrier modulation along y, in [0, 1]
    cp_C4eff: float = -165.36e-24  # Hz m^4, effective surface coefficient
    cp_z0eff: float = 3.7e-9  # m, effective surface offset
    cp_lambda_bar: float = LAMBDA_D2 / (2.0 * math.pi)  # m, retardation length
    field_ratio: float = 0.83  # transverse to longitudinal field amplitude
    xi: float = DEFAULT_XI  # vector-shift coefficient
    alpha_scale: float = DEFAULT_ALPHA_SCALE  # T, effective field scale at z = 0
    bias_field: float = 1.5e-5  # T, static bias (orthogonal to the -x field)
    hyperfine_F: int = 3
    g_F: float = GF_F3
    # Near-field pocket: amplitude, axial centre, inner/outer axial widths,
    # transverse width, and the persistent outer floor fraction.
    nf_amp: float = 1.35
    nf_center: float = 320e-9  # m
    nf_width_inner: float = 150e-9  # m
    nf_width_outer: float = 480e-9  # m
    nf_width_x: float = 130e-9  # m
    nf_floor: float = 0.20
    nf_floor_range: float = 10e-6  # m, axial extent of the persistent column

    def __post_init__(self):
        if self.guide_wavelength <= 0 or self.guide_waist <= 0:
            raise ConfigError("guide wavelength and waist must be positive")
        if self.guide_depth <= 0:
            raise ConfigError("guide_depth must be positive")
        if self.barrier_peak <= 0:
            raise ConfigError("barrier_peak must be positive")
        if self.evanescent_decay <= 0:
            raise ConfigError("evanescent_decay must be positive")
        if self.barrier_wavelength <= 0:
            raise ConfigError("barrier_wavelength must be positive")
        if self.transverse_wavenumber <= 0:
            raise ConfigError("transverse_wavenumber must be positive")
        if not 0.0 <= self.corrugation_visibility <= 1.0:
            raise ConfigError("corrugation_visibility must lie in [0, 1]")
        if self.cp_C4eff >= 0:
            raise ConfigError("cp_C4eff must be negative (attractive surface)")
        if self.cp_z0eff < 0 or self.cp_lambda_bar <= 0:
            raise ConfigError("surface offset and retardation length must be positive")
        if self.alpha_scale < 0 or self.bias_field < 0:
            raise ConfigError("field scales must be non-negative")
        if self.hyperfine_F < 1:
            raise ConfigError("hyperfine_F must be a positive integer")
        if self.nf_amp < 0:
            raise ConfigError("nf_amp must be non-negative")
        if min(self.nf_width_inner, self.nf_width_outer, self.nf_width_x) <= 0:
            raise ConfigError("pocket widths must be positive")
        if self.nf_center <= 0:
            raise ConfigError("nf_center must be positive")
        if not 0.0 <= self.nf_floor < 1.0:
            raise ConfigError("nf_floor must lie in [0, 1)")
        if self.nf_floor_range <= 0:
            raise ConfigError("nf_floor_range must be positive")

    @property
    def rayleigh_range(self) -> float:
        return math.pi * self.guide_waist**2 / self.guide_wavelength

    @property
    def effective_index(self) -> float:
        """Mode index consistent with the calibrated barrier decay constant."""
        kl = self.evanescent_decay * self.barrier_wavelength / (2.0 * math.pi)
        return math.sqrt(1.0 + kl * kl)

    @property
    def guided_wavenumber(self) -> float:
        """Propagation constant of the barrier light along the waveguide."""
        return 2.0 * math.pi * self.effective_index / self.barrier_wavelength

    @property
    def transverse_halfwidth(self) -> float:
        """Largest |x| at which the barrier form is meaningful."""
        return 0.5 * math.pi / self.transverse_wavenumber

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "TrapConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown trap config keys: {', '.join(unknown)}")
        return cls(**data)


def with_barrier_power(config: TrapConfig, fraction: float) -> TrapConfig:
    """Config with the barrier light scaled to `fraction` of full power.

    Both the barrier potential and its effective field are linear in the
    optical power, so they scale together.
    """
    if fraction <= 0:
        raise ConfigError("power fraction must be positive")
    return replace(
        config,
        barrier_peak=config.barrier_peak * fraction,
        alpha_scale=config.alpha_scale * fraction,
    )


def probe_config(config: TrapConfig) -> TrapConfig:
    """The 10 % barrier power configuration used for probing."""
    return with_barrier_power(config, 0.1)


def _pocket(config: TrapConfig, x, z):
    """Near-field intensity modulation factor, 1 + A gx(x) gz(z).

    The axial bump has a Gaussian inner flank and an outer flank relaxing
    to a floor fraction that itself dies off over nf_floor_range, and is
    shifted and clipped so it vanishes exactly at z = 0; the normalization
    keeps its peak at 1.
    """
    zp = config.nf_center
    si, so, f = config.nf_width_inner, config.nf_width_outer, config.nf_floor
    inner = np.exp(-((z - zp) ** 2) / (2.0 * si**2))
    floor = f * np.exp(-((z - zp) ** 2) / (2.0 * config.nf_floor_range**2))
    outer = floor + (1.0 - f) * np.exp(-((z - zp) ** 2) / (2.0 * so**2))
    raw = np.where(z < zp, inner, outer)
    g0 = math.exp(-(zp**2) / (2.0 * si**2))
    gz = np.clip(raw - g0, 0.0, None) / (1.0 - g0)
    gx = np.exp(-(x**2) / (2.0 * config.nf_width_x**2))
    return 1.0 + config.nf_amp * gx * gz


def guide_potential(config: TrapConfig, x, y, z):
    """Red guide beam light shift at (x, y, z), in Hz (negative).

    Gaussian beam with focus at the surface and axis along z, multiplied by
    the near-field pocket factor. The pocket vanishes at z = 0, so the
    focal-plane values are those of the bare beam.
    """
    x, y, z = np.asarray(x, float), np.asarray(y, float), np.asarray(z, float)
    zr = config.rayleigh_range
    w2 = config.guide_waist**2 * (1.0 + (z / zr) ** 2)
    envelope = (config.guide_waist**2 / w2) * np.exp(-2.0 * (x**2 + y**2) / w2)
    return -config.guide_depth * envelope * _pocket(config, x, z)


def _check_transverse(config: TrapConfig, x):
    if np.any(np.abs(x) >= config.transverse_halfwidth):
        raise DomainError(
            "barrier form valid only for |x| < pi / (2 q) ="
            f" {config.transverse_halfwidth * 1e9:.1f} nm"
        )


def barrier_potential(config: TrapConfig, x, y, z):
    """Blue evanescent barrier at (x, y, z), in Hz (positive on axis)."""
    x, y, z = np.asarray(x, float), np.asarray(y, float), np.asarray(z, float)
    _check_transverse(config, x)
    decay = np.exp(-config.evanescent_decay * z)
    across = np.cos(config.transverse_wavenumber * x)
    along = 1.0 + config.corrugation_visibility * np.sin(2.0 * config.guided_wavenumber * y)
    return config.barrier_peak * decay * across * along


def casimir_polder(config: TrapConfig, z):
    """Attractive surface potential in Hz; valid for z >= 50 nm."""
    z = np.asarray(z, float)
    if np.any(z < MIN_HEIGHT * (1.0 - 1e-12)):
        raise DomainError("surface potential valid only for z >= 50 nm")
    zt = z - config.cp_z0eff
    return config.cp_C4eff / (zt**3 * (zt + config.cp_lambda_bar))


def total_potential(config: TrapConfig, x, y, z):
    """Spin-independent trap potential in Hz."""
    return (
        guide_potential(config, x, y, z)
        + barrier_potential(config, x, y, z)
        + casimir_polder(config, z)
    )


def fictitious_field(config: TrapConfig, x, y, z):
    """Signed amplitude (T) of the barrier's effective field along -x.

    Shares the barrier's decay constant and transverse period, is constant
    along y, and carries no domain restrictions: the form is smooth
    everywhere and callers may evaluate it wherever they need it.
    """
    x, z = np.asarray(x, float), np.asarray(z, float)
    out = config.xi * config.alpha_scale * np.exp(-config.evanescent_decay * z)
    out = out * np.cos(config.transverse_wavenumber * x)
    return np.broadcast_to(out, np.broadcast_shapes(out.shape, np.shape(y))).copy()


def full_spin_potential(config: TrapConfig, x, y, z, m_F: int):
    """Trap potential for Zeeman sublevel m_F, in Hz.

    The effective field is orthogonal to the bias field, so the sublevel
    follows the quadrature sum of the two magnitudes.
    """
    if abs(m_F) > config.hyperfine_F:
        raise ConfigError(f"|m_F| must not exceed F = {config.hyperfine_F}")
    b = np.hypot(config.bias_field, fictitious_field(config, x, y, z))
    return total_potential(config, x, y, z) + config.g_F * MU_B_OVER_H * m_F * b


def trap_minimum(config: TrapConfig, z_lo: float = 150e-9, z_hi: float = 1200e-9):
    """Height and value of the on-axis potential minimum.

    Returns (z_min, U_min) for the spin-independent potential along the
    z axis through x = y = 0. Raises CalibrationError when the cut has no
    interior minimum (spilled trap).
    """
    zs = np.linspace(max(z_lo, MIN_HEIGHT), z_hi, 2000)
    u = total_potential(config, 0.0, 0.0, zs)
    i = int(np.argmin(u))
    if i == 0 or i == zs.size - 1:
        raise CalibrationError("no interior minimum on the axial cut")
    res = minimize_scalar(
        lambda z: float(total_potential(config, 0.0, 0.0, z)),
        bounds=(zs[i - 1], zs[i + 1]),
        method="bounded",
        options={"xatol": 1e-15},
    )
    return float(res.x), float(res.fun)


def axial_extrema(config: TrapConfig, m_F: int | None = None,
                  z_lo: float = MIN_HEIGHT, z_hi: float = 2.5e-6, n: int = 4901):
    """Interior minima and maxima of the on-axis cut, as two height arrays.

    Sign changes of the finite-difference slope classify the extrema; a
    single minimum and a single maximum (the surface wall crest) mean a
    healthy trap, more of either means the pocket structure split the cut.
    """
    zs = np.linspace(z_lo, z_hi, n)
    if m_F is None:
        u = total_potential(config, 0.0, 0.0, zs)
    else:
        u = full_spin_potential(config, 0.0, 0.0, zs, m_F)
    du = np.diff(u)
    sign = np.sign(du)
    flips = np.nonzero(sign[1:] * sign[:-1] < 0)[0] + 1
    minima = zs[flips[du[flips] > 0]]
    maxima = zs[flips[du[flips] < 0]]
    return minima, maxima


def surface_wall(config: TrapConfig, m_F: int | None = None):
    """Crest of the on-axis barrier between the surface and the trap.

    Returns (z_crest, U_crest). The crest is the highest point of the cut
    from 50 nm up to the trap minimum; for a spilled trap (monotone cut)
    CalibrationError propagates from trap_minimum.
    """
    z_min, _ = trap_minimum(config)
    zs = np.linspace(MIN_HEIGHT, z_min, 1500)
    if m_F is None:
        u = total_potential(config, 0.0, 0.0, zs)
    else:
        u = full_spin_potential(config, 0.0, 0.0, zs, m_F)
    i = int(np.argmax(u))
    return float(zs[i]), float(u[i])


def calibrate(
    template: TrapConfig | None = None,
    z_full: float = 440e-9,
    z_probe: float = 360e-9,
    probe_fraction: float = 0.1,
    probe_depth: float = 250e-6,
) -> TrapConfig:
    """Fix (guide_depth, barrier_peak, evanescent_decay) from three anchors.

    Anchors: the full-power axial minimum sits at z_full, the reduced-power
    minimum sits at z_probe, and the reduced-power trap depth equals
    probe_depth (in kelvin). For each trial decay constant the two slope
    conditions are linear in (guide_depth, barrier_peak); the depth
    condition then closes on the decay constant, which is bracketed by a
    scan and polished by brentq. Raises CalibrationError when no admissible
    root exists.

    Parameters other than the three calibrated ones are taken from
    `template` (default: TrapConfig()).
    """
    base = template if template is not None else TrapConfig()
    depth_hz = probe_depth * KB_OVER_H
    if not MIN_HEIGHT < z_probe < z_full:
        raise CalibrationError("anchors must satisfy 50 nm < z_probe < z_full")
    if not 0 < probe_fraction < 1:
        raise CalibrationError("probe_fraction must lie in (0, 1)")

    zr = base.rayleigh_range

    def guide_shape(z):
        # on-axis guide factor, guide_potential / (-guide_depth)
        env = 1.0 / (1.0 + (z / zr) ** 2)
        return env * _pocket(base, 0.0, z)

    def cp(z):
        zt = z - base.cp_z0eff
        return base.cp_C4eff / (zt**3 * (zt + base.cp_lambda_bar))

    # Central differences: the pocket's clip makes analytic slopes piecewise
    # for no accuracy gain at this h.
    h = 1e-12

    def solve_gb(k):
        rows, rhs = [], []
        for z, s in ((z_full, 1.0), (z_probe, probe_fraction)):
            dg = -(guide_shape(z + h) - guide_shape(z - h)) / (2.0 * h)
            db = -s * k * math.exp(-k * z)
            dcp = (cp(z + h) - cp(z - h)) / (2.0 * h)
            rows.append([dg, db])
            rhs.append(-dcp)
        g, b = np.linalg.solve(np.array(rows), np.array(rhs))
        return float(g), float(b)

    def depth_residual(k):
        g, b = solve_gb(k)
        u = -g * guide_shape(z_probe) + probe_fraction * b * math.exp(-k * z_probe)
        return u + cp(z_probe) + depth_hz

    ks = np.linspace(0.8e7, 3.5e7, 120)
    vals = np.full(ks.size, np.nan)
    for i, k in enumerate(ks):
        try:
            g, b = solve_gb(k)
        except np.linalg.LinAlgError:
            continue
        if g > 0 and b > 0:
            vals[i] = depth_residual(k)
    for i in range(ks.size - 1):
        if np.isfinite(vals[i]) and np.isfinite(vals[i + 1]) and vals[i] * vals[i + 1] < 0:
            k = brentq(depth_residual, ks[i], ks[i + 1], xtol=1e-3)
            g, b = solve_gb(k)
            return replace(base, guide_depth=g, barrier_peak=b, evanescent_decay=k)
    raise CalibrationError("no decay constant satisfies all three anchors")
