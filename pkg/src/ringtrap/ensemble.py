"""Truncated thermal ensembles in the membrane trap.

The trapped gas is a Boltzmann distribution truncated at the escape energy,
evaluated for one Zeeman sublevel on a frozen quadrature grid over the
analysis box. The escape energy is the lower of the free-sublevel level far
from the surface and the lowest saddle out of the trap basin; the basin
itself is found by flood fill on the grid, which keeps the unbounded
surface-attraction region near the box corners out of every integral.

All ensemble statistics (sizes, survival, mean coupling, column maps) are
moments of the same grid density, so they are consistent with each other by
construction. The analysis box and quadrature order are part of the model
definition: changing them changes the far-column content of the gas.

Temperatures are in kelvin, energies in Hz, lengths in metres.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import ndimage
from scipy.special import erf

from .constants import CS_MASS, KB_OVER_H, LAMBDA_D2, MU_B_OVER_H
from .errors import ConfigError, DataFormatError, PhysicsError
from .numerics import FitResult, fit_nonlinear, gauss_legendre_panels
from .spinmotion import axis_levels
from .trapmodel import TrapConfig, full_spin_potential, trap_minimum

# Analysis box: one barrier period across the waveguide, the guide waist
# scale along it, surface-validity limit to the far side of the pocket.
ANALYSIS_BOX = ((-450e-9, 450e-9), (-8e-6, 8e-6), (50e-9, 2.5e-6))
GL_PANELS = (12, 10, 28)
GL_ORDER = 8

# Height at which the coupling reference is quoted: the probe-power trap
# centre, where the calibrated probe minimum sits.
COUPLING_REF_HEIGHT = 360e-9  # m

# Coupling at the reference height reproducing a single-atom cooperativity
# of 0.05 for the default probe trap at 23 uK (calibrate_coupling_ref).
DEFAULT_COUPLING_REF = 10046730.921548087  # Hz

DEFAULT_PEAK_DENSITY = 1e19  # 1/m^3

_BISECT_STEPS = 22
_DEPTH_TOL = 1e3  # Hz, slack when testing for cells deeper than the seed


def energy_bracket(kappa):
    """Fraction of a Maxwell velocity distribution below the energy gap.

    kappa is (escape energy - potential energy) / kT; non-positive gaps
    return zero. This is the cumulative chi-square(3) weight that makes the
    spatial density of a truncated Boltzmann gas.
    """
    kappa = np.asarray(kappa, dtype=float)
    k = np.clip(kappa, 0.0, None)
    out = erf(np.sqrt(k)) - (2.0 / math.sqrt(math.pi)) * np.sqrt(k) * np.exp(-k)
    return np.where(kappa > 0.0, out, 0.0)


class _Geometry:
    """Grid, potential, and basin structure for one (config, m_F) pair."""

    def __init__(self, config: TrapConfig, m_F: int):
        self.config = config
        self.m_F = m_F
        (xl, xh), (yl, yh), (zl, zh) = ANALYSIS_BOX
        self.xn, self.xw = gauss_legendre_panels(xl, xh, GL_PANELS[0], GL_ORDER)
        self.yn, self.yw = gauss_legendre_panels(yl, yh, GL_PANELS[1], GL_ORDER)
        self.zn, self.zw = gauss_legendre_panels(zl, zh, GL_PANELS[2], GL_ORDER)
        X, Y, Z = np.meshgrid(self.xn, self.yn, self.zn, indexing="ij")
        self.weights = (
            self.xw[:, None, None] * self.yw[None, :, None] * self.zw[None, None, :]
        )
        self.u = full_spin_potential(config, X, Y, Z, m_F)
        self.X, self.Y, self.Z = X, Y, Z

        z_c, _ = trap_minimum(config)
        self.seed = (
            int(np.argmin(np.abs(self.xn))),
            int(np.argmin(np.abs(self.yn))),
            int(np.argmin(np.abs(self.zn - z_c))),
        )
        near = (
            (np.abs(X) < 150e-9) & (np.abs(Y) < 300e-9) & (np.abs(Z - z_c) < 150e-9)
        )
        self.u_min = float(self.u[near].min())
        floor = config.g_F * MU_B_OVER_H * m_F * config.bias_field
        self.ceiling = floor - self.u_min
        if self.ceiling <= 0:
            raise PhysicsError("trap minimum sits above the free sublevel")
        self._basins: dict[float, np.ndarray] = {}
        self._cells: dict[float, tuple[np.ndarray, np.ndarray]] = {}
        self.escape_energy = self._find_escape()

    def _connected(self, eps: float) -> np.ndarray:
        lab, _ = ndimage.label((self.u - self.u_min) < eps)
        return lab == lab[self.seed]

    def _find_escape(self) -> float:
        # Largest truncation energy whose basin contains nothing deeper
        # than the trap minimum, i.e. stays off the surface side.
        def pure(eps):
            b = self._connected(eps)
            return not (self.u[b] < self.u_min - _DEPTH_TOL).any()

        if pure(self.ceiling):
            return self.ceiling
        lo, hi = 0.0, self.ceiling
        for _ in range(_BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            if pure(mid):
                lo = mid
            else:
                hi = mid
        return lo

    def basin(self, eps: float) -> np.ndarray:
        if eps >= self.escape_energy:
            eps = self.escape_energy
        key = round(float(eps), 3)
        if key not in self._basins:
            self._basins[key] = self._connected(eps)
        return self._basins[key]

    def number(self, eps: float, temperature: float) -> float:
        """Trapped number integral at truncation energy eps, up to n0."""
        eps = min(eps, self.escape_energy)
        if eps <= 0.0:
            return 0.0
        key = round(float(eps), 3)
        cells = self._cells.get(key)
        if cells is None:
            # gather the live cells once per truncation energy; repeated
            # temperature sweeps (thermometry fits) then stay cheap
            b = self.basin(eps)
            rel = (self.u - self.u_min)[b]
            keep = rel < eps
            cells = (rel[keep], self.weights[b][keep])
            self._cells[key] = cells
        rel_c, w_c = cells
        kt = temperature * KB_OVER_H
        n = np.exp(-rel_c / kt) * energy_bracket((eps - rel_c) / kt)
        return float(np.sum(n * w_c))


@lru_cache(maxsize=4)
def _geometry(config: TrapConfig, m_F: int) -> _Geometry:
    return _Geometry(config, m_F)


@dataclass(frozen=True)
class ThermalState:
    """Truncated Boltzmann gas of one sublevel at one temperature."""

    config: TrapConfig
    temperature: float  # K
    m_F: int = 3
    peak_density: float = DEFAULT_PEAK_DENSITY  # 1/m^3 prefactor n0

    def __post_init__(self):
        if self.temperature <= 0:
            raise ConfigError("temperature must be positive")
        if self.peak_density <= 0:
            raise ConfigError("peak_density must be positive")
        if abs(self.m_F) > self.config.hyperfine_F:
            raise ConfigError("|m_F| exceeds F")

    @property
    def geometry(self) -> _Geometry:
        return _geometry(self.config, self.m_F)

    @property
    def escape_energy(self) -> float:
        """Truncation energy above the trap minimum, in Hz."""
        return self.geometry.escape_energy

    @property
    def density(self) -> np.ndarray:
        """Density on the quadrature grid, in 1/m^3."""
        g = self.geometry
        kt = self.temperature * KB_OVER_H
        rel = g.u - g.u_min
        eps = g.escape_energy
        n = self.peak_density * np.exp(-rel / kt) * energy_bracket((eps - rel) / kt)
        n[rel >= eps] = 0.0
        n[~g.basin(eps)] = 0.0
        return n


def truncated_density(state: ThermalState, x, y, z) -> np.ndarray:
    """Gas density at arbitrary points, in 1/m^3.

    Points outside the trap basin return zero; basin membership is looked
    up at the nearest quadrature node, so results within a node spacing of
    the basin edge follow the grid's resolution.
    """
    g = state.geometry
    x, y, z = np.broadcast_arrays(
        np.asarray(x, float), np.asarray(y, float), np.asarray(z, float)
    )
    u = full_spin_potential(state.config, x, y, z, state.m_F)
    kt = state.temperature * KB_OVER_H
    rel = u - g.u_min
    eps = g.escape_energy
    n = state.peak_density * np.exp(-rel / kt) * energy_bracket((eps - rel) / kt)
    n = np.where(rel >= eps, 0.0, n)
    basin = g.basin(eps)
    ix = np.clip(np.searchsorted(g.xn, x), 1, g.xn.size - 1)
    ix = np.where(x - g.xn[ix - 1] < g.xn[ix] - x, ix - 1, ix)
    iy = np.clip(np.searchsorted(g.yn, y), 1, g.yn.size - 1)
    iy = np.where(y - g.yn[iy - 1] < g.yn[iy] - y, iy - 1, iy)
    iz = np.clip(np.searchsorted(g.zn, z), 1, g.zn.size - 1)
    iz = np.where(z - g.zn[iz - 1] < g.zn[iz] - z, iz - 1, iz)
    return np.where(basin[ix, iy, iz], n, 0.0)


def rms_sizes(state: ThermalState) -> np.ndarray:
    """Root-mean-square extents (sigma_x, sigma_y, sigma_z) in metres.

    x and y moments are taken about zero (the density is symmetric there);
    the z moment is taken about the density centroid.
    """
    g = state.geometry
    n = state.density * g.weights
    norm = float(np.sum(n))
    if norm <= 0.0:
        raise PhysicsError("empty ensemble: nothing below the escape energy")
    sx = math.sqrt(float(np.sum(n * g.X**2)) / norm)
    sy = math.sqrt(float(np.sum(n * g.Y**2)) / norm)
    zbar = float(np.sum(n * g.Z)) / norm
    sz = math.sqrt(float(np.sum(n * (g.Z - zbar) ** 2)) / norm)
    return np.array([sx, sy, sz])


def survival_probability(state: ThermalState, barrier_height) -> np.ndarray:
    """Fraction of the gas kept when the escape barrier is barrier_height.

    barrier_height (Hz above the trap minimum, scalar or array) caps the
    truncation energy; the returned fraction is the trapped-number ratio
    against the state's own escape energy. Zero barrier means zero; any
    barrier at or above the escape energy means one.
    """
    g = state.geometry
    denom = g.number(g.escape_energy, state.temperature)
    if denom <= 0.0:
        raise PhysicsError("empty ensemble: nothing below the escape energy")
    du = np.asarray(barrier_height, dtype=float)
    out = np.empty(du.shape if du.ndim else (1,))
    for i, d in enumerate(np.atleast_1d(du)):
        out[i] = g.number(float(d), state.temperature) / denom
    return out if du.ndim else float(out[0])


def fit_temperature(
    config: TrapConfig,
    barrier_heights,
    survivals,
    sigmas,
    m_F: int = 3,
) -> FitResult:
    """Fit amplitude * survival(barrier; T) to a spill curve.

    barrier_heights are in Hz above the trap minimum; the curve may be
    survival fractions (amplitude near 1) or any number-proportional signal
    such as collective cooperativity. Starting point: amplitude at the
    largest measured value, temperature at 25 uK. Curves that carry no
    temperature information (all points flat) leave the temperature
    unidentifiable and raise DegenerateFitError.
    """
    du = np.asarray(barrier_heights, dtype=float)
    y = np.asarray(survivals, dtype=float)
    if du.size != y.size or du.size == 0:
        raise DataFormatError("barrier_heights and survivals must match and be non-empty")

    def model(x, amplitude, temperature):
        state = ThermalState(config, temperature, m_F=m_F)
        return amplitude * survival_probability(state, x)

    return fit_nonlinear(
        model,
        du,
        y,
        sigmas,
        initial={"amplitude": max(float(y.max()), 0.1), "temperature": 25e-6},
        bounds={"temperature": (1e-6, 1e-3), "amplitude": (0.0, 1e3)},
        scales={"amplitude": 1.0, "temperature": 1e-5},
    )


def mean_vibrational_numbers(config: TrapConfig, temperature: float) -> np.ndarray:
    """Boltzmann-mean level index (nu_x, nu_y, nu_z) of the axis cuts."""
    if temperature <= 0:
        raise ConfigError("temperature must be positive")
    kt = temperature * KB_OVER_H
    out = []
    for axis in "xyz":
        es = axis_levels(config, axis)
        if es.n_states < 2:
            raise PhysicsError(f"{axis} cut supports fewer than two bound states")
        e = es.energies - es.energies[0]
        w = np.exp(-e / kt)
        out.append(float(np.sum(np.arange(e.size) * w) / np.sum(w)))
    return np.array(out)


@dataclass(frozen=True)
class CouplingSummary:
    mean_coupling: float  # Hz, sqrt of the density-weighted g^2
    cooperativity: float  # single-atom, 4 g^2 / (kappa gamma0)


def _coupling_profile(g: _Geometry) -> np.ndarray:
    # g^2 profile: evanescent decay at the D2 wavelength off the reference
    # height, times the positive transverse lobe of the mode.
    cfg = g.config
    n_eff = cfg.effective_index
    k_d2 = (2.0 * math.pi / LAMBDA_D2) * math.sqrt(n_eff**2 - 1.0)
    decay = np.exp(-k_d2 * (g.Z - COUPLING_REF_HEIGHT))
    lobe = np.clip(np.cos(cfg.transverse_wavenumber * g.X), 0.0, None)
    return decay * lobe


def mean_coupling(
    state: ThermalState,
    coupling_ref: float = DEFAULT_COUPLING_REF,
    kappa: float = 1.70e9,
    gamma0: float = 5.2e6,
) -> CouplingSummary:
    """Density-averaged atom-resonator coupling of the gas.

    coupling_ref is the single-atom coupling (Hz) at the reference height
    on the transverse peak. The mean is quadratic: g_bar^2 = <n g^2>/<n>.
    """
    g = state.geometry
    n = state.density * g.weights
    norm = float(np.sum(n))
    if norm <= 0.0:
        raise PhysicsError("empty ensemble: nothing below the escape energy")
    g2 = coupling_ref**2 * float(np.sum(n * _coupling_profile(g))) / norm
    return CouplingSummary(math.sqrt(g2), 4.0 * g2 / (kappa * gamma0))


def calibrate_coupling_ref(
    config: TrapConfig,
    target_cooperativity: float = 0.05,
    temperature: float = 23e-6,
    m_F: int = 3,
    kappa: float = 1.70e9,
    gamma0: float = 5.2e6,
) -> float:
    """Reference coupling (Hz) giving the target single-atom cooperativity.

    Evaluated for the gas in `config` as given; pass the probe-power config
    to reproduce the probing conditions the target refers to.
    """
    if target_cooperativity <= 0:
        raise ConfigError("target cooperativity must be positive")
    state = ThermalState(config, temperature, m_F=m_F)
    base = mean_coupling(state, coupling_ref=1.0, kappa=kappa, gamma0=gamma0)
    return math.sqrt(target_cooperativity / base.cooperativity)


def atom_number(collective_cooperativity: float, single_cooperativity: float) -> float:
    """Mean atom number from collective over single-atom cooperativity."""
    if collective_cooperativity < 0 or single_cooperativity <= 0:
        raise ConfigError("cooperativities must be positive")
    return collective_cooperativity / single_cooperativity


@dataclass(frozen=True)
class DensityMaps:
    """Column densities of the gas on the quadrature grid, in 1/m^2."""

    x: np.ndarray  # m, transverse nodes
    y: np.ndarray  # m, longitudinal nodes
    z: np.ndarray  # m, height nodes
    xz: np.ndarray  # (x, z) map, integrated along y
    yz: np.ndarray  # (y, z) map, integrated along x


def density_maps(state: ThermalState) -> DensityMaps:
    g = state.geometry
    n = state.density
    xz = np.einsum("xyz,y->xz", n, g.yw)
    yz = np.einsum("xyz,x->yz", n, g.xw)
    return DensityMaps(x=g.xn.copy(), y=g.yn.copy(), z=g.zn.copy(), xz=xz, yz=yz)
