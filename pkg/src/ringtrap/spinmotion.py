"""Motional levels and spin-motion coupling in the membrane trap.

One-dimensional cuts of the spin-independent potential through the trap
centre define per-axis level problems; the barrier's effective field then
couples Zeeman flips to motion along the axes it varies on. The vector
shift is a fraction of a percent of the trap depth, so the motional basis
is always taken from the scalar potential.

Cut grids, energy cutoffs and the wall treatment are frozen here as the
analysis protocol; changing them changes every downstream level and rate.
Rates and energies are ordinary frequencies in Hz.
"""

import math
from dataclasses import replace

import numpy as np

from .constants import CS_MASS, MU_B_OVER_H, uK_to_Hz
from .errors import ConfigError
from .numerics import EigenSystem, Grid1D, solve_bound_states
from .trapmodel import (
    TrapConfig,
    fictitious_field,
    total_potential,
    trap_minimum,
)

# Per-axis cut grids: (lo, hi, points). The z cut spans the surface-validity
# limit to the far side of the pocket; the x cut stays inside the barrier's
# transverse half-period; the y cut covers the guide waist.
AXIS_GRIDS = {
    "x": (-474e-9, 474e-9, 2401),
    "y": (-10e-6, 10e-6, 11001),
    "z": (50e-9, 2.5e-6, 4901),
}

# Solver cutoffs sit this far below the relevant wall or plateau.
EDGE_MARGIN = 5e3  # Hz

# The y cut is nearly harmonic over thousands of levels; states above this
# window (8 kT at 23 uK) carry Boltzmann weight below 1e-3 and are skipped.
Y_ENERGY_WINDOW = 8.0 * uK_to_Hz(23.0)  # Hz


def trap_axis_potential(config: TrapConfig, axis: str):
    """1D cut of the scalar potential through the trap centre.

    Returns a vectorized callable of the coordinate along `axis`; the other
    two coordinates are held at the centre (x = y = 0, z at the axial
    minimum). The z cut is the axial profile itself.
    """
    if axis == "z":
        return lambda z: total_potential(config, 0.0, 0.0, z)
    z_c, _ = trap_minimum(config)
    if axis == "x":
        return lambda x: total_potential(config, x, 0.0, z_c)
    if axis == "y":
        return lambda y: total_potential(config, 0.0, y, z_c)
    raise ConfigError(f"unknown axis {axis!r}")


def axis_levels(config: TrapConfig, axis: str) -> EigenSystem:
    """Bound levels of the 1D cut along `axis` under the frozen protocol.

    The z cutoff is the plateau beyond the pocket, the x cutoff the cut's
    edge value, and the y cutoff an energy window above the bottom; all
    cuts are solved with hard walls at the grid ends.
    """
    u = trap_axis_potential(config, axis)
    lo, hi, n = AXIS_GRIDS[axis]
    grid = Grid1D.from_range(lo, hi, n)
    if axis == "z":
        cutoff = float(u(np.array([hi]))[0]) - EDGE_MARGIN
        return solve_bound_states(u, grid, CS_MASS, cutoff, hard_walls=True)
    if axis == "x":
        cutoff = float(u(np.array([lo]))[0]) - EDGE_MARGIN
        return solve_bound_states(u, grid, CS_MASS, cutoff, hard_walls=True)
    edge = float(u(np.array([lo]))[0])
    bottom = float(u(np.array([0.0]))[0])
    cutoff = min(edge, bottom + Y_ENERGY_WINDOW) - EDGE_MARGIN
    # No Richardson step: the refined y grid would be 22001 points for a
    # cut whose low levels are already converged.
    return solve_bound_states(u, grid, CS_MASS, cutoff, hard_walls=True, extrapolate=False)


def level_spacings(config: TrapConfig, axis: str, n_levels: int = 40) -> np.ndarray:
    """Spacings E_{v+1} - E_v of the lowest `n_levels` levels, in Hz."""
    es = axis_levels(config, axis)
    top = min(n_levels, es.n_states)
    return np.diff(es.energies[:top])


def zeeman_splitting(config: TrapConfig) -> float:
    """Adjacent-sublevel splitting from the bias field alone, in Hz."""
    return abs(config.g_F) * MU_B_OVER_H * config.bias_field


def _spin_factor(F: int, m_F: int, delta_m: int) -> float:
    if delta_m not in (-1, 1):
        raise ConfigError("delta_m must be +1 or -1")
    if abs(m_F) > F or abs(m_F + delta_m) > F:
        raise ConfigError(f"transition m_F={m_F} -> {m_F + delta_m} leaves F={F}")
    return math.sqrt(F * (F + 1) - m_F * (m_F + delta_m))


def raman_matrix(
    config: TrapConfig,
    axis: str,
    n_states: int = 10,
    m_F: int = 3,
    delta_m: int = -1,
) -> np.ndarray:
    """Spin-flip sideband rates between motional states, in Hz.

    Element [i, j] is the signed rate for |m_F, j> -> |m_F + delta_m, i>,
    the ladder factor of the flip times the effective-field matrix element
    between the cut's motional states (grid quadrature). The field does not
    vary along y, so it drives no motion on that axis and the y matrix is
    identically zero.
    """
    factor = _spin_factor(config.hyperfine_F, m_F, delta_m)
    if axis == "y":
        return np.zeros((n_states, n_states))
    es = axis_levels(config, axis)
    if es.n_states < n_states:
        raise ConfigError(
            f"{axis} cut holds {es.n_states} bound states, {n_states} requested"
        )
    lo, hi, n = AXIS_GRIDS[axis]
    pts = Grid1D.from_range(lo, hi, n).points
    if axis == "z":
        field = fictitious_field(config, 0.0, 0.0, pts)
    else:
        z_c, _ = trap_minimum(config)
        field = fictitious_field(config, pts, 0.0, z_c)
    w = es.wavefunctions[:n_states]
    dx = pts[1] - pts[0]
    overlap = (w * field) @ w.T * dx
    return abs(config.g_F) * MU_B_OVER_H * factor * overlap


def calibrate_alpha_scale(
    config: TrapConfig, target: float = 1e4, m_F: int = 3, delta_m: int = -1
) -> TrapConfig:
    """Set alpha_scale so the adjacent axial sideband runs at `target` Hz.

    The sideband rate is linear in alpha_scale, so one evaluation fixes it:
    the rate is computed at the current scale and rescaled. The reference
    transition is the stretched-state flip on the z axis between the two
    lowest levels, at full barrier power.
    """
    if target <= 0:
        raise ConfigError("target rate must be positive")
    om = raman_matrix(config, "z", n_states=2, m_F=m_F, delta_m=delta_m)
    current = abs(om[1, 0])
    if current == 0.0:
        raise ConfigError("zero sideband rate: alpha_scale or xi vanished")
    return replace(config, alpha_scale=config.alpha_scale * target / current)
