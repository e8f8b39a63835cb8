"""Ring-resonator evanescent trap modelling toolkit.

Submodules:
    numerics    grids, bound-state solver, nonlinear fits, quadrature, ODEs
    trapmodel   trap geometry and potential surfaces for each spin state
    spinmotion  1D level structure, Zeeman shifts, sideband couplings
    cavity      resonator transmission/reflection and spectrum fits
    ensemble    thermal averages: densities, spill curves, coupling statistics
    kinetics    atom-number decay models and lifetime fits
    synthetic   deterministic synthetic dataset generators
    figures     matplotlib report figures
    cli         command-line entry point

The names most scripts need are re-exported here; everything else stays in
its submodule.
"""

from .cavity import (
    CollectiveCoupling,
    ResonatorParams,
    averaged_spectrum,
    decay_rate_model,
    eta_reduction,
    fit_cooperativity,
    reflection,
    transmission,
    transmission_to_CN,
)
from .ensemble import (
    ThermalState,
    atom_number,
    density_maps,
    fit_temperature,
    mean_coupling,
    mean_vibrational_numbers,
    rms_sizes,
    survival_probability,
    truncated_density,
)
from .kinetics import LossModel, continuous_cooling_lifetime, evolve_atom_number, fit_lifetime
from .numerics import FitResult, Grid1D, fit_nonlinear, solve_bound_states
from .spinmotion import (
    axis_levels,
    level_spacings,
    raman_matrix,
    zeeman_splitting,
)
from .trapmodel import (
    TrapConfig,
    barrier_visibility,
    calibrate,
    fictitious_field,
    full_spin_potential,
    probe_config,
    total_potential,
    trap_minimum,
    with_barrier_power,
    xi_coefficient,
)

__version__ = "0.1.0"

__all__ = [
    "CollectiveCoupling",
    "FitResult",
    "Grid1D",
    "LossModel",
    "ResonatorParams",
    "ThermalState",
    "TrapConfig",
    "atom_number",
    "averaged_spectrum",
    "axis_levels",
    "barrier_visibility",
    "calibrate",
    "continuous_cooling_lifetime",
    "decay_rate_model",
    "density_maps",
    "eta_reduction",
    "evolve_atom_number",
    "fictitious_field",
    "fit_cooperativity",
    "fit_lifetime",
    "fit_nonlinear",
    "fit_temperature",
    "full_spin_potential",
    "level_spacings",
    "mean_coupling",
    "mean_vibrational_numbers",
    "probe_config",
    "raman_matrix",
    "reflection",
    "rms_sizes",
    "solve_bound_states",
    "survival_probability",
    "total_potential",
    "transmission",
    "transmission_to_CN",
    "trap_minimum",
    "truncated_density",
    "with_barrier_power",
    "xi_coefficient",
    "zeeman_splitting",
]
