"""Physical constants and unit helpers.

Energies are carried as ordinary frequencies (Hz, not rad/s) throughout the
package; angular factors of 2*pi enter only inside formulas that need them.
Magnetic fields are in tesla, lengths in metres, temperatures in kelvin.
"""

import math

H_PLANCK = 6.62607015e-34  # J s (exact)
HBAR = H_PLANCK / (2.0 * math.pi)  # J s

KB_OVER_H = 2.0836619e10  # Hz/K, Boltzmann constant over Planck constant
MU_B_OVER_H = 1.39962449e10  # Hz/T, Bohr magneton over Planck constant

CS_MASS = 2.20694650e-25  # kg, cesium-133

# Cs D2 line, used for the surface-potential length scale lambda/(2 pi)
LAMBDA_D2 = 852.352e-9  # m

# hbar / (4 pi m): converts 1/length^2 curvature terms to Hz (see trap level solvers)
KINETIC_COEFF = HBAR / (4.0 * math.pi * CS_MASS)  # m^2 Hz

# Cs ground state: g_F for F=3 is -1/4; streched-state |3,3> shifts carry m_F g_F
GF_F3 = -0.25
GF_F4 = 0.25


def uK_to_Hz(t_uK: float) -> float:
    """Temperature in microkelvin to frequency in Hz (E = kB T / h)."""
    return t_uK * 1e-6 * KB_OVER_H


def Hz_to_uK(f_Hz: float) -> float:
    """Frequency in Hz to temperature in microkelvin."""
    return f_Hz / KB_OVER_H * 1e6


def gauss_to_tesla(b_G: float) -> float:
    return b_G * 1e-4
