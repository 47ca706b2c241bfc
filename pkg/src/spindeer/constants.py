"""Physical constants and unit conventions.

Internal convention: every frequency is angular (rad/us), every time is in
microseconds and every distance in nanometres.  User-facing I/O uses
ordinary frequencies in MHz; the conversion is exactly a factor of 2*pi
(1 MHz of ordinary frequency == 2*pi rad/us of angular frequency).
"""

import math

from scipy import constants as _codata

TWO_PI = 2.0 * math.pi

#: Electron gyromagnetic ratio, rad s^-1 T^-1 (CODATA).
GAMMA_E = _codata.value("electron gyromag. ratio")

#: Dipole-dipole prefactor mu0 * gamma_e^2 * hbar / (4 pi), in rad/us * nm^3.
#: Divided by a distance cubed (nm^3) it yields an angular frequency in
#: rad/us; its ordinary-frequency value is about 52.04 MHz nm^3.
K_DD = (_codata.mu_0 / (4.0 * math.pi)) * GAMMA_E**2 * _codata.hbar * 1e27 * 1e-6

#: Angle (degrees) at which the secular dipolar coupling 1 - 3 cos^2(theta)
#: vanishes: arccos(1/sqrt(3)) ~ 54.7356 deg.
MAGIC_ANGLE_DEG = math.degrees(math.acos(1.0 / math.sqrt(3.0)))

BOLTZMANN = _codata.k  # J / K
HBAR = _codata.hbar  # J s


def mhz(value: float) -> float:
    """Ordinary frequency in MHz -> angular frequency in rad/us."""
    return TWO_PI * value


def to_mhz(omega: float) -> float:
    """Angular frequency in rad/us -> ordinary frequency in MHz."""
    return omega / TWO_PI
