"""Physical constants and unit helpers.

Everything inside the library is SI, with frequencies as angular
frequencies (rad/s) unless a name says otherwise.
"""

import math

from scipy import constants as _c

HBAR = _c.hbar
MU_B = _c.physical_constants["Bohr magneton"][0]
EPS0 = _c.epsilon_0
MEV = 1e-3 * _c.electron_volt
LANDE_G = 2.0

TWO_PI = 2.0 * math.pi


def to_hz(omega):
    """Angular frequency -> ordinary frequency."""
    return omega / TWO_PI


def from_hz(f):
    return f * TWO_PI


def mev_to_omega(e_mev):
    """Energy in meV -> angular frequency (hbar = 1)."""
    return e_mev * MEV / HBAR


def tesla_to_mev(b, g=LANDE_G):
    """Zeeman energy g mu_B B of a single spin, in meV."""
    return g * MU_B * b / MEV
