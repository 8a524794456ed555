"""Coupling budget of the cantilever / tip / electrode stack.

SI inputs throughout; every returned frequency is angular (rad/s) unless the
name ends in ``_hz``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

from skyrmech.errors import InvalidRegimeInput, SqueezeDiverges
from skyrmech.units import EPS0, HBAR, LANDE_G, MU_B

# first clamped-free flexural eigenvalue squared, (1.8751)^2
FLEXURAL_CONSTANT = 3.516


@dataclass(frozen=True)
class CantileverGeometry:
    length_l: float
    width_w: float
    thickness_t: float
    density: float
    youngs: float

    def __post_init__(self):
        for name, v in vars(self).items():
            if not v > 0:
                raise ValueError(f"{name} must be positive, got {v!r}")
        if self.length_l / self.thickness_t < 10:
            warnings.warn("cantilever is not slender (l/t < 10); beam formula is unreliable", stacklevel=2)

    @property
    def mass(self) -> float:
        return self.density * self.length_l * self.width_w * self.thickness_t


@dataclass(frozen=True)
class DriveElectrode:
    """Parallel-plate drive electrode; ``omega_e`` is half the modulation frequency."""

    area_s: float
    gap_d: float
    eps_r: float
    v0: float
    vp: float
    omega_e: float = 0.0

    def __post_init__(self):
        if not self.gap_d > 0 or not self.area_s > 0:
            raise ValueError("electrode area and gap must be positive")


@dataclass(frozen=True)
class SqueezeFrame:
    r: float
    delta_m: float
    delta_m_eff: float
    omega_drive: float
    lambda_eff: float


@dataclass(frozen=True)
class HoppingLink:
    voltage_u: float
    cap_c: float
    cap_w: float
    gap_h: float
    z0: float
    bare_g: float
    dressed_g: float


class ZeroPoint(NamedTuple):
    z0: float
    mass: float


class CouplingRegime(str, enum.Enum):
    SC = "SC"
    USC = "USC"
    DSC = "DSC"


def cantilever_frequency(geom: CantileverGeometry) -> float:
    """Fundamental flexural frequency in Hz."""
    return FLEXURAL_CONSTANT * geom.thickness_t * math.sqrt(geom.youngs / (12.0 * geom.density)) / geom.length_l**2


def zero_point_motion(geom: CantileverGeometry, omega_m: float, mass_fraction: float = 1.0) -> ZeroPoint:
    """``z0 = sqrt(hbar / (2 m omega_m))`` with ``m = mass_fraction * rho l w t``.

    ``mass_fraction=0.25`` gives the usual effective mass of the fundamental
    mode referred to the tip displacement.
    """
    if not omega_m > 0:
        raise ValueError("omega_m must be positive")
    m = mass_fraction * geom.mass
    return ZeroPoint(math.sqrt(HBAR / (2.0 * m * omega_m)), m)


def bare_coupling(z0: float, gradient: float, sbar: float, lande_g: float = LANDE_G) -> float:
    """Tip-skyrmion coupling ``g mu_B S G z0 / hbar``."""
    return lande_g * MU_B * sbar * gradient * z0 / HBAR


def cooperativity(lam: float, gamma_m: float, gamma_sky: float) -> float:
    if not (gamma_m > 0 and gamma_sky > 0):
        raise ValueError("decay rates must be positive")
    return 4.0 * lam**2 / (gamma_m * gamma_sky)


def stiffness_modulation(electrode: DriveElectrode) -> float:
    """Amplitude of ``k_E(t) = dk cos(2 omega_E t)`` in N/m."""
    e = electrode
    return 2.0 * EPS0 * e.eps_r * e.area_s * e.v0 * e.vp / e.gap_d**3


def parametric_drive_strength(electrode: DriveElectrode, z0: float) -> float:
    """Two-phonon drive ``Omega_E = -dk z0^2 / hbar``."""
    return -stiffness_modulation(electrode) * z0**2 / HBAR


def squeeze_frame(delta_m: float, omega_e_drive: float, lambda_bar: float) -> SqueezeFrame:
    """Bogoliubov frame of the parametrically driven mode.

    ``tanh(2r) = Omega_E / Delta_m``; the mode frequency drops to
    ``Delta_m / cosh(2r)`` and the coupling grows to ``lambda_bar e^r / 2``.
    """
    if delta_m == 0 or abs(omega_e_drive) >= abs(delta_m):
        raise SqueezeDiverges(
            f"|Omega_E| = {abs(omega_e_drive):.6g} >= |Delta_m| = {abs(delta_m):.6g}: parametric instability"
        )
    r = 0.5 * math.atanh(omega_e_drive / delta_m)
    return SqueezeFrame(
        r=r,
        delta_m=delta_m,
        delta_m_eff=delta_m / math.cosh(2.0 * r),
        omega_drive=omega_e_drive,
        lambda_eff=lambda_bar * math.exp(r) / 2.0,
    )


def squeeze_from_r(r: float, delta_m: float, lambda_bar: float) -> SqueezeFrame:
    """Same frame parameterised by the squeeze parameter instead of the drive."""
    return SqueezeFrame(
        r=r,
        delta_m=delta_m,
        delta_m_eff=delta_m / math.cosh(2.0 * r),
        omega_drive=delta_m * math.tanh(2.0 * r),
        lambda_eff=lambda_bar * math.exp(r) / 2.0,
    )


def coupling_regime(lambda_eff: float, delta_q: float, delta_m_eff: float) -> CouplingRegime:
    prod = delta_q * delta_m_eff
    if not prod > 0:
        raise InvalidRegimeInput("g_c = sqrt(Delta_q Delta_m_eff) needs same-sign, nonzero detunings")
    ratio = abs(lambda_eff) / math.sqrt(prod)
    if ratio < 0.1:
        return CouplingRegime.SC
    if ratio <= 1.0:
        return CouplingRegime.USC
    return CouplingRegime.DSC


def wire_capacitance(spacing: float) -> float:
    """Self-capacitance ``eps0 * spacing`` of the wire joining neighbouring electrodes."""
    return EPS0 * spacing


def hopping_rate(
    voltage_u: float, cap_c: float, cap_w: float, gap_h: float, z0: float, squeeze_r: float = 0.0
) -> HoppingLink:
    """Capacitive phonon hopping between neighbouring cantilevers."""
    if not (cap_c > 0 and cap_w >= 0 and gap_h > 0):
        raise ValueError("capacitances and gap must be positive")
    g = z0**2 * voltage_u**2 * cap_c**2 * cap_w**2 / (HBAR * gap_h**2 * (2.0 * cap_c + cap_w) ** 3)
    return HoppingLink(
        voltage_u=voltage_u,
        cap_c=cap_c,
        cap_w=cap_w,
        gap_h=gap_h,
        z0=z0,
        bare_g=g,
        dressed_g=g * math.exp(2.0 * squeeze_r) / 2.0,
    )


def ssh_voltages(u0: float, delta: float, r0: float = 0.0, r1: float = 0.0, r2: float = 0.0) -> tuple[float, float]:
    """Electrode voltages giving hoppings ``G(1 + delta)`` and ``G(1 - delta)``."""
    if not abs(delta) < 1:
        raise ValueError("|delta| must be < 1")
    u1 = u0 * math.sqrt(1.0 + delta) * math.exp(r0 - r1)
    u2 = u0 * math.sqrt(1.0 - delta) * math.exp(r0 - r2)
    return u1, u2
