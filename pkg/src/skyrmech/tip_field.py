"""Field of a uniformly magnetised truncated-cone tip.

The tip occupies ``-h_tip - s_nm <= z' <= -s_nm`` under a non-magnetic cap of
thickness ``s_nm``; ``z > 0`` is free space. Uniform axial magnetisation is
equivalent to an azimuthal surface current ``M dz'`` on the slanted wall, so
every field here is an integral over current loops of radius ``R(z')``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from skyrmech.errors import ModulusOutOfRange, NonConvergedQuadrature, OutOfSlab

RTOL = 1e-9
ATOL = 1e-30


@dataclass(frozen=True)
class TipGeometry:
    """Lengths in metres, ``mu0_ms`` in tesla."""

    r_a: float
    r_b: float
    h_tip: float
    s_nm: float
    mu0_ms: float

    def __post_init__(self):
        if not 0 < self.r_a <= self.r_b:
            raise ValueError("need 0 < r_a <= r_b")
        if not self.h_tip > 0:
            raise ValueError("h_tip must be positive")
        if self.s_nm < 0:
            raise ValueError("s_nm must be non-negative")
        if not self.mu0_ms > 0:
            raise ValueError("mu0_ms must be positive")

    @property
    def slab(self) -> tuple[float, float]:
        return (-self.h_tip - self.s_nm, -self.s_nm)

    @classmethod
    def from_nm(cls, r_a, r_b, h_tip, s_nm, mu0_ms) -> "TipGeometry":
        return cls(r_a * 1e-9, r_b * 1e-9, h_tip * 1e-9, s_nm * 1e-9, mu0_ms)


@dataclass(frozen=True)
class FieldSample:
    rho: float
    z: float
    bz: float
    dbz_dz: float


def tip_radius_at(geom: TipGeometry, z_prime: float) -> float:
    lo, hi = geom.slab
    tol = 1e-12 * geom.h_tip
    if not lo - tol <= z_prime <= hi + tol:
        raise OutOfSlab(f"z' = {z_prime:g} outside the magnetised slab [{lo:g}, {hi:g}]")
    return _radius(geom, z_prime)


def _radius(geom: TipGeometry, zp):
    return (geom.r_a - geom.r_b) / geom.h_tip * (zp + geom.s_nm) + geom.r_a


def _integrate(f, lo: float, hi: float, what: str) -> float:
    val, err, info = integrate.quad(f, lo, hi, epsabs=ATOL, epsrel=RTOL * 1e-2, limit=200, full_output=True)[:3]
    if err > max(RTOL * abs(val), ATOL):
        raise NonConvergedQuadrature(f"{what}: error estimate {err:.3g} on value {val:.6g}")
    return val


def _check_z(z: float):
    if not z > 0:
        raise ValueError(f"field point must lie above the tip (z > 0), got {z!r}")


def bz_on_axis(geom: TipGeometry, z: float) -> float:
    """Axial field on the symmetry axis, in tesla."""
    _check_z(z)

    def f(zp):
        r2 = _radius(geom, zp) ** 2
        u = z - zp
        return r2 / (r2 + u * u) ** 1.5

    return 0.5 * geom.mu0_ms * _integrate(f, *geom.slab, "bz_on_axis")


def gradient_on_axis(geom: TipGeometry, z: float) -> float:
    """``dBz/dz`` on the axis (T/m); negative above the tip."""
    _check_z(z)

    def f(zp):
        r2 = _radius(geom, zp) ** 2
        u = z - zp
        d = r2 + u * u
        # d/dz of r2 / d**1.5
        return -3.0 * r2 * u / d**2.5

    return 0.5 * geom.mu0_ms * _integrate(f, *geom.slab, "gradient_on_axis")


def field_gradient(geom: TipGeometry, z: float) -> float:
    """Gradient magnitude G used in the coupling ``B_z = -G z``."""
    return -gradient_on_axis(geom, z)


def bz_off_axis(geom: TipGeometry, rho: float, z: float) -> float:
    """Axial field at radius ``rho`` via complete elliptic integrals.

    Each loop contributes ``[K(m) + (R^2 - rho^2 - u^2) / ((R - rho)^2 + u^2) E(m)]
    / sqrt((R + rho)^2 + u^2)`` with parameter ``m = 4 R rho / ((R + rho)^2 + u^2)``;
    ``K`` has the ``1/sqrt(1 - m sin^2)`` kernel.
    """
    _check_z(z)
    if rho < 0:
        raise ValueError("rho must be non-negative")

    def f(zp):
        r = _radius(geom, zp)
        u = z - zp
        big = (r + rho) ** 2 + u * u
        m = 4.0 * r * rho / big
        if not 0.0 <= m < 1.0:
            raise ModulusOutOfRange(f"elliptic parameter {m!r} outside [0, 1)")
        ratio = (r * r - rho * rho - u * u) / ((r - rho) ** 2 + u * u)
        return (special.ellipk(m) + ratio * special.ellipe(m)) / math.sqrt(big)

    return geom.mu0_ms / (2.0 * math.pi) * _integrate(f, *geom.slab, "bz_off_axis")


def sample(geom: TipGeometry, rho: float, z: float) -> FieldSample:
    """Field and on-axis gradient at a point (the gradient ignores ``rho``)."""
    bz = bz_on_axis(geom, z) if rho == 0 else bz_off_axis(geom, rho, z)
    return FieldSample(rho=rho, z=z, bz=bz, dbz_dz=gradient_on_axis(geom, z))


def gradient_profile(geom: TipGeometry, z_values) -> np.ndarray:
    return np.array([field_gradient(geom, float(z)) for z in np.atleast_1d(z_values)])
