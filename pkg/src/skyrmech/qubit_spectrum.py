"""Helicity-qubit spectrum of a frustrated-magnet skyrmion.

The skyrmion profile is the approximate analytic solution
``Theta0(rho) = pi / sqrt(rho**2 + 1) * exp(-Y_re rho) * cos(Y_im rho)``; the
collective-coordinate Hamiltonian ``kappa S^2 - h S - eps cos(phi)`` is
diagonalised in the charge basis ``|s>`` where ``exp(+-i phi)|s> = |s+-1>``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy import integrate, special

from skyrmech.errors import NonConvergedQuadrature, TruncationNotConverged
from skyrmech.units import HBAR, LANDE_G, MEV, MU_B, mev_to_omega, tesla_to_mev

KappaMode = Literal["literal", "normalized", "value"]
Measure = Literal["area", "line"]

QUAD_RTOL = 1e-9
TAIL_FRACTION = 1e-12
CONVERGENCE_RTOL = 1e-10
ANHARMONIC_FRACTION = 0.2


@dataclass(frozen=True)
class SkyrmionMaterial:
    """Material and drive parameters of the skyrmion host.

    Energies in meV, ``lattice_a`` in nm, ``field_h`` in tesla, ``efield`` in
    V/m. ``polarization_pe`` is used as a polarisation per unit area so that
    ``a**3 * E * P_E`` is an energy.
    """

    j1: float
    j2: float
    lattice_a: float
    field_h: float
    anisotropy_k: float
    spin_sbar: float
    efield: float = 0.0
    polarization_pe: float = 0.0
    lande_g: float = LANDE_G

    def __post_init__(self):
        for name in ("j1", "j2", "lattice_a", "spin_sbar"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")

    @property
    def h(self) -> float:
        """Dimensionless field, Zeeman energy over J1."""
        return tesla_to_mev(self.field_h, self.lande_g) / self.j1

    @property
    def kappa_z(self) -> float:
        return self.anisotropy_k / self.j1

    @property
    def ell(self) -> float:
        return math.sqrt(self.j2 / self.j1)

    @property
    def length_unit_nm(self) -> float:
        """Physical length of one unit of the dimensionless radius."""
        return self.ell * self.lattice_a

    @property
    def omega_j(self) -> float:
        """Energy unit J_Lambda = J1 as an angular frequency."""
        return mev_to_omega(self.j1)

    @property
    def decay(self) -> complex:
        """Complex decay constant Y (principal square-root branches)."""
        y_tilde = np.sqrt(complex(1.0 - 4.0 * (self.h + self.kappa_z)))
        return complex(np.sqrt(-1.0 + y_tilde) / math.sqrt(2.0))


@dataclass(frozen=True)
class QubitCoefficients:
    """``kappa``, ``hz``, ``eps`` of the collective-coordinate Hamiltonian (rad/s)."""

    kappa: float
    hz: float
    eps: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.kappa, self.hz, self.eps)):
            raise ValueError("qubit coefficients must be finite")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa!r}")


@dataclass(frozen=True)
class QubitSpectrum:
    energies: np.ndarray
    states: np.ndarray
    s_max: int
    charges: np.ndarray = field(repr=False)

    @property
    def omega_q(self) -> float:
        return float(self.energies[1] - self.energies[0])

    @property
    def omega_ex(self) -> float:
        return float(self.energies[2] - self.energies[1])

    @property
    def anharmonic(self) -> bool:
        return abs(self.omega_ex - self.omega_q) > ANHARMONIC_FRACTION * self.omega_q

    def to_record(self, n_levels: int = 6) -> dict:
        return {
            "energies": [float(e) for e in self.energies[:n_levels]],
            "omega_q": self.omega_q,
            "omega_ex": self.omega_ex,
            "anharmonic": bool(self.anharmonic),
        }


@dataclass(frozen=True)
class TwoLevelQubit:
    a0: float
    b0: float
    omega_q: float
    theta: float


@dataclass(frozen=True)
class DressedQubit:
    omega_mw: float
    rabi_mw: float
    delta_qmw: float
    beta: float
    omega_tilde: float
    coupling_scale: float


# -- profile ---------------------------------------------------------------


def skyrmion_profile(material: SkyrmionMaterial, rho):
    """Polar angle Theta0 at dimensionless radius ``rho`` (scalar or array)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("rho must be non-negative")
    y = material.decay
    out = np.pi / np.sqrt(rho**2 + 1.0) * np.exp(-y.real * rho) * np.cos(-y.imag * rho)
    return out if out.ndim else float(out)


def profile_derivative(material: SkyrmionMaterial, rho):
    rho = np.asarray(rho, dtype=float)
    y = material.decay
    a, b = y.real, y.imag
    env = np.pi / np.sqrt(rho**2 + 1.0) * np.exp(-a * rho)
    out = env * ((-rho / (rho**2 + 1.0) - a) * np.cos(b * rho) - b * np.sin(b * rho))
    return out if out.ndim else float(out)


def skyrmion_radius(material: SkyrmionMaterial) -> float:
    """Dimensionless radius where Theta0 first drops to pi/2."""
    from scipy.optimize import brentq

    f = lambda r: skyrmion_profile(material, r) - np.pi / 2
    hi = 0.5
    while f(hi) > 0:
        hi *= 2.0
        if hi > 1e6:
            raise ValueError("profile never reaches pi/2")
    return brentq(f, 0.0, hi, xtol=1e-14)


def skyrmion_radius_nm(material: SkyrmionMaterial) -> float:
    return skyrmion_radius(material) * material.length_unit_nm


# -- coefficients ----------------------------------------------------------


def _envelope(material: SkyrmionMaterial, rho):
    return np.pi / np.sqrt(rho**2 + 1.0) * np.exp(-material.decay.real * rho)


def _weight(measure: Measure) -> Callable:
    if measure == "area":
        return lambda r: 2.0 * np.pi * r
    if measure == "line":
        return lambda r: np.ones_like(r)
    raise ValueError(f"unknown measure {measure!r}")


def _eps_integrand(material: SkyrmionMaterial, measure: Measure) -> Callable:
    w = _weight(measure)
    slope0 = -np.pi * material.decay.real  # Theta0'(0); also lim sin(2 Theta0)/(2 rho)

    def f(r):
        r = np.asarray(r, dtype=float)
        theta = skyrmion_profile(material, r)
        small = r < 1e-7
        ratio = np.where(small, slope0, np.sin(2.0 * theta) / (2.0 * np.where(small, 1.0, r)))
        return w(r) * (profile_derivative(material, r) + ratio)

    return f


def _tail_bound(material: SkyrmionMaterial, measure: Measure, rho: float) -> float:
    y = material.decay
    w = 2.0 * np.pi * rho if measure == "area" else 1.0
    slope = rho / (rho**2 + 1.0) + abs(y.real) + abs(y.imag) + 1.0 / rho
    return float(w * _envelope(material, rho) * slope)


def default_cutoff(material: SkyrmionMaterial, measure: Measure = "area") -> float:
    """Smallest radius (on a geometric grid) where the integrand tail is negligible."""
    peak = _integrand_peak(material, measure, 50.0)
    r = 4.0
    while r < 1e5:
        if _tail_bound(material, measure, r) < TAIL_FRACTION * peak:
            return r
        r *= 1.25
    raise NonConvergedQuadrature(
        "skyrmion profile does not decay fast enough for a finite quadrature cutoff "
        f"(decay constant Y = {material.decay:.4g}; h + kappa_z = "
        f"{material.h + material.kappa_z:.4g} <= 1/4 gives no exponential decay)"
    )


def _integrand_peak(material: SkyrmionMaterial, measure: Measure, upto: float) -> float:
    grid = np.linspace(0.0, upto, 4001)
    return float(np.max(np.abs(_eps_integrand(material, measure)(grid))))


def _quad(f: Callable, lo: float, hi: float, piece: float) -> float:
    """Adaptive Gauss-Kronrod over ``[lo, hi]`` split into pieces of length ``piece``."""
    edges = np.arange(lo, hi, piece)
    edges = np.append(edges, hi)
    total, err, scale = 0.0, 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(f, a, b, epsabs=1e-16, epsrel=1e-11, limit=200, full_output=True)[:2]
        total += val
        err += e
        scale += abs(val)
    # cancellation between pieces: fall back to the sum of magnitudes
    if err > QUAD_RTOL * abs(total) and err > 1e-12 * scale:
        raise NonConvergedQuadrature(
            f"quadrature error {err:.3g} exceeds relative tolerance {QUAD_RTOL:g} (value {total:.6g})"
        )
    return total


def eps_integral(
    material: SkyrmionMaterial, quadrature_cutoff: float | None = None, measure: Measure = "area"
) -> float:
    """``int w(rho) [Theta0' + sin(2 Theta0) / (2 rho)] d rho`` over the profile."""
    cutoff = default_cutoff(material, measure) if quadrature_cutoff is None else float(quadrature_cutoff)
    peak = _integrand_peak(material, measure, min(cutoff, 50.0))
    if _tail_bound(material, measure, cutoff) >= TAIL_FRACTION * peak:
        raise NonConvergedQuadrature(
            f"cutoff rho = {cutoff:g} leaves an integrand tail above {TAIL_FRACTION:g} of the peak"
        )
    return _quad(_eps_integrand(material, measure), 0.0, cutoff, _piece(material))


def _piece(material: SkyrmionMaterial) -> float:
    b = abs(material.decay.imag)
    return min(5.0, math.pi / b) if b > 0 else 5.0


def kappa_ratio(
    material: SkyrmionMaterial, quadrature_cutoff: float | None = None, measure: Measure = "area"
) -> float:
    """``int (1 - cos Theta0)^2 / [int (1 - cos Theta0)]^2`` with the chosen measure."""
    cutoff = default_cutoff(material, measure) if quadrature_cutoff is None else float(quadrature_cutoff)
    w = _weight(measure)
    one_minus = lambda r: 1.0 - np.cos(skyrmion_profile(material, r))
    num = _quad(lambda r: w(r) * one_minus(r) ** 2, 0.0, cutoff, _piece(material))
    den = _quad(lambda r: w(r) * one_minus(r), 0.0, cutoff, _piece(material))
    return num / den**2


def qubit_coefficients(
    material: SkyrmionMaterial,
    quadrature_cutoff: float | None = None,
    *,
    kappa_mode: KappaMode = "literal",
    kappa_value: float | None = None,
    measure: Measure = "area",
) -> QubitCoefficients:
    """Coefficients of ``kappa S^2 - h S - eps cos(phi)`` as angular frequencies.

    ``kappa_mode``:

    * ``"literal"`` -- the printed normalisation is a ratio of identical
      integrals, so kappa equals the bare ``K S / J``.
    * ``"normalized"`` -- ``int (1-cos)^2 / [int (1-cos)]^2`` times the bare value.
    * ``"value"`` -- use ``kappa_value`` (rad/s) as given.
    """
    wj = material.omega_j
    s = material.spin_sbar
    hz = material.h * s * wj
    kappa_bar = material.kappa_z * s * wj
    eps_bar = (
        (material.lattice_a * 1e-9) ** 3
        * material.efield
        * material.polarization_pe
        * s
        / (material.j1 * MEV)
        * wj
    )

    if kappa_mode == "literal":
        warnings.warn(
            "kappa_mode='literal': the normalisation integral cancels, kappa equals K*S/J",
            stacklevel=2,
        )
        kappa = kappa_bar
    elif kappa_mode == "normalized":
        kappa = kappa_bar * kappa_ratio(material, quadrature_cutoff, measure)
    elif kappa_mode == "value":
        if kappa_value is None:
            raise ValueError("kappa_mode='value' needs kappa_value")
        kappa = float(kappa_value)
    else:
        raise ValueError(f"unknown kappa_mode {kappa_mode!r}")

    eps = 0.0 if eps_bar == 0.0 else eps_bar * eps_integral(material, quadrature_cutoff, measure)
    return QubitCoefficients(kappa=kappa, hz=hz, eps=eps)


# -- spectrum --------------------------------------------------------------


def charge_hamiltonian(coeffs: QubitCoefficients, s_max: int, center: int = 0):
    """Real symmetric matrix over charges ``center - s_max .. center + s_max``."""
    s = np.arange(center - s_max, center + s_max + 1)
    h = np.diag(coeffs.kappa * s.astype(float) ** 2 - coeffs.hz * s)
    off = -0.5 * coeffs.eps * np.ones(len(s) - 1)
    h += np.diag(off, 1) + np.diag(off, -1)
    return h, s


def _eigs(coeffs: QubitCoefficients, s_max: int, center: int):
    h, s = charge_hamiltonian(coeffs, s_max, center)
    w, v = np.linalg.eigh(h)
    return w, v, s


def diagonalize_qubit(
    coeffs: QubitCoefficients,
    s_max: int = 20,
    *,
    center: int | None = 0,
    check_convergence: bool = True,
) -> QubitSpectrum:
    """Sorted eigenpairs of the charge-basis Hamiltonian.

    ``center=None`` centres the charge window on the classical minimum
    ``hz / (2 kappa)``.
    """
    if s_max < 5:
        raise ValueError("s_max must be at least 5")
    if center is None:
        center = int(round(coeffs.hz / (2.0 * coeffs.kappa)))
    w, v, s = _eigs(coeffs, s_max, center)
    if check_convergence:
        w_big = _eigs(coeffs, s_max + 5, center)[0]
        scale = max(coeffs.kappa, abs(coeffs.eps))
        shift = np.abs(w_big[:3] - w[:3])
        if np.any(shift > CONVERGENCE_RTOL * np.maximum(np.abs(w[:3]), scale)):
            raise TruncationNotConverged(
                f"lowest levels moved by {shift.max():.3g} when s_max {s_max} -> {s_max + 5}"
            )
    return QubitSpectrum(energies=w, states=v, s_max=s_max, charges=s)


def mathieu_levels(coeffs: QubitCoefficients, count: int = 4) -> np.ndarray:
    """Lowest levels from Mathieu characteristic values.

    Only valid when ``hz / kappa`` is an integer (integer or half-integer
    quasi-charge), where the Bloch phase maps onto periodic or antiperiodic
    Mathieu functions.
    """
    nu = coeffs.hz / (2.0 * coeffs.kappa)
    two_nu = round(2.0 * nu)
    if abs(2.0 * nu - two_nu) > 1e-12:
        raise ValueError("Mathieu cross-check needs hz/kappa to be an integer")
    q = abs(2.0 * coeffs.eps / coeffs.kappa)
    a_vals = []
    if two_nu % 2 == 0:
        a_vals.append(special.mathieu_a(0, q))
        for r in range(2, 2 * count + 2, 2):
            a_vals += [special.mathieu_a(r, q), special.mathieu_b(r, q)]
    else:
        for r in range(1, 2 * count + 1, 2):
            a_vals += [special.mathieu_a(r, q), special.mathieu_b(r, q)]
    a_vals = np.sort(np.array(a_vals))
    return (coeffs.kappa * a_vals / 4.0 - coeffs.kappa * nu**2)[:count]


# -- reductions ------------------------------------------------------------


def _half_angle(num: float, den: float) -> float:
    """Half of ``arctan(num / den)``, with ``den == 0`` resolved to the limit."""
    if den == 0.0:
        return math.copysign(math.pi / 4.0, num) if num != 0.0 else math.pi / 4.0
    return 0.5 * math.atan(num / den)


def two_level_reduction(coeffs: QubitCoefficients, *, check_anharmonicity: bool = True) -> TwoLevelQubit:
    if check_anharmonicity:
        spec = diagonalize_qubit(coeffs, 20, center=None, check_convergence=False)
        if not spec.anharmonic:
            warnings.warn(
                "charge spectrum is not anharmonic enough for a two-level truncation "
                f"(omega_ex={spec.omega_ex:.4g}, omega_q={spec.omega_q:.4g})",
                stacklevel=2,
            )
    a0 = coeffs.kappa - coeffs.hz
    b0 = coeffs.eps
    return TwoLevelQubit(a0=a0, b0=b0, omega_q=math.hypot(a0, b0), theta=_half_angle(b0, a0))


def dressed_frame(qubit: TwoLevelQubit, rabi_mw: float, omega_mw: float) -> DressedQubit:
    """Microwave-dressed qubit; downstream couplings scale by ``cos(2 beta)``."""
    delta = qubit.omega_q - omega_mw
    beta = _half_angle(rabi_mw, delta)
    return DressedQubit(
        omega_mw=omega_mw,
        rabi_mw=rabi_mw,
        delta_qmw=delta,
        beta=beta,
        omega_tilde=math.hypot(delta, rabi_mw),
        coupling_scale=math.cos(2.0 * beta),
    )


def microwave_rabi(b0_tesla: float, sbar: float, lande_g: float = LANDE_G) -> float:
    """Drive strength ``g mu_B B0 S / 2`` as an angular frequency."""
    return lande_g * MU_B * b0_tesla * sbar / 2.0 / HBAR
