"""Dimerised (SSH) phonon chain as a structured bath for skyrmion qubits.

Energies are measured from the mechanical reference ``omega_m_ref`` and are in
whatever unit ``hop_g`` carries (tests and scenarios use ``hop_g = 1``).
Sites are addressed as ``Site(cell, sub)`` with ``sub`` in ``{"A", "B"}``; the
real-space site index is ``2 * cell + (sub == "B")``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Sequence

import numpy as np

from skyrmech.errors import EnergyInBand, NonConvergedQuadrature, PlacementCollision
from skyrmech.operators import SIGMA_MINUS, SIGMA_PLUS, OperatorMatrix, SpaceSpec, embed

N_K = 2**12
GUARD = 0.05
CHIRAL_THRESHOLD = 0.99


class Site(NamedTuple):
    cell: int
    sub: Literal["A", "B"]

    @classmethod
    def parse(cls, label: str) -> "Site":
        """``"A3"`` or ``"B-2"`` to ``Site``."""
        sub, cell = label[0].upper(), label[1:]
        if sub not in ("A", "B"):
            raise ValueError(f"sublattice must be A or B in {label!r}")
        return cls(int(cell), sub)

    @property
    def index(self) -> int:
        return 2 * self.cell + (self.sub == "B")

    def __str__(self) -> str:
        return f"{self.sub}{self.cell}"


@dataclass(frozen=True)
class SSHChain:
    n_cells: int
    hop_g: float
    dimerization: float
    omega_m_ref: float = 0.0
    boundary: Literal["periodic", "open"] = "periodic"

    def __post_init__(self):
        if not self.hop_g > 0:
            raise ValueError("hop_g must be positive")
        if not abs(self.dimerization) < 1:
            raise ValueError("|dimerization| must be < 1")
        if self.n_cells < 1:
            raise ValueError("need at least one cell")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    @property
    def g1(self) -> float:
        return self.hop_g * (1.0 + self.dimerization)

    @property
    def g2(self) -> float:
        return self.hop_g * (1.0 - self.dimerization)

    @property
    def half_gap(self) -> float:
        return 2.0 * self.hop_g * abs(self.dimerization)

    @property
    def band_top(self) -> float:
        return 2.0 * self.hop_g

    @property
    def n_sites(self) -> int:
        return 2 * self.n_cells

    def hopping_matrix(self) -> np.ndarray:
        """Real-space single-particle matrix, sites ordered A0, B0, A1, B1, ..."""
        n = self.n_sites
        h = np.zeros((n, n))
        for c in range(self.n_cells):
            a, b = 2 * c, 2 * c + 1
            h[a, b] = h[b, a] = self.g1
            nxt = b + 1
            if nxt < n:
                h[b, nxt] = h[nxt, b] = self.g2
            elif self.boundary == "periodic" and self.n_cells > 1:
                h[b, 0] = h[0, b] = self.g2
        return h


def squeezed_hopping(bare_g: float, r: float) -> float:
    """Chain hopping ``g e^{2r} / 2`` produced by squeezing every resonator."""
    return bare_g * math.exp(2.0 * r) / 2.0


def _bloch_factor(chain: SSHChain, k):
    return chain.g1 + chain.g2 * np.exp(-1j * np.asarray(k, dtype=float))


def dispersion(chain: SSHChain, k) -> tuple[np.ndarray, np.ndarray]:
    k = np.asarray(k, dtype=float)
    d = chain.dimerization
    w = chain.hop_g * np.sqrt(np.maximum(2.0 * (1.0 + d * d) + 2.0 * (1.0 - d * d) * np.cos(k), 0.0))
    return w, -w


def bloch_phase(chain: SSHChain, k, unwrap: bool = True) -> np.ndarray:
    """``arg(G1 + G2 e^{-ik})``; unwrapped along the supplied ``k`` order."""
    phi = np.angle(_bloch_factor(chain, k))
    return np.unwrap(phi) if unwrap and phi.ndim else phi


def winding_number(chain: SSHChain, n_k: int = 4097) -> int:
    k = np.linspace(-math.pi, math.pi, n_k)
    phi = bloch_phase(chain, k)
    return int(round((phi[-1] - phi[0]) / (2.0 * math.pi)))


@dataclass
class BoundState:
    energy: float
    qubit_amplitude: complex
    cells: np.ndarray
    site_amplitudes: np.ndarray  # shape (len(cells), 2): columns A, B
    attach: Literal["A", "B"]
    chirality: float = field(init=False)

    def __post_init__(self):
        self.chirality = chirality(self.cells, self.site_amplitudes)

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.site_amplitudes) ** 2

    @property
    def is_chiral(self) -> bool:
        return abs(self.chirality) > CHIRAL_THRESHOLD

    def forbidden_weight(self) -> float:
        """Weight on the side a zero-energy state cannot reach (j < 0 for A, j > 0 for B)."""
        side = self.cells < 0 if self.attach == "A" else self.cells > 0
        return float(self.weights[side].sum())


def chirality(cells: np.ndarray, amplitudes: np.ndarray) -> float:
    """``(W_{j>0} - W_{j<0}) / W_{j != 0}``; the attach cell is left out."""
    w = (np.abs(amplitudes) ** 2).sum(axis=1)
    right, left = w[cells > 0].sum(), w[cells < 0].sum()
    total = right + left
    return float((right - left) / total) if total > 0 else 0.0


def _check_energy(chain: SSHChain, e_bs: float):
    lo = (1.0 + GUARD) * chain.half_gap if chain.dimerization else 0.0
    in_gap = abs(e_bs) < (1.0 - GUARD) * chain.half_gap
    outside = abs(e_bs) > (1.0 + GUARD) * chain.band_top
    if not (in_gap or outside):
        raise EnergyInBand(
            f"|E_BS| = {abs(e_bs):.6g} is within {GUARD:.0%} of the bands [{chain.half_gap:.6g}, {chain.band_top:.6g}]"
            + ("" if lo else " (gapless chain)")
        )


def _greens(chain: SSHChain, e: float, attach: str, k: np.ndarray):
    """Momentum-space amplitudes (per unit coupling) on A and B for a qubit on ``attach``."""
    f = _bloch_factor(chain, k)
    denom = e * e - np.abs(f) ** 2
    if attach == "A":
        return e / denom, np.conj(f) / denom
    return f / denom, e / denom


def _site_sums(chain, coupling, e, attach, cells, n_k):
    k = -math.pi + 2.0 * math.pi * np.arange(n_k) / n_k
    ga, gb = _greens(chain, e, attach, k)
    phase = np.exp(1j * np.outer(cells, k))
    amps = coupling * np.stack([phase @ ga, phase @ gb], axis=1) / n_k
    norm_sites = coupling**2 * np.mean(np.abs(ga) ** 2 + np.abs(gb) ** 2)
    return amps, norm_sites


def bound_state_quadrature(
    chain: SSHChain,
    coupling: float,
    e_bs: float,
    attach: Literal["A", "B"] = "A",
    j_range: tuple[int, int] = (-20, 20),
    n_k: int = N_K,
) -> BoundState:
    """Qubit-phonon bound state at energy ``e_bs`` on the infinite chain.

    Site amplitudes are Fourier integrals over the Brillouin zone, taken with the
    periodic trapezoid rule; the norm uses Parseval so it covers every cell, not
    just ``j_range``. The qubit amplitude is chosen real and positive.
    """
    if attach not in ("A", "B"):
        raise ValueError("attach must be 'A' or 'B'")
    _check_energy(chain, e_bs)
    cells = np.arange(j_range[0], j_range[1] + 1)
    amps, norm_sites = _site_sums(chain, coupling, e_bs, attach, cells, n_k)
    coarse, norm_coarse = _site_sums(chain, coupling, e_bs, attach, cells, n_k // 2)
    scale = max(1.0, float(np.max(np.abs(amps))))
    dev = max(float(np.max(np.abs(amps - coarse))), abs(norm_sites - norm_coarse))
    if dev > 1e-10 * scale:
        raise NonConvergedQuadrature(f"bound-state quadrature changed by {dev:.3g} on halving the k grid")
    ce = 1.0 / math.sqrt(1.0 + norm_sites)
    return BoundState(float(e_bs), complex(ce), cells, ce * amps, attach)


def qubit_detuning_for(chain: SSHChain, coupling: float, e_bs: float, attach: str = "A", n_k: int = N_K) -> float:
    """Qubit detuning that places the bound state at ``e_bs`` (self-energy condition)."""
    _check_energy(chain, e_bs)
    k = -math.pi + 2.0 * math.pi * np.arange(n_k) / n_k
    ga, gb = _greens(chain, e_bs, attach, k)
    own = ga if attach == "A" else gb
    return float(e_bs - coupling**2 * np.mean(own).real)


def bound_state_closed_form(
    chain: SSHChain,
    coupling: float,
    attach: Literal["A", "B"] = "A",
    j_range: tuple[int, int] = (-20, 20),
) -> BoundState:
    """Zero-energy bound state as a geometric series.

    For ``delta > 0`` and a qubit on A the cloud sits on B with
    ``C_B(j) = -(coupling C_e / G1) (-G2/G1)^j`` for ``j >= 0``; a qubit on B is
    the mirror image. For ``delta < 0`` the series runs the other way with
    ratio ``-G1/G2`` starting one cell over.
    """
    if attach not in ("A", "B"):
        raise ValueError("attach must be 'A' or 'B'")
    if chain.dimerization == 0:
        raise EnergyInBand("E = 0 touches the band of a gapless chain")
    g1, g2 = chain.g1, chain.g2
    cells = np.arange(j_range[0], j_range[1] + 1)
    amps = np.zeros((cells.size, 2), dtype=complex)
    col = 1 if attach == "A" else 0
    # right-moving index n >= 0 measured from the start cell of the series
    if chain.dimerization > 0:
        ratio, lead = -g2 / g1, g1
        n = cells if attach == "A" else -cells
    else:
        ratio, lead = -g1 / g2, g2
        n = -cells - 1 if attach == "A" else cells - 1
    mask = n >= 0
    amps[mask, col] = -(coupling / lead) * ratio ** n[mask]
    norm_sites = (coupling / lead) ** 2 / (1.0 - ratio * ratio)
    ce = 1.0 / math.sqrt(1.0 + norm_sites)
    return BoundState(0.0, complex(ce), cells, ce * amps, attach)


@dataclass(frozen=True)
class EdgeState:
    energy: float
    amplitudes: np.ndarray  # shape (n_cells, 2), vacancy entry zero
    vacancy: Site

    @property
    def participation_ratio(self) -> float:
        p = np.abs(self.amplitudes.ravel()) ** 2
        return float(1.0 / np.sum(p * p))

    def relative(self, cells: np.ndarray) -> np.ndarray:
        """Amplitudes at cells measured from the vacancy cell (wrapped on a ring)."""
        idx = (self.vacancy.cell + np.asarray(cells)) % self.amplitudes.shape[0]
        return self.amplitudes[idx]


def vacancy_edge_state(chain: SSHChain, vacancy: Site) -> EdgeState:
    """Smallest-|E| eigenvector of the chain with one site removed.

    Removing a site from the ring leaves an open chain of ``2N - 1`` sites whose
    zero mode is the phonon part of the bound state of a qubit on that site.
    The sign is fixed so the largest component is positive.
    """
    h = chain.hopping_matrix()
    drop = vacancy.index
    if not 0 <= drop < chain.n_sites:
        raise PlacementCollision(f"vacancy {vacancy} outside the chain")
    keep = np.delete(np.arange(chain.n_sites), drop)
    vals, vecs = np.linalg.eigh(h[np.ix_(keep, keep)])
    i = int(np.argmin(np.abs(vals)))
    v = vecs[:, i]
    v = v * np.sign(v[np.argmax(np.abs(v))])
    full = np.zeros(chain.n_sites)
    full[keep] = v
    return EdgeState(float(vals[i]), full.reshape(chain.n_cells, 2), vacancy)


@dataclass(frozen=True)
class EffectiveCouplingMatrix:
    placements: tuple[Site, ...]
    entries: np.ndarray
    separations: np.ndarray  # x_ij for AB-type pairs reaching each other, -1 otherwise

    @property
    def parity(self) -> np.ndarray:
        return np.where(self.separations >= 0, (-1.0) ** np.maximum(self.separations, 0), 0.0)


def _separation(chain: SSHChain, a: Site, b: Site) -> int | None:
    """Cells from the A site to the B site along the allowed direction, or None."""
    if chain.dimerization > 0:
        x = b.cell - a.cell
    else:
        x = a.cell - b.cell - 1
    return x if x >= 0 else None


def effective_coupling(chain: SSHChain, coupling: float, place_i: Site, place_j: Site) -> float:
    """Markovian exchange ``G_ij`` mediated by virtual phonons at zero detuning.

    Sign convention: ``H = -sum G_ij (s+^i s-^j + h.c.)``. Only A-B pairs couple,
    and only when the B site lies on the allowed side of the A site.
    """
    if chain.dimerization == 0:
        raise ValueError("gapless chain: no Markovian chiral coupling")
    if place_i.sub == place_j.sub:
        return 0.0
    a, b = (place_i, place_j) if place_i.sub == "A" else (place_j, place_i)
    x = _separation(chain, a, b)
    if x is None:
        return 0.0
    lead, small = (chain.g1, chain.g2) if chain.dimerization > 0 else (chain.g2, chain.g1)
    return coupling**2 * (-1.0) ** x * (small / lead) ** x / lead


def effective_coupling_matrix(chain: SSHChain, coupling: float, placements: Sequence[Site]) -> EffectiveCouplingMatrix:
    placements = tuple(placements)
    if len(set(placements)) != len(placements):
        raise PlacementCollision("two qubits on the same site")
    n = len(placements)
    entries = np.zeros((n, n))
    seps = -np.ones((n, n), dtype=int)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            entries[i, j] = effective_coupling(chain, coupling, placements[i], placements[j])
            pi, pj = placements[i], placements[j]
            if pi.sub != pj.sub:
                a, b = (pi, pj) if pi.sub == "A" else (pj, pi)
                x = _separation(chain, a, b)
                seps[i, j] = -1 if x is None else x
    return EffectiveCouplingMatrix(placements, entries, seps)


def effective_spin_hamiltonian(couplings: np.ndarray | EffectiveCouplingMatrix) -> OperatorMatrix:
    """Qubit-only exchange ``-sum_{i<j} G_ij (s+^i s-^j + h.c.)`` on the full 2^n space."""
    g = couplings.entries if isinstance(couplings, EffectiveCouplingMatrix) else np.asarray(couplings, dtype=float)
    n = g.shape[0]
    space = SpaceSpec(n, ())
    dims = (2,) * n
    h = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            hop = embed(SIGMA_PLUS, i, dims) @ embed(SIGMA_MINUS, j, dims)
            h -= g[i, j] * (hop + hop.conj().T)
    return OperatorMatrix(h, space)


def single_excitation_exchange(couplings: np.ndarray | EffectiveCouplingMatrix) -> np.ndarray:
    """One-excitation block of ``effective_spin_hamiltonian`` (basis: qubit i excited)."""
    g = couplings.entries if isinstance(couplings, EffectiveCouplingMatrix) else np.asarray(couplings, dtype=float)
    return -np.triu(g, 1) - np.triu(g, 1).T
