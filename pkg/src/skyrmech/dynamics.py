"""Hamiltonians and time evolution for qubits coupled to mechanical modes.

Frequencies and times are in matching reciprocal units (scenarios use the
bare coupling or the chain hopping as the unit).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from skyrmech.errors import NotExcitationConserving, PlacementCollision, StepSizeUnderflow, TraceDrift
from skyrmech.operators import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Z,
    OperatorMatrix,
    SpaceSpec,
    excitation_number,
    mode_destroy,
    qubit_op,
)
from skyrmech.topo_bath import Site, SSHChain

DENSE_LIMIT = 4096
TRACE_TOL = 1e-6
POSITIVITY_FLOOR = -1e-8
NORM_TOL = 1e-10
CONSERVATION_TOL = 1e-12


@dataclass(frozen=True)
class LindbladSpec:
    hamiltonian: OperatorMatrix
    collapse_ops: list[tuple[np.ndarray | sp.spmatrix, float]] = field(default_factory=list)

    def __post_init__(self):
        d = self.hamiltonian.dim
        for op, rate in self.collapse_ops:
            if rate < 0:
                raise ValueError(f"collapse rate must be non-negative, got {rate}")
            if op.shape != (d, d):
                raise ValueError("collapse operator dimension mismatch")


@dataclass
class EvolutionResult:
    times: np.ndarray
    traces: dict[str, np.ndarray]
    trace_of_rho: np.ndarray
    min_eigenvalue: np.ndarray | None = None
    final_state: np.ndarray | None = None


def _coupled(n_qubits: int, n_max: int) -> SpaceSpec:
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    return SpaceSpec(n_qubits, (n_max,))


def _assemble(matrix, space: SpaceSpec) -> OperatorMatrix:
    if space.dim > DENSE_LIMIT:
        return OperatorMatrix(sp.csr_matrix(matrix), space)
    return OperatorMatrix(matrix.toarray() if sp.issparse(matrix) else matrix, space)


def _coupling_term(sig_x, b, rwa: bool, sig_m=None):
    if rwa:
        return b @ sig_m.conj().T + b.conj().T @ sig_m
    return (b + b.conj().T) @ sig_x


def build_rabi_hamiltonian(
    delta_q: float, delta_m_eff: float, lambda_eff: float, n_max: int, rwa: bool = False
) -> OperatorMatrix:
    """``D_q/2 sz + D_m b^dag b + l (b + b^dag) sx`` on qubit x Fock(n_max).

    With ``rwa=True`` the coupling is ``l (b s+ + b^dag s-)``.
    """
    space = _coupled(1, n_max)
    sparse = space.dim > DENSE_LIMIT
    b = mode_destroy(0, space, sparse)
    sz, sx, sm = (qubit_op(o, 0, space, sparse) for o in (SIGMA_Z, SIGMA_X, SIGMA_MINUS))
    h = 0.5 * delta_q * sz + delta_m_eff * (b.conj().T @ b) + lambda_eff * _coupling_term(sx, b, rwa, sm)
    return _assemble(h, space)


def build_two_qubit_hamiltonian(
    delta_q: float, delta_m_eff: float, lambda_eff: float, n_max: int, rwa: bool = False
) -> OperatorMatrix:
    """Two qubits sharing one mode with couplings of opposite sign."""
    space = _coupled(2, n_max)
    sparse = space.dim > DENSE_LIMIT
    b = mode_destroy(0, space, sparse)
    h = delta_m_eff * (b.conj().T @ b)
    for i, sign in ((0, 1.0), (1, -1.0)):
        sz, sx, sm = (qubit_op(o, i, space, sparse) for o in (SIGMA_Z, SIGMA_X, SIGMA_MINUS))
        h = h + 0.5 * delta_q * sz + sign * lambda_eff * _coupling_term(sx, b, rwa, sm)
    return _assemble(h, space)


def sw_effective_two_qubit(lambda_eff: float, delta_m_eff: float) -> tuple[float, OperatorMatrix]:
    """Mode-eliminated coupling ``L = l^2 / D_m`` and the operator ``-L (sx1 - sx2)^2``.

    The minus sign is what second-order elimination of the mode gives; it lowers
    the states with a large collective ``sx1 - sx2``. Populations only depend on
    ``|L|``, so transfer times are unchanged by the sign.
    """
    if delta_m_eff == 0:
        raise ValueError("delta_m_eff must be nonzero")
    if abs(delta_m_eff) < 5.0 * abs(lambda_eff):
        warnings.warn("delta_m_eff < 5 lambda_eff: mode elimination is unreliable", stacklevel=2)
    lam = lambda_eff**2 / delta_m_eff
    x = np.kron(SIGMA_X, np.eye(2)) - np.kron(np.eye(2), SIGMA_X)
    return lam, OperatorMatrix(-lam * (x @ x), SpaceSpec(2, ()))


def transfer_time(lambda_ss: float) -> float:
    """Time for complete ``|eg> -> |ge>`` transfer under the exchange ``2 L``."""
    return math.pi / (4.0 * abs(lambda_ss))


def build_array_hamiltonian(
    chain: SSHChain,
    placements: Sequence[Site],
    coupling: float,
    delta_q: float = 0.0,
    restriction: str = "single_excitation",
    mode_dim: int = 2,
) -> OperatorMatrix:
    """Qubits attached to chain sites with excitation-conserving couplings.

    Single-excitation basis: ``[vacuum, qubit_0..qubit_{n-1}, A0, B0, A1, ...]``.
    Diagonal entries match the full-space ``D_q/2 sz`` convention, so the vacuum
    sits at ``-n D_q / 2``.
    """
    placements = [Site(*p) for p in placements]
    if len(set(placements)) != len(placements):
        raise PlacementCollision("two qubits on the same site")
    for p in placements:
        if not 0 <= p.index < chain.n_sites:
            raise PlacementCollision(f"site {p} outside a chain of {chain.n_cells} cells")
    hop = chain.hopping_matrix()
    nq, ns = len(placements), chain.n_sites
    if restriction == "single_excitation":
        space = SpaceSpec(nq, (mode_dim,) * ns, "single_excitation")
        base = -0.5 * nq * delta_q
        h = np.zeros((space.dim, space.dim), dtype=complex)
        h[np.diag_indices(space.dim)] = base
        for i, p in enumerate(placements):
            h[1 + i, 1 + i] += delta_q
            h[1 + i, 1 + nq + p.index] = h[1 + nq + p.index, 1 + i] = coupling
        h[1 + nq :, 1 + nq :] += hop
        return OperatorMatrix(h, space)
    if restriction != "full":
        raise ValueError(f"unknown restriction {restriction!r}")
    space = SpaceSpec(nq, (mode_dim,) * ns)
    sparse = True
    bs = [mode_destroy(k, space, sparse) for k in range(ns)]
    h = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for i, p in enumerate(placements):
        sm = qubit_op(SIGMA_MINUS, i, space, sparse)
        h = h + 0.5 * delta_q * qubit_op(SIGMA_Z, i, space, sparse)
        h = h + coupling * (bs[p.index] @ sm.conj().T + bs[p.index].conj().T @ sm)
    rows, cols = np.nonzero(np.triu(hop))
    for r, c in zip(rows, cols):
        h = h + hop[r, c] * (bs[r].conj().T @ bs[c] + bs[c].conj().T @ bs[r])
    return _assemble(h, space)


def standard_collapse_ops(h: OperatorMatrix, gamma_m: float, gamma_sky: float, dephasing: bool = True):
    """Mode decay ``D[b]`` at ``gamma_m``; qubit decay ``D[s-]`` and dephasing ``D[sz]`` at ``gamma_sky``."""
    space = h.space
    sparse = h.is_sparse
    ops = [(mode_destroy(k, space, sparse), gamma_m) for k in range(len(space.mode_dims))]
    for i in range(space.n_qubits):
        ops.append((qubit_op(SIGMA_MINUS, i, space, sparse), gamma_sky))
        if dephasing:
            ops.append((qubit_op(SIGMA_Z, i, space, sparse), gamma_sky))
    return ops


def observables(space: SpaceSpec, sparse: bool = False) -> dict[str, np.ndarray]:
    """Qubit occupations ``P_e{i}`` and phonon numbers ``n{k}`` (full space)."""
    obs = {}
    for i in range(space.n_qubits):
        obs[f"P_e{i + 1}"] = qubit_op(SIGMA_PLUS @ SIGMA_MINUS, i, space, sparse)
    for k in range(len(space.mode_dims)):
        b = mode_destroy(k, space, sparse)
        obs[f"n{k + 1}"] = b.conj().T @ b
    return obs


def _expect(rhos: np.ndarray, op) -> np.ndarray:
    op = op.toarray() if sp.issparse(op) else op
    return np.einsum("tij,ji->t", rhos, op).real


def lindblad_evolve(
    spec: LindbladSpec,
    rho0: np.ndarray,
    times: Sequence[float],
    *,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    check_positivity: bool = True,
) -> EvolutionResult:
    """Integrate ``d rho/dt = -i[H, rho] + sum g (L rho L^dag - {L^dag L, rho}/2)``.

    Uses an adaptive 8th-order Runge-Kutta scheme on the density matrix. A pure
    state vector is accepted for ``rho0``.
    """
    h = spec.hamiltonian
    d = h.dim
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim == 1:
        rho0 = np.outer(rho0, rho0.conj())
    if rho0.shape != (d, d):
        raise ValueError("rho0 dimension mismatch")
    if abs(np.trace(rho0) - 1.0) > TRACE_TOL:
        raise ValueError("rho0 must have unit trace")
    times = np.asarray(times, dtype=float)

    sparse = h.is_sparse
    ls = [(sp.csr_matrix(op) if sparse else np.asarray(op.toarray() if sp.issparse(op) else op), g)
          for op, g in spec.collapse_ops if g > 0]
    heff = h.matrix.astype(complex)
    for op, g in ls:
        heff = heff - 0.5j * g * (op.conj().T @ op)
    jumps = [(op, op.conj().T, g) for op, g in ls]

    def rhs(_t, y):
        rho = y.reshape(d, d)
        a = heff @ rho
        out = -1j * a + 1j * a.conj().T
        for op, opd, g in jumps:
            out += g * (op @ rho @ opd)
        return out.ravel()

    sol = solve_ivp(rhs, (times[0], times[-1]), rho0.ravel(), method="DOP853", t_eval=times, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise StepSizeUnderflow(f"integrator stopped: {sol.message}")
    rhos = sol.y.T.reshape(-1, d, d)
    tr = np.einsum("tii->t", rhos).real
    drift = float(np.max(np.abs(tr - 1.0)))
    if drift > TRACE_TOL:
        raise TraceDrift(f"|tr rho - 1| reached {drift:.3g}")

    traces = {name: _expect(rhos, op) for name, op in observables(h.space, sparse).items()}
    traces["energy"] = _expect(rhos, h.matrix)
    min_eig = None
    if check_positivity and d <= 512:
        min_eig = np.array([np.linalg.eigvalsh(0.5 * (r + r.conj().T))[0] for r in rhos])
    return EvolutionResult(times, traces, tr, min_eig, rhos[-1])


def _sector_projection(h: OperatorMatrix):
    """Restrict a full-space excitation-conserving operator to zero and one excitations."""
    nop = excitation_number(h.space, h.is_sparse)
    comm = h.matrix @ nop - nop @ h.matrix
    dev = float(abs(comm).max()) if sp.issparse(comm) else float(np.max(np.abs(comm)))
    if dev > CONSERVATION_TOL * max(1.0, float(abs(h.matrix).max())):
        raise NotExcitationConserving(f"|[H, N]|_max = {dev:.3g}")
    ndiag = np.real(nop.diagonal())
    keep = np.nonzero(ndiag < 1.5)[0]
    sub = h.matrix[keep][:, keep]
    return keep, sub.toarray() if sp.issparse(sub) else np.asarray(sub)


def single_excitation_evolve(h: OperatorMatrix, psi0: np.ndarray, times: Sequence[float]) -> EvolutionResult:
    """Exact unitary evolution in the zero-plus-one excitation sector.

    Accepts either a sector-restricted operator (from ``build_array_hamiltonian``)
    or a full-space one, which is checked for excitation conservation and
    projected. Traces: ``P_e{i}`` per qubit, ``n_total`` phonons, and the
    site populations under ``sites``.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    space = h.space
    if space.restriction == "single_excitation":
        mat = h.dense()
        vec = psi0
        n_sites = space.dim - 1 - space.n_qubits
        qubit_rows = np.arange(1, 1 + space.n_qubits)
        site_rows = np.arange(1 + space.n_qubits, space.dim)
    else:
        keep, mat = _sector_projection(h)
        outside = np.delete(psi0, keep)
        if outside.size and np.max(np.abs(outside)) > NORM_TOL:
            raise NotExcitationConserving("initial state has weight outside the one-excitation sector")
        vec = psi0[keep]
        occ = {name: np.real(op.diagonal())[keep] for name, op in observables(space, h.is_sparse).items()}
        qubit_rows = np.array([int(np.argmax(occ[f"P_e{i + 1}"])) for i in range(space.n_qubits)], dtype=int)
        site_rows = np.array([int(np.argmax(occ[f"n{k + 1}"])) for k in range(len(space.mode_dims))], dtype=int)
        n_sites = site_rows.size
    if vec.shape != (mat.shape[0],):
        raise ValueError("psi0 dimension mismatch")
    times = np.asarray(times, dtype=float)
    vals, vecs = np.linalg.eigh(mat)
    coeff = vecs.conj().T @ vec
    amps = (vecs @ (np.exp(-1j * np.outer(vals, times - times[0])) * coeff[:, None])).T
    pops = np.abs(amps) ** 2
    norm = pops.sum(axis=1)
    drift = float(np.max(np.abs(norm - np.sum(np.abs(vec) ** 2))))
    if drift > NORM_TOL:
        raise TraceDrift(f"norm drift {drift:.3g} in single-excitation evolution")
    traces = {f"P_e{i + 1}": pops[:, r] for i, r in enumerate(qubit_rows)}
    traces["n_total"] = pops[:, site_rows].sum(axis=1) if n_sites else np.zeros(times.size)
    traces["sites"] = pops[:, site_rows]
    return EvolutionResult(times, traces, norm, None, amps[-1])


def array_initial_state(n_qubits: int, n_sites: int, excited: int) -> np.ndarray:
    """Sector vector with qubit ``excited`` (0-based) in ``|e>`` and the chain empty."""
    v = np.zeros(1 + n_qubits + n_sites, dtype=complex)
    v[1 + excited] = 1.0
    return v
