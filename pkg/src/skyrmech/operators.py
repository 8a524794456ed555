"""Operator containers and tensor-product helpers.

Qubit basis ordering is ``(|g>, |e>)`` so ``sigma_minus = |g><e|``; Fock
states are ``|0>, |1>, ...``. Composite spaces are ordered as listed in
``OperatorMatrix.subsystems`` (first factor outermost in the Kronecker product).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Literal, Sequence

import numpy as np
import scipy.sparse as sp

HERMITIAN_TOL = 1e-12

Restriction = Literal["full", "single_excitation"]

SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class SpaceSpec:
    n_qubits: int
    mode_dims: tuple[int, ...]
    restriction: Restriction = "full"

    @property
    def dim(self) -> int:
        if self.restriction == "single_excitation":
            return 1 + self.n_qubits + len(self.mode_dims)
        return 2**self.n_qubits * int(np.prod(self.mode_dims, dtype=np.int64))

    @property
    def subsystems(self) -> tuple[str, ...]:
        return ("q",) * self.n_qubits + ("m",) * len(self.mode_dims)

    @property
    def dims(self) -> tuple[int, ...]:
        return (2,) * self.n_qubits + tuple(self.mode_dims)


@dataclass(frozen=True)
class OperatorMatrix:
    """Square complex matrix (dense ndarray or scipy sparse) on a ``SpaceSpec``."""

    matrix: np.ndarray | sp.spmatrix
    space: SpaceSpec
    hermitian: bool = True

    def __post_init__(self):
        m = self.matrix
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError(f"matrix shape {m.shape} does not match space dimension {self.space.dim}")
        if self.hermitian:
            dev = hermitian_deviation(m)
            scale = max(1.0, _max_abs(m))
            if dev >= HERMITIAN_TOL * scale:
                raise ValueError(f"operator flagged hermitian but |H - H^dag|_max = {dev:.3g}")

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)


def _max_abs(m) -> float:
    if sp.issparse(m):
        return float(abs(m).max()) if m.nnz else 0.0
    return float(np.max(np.abs(m))) if m.size else 0.0


def hermitian_deviation(m) -> float:
    return _max_abs(m - m.conj().T)


def destroy(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


def embed(op, index: int, dims: Sequence[int], sparse: bool = False):
    """``op`` acting on factor ``index`` of a Kronecker product over ``dims``."""
    kron = sp.kron if sparse else np.kron
    eye = (lambda d: sp.identity(d, dtype=complex, format="csr")) if sparse else (lambda d: np.eye(d, dtype=complex))
    factors = [op if i == index else eye(d) for i, d in enumerate(dims)]
    out = reduce(lambda a, b: kron(a, b, format="csr") if sparse else kron(a, b), factors)
    return out


def qubit_op(op: np.ndarray, qubit: int, space: SpaceSpec, sparse: bool = False):
    return embed(op, qubit, space.dims, sparse)


def mode_destroy(mode: int, space: SpaceSpec, sparse: bool = False):
    return embed(destroy(space.mode_dims[mode]), space.n_qubits + mode, space.dims, sparse)


def excitation_number(space: SpaceSpec, sparse: bool = False):
    """Total excitation operator ``sum sigma+ sigma- + sum b^dag b``."""
    if space.restriction == "single_excitation":
        return np.diag([0.0] + [1.0] * (space.dim - 1)).astype(complex)
    terms = [qubit_op(SIGMA_PLUS @ SIGMA_MINUS, i, space, sparse) for i in range(space.n_qubits)]
    for k in range(len(space.mode_dims)):
        b = mode_destroy(k, space, sparse)
        terms.append(b.conj().T @ b)
    return reduce(lambda a, b: a + b, terms)


def basis_state(space: SpaceSpec, occupations: Sequence[int]) -> np.ndarray:
    """Product basis vector; ``occupations`` lists qubit (0=g, 1=e) then Fock numbers."""
    if len(occupations) != len(space.dims):
        raise ValueError("one occupation per subsystem required")
    idx = 0
    for occ, d in zip(occupations, space.dims):
        if not 0 <= occ < d:
            raise ValueError(f"occupation {occ} outside dimension {d}")
        idx = idx * d + occ
    v = np.zeros(space.dim, dtype=complex)
    v[idx] = 1.0
    return v
