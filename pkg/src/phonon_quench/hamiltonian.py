"""Bose-Hubbard Hamiltonian with site-dependent interaction.

    H = J sum_<jk> (b_j^+ b_k + h.c.) + sum_j U_j n_j (n_j - 1) + omega_x sum_j n_j

All energies are angular frequencies (hbar = 1). Use :func:`hz` to convert
cycle frequencies, which is how the trap couplings are usually quoted.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .basis import BasisSector
from .errors import DimensionError, SpecError

TWO_PI = 2.0 * np.pi


def hz(value):
    """Cycle frequency in Hz -> angular frequency in rad/s."""
    return TWO_PI * np.asarray(value, dtype=float) if np.ndim(value) else TWO_PI * float(value)


@dataclass(frozen=True)
class HamiltonianSpec:
    J: float
    U_site: Sequence[float]
    omega_x: float = 0.0
    boundary: str = "open"

    def __post_init__(self):
        object.__setattr__(self, "U_site", tuple(float(u) for u in self.U_site))
        if self.boundary not in ("open", "periodic"):
            raise SpecError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")
        values = (self.J, self.omega_x) + self.U_site
        if not np.all(np.isfinite(values)):
            raise SpecError("couplings must be finite")

    @property
    def L(self) -> int:
        return len(self.U_site)

    @classmethod
    def uniform(cls, L, J, U, omega_x=0.0, boundary="open"):
        return cls(J=J, U_site=(U,) * L, omega_x=omega_x, boundary=boundary)

    def bonds(self):
        """Nearest-neighbour bonds as 0-based ``(j, j+1)`` pairs."""
        out = [(j, j + 1) for j in range(self.L - 1)]
        # for L=2 the wrap-around bond would duplicate (0, 1)
        if self.boundary == "periodic" and self.L > 2:
            out.append((self.L - 1, 0))
        return out


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """Real symmetric operator on a sector, stored in CSR form."""

    matrix: sp.csr_matrix
    hermitian: bool = True

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def entries(self):
        """``(row, col, value)`` triplets of the stored nonzeros."""
        coo = self.matrix.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def norm_bound(self) -> float:
        """Cheap upper bound on the spectral norm (max absolute row sum)."""
        if self.matrix.nnz == 0:
            return 0.0
        return float(np.max(np.asarray(abs(self.matrix).sum(axis=1)).ravel()))

    def __matmul__(self, vec):
        return apply(self, vec)


def diagonal_energies(spec: HamiltonianSpec, sector: BasisSector) -> np.ndarray:
    occ = sector.states.astype(np.float64)
    u = np.asarray(spec.U_site)
    return (occ * (occ - 1.0)) @ u + spec.omega_x * sector.N


def build_hamiltonian(spec: HamiltonianSpec, sector: BasisSector) -> SparseOperator:
    if spec.L != sector.L:
        raise SpecError(f"spec has {spec.L} interaction strengths but sector has L={sector.L}")
    dim = sector.dim
    diag = diagonal_energies(spec, sector)
    bonds = spec.bonds()
    if bonds and spec.J != 0.0:
        rows, cols, vals = _kernels.hopping_triplets(
            sector.states, sector.binom, sector.N, bonds, spec.J
        )
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        vals = np.zeros(0)
    k = np.arange(dim, dtype=np.int64)
    rows = np.concatenate([k, rows])
    cols = np.concatenate([k, cols])
    vals = np.concatenate([diag, vals])
    mat = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return SparseOperator(mat)


def apply(op: SparseOperator, state_vector) -> np.ndarray:
    vec = np.asarray(state_vector)
    if vec.shape[0] != op.dim:
        raise DimensionError(f"vector of length {vec.shape[0]} for operator of dimension {op.dim}")
    return op.matrix @ vec
