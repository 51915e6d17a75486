"""Exact diagonalization and time evolution.

Two independent propagators are provided:

* :func:`evolve_spectral` expands the initial state in the full eigenbasis,
  ``psi(t) = sum_a c_a exp(-i E_a t) |a>`` with ``c_a = <a|psi0>``;
* :func:`evolve_krylov` advances the state with short-iterate Lanczos steps
  and only needs matrix-vector products.
"""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .errors import ConvergenceError, InputError, SizingError
from .hamiltonian import SparseOperator

DENSE_CAP = 5000
KRYLOV_MAX_DIM = 64
NORM_TOL = 1e-6


class DegenerateGroundStateWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    energies: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    overlaps: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.energies.shape[0]

    def with_initial_state(self, psi0) -> "SpectralDecomposition":
        psi0 = check_normalized(psi0)
        return SpectralDecomposition(self.energies, self.eigenvectors,
                                     self.eigenvectors.conj().T @ psi0)


@dataclass(frozen=True, eq=False)
class EvolvedState:
    time: float
    amplitudes: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class GroundState:
    energy: float
    vector: np.ndarray = field(repr=False)
    gap: float
    degenerate: bool = False
    degenerate_indices: tuple = ()

    @property
    def warning(self) -> Optional[str]:
        if not self.degenerate:
            return None
        return f"near-degenerate ground level, eigenvalue indices {list(self.degenerate_indices)}"

    def __iter__(self):
        # allows ``energy, vector = ground_state(op)``
        yield self.energy
        yield self.vector


def check_normalized(psi0, tol=NORM_TOL) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=np.complex128)
    norm = np.linalg.norm(psi0)
    if abs(norm - 1.0) > tol:
        raise InputError(f"initial state must be normalized, |psi0| = {norm:.12g}")
    return psi0


def _fix_sign(vec):
    # deterministic global phase: largest-magnitude component real positive
    k = int(np.argmax(np.abs(vec)))
    return vec * (np.abs(vec[k]) / vec[k])


def full_diagonalize(op: SparseOperator, dense_cap: int = DENSE_CAP) -> SpectralDecomposition:
    if op.dim > dense_cap:
        raise SizingError(
            f"dimension {op.dim} exceeds the dense cap {dense_cap}; "
            "use ground_state() with evolve_krylov() instead"
        )
    energies, vectors = np.linalg.eigh(op.toarray())
    energies.setflags(write=False)
    vectors.setflags(write=False)
    return SpectralDecomposition(energies, vectors)


def ground_state(op: SparseOperator, dense_cap: int = DENSE_CAP,
                 degeneracy_tol: float = 1e-10) -> GroundState:
    """Lowest eigenpair; near-degeneracy is flagged, never resolved."""
    if op.dim <= dense_cap:
        energies, vectors = np.linalg.eigh(op.toarray())
        scale = max(np.max(np.abs(energies)), np.finfo(float).tiny)
    else:
        k = min(6, op.dim - 1)
        energies, vectors = spla.eigsh(op.matrix, k=k, which="SA", tol=1e-12)
        order = np.argsort(energies)
        energies, vectors = energies[order], vectors[:, order]
        scale = max(op.norm_bound(), np.finfo(float).tiny)
    e0 = float(energies[0])
    gap = float(energies[1] - energies[0]) if energies.shape[0] > 1 else np.inf
    degenerate_idx = tuple(int(k) for k in np.nonzero(energies - e0 < degeneracy_tol * scale)[0])
    degenerate = len(degenerate_idx) > 1
    if degenerate:
        warnings.warn(f"ground level is degenerate: indices {list(degenerate_idx)}",
                      DegenerateGroundStateWarning, stacklevel=2)
    vec = _fix_sign(vectors[:, 0].astype(np.complex128))
    if np.allclose(vec.imag, 0.0):
        vec = vec.real.astype(np.complex128)
    return GroundState(e0, vec, gap, degenerate, degenerate_idx if degenerate else ())


def _spectral_block(energies, vectors, coeffs, times):
    phases = np.exp(-1j * np.outer(energies, times)) * coeffs[:, None]
    return vectors @ phases


def evolve_spectral_matrix(sd: SpectralDecomposition, psi0, times, workers: int = 1) -> np.ndarray:
    """Amplitudes at all ``times`` as a ``(dim, len(times))`` array.

    With ``workers > 1`` the time grid is split into chunks evaluated on a
    thread pool; numpy releases the GIL inside the matrix products.
    """
    psi0 = check_normalized(psi0)
    times = np.asarray(times, dtype=float)
    coeffs = sd.eigenvectors.conj().T @ psi0
    if workers <= 1 or times.size < 2 * workers:
        return _spectral_block(sd.energies, sd.eigenvectors, coeffs, times)
    chunks = np.array_split(times, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(
            lambda ts: _spectral_block(sd.energies, sd.eigenvectors, coeffs, ts), chunks))
    return np.concatenate(parts, axis=1)


def evolve_spectral(sd: SpectralDecomposition, psi0, times: Sequence[float],
                    workers: int = 1) -> List[EvolvedState]:
    amps = evolve_spectral_matrix(sd, psi0, times, workers=workers)
    return [EvolvedState(float(t), amps[:, k]) for k, t in enumerate(times)]


# ---------------------------------------------------------------------------
# Krylov propagation
# ---------------------------------------------------------------------------

def _lanczos(matvec, v, m_max):
    """Lanczos basis with full reorthogonalization.

    Returns ``(V, alpha, beta)`` where ``V`` has ``m`` orthonormal columns,
    ``alpha`` the ``m`` diagonal and ``beta`` the ``m`` off-diagonal
    entries; ``beta[m-1]`` couples to the first vector outside the basis
    (zero on happy breakdown).
    """
    n = v.shape[0]
    m_max = min(m_max, n)
    V = np.zeros((n, m_max), dtype=np.complex128)
    alpha = np.zeros(m_max)
    beta = np.zeros(m_max)
    V[:, 0] = v
    m = m_max
    for j in range(m_max):
        w = matvec(V[:, j])
        alpha[j] = np.vdot(V[:, j], w).real
        for _ in range(2):
            w = w - V[:, :j + 1] @ (V[:, :j + 1].conj().T @ w)
        b = np.linalg.norm(w)
        beta[j] = b
        if j + 1 == m_max:
            break
        if b < 1e-13 * max(1.0, abs(alpha[j])):
            beta[j] = 0.0
            m = j + 1
            break
        V[:, j + 1] = w / b
    return V[:, :m], alpha[:m], beta[:m]


def _small_propagator(alpha, beta, tau):
    """First column of exp(-i tau T) and its last entry."""
    m = alpha.shape[0]
    if m == 1:
        col = np.array([np.exp(-1j * tau * alpha[0])])
    else:
        theta, S = sla.eigh_tridiagonal(alpha, beta[:m - 1])
        col = S @ (np.exp(-1j * tau * theta) * S[0, :])
    return col


def _krylov_step(op, psi, t_remaining, step_tol, m_max, min_step):
    """Advance ``psi`` by at most ``t_remaining``; returns (psi, tau, err)."""
    norm = np.linalg.norm(psi)
    V, alpha, beta = _lanczos(op.matrix.dot, psi / norm, m_max)
    tau = t_remaining
    while True:
        col = _small_propagator(alpha, beta, tau)
        err = norm * beta[-1] * abs(col[-1])
        if err <= step_tol * tau / t_remaining or err < 1e-15:
            return norm * (V @ col), tau, err
        tau *= 0.5
        if tau < min_step:
            raise ConvergenceError(
                f"Krylov step shrank below {min_step:.3g} without meeting tolerance", residual=err)


def evolve_krylov(op: SparseOperator, psi0, times: Sequence[float], tol: float = 1e-10,
                  m_max: int = KRYLOV_MAX_DIM, max_steps: int = 100_000) -> List[EvolvedState]:
    """Propagate ``psi0`` to each of ``times`` (non-negative) with Lanczos steps.

    The step tolerance is distributed over the time window so the
    accumulated 2-norm error at the last time stays below ``tol``.
    """
    if tol <= 0:
        raise InputError("tol must be positive")
    psi = check_normalized(psi0).copy()
    times = np.asarray(times, dtype=float)
    if times.size and np.min(times) < 0:
        raise InputError("evolve_krylov needs non-negative times")
    order = np.argsort(times, kind="stable")
    t_end = float(times[order[-1]]) if times.size else 0.0
    min_step = 1e-14 * max(t_end, 1.0)
    out = [None] * times.size
    t_now = 0.0
    steps = 0
    for idx in order:
        target = float(times[idx])
        while target - t_now > 0.0:
            remaining = target - t_now
            psi, tau, _ = _krylov_step(op, psi, remaining, tol * remaining / max(t_end, remaining),
                                       m_max, min_step)
            t_now = target if tau == remaining else t_now + tau
            steps += 1
            if steps > max_steps:
                raise ConvergenceError(f"Krylov propagation exceeded {max_steps} steps",
                                       residual=None)
        out[idx] = EvolvedState(target, psi.copy())
    return out
