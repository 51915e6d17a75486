"""Local observables: density, occupation projections, correlations.

Sites are 1-based throughout, matching the configuration files and CSV
output.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .basis import BasisSector, check_site
from .dynamics import SpectralDecomposition, check_normalized, evolve_spectral_matrix
from .errors import DomainError, InputError


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    site: int
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape:
            raise InputError(f"times {times.shape} and values {values.shape} differ in shape")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.shape[0]


def _probabilities(state, sector: BasisSector) -> np.ndarray:
    state = np.asarray(state)
    if state.shape[0] != sector.dim:
        raise InputError(f"state has length {state.shape[0]}, sector dimension is {sector.dim}")
    return np.abs(state) ** 2


def local_density(state, sector: BasisSector, i: int) -> float:
    occ = sector.occupations(i)
    return float(_probabilities(state, sector) @ occ)


def occupation_projection(state, sector: BasisSector, i: int, m: int) -> float:
    """Probability that site ``i`` holds exactly ``m`` phonons."""
    if not 0 <= m <= sector.N:
        raise DomainError(f"occupation m={m} outside 0..{sector.N}")
    mask = sector.occupations(i) == m
    return float(_probabilities(state, sector)[mask].sum())


def occupation_distribution(state, sector: BasisSector, i: int) -> np.ndarray:
    """``P(n_i = m)`` for ``m = 0..N``."""
    occ = sector.occupations(i).astype(np.int64)
    return np.bincount(occ, weights=_probabilities(state, sector), minlength=sector.N + 1)


def correlation(state, sector: BasisSector, i: int, j: int, tol: float = 1e-9) -> float:
    """Real part of ``<b_i^+ b_j>``; the imaginary part must vanish."""
    value = correlation_complex(state, sector, i, j)
    if abs(value.imag) > tol:
        raise InputError(f"<b_{i}^+ b_{j}> has imaginary part {value.imag:.3g}")
    return value.real


def correlation_complex(state, sector: BasisSector, i: int, j: int) -> complex:
    check_site(i, sector.L)
    check_site(j, sector.L)
    if i == j:
        return complex(local_density(state, sector, i))
    psi = np.asarray(state, dtype=np.complex128)
    if psi.shape[0] != sector.dim:
        raise InputError(f"state has length {psi.shape[0]}, sector dimension is {sector.dim}")
    return _kernels.hop_expectation(sector.states, sector.binom, sector.N, psi, i - 1, j - 1)


def gauge_sign(J: float, i: int, j: int) -> float:
    """Sign that maps <b_i^+ b_j> of the +J chain onto the -J chain.

    On a bipartite chain ``b_j -> (-1)^j b_j`` flips the sign of J and
    leaves densities untouched, so the order-parameter correlation is
    compared in the gauge where hopping lowers the energy.
    """
    return (-1.0) ** abs(i - j) if J > 0 else 1.0


def bond_correlations(state, sector: BasisSector, J: float) -> np.ndarray:
    """Gauge-fixed nearest-neighbour ``Delta_{j,j+1}`` for every open-chain bond."""
    return np.array([
        gauge_sign(J, j, j + 1) * correlation(state, sector, j, j + 1)
        for j in range(1, sector.L)
    ])


def zero_phonon_series(sd: SpectralDecomposition, psi0, sector: BasisSector, i: int,
                       times: Sequence[float], workers: int = 1) -> ObservableSeries:
    """``n_{i0}(t)`` by evolving the state and projecting onto ``n_i = 0``.

    Only the rows of the eigenvector matrix with an empty site ``i`` are
    propagated, so the cost per time point is O(dim * rows).
    """
    psi0 = check_normalized(psi0)
    times = np.asarray(times, dtype=float)
    mask = sector.occupations(i) == 0
    if not np.any(mask):
        return ObservableSeries(i, times, np.zeros_like(times))
    coeffs = sd.eigenvectors.conj().T @ psi0
    restricted = SpectralDecomposition(sd.energies, sd.eigenvectors[mask])
    chunks = [times] if workers <= 1 else np.array_split(times, workers)

    def block(ts):
        amps = restricted.eigenvectors @ (np.exp(-1j * np.outer(sd.energies, ts)) * coeffs[:, None])
        return np.sum(np.abs(amps) ** 2, axis=0)

    if len(chunks) == 1:
        values = block(times)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = np.concatenate(list(pool.map(block, chunks)))
    return ObservableSeries(i, times, values)


def density_series(sd: SpectralDecomposition, psi0, sector: BasisSector, i: int,
                   times: Sequence[float], workers: int = 1) -> ObservableSeries:
    amps = evolve_spectral_matrix(sd, psi0, times, workers=workers)
    occ = sector.occupations(i).astype(float)
    return ObservableSeries(i, times, occ @ (np.abs(amps) ** 2))


def zero_phonon_series_literal(sd: SpectralDecomposition, psi0, sector: BasisSector, i: int,
                               times: Sequence[float]):
    """Double sum over eigenstates with the zero-occupation overlaps.

        n_{i0}(t) = sum_{a,b,k0} c_a^* c_b cos((E_a - E_b) t) d_{a k0} d_{k0 b}

    where ``d_{a k0} = <a|k0>`` and ``k0`` runs over basis states with site
    ``i`` empty. Returns ``(series, residue)``; ``residue`` is the largest
    magnitude of the dropped sine part over the grid, which must vanish for
    the cosine form to be exact. Costs O(dim^2) per time point.
    """
    psi0 = check_normalized(psi0)
    times = np.asarray(times, dtype=float)
    mask = sector.occupations(i) == 0
    c = sd.eigenvectors.conj().T @ psi0
    d = sd.eigenvectors[mask]                     # rows k0, columns alpha: <k0|alpha>
    overlap = d.conj().T @ d                      # sum_k0 <alpha|k0><k0|beta>
    weights = np.conj(c)[:, None] * c[None, :] * overlap
    gaps = sd.energies[:, None] - sd.energies[None, :]
    values = np.empty(times.shape[0])
    residue = 0.0
    for k, t in enumerate(times):
        arg = gaps * t
        cos_sum = np.sum(weights * np.cos(arg))
        sin_sum = np.sum(weights * np.sin(arg))
        values[k] = cos_sum.real
        residue = max(residue, abs(sin_sum), abs(cos_sum.imag))
    return ObservableSeries(i, times, values), residue


def oscillation_amplitude(series: ObservableSeries) -> float:
    """Peak-to-trough variation ``max - min`` over the series."""
    if len(series) == 0:
        raise InputError("oscillation amplitude of an empty series")
    return float(np.max(series.values) - np.min(series.values))
