"""Local interaction quench ``U_i -> -U_i`` and J/U sweeps.

A run prepares the ground state of the uniform chain at ``U_init``, flips
the sign of the interaction on one site and records the zero-phonon
probability ``n_{i0}(t)`` and the density ``<n_i>(t)`` at the measured
site. Times are sampled uniformly on ``[0, t_max / U_init]`` so results
are reported against the dimensionless ``t * U_init``.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from .basis import BasisSector, check_site, enumerate_sector, unit_filling_index
from .dynamics import (DENSE_CAP, GroundState, evolve_krylov, full_diagonalize,
                       ground_state)
from .errors import DomainError, InputError
from .hamiltonian import HamiltonianSpec, build_hamiltonian
from .observables import (ObservableSeries, bond_correlations, density_series,
                          local_density, occupation_projection, oscillation_amplitude,
                          zero_phonon_series)

DEFAULT_T_MAX = 20.0
DEFAULT_SAMPLES = 400
INITIAL_STATES = ("ground", "fock_unit_filling")


def default_site(L: int) -> int:
    return math.ceil(L / 2)


@dataclass(frozen=True)
class QuenchSpec:
    L: int
    N: int
    J: float
    U_init: float
    quench_site: Optional[int] = None
    measure_site: Optional[int] = None
    t_max: float = DEFAULT_T_MAX
    samples: int = DEFAULT_SAMPLES
    boundary: str = "open"
    omega_x: float = 0.0
    initial_state: str = "ground"
    # U_final[i] = quench_factor * U_init; -1 is the sign flip, +1 means no quench
    quench_factor: float = -1.0
    allow_any_sign: bool = False

    def __post_init__(self):
        if self.quench_site is None:
            object.__setattr__(self, "quench_site", default_site(self.L))
        if self.measure_site is None:
            object.__setattr__(self, "measure_site", self.quench_site)
        check_site(self.quench_site, self.L)
        check_site(self.measure_site, self.L)
        if self.samples < 1:
            raise InputError("samples must be positive")
        if self.t_max < 0:
            raise InputError("t_max must be non-negative")
        if self.initial_state not in INITIAL_STATES:
            raise InputError(f"initial_state must be one of {INITIAL_STATES}")
        if self.U_init == 0:
            raise DomainError("U_init must be nonzero: times are measured in units of 1/U_init")
        if not self.allow_any_sign and (self.J < 0 or self.U_init < 0):
            raise DomainError("J >= 0 and U_init > 0 required unless allow_any_sign is set")

    @property
    def u_initial(self) -> np.ndarray:
        return np.full(self.L, float(self.U_init))

    @property
    def u_final(self) -> np.ndarray:
        u = self.u_initial
        u[self.quench_site - 1] = self.quench_factor * self.U_init
        return u

    @property
    def ju(self) -> float:
        return self.J / self.U_init

    def time_grid(self) -> np.ndarray:
        """Sample times in the energy units of ``U_init``."""
        return np.linspace(0.0, self.t_max, self.samples) / abs(self.U_init)

    def initial_hamiltonian(self) -> HamiltonianSpec:
        return HamiltonianSpec(self.J, self.u_initial, self.omega_x, self.boundary)

    def final_hamiltonian(self) -> HamiltonianSpec:
        return HamiltonianSpec(self.J, self.u_final, self.omega_x, self.boundary)


@dataclass(frozen=True, eq=False)
class QuenchResult:
    spec: QuenchSpec
    ground_energy: float
    final_energy: float
    overlap_weights: Optional[np.ndarray] = field(repr=False)
    n0: ObservableSeries = field(repr=False)
    density: ObservableSeries = field(repr=False)
    degeneracy_warning: bool = False

    @property
    def tu(self) -> np.ndarray:
        """Dimensionless time axis ``t * U_init``."""
        return self.n0.times * abs(self.spec.U_init)

    @property
    def amplitude(self) -> float:
        return oscillation_amplitude(self.n0)


def _initial_state(spec: QuenchSpec, sector: BasisSector):
    if spec.initial_state == "fock_unit_filling":
        psi = np.zeros(sector.dim, dtype=np.complex128)
        psi[unit_filling_index(sector)] = 1.0
        return psi, None
    gs = ground_state(build_hamiltonian(spec.initial_hamiltonian(), sector))
    return gs.vector, gs


def run_quench(spec: QuenchSpec, sector: Optional[BasisSector] = None,
               workers: int = 1) -> QuenchResult:
    if sector is None:
        sector = enumerate_sector(spec.L, spec.N)
    elif (sector.L, sector.N) != (spec.L, spec.N):
        raise InputError("sector does not match the quench spec")
    psi0, gs = _initial_state(spec, sector)
    h_final = build_hamiltonian(spec.final_hamiltonian(), sector)
    times = spec.time_grid()
    site = spec.measure_site
    final_energy = float(np.vdot(psi0, h_final.matrix @ psi0).real)

    if sector.dim <= DENSE_CAP:
        sd = full_diagonalize(h_final)
        coeffs = sd.eigenvectors.conj().T @ psi0
        weights = np.abs(coeffs) ** 2
        n0 = zero_phonon_series(sd, psi0, sector, site, times, workers=workers)
        dens = density_series(sd, psi0, sector, site, times, workers=workers)
    else:
        weights = None
        states = evolve_krylov(h_final, psi0, times)
        n0 = ObservableSeries(site, times, [occupation_projection(s.amplitudes, sector, site, 0)
                                            for s in states])
        dens = ObservableSeries(site, times, [local_density(s.amplitudes, sector, site)
                                              for s in states])
    ground_energy = gs.energy if gs is not None else float(
        np.vdot(psi0, build_hamiltonian(spec.initial_hamiltonian(), sector).matrix @ psi0).real)
    return QuenchResult(
        spec=spec,
        ground_energy=ground_energy,
        final_energy=final_energy,
        overlap_weights=weights,
        n0=n0,
        density=dens,
        degeneracy_warning=bool(gs is not None and gs.degenerate),
    )


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    ju: float
    amplitude: float
    mean_n0: float
    min_n0: float
    max_n0: float
    degenerate: bool = False


@dataclass(frozen=True)
class CrossoverPoint:
    ju: float
    delta_avg: float
    delta_central: float
    gap: float
    degenerate: bool = False


def _check_ratios(values, name="ju_values"):
    values = [float(v) for v in values]
    if not values:
        raise InputError(f"{name} is empty")
    if any(v <= 0 for v in values):
        raise InputError(f"{name} must be positive")
    return values


def _sweep_job(args):
    spec, sector = args
    res = run_quench(spec, sector)
    v = res.n0.values
    return SweepPoint(spec.ju, float(v.max() - v.min()), float(v.mean()),
                      float(v.min()), float(v.max()), res.degeneracy_warning)


def _map(func, jobs, workers):
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(jobs) <= 1:
        return [func(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        # map preserves input order regardless of completion order
        return list(pool.map(func, jobs))


def sweep_max_variation(base: QuenchSpec, ju_values: Sequence[float],
                        workers: Optional[int] = None) -> List[SweepPoint]:
    """One quench per J/U ratio, varying ``U_init`` at the fixed ``base.J``."""
    ju_values = _check_ratios(ju_values)
    if base.J <= 0:
        raise DomainError("sweeps vary U at fixed J, so base.J must be positive")
    sector = enumerate_sector(base.L, base.N)
    jobs = [(replace(base, U_init=base.J / r), sector) for r in ju_values]
    return _map(_sweep_job, jobs, workers)


def _crossover_job(args):
    L, N, J, U, boundary, sector = args
    h = build_hamiltonian(HamiltonianSpec.uniform(L, J, U, boundary=boundary), sector)
    gs = ground_state(h)
    bonds = bond_correlations(gs.vector, sector, J)
    central = bonds[(L - 1) // 2] if L % 2 == 0 else bonds[L // 2 - 1]
    return CrossoverPoint(J / U, float(bonds.mean()), float(central), gs.gap, gs.degenerate)


def crossover_curve(L: int, N: int, J: float, u_values: Sequence[float],
                    boundary: str = "open", workers: Optional[int] = None) -> List[CrossoverPoint]:
    """Ground-state nearest-neighbour correlation for each ``U`` at fixed ``J``.

    ``delta_avg`` averages the gauge-fixed ``<b_j^+ b_{j+1}>`` over the open
    chain's bonds, ``delta_central`` is the bond at the chain centre.
    """
    if L < 2:
        raise InputError("the bond correlation needs at least two sites")
    if J <= 0:
        raise DomainError("J must be positive")
    u_values = _check_ratios(u_values, "u_values")
    sector = enumerate_sector(L, N)
    jobs = [(L, N, J, u, boundary, sector) for u in u_values]
    return _map(_crossover_job, jobs, workers)


def crossover_curve_ju(L: int, N: int, ju_values: Sequence[float], J: float = 1.0,
                       boundary: str = "open", workers: Optional[int] = None):
    """:func:`crossover_curve` parametrized by J/U ratios."""
    ju_values = _check_ratios(ju_values)
    return crossover_curve(L, N, J, [J / r for r in ju_values], boundary, workers)


def steepest_crossover(points: Sequence[CrossoverPoint]) -> float:
    """J/U at the steepest rise of ``delta_avg`` against ``log(J/U)``.

    Returns the geometric midpoint of the steepest finite-difference
    segment of the curve (points sorted by J/U).
    """
    pts = sorted(points, key=lambda p: p.ju)
    if len(pts) < 2:
        raise InputError("need at least two crossover points")
    x = np.log10([p.ju for p in pts])
    y = np.array([p.delta_avg for p in pts])
    slopes = np.diff(y) / np.diff(x)
    k = int(np.argmax(slopes))
    return float(10 ** (0.5 * (x[k] + x[k + 1])))
