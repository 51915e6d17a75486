"""Fixed-N Fock basis of L bosonic modes.

Basis states are occupation tuples ``(n_1, ..., n_L)`` with ``sum == N``,
ordered lexicographically descending::

    >>> [s for s in enumerate_sector(2, 2)]
    [(2, 0), (1, 1), (0, 2)]

Ranking is combinatorial (no hash map): the ordinal of a state is the
number of sector states that are lexicographically larger.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterator, Sequence, Tuple

import numpy as np

from . import _kernels
from .errors import DomainError, MembershipError, RangeError, SizingError

#: Default upper bound on the sector dimension.
DEFAULT_DIM_CAP = 200_000

FockState = Tuple[int, ...]


def sector_dimension(n_sites: int, n_total: int) -> int:
    """C(N+L-1, L-1)."""
    return comb(n_total + n_sites - 1, n_sites - 1)


@dataclass(frozen=True, eq=False)
class BasisSector:
    """Enumerated sector of ``N`` bosons on ``L`` sites.

    ``states`` is a read-only ``(dim, L)`` integer array; row ``k`` is the
    state with ordinal ``k``. Instances are immutable and can be shared
    between threads and pickled to worker processes.
    """

    L: int
    N: int
    states: np.ndarray = field(repr=False)
    binom: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    def __len__(self) -> int:
        return self.dim

    def __iter__(self) -> Iterator[FockState]:
        for row in self.states:
            yield tuple(int(x) for x in row)

    def __getitem__(self, k: int) -> FockState:
        return unrank(k, self)

    def index_of(self, state: Sequence[int]) -> int:
        return rank(state, self)

    def occupations(self, site: int) -> np.ndarray:
        """Occupation of 1-based ``site`` in every basis state."""
        return self.states[:, check_site(site, self.L) - 1]


def check_site(site: int, n_sites: int) -> int:
    if not 1 <= site <= n_sites:
        raise RangeError(f"site {site} outside 1..{n_sites}")
    return site


def enumerate_sector(L: int, N: int, dim_cap: int = DEFAULT_DIM_CAP) -> BasisSector:
    """Enumerate all states of ``N`` bosons on ``L`` sites."""
    if L < 1:
        raise DomainError(f"number of sites must be >= 1, got L={L}")
    if N < 0:
        raise DomainError(f"phonon number must be >= 0, got N={N}")
    dim = sector_dimension(L, N)
    if dim > dim_cap:
        raise SizingError(
            f"sector dimension C({N + L - 1},{L - 1}) = {dim} exceeds the cap of {dim_cap}"
        )
    states = _kernels.enumerate_states(L, N, dim)
    states.setflags(write=False)
    binom = _kernels.binomial_table(N + L, L)
    binom.setflags(write=False)
    return BasisSector(L=L, N=N, states=states, binom=binom)


def _validate_member(state, sector: BasisSector) -> np.ndarray:
    arr = np.asarray(state)
    if arr.ndim != 1 or arr.shape[0] != sector.L:
        raise MembershipError(f"state {tuple(state)} has length {arr.size}, sector has L={sector.L}")
    if np.any(arr < 0):
        raise MembershipError(f"state {tuple(state)} has negative occupations")
    if int(arr.sum()) != sector.N:
        raise MembershipError(
            f"state {tuple(state)} holds {int(arr.sum())} phonons, sector has N={sector.N}"
        )
    return arr.astype(np.int64)


def rank(state: Sequence[int], sector: BasisSector) -> int:
    arr = _validate_member(state, sector)
    return int(_kernels.rank_states(arr[None, :], sector.binom, sector.N)[0])


def rank_many(states: np.ndarray, sector: BasisSector) -> np.ndarray:
    """Vectorized :func:`rank` without per-state membership checks."""
    return _kernels.rank_states(states, sector.binom, sector.N)


def unrank(k: int, sector: BasisSector) -> FockState:
    if not 0 <= k < sector.dim:
        raise RangeError(f"ordinal {k} outside 0..{sector.dim - 1}")
    L, remaining = sector.L, sector.N
    out = []
    for j in range(L - 1):
        m = L - j
        # states whose site-j occupation is n: C(remaining - n + m - 2, m - 2)
        n = remaining
        while True:
            block = comb(remaining - n + m - 2, m - 2)
            if k < block:
                break
            k -= block
            n -= 1
        out.append(n)
        remaining -= n
    out.append(remaining)
    return tuple(out)


def unit_filling_index(sector: BasisSector) -> int:
    """Ordinal of the state with one phonon per site (requires N == L)."""
    if sector.N != sector.L:
        raise DomainError(f"unit filling needs N == L, got L={sector.L}, N={sector.N}")
    return rank((1,) * sector.L, sector)
