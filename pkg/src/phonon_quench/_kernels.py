"""Hot loops over the Fock basis.

Each kernel exists twice: a vectorized numpy version (``*_numpy``) and a
numba version (``*_numba``). The unsuffixed names are bound at import time
according to :data:`phonon_quench._accel.USE_NUMBA`. Both versions must
return identical results; ``tests/test_kernels.py`` and
``benchmarks/bench_kernels.py`` exercise them side by side.

States are stored row-wise in lexicographically *descending* order, e.g.
for L=2, N=2: (2,0), (1,1), (0,2).
"""
import itertools

import numpy as np

from ._accel import USE_NUMBA, njit


def binomial_table(nmax, kmax):
    """C(n, k) for 0 <= n <= nmax, 0 <= k <= kmax as an int64 array."""
    table = np.zeros((nmax + 1, kmax + 1), dtype=np.int64)
    table[:, 0] = 1
    for n in range(1, nmax + 1):
        for k in range(1, min(n, kmax) + 1):
            table[n, k] = table[n - 1, k - 1] + table[n - 1, k]
    return table


def occupation_dtype(n_total):
    return np.int16 if n_total <= np.iinfo(np.int16).max else np.int32


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def enumerate_states_numpy(n_sites, n_total, dim):
    dtype = occupation_dtype(n_total)
    if n_sites == 1:
        return np.full((1, 1), n_total, dtype=dtype)
    # stars and bars: bar positions in lexicographic order give occupations
    # in ascending lexicographic order, so the result is reversed.
    slots = n_total + n_sites - 1
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(slots), n_sites - 1)),
        dtype=np.int64, count=dim * (n_sites - 1),
    )
    bars = flat.reshape(dim, n_sites - 1)
    edges = np.empty((dim, n_sites + 1), dtype=np.int64)
    edges[:, 0] = -1
    edges[:, 1:-1] = bars
    edges[:, -1] = slots
    occ = np.diff(edges, axis=1) - 1
    return occ[::-1].astype(dtype)


def rank_states_numpy(states, binom, n_total):
    states = np.atleast_2d(np.asarray(states, dtype=np.int64))
    n_sites = states.shape[1]
    if n_sites == 1:
        return np.zeros(states.shape[0], dtype=np.int64)
    before = np.zeros_like(states)
    before[:, 1:] = np.cumsum(states[:, :-1], axis=1)
    remaining = n_total - before
    ranks = np.zeros(states.shape[0], dtype=np.int64)
    for j in range(n_sites - 1):
        m = n_sites - j
        free = remaining[:, j] - states[:, j] - 1
        ok = free >= 0
        ranks[ok] += binom[free[ok] + m - 1, m - 1]
    return ranks


def hopping_triplets_numpy(states, binom, n_total, bonds, amplitude):
    rows, cols, vals = [], [], []
    occ = states.astype(np.int64)
    k_all = np.arange(occ.shape[0], dtype=np.int64)
    for a, b in bonds:
        for dst, src in ((a, b), (b, a)):
            sel = occ[:, src] > 0
            if not np.any(sel):
                continue
            target = occ[sel].copy()
            factor = np.sqrt((target[:, dst] + 1) * target[:, src])
            target[:, dst] += 1
            target[:, src] -= 1
            rows.append(rank_states_numpy(target, binom, n_total))
            cols.append(k_all[sel])
            vals.append(amplitude * factor)
    if not rows:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), np.zeros(0)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def hop_expectation_numpy(states, binom, n_total, psi, i, j):
    """<psi| b_i^dagger b_j |psi> for i != j."""
    occ = states.astype(np.int64)
    sel = np.nonzero(occ[:, j] > 0)[0]
    if sel.size == 0:
        return 0.0 + 0.0j
    target = occ[sel].copy()
    factor = np.sqrt((target[:, i] + 1) * target[:, j])
    target[:, i] += 1
    target[:, j] -= 1
    dest = rank_states_numpy(target, binom, n_total)
    return complex(np.sum(np.conj(psi[dest]) * psi[sel] * factor))


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

@njit(cache=True)
def _rank_one(state, binom, n_total):
    n_sites = state.shape[0]
    rank = 0
    remaining = n_total
    for j in range(n_sites - 1):
        m = n_sites - j
        free = remaining - state[j] - 1
        if free >= 0:
            rank += binom[free + m - 1, m - 1]
        remaining -= state[j]
    return rank


@njit(cache=True)
def _enumerate_kernel(n_sites, n_total, dim, out):
    state = np.zeros(n_sites, dtype=np.int64)
    state[0] = n_total
    for k in range(dim):
        for j in range(n_sites):
            out[k, j] = state[j]
        # successor in descending order: take one phonon off the last
        # non-final nonzero site and put the whole tail right after it
        pos = -1
        for j in range(n_sites - 2, -1, -1):
            if state[j] > 0:
                pos = j
                break
        if pos < 0:
            break
        tail = 1
        for j in range(pos + 1, n_sites):
            tail += state[j]
            state[j] = 0
        state[pos] -= 1
        state[pos + 1] = tail


def enumerate_states_numba(n_sites, n_total, dim):
    out = np.empty((dim, n_sites), dtype=occupation_dtype(n_total))
    _enumerate_kernel(n_sites, n_total, dim, out)
    return out


@njit(cache=True)
def _rank_many(states, binom, n_total, out):
    for k in range(states.shape[0]):
        out[k] = _rank_one(states[k], binom, n_total)


def rank_states_numba(states, binom, n_total):
    states = np.ascontiguousarray(np.atleast_2d(np.asarray(states, dtype=np.int64)))
    out = np.empty(states.shape[0], dtype=np.int64)
    _rank_many(states, binom, n_total, out)
    return out


@njit(cache=True)
def _hopping_kernel(states, binom, n_total, bonds, amplitude, rows, cols, vals):
    n_states, n_sites = states.shape
    work = np.empty(n_sites, dtype=np.int64)
    count = 0
    for k in range(n_states):
        for q in range(bonds.shape[0]):
            for orient in range(2):
                if orient == 0:
                    dst = bonds[q, 0]
                    src = bonds[q, 1]
                else:
                    dst = bonds[q, 1]
                    src = bonds[q, 0]
                n_src = states[k, src]
                if n_src == 0:
                    continue
                n_dst = states[k, dst]
                for j in range(n_sites):
                    work[j] = states[k, j]
                work[dst] += 1
                work[src] -= 1
                rows[count] = _rank_one(work, binom, n_total)
                cols[count] = k
                vals[count] = amplitude * np.sqrt((n_dst + 1.0) * n_src)
                count += 1
    return count


def hopping_triplets_numba(states, binom, n_total, bonds, amplitude):
    bonds = np.asarray(bonds, dtype=np.int64).reshape(-1, 2)
    size = states.shape[0] * bonds.shape[0] * 2
    rows = np.empty(size, dtype=np.int64)
    cols = np.empty(size, dtype=np.int64)
    vals = np.empty(size, dtype=np.float64)
    count = _hopping_kernel(states, binom, n_total, bonds, float(amplitude), rows, cols, vals)
    return rows[:count], cols[:count], vals[:count]


@njit(cache=True)
def _hop_expectation_kernel(states, binom, n_total, psi, i, j):
    n_sites = states.shape[1]
    work = np.empty(n_sites, dtype=np.int64)
    acc = 0.0 + 0.0j
    for k in range(states.shape[0]):
        n_j = states[k, j]
        if n_j == 0:
            continue
        n_i = states[k, i]
        for s in range(n_sites):
            work[s] = states[k, s]
        work[i] += 1
        work[j] -= 1
        dest = _rank_one(work, binom, n_total)
        acc += np.conj(psi[dest]) * psi[k] * np.sqrt((n_i + 1.0) * n_j)
    return acc


def hop_expectation_numba(states, binom, n_total, psi, i, j):
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    return complex(_hop_expectation_kernel(states, binom, n_total, psi, i, j))


if USE_NUMBA:
    enumerate_states = enumerate_states_numba
    rank_states = rank_states_numba
    hopping_triplets = hopping_triplets_numba
    hop_expectation = hop_expectation_numba
else:
    enumerate_states = enumerate_states_numpy
    rank_states = rank_states_numpy
    hopping_triplets = hopping_triplets_numpy
    hop_expectation = hop_expectation_numpy
