"""Time the numba and numpy versions of the Fock-basis kernels.

    python benchmarks/bench_kernels.py [--sizes 8x8 10x10 12x10] [--repeat 5]

Both versions are imported directly from ``phonon_quench._kernels`` so the
``PHONON_QUENCH_NUMBA`` flag does not matter here. The first numba call is
excluded from timing and reported separately; it includes JIT
compilation only the first time a kernel signature is seen.
"""
import argparse
import time

import numpy as np

from phonon_quench import HamiltonianSpec, _kernels
from phonon_quench._accel import HAS_NUMBA
from phonon_quench.basis import sector_dimension


def best_of(func, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_size(L, N, repeat, rng):
    dim = sector_dimension(L, N)
    binom = _kernels.binomial_table(N + L, L)
    states = _kernels.enumerate_states_numpy(L, N, dim)
    bonds = HamiltonianSpec.uniform(L, 1.0, 1.0).bonds()
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    cases = {
        "enumerate": (lambda: _kernels.enumerate_states_numpy(L, N, dim),
                      lambda: _kernels.enumerate_states_numba(L, N, dim)),
        "rank": (lambda: _kernels.rank_states_numpy(states, binom, N),
                 lambda: _kernels.rank_states_numba(states, binom, N)),
        "hopping": (lambda: _kernels.hopping_triplets_numpy(states, binom, N, bonds, 1.0),
                    lambda: _kernels.hopping_triplets_numba(states, binom, N, bonds, 1.0)),
        "hop_expect": (lambda: _kernels.hop_expectation_numpy(states, binom, N, psi, 0, 1),
                       lambda: _kernels.hop_expectation_numba(states, binom, N, psi, 0, 1)),
    }
    rows = []
    for name, (np_fn, nb_fn) in cases.items():
        t_np = best_of(np_fn, repeat)
        if HAS_NUMBA:
            t0 = time.perf_counter()
            nb_fn()
            first = time.perf_counter() - t0
            t_nb = best_of(nb_fn, repeat)
        else:
            first = t_nb = float("nan")
        rows.append((f"{L}x{N}", dim, name, t_np, t_nb, first))
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", nargs="+", default=["6x6", "8x8", "10x10", "12x8"],
                        help="sectors as LxN")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'L x N':>7} {'dim':>9} {'kernel':>11} {'numpy [s]':>11} {'numba [s]':>11} "
          f"{'speedup':>8} {'first call [s]':>15}")
    for size in args.sizes:
        L, N = (int(v) for v in size.lower().split("x"))
        for label, dim, name, t_np, t_nb, first in bench_size(L, N, args.repeat, rng):
            print(f"{label:>7} {dim:>9} {name:>11} {t_np:>11.4g} {t_nb:>11.4g} "
                  f"{t_np / t_nb:>8.1f} {first:>15.3g}")
    if not HAS_NUMBA:
        print("numba is not installed; only the numpy column is meaningful")


if __name__ == "__main__":
    main()
