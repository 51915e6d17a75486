"""Optional numba acceleration.

Set ``PHONON_QUENCH_NUMBA=0`` to force the pure-numpy kernels (useful for
debugging and for the kernel benchmark). When numba is not importable the
numpy path is used automatically.
"""
import os

try:
    import numba
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func
        return decorator


def _flag_enabled(value):
    return value.strip().lower() not in ("0", "false", "no", "off", "")


USE_NUMBA = HAS_NUMBA and _flag_enabled(os.environ.get("PHONON_QUENCH_NUMBA", "1"))
