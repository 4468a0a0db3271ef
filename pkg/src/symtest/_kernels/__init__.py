"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``SYMTEST_DISABLE_NUMBA`` is unset or falsy. Both paths are always
importable as ``numpy_backend`` / ``numba_backend`` (the latter is ``None``
without numba) so they can be compared directly.
"""
import os

import numpy as np

from . import _np as numpy_backend

try:
    from . import _jit as numba_backend
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_backend = None

_disabled = os.environ.get("SYMTEST_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

BACKEND = "numba" if numba_backend is not None and not _disabled else "numpy"
_impl = numba_backend if BACKEND == "numba" else numpy_backend


def _c(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def nested_commutators(h, u, nmax):
    """Stack ``[(H)^n, U]`` for ``n = 0..nmax``, shape ``(nmax + 1, d, d)``."""
    return _impl.nested_commutators(_c(h), _c(u), int(nmax))


def twirl_sum(elements, x):
    """Group average ``(1/|G|) sum_g U X U^dag`` over a stack of unitaries."""
    return _impl.twirl_sum(_c(elements), _c(x))


def find_match(elements, count, cand, tol):
    """Index of the first of ``elements[:count]`` entrywise within ``tol`` of ``cand``, else -1."""
    return int(_impl.find_match(_c(elements), int(count), _c(cand), float(tol)))


def controlled_apply(mats, state):
    """Apply ``mats[g]`` to row ``g`` of a ``(|G|, d)`` control-by-system state."""
    return _impl.controlled_apply(_c(mats), _c(state))


def ansatz_states(thetas, n, layers, pairs):
    """Statevectors of the layered RY/RZ + CZ ansatz for a batch of parameter rows."""
    thetas = np.ascontiguousarray(np.atleast_2d(thetas), dtype=np.float64)
    pairs = np.ascontiguousarray(np.asarray(pairs, dtype=np.int64).reshape(-1, 2))
    return _impl.ansatz_states(thetas, int(n), int(layers), pairs)


def count_accepts(xs, us, probs):
    """Number of shots with ``us[k] < probs[xs[k]]``."""
    return int(_impl.count_accepts(
        np.ascontiguousarray(xs, dtype=np.int64),
        np.ascontiguousarray(us, dtype=np.float64),
        np.ascontiguousarray(probs, dtype=np.float64),
    ))
