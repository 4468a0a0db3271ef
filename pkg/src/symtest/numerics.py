"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The absolute
entrywise tolerance used for Hermiticity/unitarity checks is a single
module-level setting, see :func:`set_atol`.
"""
import numpy as np

from . import _kernels
from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    EigendecompositionFailure,
    NotHermitian,
)

_ATOL = 1e-10


def get_atol():
    return _ATOL


def set_atol(value):
    """Set the global entrywise tolerance; returns the previous value."""
    global _ATOL
    if not value > 0:
        raise ValueError("tolerance must be positive")
    old, _ATOL = _ATOL, float(value)
    return old


def as_matrix(a, name="matrix"):
    """Validate and coerce to a square, finite complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def dagger(a):
    return a.conj().T


def is_hermitian(a, atol=None):
    atol = _ATOL if atol is None else atol
    return bool(np.max(np.abs(a - dagger(a))) <= atol)


def is_unitary(a, atol=None):
    atol = _ATOL if atol is None else atol
    return bool(np.max(np.abs(dagger(a) @ a - np.eye(a.shape[0]))) <= atol)


def eigh_checked(h, atol=None):
    h = as_matrix(h, "H")
    atol = _ATOL if atol is None else atol
    err = np.max(np.abs(h - dagger(h)))
    if err > atol:
        raise NotHermitian(f"max |H - H^dag| = {err:.3e} exceeds {atol:.1e}")
    try:
        return np.linalg.eigh((h + dagger(h)) / 2)
    except np.linalg.LinAlgError as exc:
        raise EigendecompositionFailure(str(exc)) from exc


def evolution_from_eigh(evals, evecs, t):
    return (evecs * np.exp(-1j * evals * t)) @ dagger(evecs)


def expm_hermitian_evolution(h, t):
    """Return ``exp(-i H t)`` via the eigendecomposition of Hermitian ``H``."""
    evals, evecs = eigh_checked(h)
    return evolution_from_eigh(evals, evecs, t)


def commutator(a, b):
    return a @ b - b @ a


def nested_commutator(h, u, n):
    """``[(H)^n, U] = [H, [H, ... [H, U]]]`` with ``n`` nestings; ``n = 0`` gives ``U``."""
    h = as_matrix(h, "H")
    u = as_matrix(u, "U")
    if h.shape != u.shape:
        raise DimensionMismatch(f"H is {h.shape}, U is {u.shape}")
    if n < 0:
        raise ValueError("nesting depth must be nonnegative")
    return _kernels.nested_commutators(h, u, n)[n]


def hs_norm(a):
    """Hilbert-Schmidt norm ``sqrt(Tr[A^dag A])``."""
    a = np.asarray(a)
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


def spectral_norm(a, method="svd", rtol=1e-10, max_iter=10_000, seed=0):
    """Largest singular value.

    ``method="power"`` runs power iteration on ``A^dag A`` until successive
    estimates agree to ``rtol``; it raises :class:`ConvergenceFailure`
    otherwise. The default uses a dense SVD.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return 0.0
    if method == "svd":
        return float(np.linalg.svd(a, compute_uv=False)[0])
    if method != "power":
        raise ValueError(f"unknown method {method!r}")
    gram = dagger(a) @ a
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = gram @ v
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        new = float(np.real(np.vdot(v, w)))
        v = w / nrm
        if abs(new - lam) <= rtol * abs(new):
            return float(np.sqrt(max(new, 0.0)))
        lam = new
    raise ConvergenceFailure(f"power iteration did not reach rtol={rtol} in {max_iter} steps")
