"""Acceptance probabilities, their expansions and the variational lower bounds.

This is the matrix-arithmetic route: everything is computed from ``H`` and
the group elements directly, without simulating a circuit.
"""
import logging
import math
import threading
from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np

from . import _kernels
from .errors import BoundViolation, DimensionMismatch, NonRealProbability, UnnormalizedState
from .group import group_projector, twirl
from .hamiltonian import hamiltonian_matrix
from .numerics import dagger, eigh_checked, evolution_from_eigh, spectral_norm

log = logging.getLogger(__name__)

SYMMETRIC_THRESHOLD = 1e-10
INCONCLUSIVE_THRESHOLD = 1e-8
PROB_SLACK = 1e-9
DEFAULT_SERIES_ORDER = 12


class _EighCache:
    """Eigendecompositions keyed by the raw bytes of ``H``."""

    def __init__(self, maxsize=64):
        self._data = {}
        self._lock = threading.Lock()
        self._maxsize = maxsize

    def get(self, h):
        key = (h.shape, h.tobytes())
        hit = self._data.get(key)
        if hit is not None:
            return hit
        value = eigh_checked(h)
        with self._lock:
            if len(self._data) >= self._maxsize:
                self._data.pop(next(iter(self._data)))
            self._data.setdefault(key, value)
            return self._data[key]


_eigh_cache = _EighCache()


def _prepare(h, rep):
    hm = hamiltonian_matrix(h)
    if hm.shape[0] != rep.dim:
        raise DimensionMismatch(f"H has dimension {hm.shape[0]}, group acts on {rep.dim}")
    return hm


def evolution(h, t):
    """``exp(-iHt)`` using the cached eigendecomposition of ``H``."""
    hm = hamiltonian_matrix(h)
    evals, evecs = _eigh_cache.get(hm)
    return evolution_from_eigh(evals, evecs, t)


def tau(h, t):
    return spectral_norm(hamiltonian_matrix(h)) * abs(t)


def clip_probability(p, slack=PROB_SLACK):
    """Clip to [0, 1]; refuses to hide a violation larger than ``slack``."""
    if p < -slack or p > 1 + slack:
        raise ValueError(f"probability {p!r} outside [0, 1] by more than {slack}")
    return min(max(p, 0.0), 1.0)


def _real_probability(z, what):
    if abs(z.imag) > 1e-8:
        raise NonRealProbability(f"{what} has imaginary part {z.imag:.3e}")
    if abs(z.imag) > 1e-10:
        log.warning("%s has imaginary residue %.3e", what, z.imag)
    return float(z.real)


def acceptance_probability_trace(h, rep, t):
    """``(1/(d|G|)) sum_g Tr[U^dag e^{iHt} U e^{-iHt}]`` (raw, unclipped)."""
    hm = _prepare(h, rep)
    v = evolution(hm, t)
    vd = dagger(v)
    total = 0j
    for u in rep.elements:
        # Tr[U^dag V^dag U V] as an elementwise sum avoids two products
        total += np.sum((dagger(u) @ vd).T * (u @ v))
    return _real_probability(total / (rep.dim * rep.order), "trace-route probability")


def maximally_entangled(d):
    """``|Phi> = d^{-1/2} sum_i |i>|i>`` as a vector of length ``d^2``."""
    return np.eye(d, dtype=np.complex128).reshape(-1) / math.sqrt(d)


def choi_state(h, t):
    """``(I (x) e^{-iHt}) Phi (I (x) e^{iHt})`` as a unit-trace density matrix."""
    hm = hamiltonian_matrix(h)
    d = hm.shape[0]
    vec = np.kron(np.eye(d), evolution(hm, t)) @ maximally_entangled(d)
    return np.outer(vec, vec.conj())


def acceptance_probability_choi(h, rep, t):
    """``Tr[Pi^G Phi^t_RB]`` with the projector built on the doubled space."""
    hm = _prepare(h, rep)
    z = np.trace(group_projector(rep) @ choi_state(hm, t))
    return _real_probability(z, "Choi-route probability")


def commutator_norms(h, rep):
    """``(C, per_element)`` with ``C = (1/(d|G|)) sum_g ||[U(g), H]||_2^2``."""
    hm = _prepare(h, rep)
    per = [float(np.sum(np.abs(u @ hm - hm @ u) ** 2)) for u in rep.elements]
    return sum(per) / (rep.dim * rep.order), per


def series_coefficients(h, rep, nmax):
    """``c_n = (1/(d|G|)) sum_g ||[(H)^n, U(g)]||_2^2`` for ``n = 0..nmax``."""
    hm = _prepare(h, rep)
    acc = np.zeros(nmax + 1)
    for u in rep.elements:
        stack = _kernels.nested_commutators(hm, u, nmax)
        acc += np.sum(np.abs(stack) ** 2, axis=(1, 2))
    return acc / (rep.dim * rep.order)


def twirl_form_coefficient(h, rep, n):
    """Alternative coefficient ``f(n)/d`` built from twirled powers of ``H``.

    ``(1/d) sum_k binom(2n, k) (2 - delta_{k,n}) (-1)^k Tr[T(H^{2n-k}) H^k]``
    with the normalized twirl; equals ``series_coefficients(...)[n]``. Kept
    as a diagnostic only.
    """
    hm = _prepare(h, rep)
    powers = [np.eye(rep.dim, dtype=np.complex128)]
    for _ in range(2 * n):
        powers.append(powers[-1] @ hm)
    total = 0j
    for k in range(n + 1):
        weight = comb(2 * n, k) * (2 - (k == n)) * (-1) ** k
        total += weight * np.trace(twirl(rep, powers[2 * n - k]) @ powers[k])
    return float(total.real) / rep.dim


@dataclass(frozen=True)
class SeriesValue:
    value: float
    remainder: float
    order: int


def acceptance_probability_series(h, rep, t, order=DEFAULT_SERIES_ORDER):
    """Partial sum of the even nested-commutator expansion through ``t^{2N}``.

    The remainder estimate is twice the magnitude of the first omitted term.
    """
    if order < 0:
        raise ValueError("truncation order must be nonnegative")
    c = series_coefficients(h, rep, order + 1)
    terms = [(-1) ** n * t ** (2 * n) / factorial(2 * n) * c[n] for n in range(order + 2)]
    return SeriesValue(float(sum(terms[: order + 1])), float(2.0 * abs(terms[order + 1])), order)


def second_order_acceptance(h, rep, t):
    """``(1 - t^2 C / 2, C)``; accurate to fourth order in ``||H|| t``."""
    c, _ = commutator_norms(h, rep)
    return 1.0 - t * t * c / 2.0, c


def _check_state(psi, d):
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if psi.shape[0] != d:
        raise DimensionMismatch(f"state has length {psi.shape[0]}, expected {d}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise UnnormalizedState(f"||psi|| = {np.linalg.norm(psi)!r}")
    return psi


def twirled_evolution(h, rep, t):
    hm = _prepare(h, rep)
    return twirl(rep, evolution(hm, t))


def fixed_state_acceptance(h, rep, t, psi):
    """``||T_G(e^{-iHt}) psi||^2`` for a pure input state."""
    hm = _prepare(h, rep)
    psi = _check_state(psi, rep.dim)
    out = twirl(rep, evolution(hm, t)) @ psi
    return float(np.real(np.vdot(out, out)))


def kadison_schwarz_gap(h, rep, psi):
    """``<T(H^2) - T(H)^2>_psi``; nonnegative for every state."""
    hm = _prepare(h, rep)
    psi = _check_state(psi, rep.dim)
    th = twirl(rep, hm)
    op = twirl(rep, hm @ hm) - th @ th
    return float(np.real(np.vdot(psi, op @ psi)))


def optimal_acceptance_exact(h, rep, t):
    """``(||T_G(e^{-iHt})||_inf^2, maximizing input state)`` via SVD."""
    tw = twirled_evolution(h, rep, t)
    _, s, vh = np.linalg.svd(tw)
    return float(s[0] ** 2), vh[0].conj()


@dataclass(frozen=True)
class BoundSet:
    optimal_exact: float
    bound_unitary_commutators: float
    bound_small_t: float
    small_t_valid: bool
    bound_nested: float
    nested_valid: bool
    nested_order: int
    nested_truncated_sum: float = field(default=float("nan"))
    tau: float = field(default=float("nan"))

    def valid_bounds(self):
        out = {"unitary_commutators": self.bound_unitary_commutators}
        if self.small_t_valid:
            out["small_t"] = self.bound_small_t
        if self.nested_valid:
            out["nested"] = self.bound_nested
        return out


def variational_lower_bounds(h, rep, t, order=DEFAULT_SERIES_ORDER):
    """Lower bounds on the optimal fixed-state acceptance probability.

    * ``1 - (2/|G|) sum_g ||[U, e^{-iHt}]||_inf`` (always valid);
    * ``1 - (2|t|/|G|) sum_g ||[U, H]||_inf - 4 tau^2``, flagged valid for ``tau < 1``;
    * ``(1 - sum_{n>=1} |t|^n/n! avg_g ||[(H)^n, U]||_inf)^2``, summed through
      ``n = order`` plus a rigorous tail bound
      ``avg_g ||[(H)^N, U]||_inf sum_{n>N} |t|^n (2||H||)^{n-N} / n!``;
      flagged valid while the bracket is nonnegative.
    """
    hm = _prepare(h, rep)
    at = abs(t)
    hnorm = spectral_norm(hm)
    tau_val = hnorm * at
    v = evolution(hm, t)
    g = rep.order

    b_unitary = 1.0 - 2.0 / g * sum(spectral_norm(u @ v - v @ u) for u in rep.elements)
    b_small = 1.0 - 2.0 * at / g * sum(spectral_norm(u @ hm - hm @ u) for u in rep.elements) - 4.0 * tau_val**2

    nested = np.zeros(order + 1)
    for u in rep.elements:
        stack = _kernels.nested_commutators(hm, u, order)
        nested += [spectral_norm(m) for m in stack]
    nested /= g
    partial = sum(at**n / factorial(n) * nested[n] for n in range(1, order + 1))
    tail = 0.0
    if nested[order] > 0 and at > 0:
        term = at ** (order + 1) / factorial(order + 1) * 2.0 * hnorm
        n = order + 1
        while True:
            tail += term
            n += 1
            term *= 2.0 * hnorm * at / n
            if term <= 1e-18 * max(tail, 1e-300):
                break
        tail *= nested[order]
    bracket = 1.0 - partial - tail
    opt, _ = optimal_acceptance_exact(hm, rep, t)
    bounds = BoundSet(
        optimal_exact=opt,
        bound_unitary_commutators=float(b_unitary),
        bound_small_t=float(b_small),
        small_t_valid=bool(tau_val < 1.0),
        bound_nested=float(bracket**2),
        nested_valid=bool(bracket >= 0.0),
        nested_order=order,
        nested_truncated_sum=float(partial),
        tau=tau_val,
    )
    for name, value in bounds.valid_bounds().items():
        if value > opt + 1e-9:
            raise BoundViolation(f"{name} bound {value!r} exceeds optimum {opt!r}")
    return bounds


def gentle_measurement_check(h, rep, t, tol=1e-9):
    """``(Tr[Pi Phi] == 1, Phi == Pi Phi Pi)`` evaluated numerically.

    The second flag compares ``||Phi - Pi Phi Pi||_2^2`` with ``2 tol``: for a
    pure Choi state this squared distance is exactly ``1 - p^2``, about
    ``2 (1 - p)``, so both flags use the same scale.
    """
    hm = _prepare(h, rep)
    proj = group_projector(rep)
    phi = choi_state(hm, t)
    p = float(np.real(np.trace(proj @ phi)))
    p_is_one = abs(1.0 - p) <= tol
    dist2 = float(np.sum(np.abs(phi - proj @ phi @ dagger(proj)) ** 2))
    return p_is_one, dist2 <= 2 * tol


def verdict(c):
    if c < SYMMETRIC_THRESHOLD:
        return "symmetric"
    if c < INCONCLUSIVE_THRESHOLD:
        return "inconclusive"
    return "asymmetric"
