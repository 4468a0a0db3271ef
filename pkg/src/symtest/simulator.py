"""Statevector simulation of the two symmetry-test circuits and shot sampling.

The control register is a single qudit of dimension ``|G|`` prepared
directly in the uniform superposition ``|+>_C``. Acceptance is the squared
norm after projecting the control onto ``|+>_C``.

Circuit layouts:

* ``choi``: ``|Phi>_RA``, evolve ``A`` by ``e^{-iHt}``, then controlled
  ``conj(U(g)) (x) U(g)`` on ``RB``. Splitting the evolution across ``R``
  and ``A`` with the transpose trick halves depth on hardware but does not
  change the state, so it is not modelled.
* ``mixed``: system input ``psi``, controlled ``U(g)^dag``, ``e^{-iHt}``,
  controlled ``U(g)``; i.e. ``(1/sqrt|G|) sum_g |g> U(g) e^{-iHt} U(g)^dag |psi>``.
  The maximally mixed input is the uniform average over basis inputs.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, UnnormalizedState
from .hamiltonian import hamiltonian_matrix
from .numerics import dagger
from .symcore import evolution, maximally_entangled

NORM_TOL = 1e-10
SHOT_BATCH = 1 << 16

_MASK64 = (1 << 64) - 1


def splitmix64(seed, index):
    """Sub-seed ``index`` of master ``seed`` (SplitMix64 applied to ``seed + (index+1) * golden``).

    This derivation fixes how shot batches and optimizer restarts are
    seeded, so results do not depend on how work is split across workers.
    """
    z = (int(seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


@dataclass(frozen=True, eq=False)
class CircuitInstance:
    """One symmetry-test circuit.

    ``input`` is ``"maximally_mixed"``, a basis index (int) or a state vector.
    ``choi`` mode always starts from the maximally entangled state.
    """

    mode: str
    H: object
    rep: object
    t: float
    input: object = "maximally_mixed"

    def __post_init__(self):
        if self.mode not in ("choi", "mixed"):
            raise ValueError(f"mode must be 'choi' or 'mixed', got {self.mode!r}")
        d = hamiltonian_matrix(self.H).shape[0]
        if d != self.rep.dim:
            raise DimensionMismatch(f"H has dimension {d}, group acts on {self.rep.dim}")
        if self.mode == "choi" and not _is_mixed(self.input):
            raise ValueError("choi mode takes no input state; it uses the doubled register")
        if isinstance(self.input, (int, np.integer)):
            if not 0 <= self.input < d:
                raise DimensionMismatch(f"basis index {self.input} out of range for dimension {d}")
        elif not _is_mixed(self.input):
            psi = np.asarray(self.input, dtype=np.complex128).reshape(-1)
            if psi.shape[0] != d:
                raise DimensionMismatch(f"state has length {psi.shape[0]}, expected {d}")
            if abs(np.linalg.norm(psi) - 1) > NORM_TOL:
                raise UnnormalizedState("input state is not normalized")

    @property
    def dim(self):
        return self.rep.dim


def _is_mixed(inp):
    return isinstance(inp, str) and inp == "maximally_mixed"


def _check_norm(state):
    nrm = float(np.sum(np.abs(state) ** 2))
    if abs(nrm - 1.0) > NORM_TOL:
        raise AssertionError(f"statevector norm drifted to {nrm!r}")


def _project_plus(state):
    # <+|_C (x) I applied to a (|G|, D) array
    amp = state.sum(axis=0) / math.sqrt(state.shape[0])
    return float(np.real(np.vdot(amp, amp)))


def _run_mixed(rep, v, psi):
    g = rep.order
    state = np.repeat(psi[None, :] / math.sqrt(g), g, axis=0)
    _check_norm(state)
    state = _kernels.controlled_apply(np.conj(np.transpose(rep.elements, (0, 2, 1))), state)
    _check_norm(state)
    state = state @ v.T
    _check_norm(state)
    state = _kernels.controlled_apply(rep.elements, state)
    _check_norm(state)
    return _project_plus(state)


def _run_choi(rep, v):
    d, g = rep.dim, rep.order
    phi = np.kron(np.eye(d), v) @ maximally_entangled(d)
    state = np.repeat(phi[None, :] / math.sqrt(g), g, axis=0)
    _check_norm(state)
    doubled = np.asarray([np.kron(u.conj(), u) for u in rep.elements])
    state = _kernels.controlled_apply(doubled, state)
    _check_norm(state)
    return _project_plus(state)


def basis_acceptance(instance):
    """Exact acceptance probability for each computational basis input (mixed mode)."""
    v = evolution(instance.H, instance.t)
    eye = np.eye(instance.dim, dtype=np.complex128)
    return np.array([_run_mixed(instance.rep, v, eye[x]) for x in range(instance.dim)])


def simulate_exact(instance):
    """Exact acceptance probability of the circuit."""
    v = evolution(instance.H, instance.t)
    if instance.mode == "choi":
        return _run_choi(instance.rep, v)
    inp = instance.input
    if _is_mixed(inp):
        return float(np.mean(basis_acceptance(instance)))
    if isinstance(inp, (int, np.integer)):
        psi = np.zeros(instance.dim, dtype=np.complex128)
        psi[int(inp)] = 1.0
    else:
        psi = np.asarray(inp, dtype=np.complex128).reshape(-1)
    return _run_mixed(instance.rep, v, psi)


@dataclass(frozen=True)
class ShotRecord:
    shots: int
    accepts: int
    estimate: float
    std_error: float
    seed: int


def _accept_table(instance):
    """Per-basis acceptance probabilities used by the sampler, clipped into [0, 1]."""
    if instance.mode == "mixed" and _is_mixed(instance.input):
        probs = basis_acceptance(instance)
    else:
        probs = np.array([simulate_exact(instance)])
    return np.clip(probs, 0.0, 1.0)


def _batch(probs, seed, index, size):
    rng = make_rng(splitmix64(seed, index))
    xs = rng.integers(0, probs.shape[0], size=size)
    us = rng.random(size)
    return _kernels.count_accepts(xs, us, probs)


def sample_shots(instance, shots, seed, jobs=1):
    """Emulate ``shots`` runs of the circuit.

    Each shot draws a uniform basis input (maximally mixed input only) and
    then one Bernoulli outcome with that input's exact acceptance
    probability. Shots are split into fixed batches of ``SHOT_BATCH`` whose
    generators are seeded by ``splitmix64(seed, batch_index)``, so the
    record is identical for any ``jobs``.
    """
    shots = int(shots)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = _accept_table(instance)
    sizes = [SHOT_BATCH] * (shots // SHOT_BATCH)
    if shots % SHOT_BATCH:
        sizes.append(shots % SHOT_BATCH)
    if jobs > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(lambda ks: _batch(probs, seed, ks[0], ks[1]), enumerate(sizes)))
    else:
        counts = [_batch(probs, seed, k, size) for k, size in enumerate(sizes)]
    accepts = int(sum(counts))
    est = accepts / shots
    return ShotRecord(shots, accepts, est, math.sqrt(est * (1 - est) / shots), int(seed))
