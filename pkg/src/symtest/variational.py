"""Variational symmetry test: maximize the fixed-state acceptance probability.

The objective ``||T_G(e^{-iHt}) psi(theta)||^2`` is computed exactly from the
twirled evolution; gradients are central finite differences, steps use a
backtracking line search so the objective never decreases.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import BadParameterCount
from .simulator import make_rng, splitmix64
from .symcore import optimal_acceptance_exact, twirled_evolution


def ring_pairs(n):
    """CZ pairs of the entangling ring; a single pair for two qubits, none for one."""
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    return [(q, (q + 1) % n) for q in range(n)]


@dataclass(frozen=True, eq=False)
class Ansatz:
    """Layers of RY then RZ on every qubit followed by a CZ ring.

    ``theta`` is laid out as ``(layer, qubit, [ry, rz])`` flattened.
    """

    qubits: int
    layers: int
    theta: np.ndarray = None

    def __post_init__(self):
        if self.qubits < 1 or self.layers < 1:
            raise ValueError("qubits and layers must be positive")
        theta = np.zeros(self.n_params) if self.theta is None else np.asarray(self.theta, dtype=float).reshape(-1)
        if theta.shape[0] != self.n_params:
            raise BadParameterCount(f"expected {self.n_params} parameters, got {theta.shape[0]}")
        object.__setattr__(self, "theta", theta)

    @property
    def n_params(self):
        return 2 * self.qubits * self.layers

    def with_theta(self, theta):
        return Ansatz(self.qubits, self.layers, theta)


def ansatz_prepare(ansatz, theta=None):
    theta = ansatz.theta if theta is None else np.asarray(theta, dtype=float)
    if theta.shape[-1] != ansatz.n_params:
        raise BadParameterCount(f"expected {ansatz.n_params} parameters, got {theta.shape[-1]}")
    return _kernels.ansatz_states(theta.reshape(1, -1), ansatz.qubits, ansatz.layers, ring_pairs(ansatz.qubits))[0]


@dataclass
class OptimizerConfig:
    max_iters: int = 500
    grad_step: float = 1e-5
    init_rate: float = 1.0
    tol: float = 1e-7
    max_halvings: int = 50


@dataclass
class VariationalResult:
    final_value: float
    iterations: int
    trace: list
    theta_final: np.ndarray
    oracle_optimum: float
    converged: bool
    restart_values: list = field(default_factory=list)

    @property
    def gap(self):
        return self.oracle_optimum - self.final_value


class Objective:
    """Batched ``theta -> ||T psi(theta)||^2`` for a fixed twirled evolution ``T``."""

    def __init__(self, twirled, qubits, layers):
        self.twirled_t = np.ascontiguousarray(twirled.T)
        self.qubits = qubits
        self.layers = layers
        self.pairs = ring_pairs(qubits)
        self.evaluations = 0

    def batch(self, thetas):
        thetas = np.atleast_2d(thetas)
        self.evaluations += thetas.shape[0]
        psi = _kernels.ansatz_states(thetas, self.qubits, self.layers, self.pairs)
        out = psi @ self.twirled_t
        return np.sum(out.real**2 + out.imag**2, axis=1)

    def __call__(self, theta):
        return float(self.batch(theta)[0])

    def gradient(self, theta, step):
        p = theta.shape[0]
        shifts = np.eye(p) * step
        vals = self.batch(np.vstack([theta + shifts, theta - shifts]))
        return (vals[:p] - vals[p:]) / (2 * step)


def _ascend(objective, theta, config):
    value = objective(theta)
    trace = [value]
    rate = config.init_rate
    converged = False
    it = 0
    for it in range(config.max_iters):
        grad = objective.gradient(theta, config.grad_step)
        if np.max(np.abs(grad)) < config.tol:
            converged = True
            break
        step_rate = rate
        for _ in range(config.max_halvings):
            cand = theta + step_rate * grad
            cand_value = objective(cand)
            if cand_value >= value:
                break
            step_rate /= 2
        else:
            converged = True  # no ascent direction at resolvable step sizes
            break
        theta, value = cand, cand_value
        trace.append(value)
        # let the step grow again after a successful line search
        rate = min(step_rate * 2, config.init_rate * 64)
    else:
        it = config.max_iters
    return theta, value, trace, it, converged


def optimize_acceptance(h, rep, t, ansatz, config=None):
    """Gradient ascent from ``ansatz.theta``; returns a :class:`VariationalResult`."""
    config = config or OptimizerConfig()
    tw = twirled_evolution(h, rep, t)
    objective = Objective(tw, ansatz.qubits, ansatz.layers)
    theta, value, trace, iters, converged = _ascend(objective, np.array(ansatz.theta, dtype=float), config)
    oracle, _ = optimal_acceptance_exact(h, rep, t)
    return VariationalResult(value, iters, trace, theta, oracle, converged, [value])


def optimize_with_restarts(h, rep, t, qubits, layers, config=None, restarts=20, seed=0):
    """Best of ``restarts`` ascents from uniform random ``theta`` in ``[0, 2 pi)``.

    Restart ``k`` draws its start from a generator seeded with
    ``splitmix64(seed, k)``.
    """
    config = config or OptimizerConfig()
    tw = twirled_evolution(h, rep, t)
    oracle, _ = optimal_acceptance_exact(h, rep, t)
    best = None
    finals = []
    for k in range(restarts):
        rng = make_rng(splitmix64(seed, k))
        start = rng.uniform(0.0, 2 * math.pi, size=2 * qubits * layers)
        objective = Objective(tw, qubits, layers)
        theta, value, trace, iters, converged = _ascend(objective, start, config)
        finals.append(value)
        if best is None or value > best.final_value:
            best = VariationalResult(value, iters, trace, theta, oracle, converged)
    best.restart_values = finals
    return best
