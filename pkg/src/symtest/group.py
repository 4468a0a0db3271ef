"""Finite groups of unitaries: closure from generators, projector and twirl."""
import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ClosureExceeded, DimensionMismatch, NotUnitary
from .hamiltonian import PAULI
from .numerics import as_matrix, dagger, get_atol, is_unitary

log = logging.getLogger(__name__)

DEFAULT_CLOSURE_TOL = 1e-8

_ONE_QUBIT = {
    "I": PAULI["I"],
    "X": PAULI["X"],
    "Y": PAULI["Y"],
    "Z": PAULI["Z"],
    "H": np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2),
    "S": np.array([[1, 0], [0, 1j]], dtype=np.complex128),
}
_TWO_QUBIT = ("CNOT", "CX", "SWAP", "CZ")


def _bit(index, qubit, n):
    return (index >> (n - 1 - qubit)) & 1


def gate_matrix(name, qubits, n):
    """Matrix of a named gate on ``n`` qubits; qubit 0 is the most significant bit."""
    name = name.upper()
    qubits = [int(q) for q in qubits]
    if any(q < 0 or q >= n for q in qubits):
        raise ValueError(f"qubit indices {qubits} out of range for {n} qubits")
    dim = 2**n
    if name in _ONE_QUBIT:
        if len(qubits) != 1:
            raise ValueError(f"{name} acts on exactly one qubit")
        factors = [_ONE_QUBIT[name] if k == qubits[0] else PAULI["I"] for k in range(n)]
        out = factors[0]
        for f in factors[1:]:
            out = np.kron(out, f)
        return out
    if name not in _TWO_QUBIT:
        raise ValueError(f"unknown gate {name!r}")
    if len(qubits) != 2 or qubits[0] == qubits[1]:
        raise ValueError(f"{name} needs two distinct qubits")
    a, b = qubits
    out = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(dim):
        ba, bb = _bit(col, a, n), _bit(col, b, n)
        row, phase = col, 1.0
        if name in ("CNOT", "CX") and ba:
            row = col ^ (1 << (n - 1 - b))
        elif name == "SWAP" and ba != bb:
            row = col ^ (1 << (n - 1 - a)) ^ (1 << (n - 1 - b))
        elif name == "CZ" and ba and bb:
            phase = -1.0
        out[row, col] = phase
    return out


@dataclass(frozen=True)
class GateSpec:
    """A named gate with qubit indices, or an explicit unitary matrix."""

    name: str = None
    qubits: tuple = ()
    matrix: np.ndarray = None

    def realize(self, n):
        if self.matrix is not None:
            m = as_matrix(self.matrix, "generator")
            if m.shape[0] != 2**n:
                raise DimensionMismatch(f"generator is {m.shape}, expected dimension {2**n}")
        else:
            m = gate_matrix(self.name, self.qubits, n)
        if not is_unitary(m):
            raise NotUnitary(f"generator {self.name or 'matrix'} is not unitary")
        return m


@dataclass(frozen=True, eq=False)
class GroupRep:
    """Unitaries ``U(g)`` of a finite group, identity first, stacked as ``(|G|, d, d)``.

    ``phase_exact`` is False when the set only closes up to global phases
    (a projective representation); the projector is then not guaranteed to
    be idempotent, while the trace formula is unaffected.
    """

    elements: np.ndarray
    closure_tol: float = DEFAULT_CLOSURE_TOL
    phase_exact: bool = True

    @property
    def order(self):
        return self.elements.shape[0]

    @property
    def dim(self):
        return self.elements.shape[1]

    def __len__(self):
        return self.order

    def __iter__(self):
        return iter(self.elements)


def _freeze(stack):
    stack = np.ascontiguousarray(stack, dtype=np.complex128)
    stack.setflags(write=False)
    return stack


def close_generators(gens, dim=None, max_order=1024, closure_tol=DEFAULT_CLOSURE_TOL, qubits=None):
    """Multiplicative closure of ``gens`` (breadth-first, deterministic order).

    ``gens`` may hold :class:`GateSpec` objects (realized on ``qubits`` qubits,
    or ``log2(dim)``) or plain matrices. Elements are deduplicated entrywise,
    phases included.
    """
    if qubits is None and dim is not None:
        qubits = int(round(np.log2(dim)))
    mats = []
    for g in gens:
        if isinstance(g, GateSpec):
            if qubits is None:
                raise ValueError("need dim or qubits to realize named gates")
            mats.append(g.realize(qubits))
        else:
            m = as_matrix(g, "generator")
            if not is_unitary(m):
                raise NotUnitary("generator is not unitary")
            mats.append(m)
    if dim is None:
        if not mats:
            raise ValueError("dim is required when there are no generators")
        dim = mats[0].shape[0]
    for m in mats:
        if m.shape[0] != dim:
            raise DimensionMismatch(f"generator of dimension {m.shape[0]}, expected {dim}")

    buf = np.empty((max_order, dim, dim), dtype=np.complex128)
    buf[0] = np.eye(dim)
    count = 1
    queue = deque([0])
    while queue:
        idx = queue.popleft()
        for gen in mats:
            cand = buf[idx] @ gen
            if _kernels.find_match(buf, count, cand, closure_tol) >= 0:
                continue
            if count == max_order:
                raise ClosureExceeded(f"more than {max_order} distinct elements")
            buf[count] = cand
            queue.append(count)
            count += 1
    return GroupRep(_freeze(buf[:count]), closure_tol, True)


def rep_from_elements(elements, closure_tol=DEFAULT_CLOSURE_TOL):
    """Validate an explicit element list as a group (identity is moved to the front)."""
    stack = np.asarray([as_matrix(e, "element") for e in elements])
    dim = stack.shape[1]
    for m in stack:
        if not is_unitary(m, closure_tol):
            raise NotUnitary("element is not unitary")
    eye = np.eye(dim)
    where = _kernels.find_match(stack, len(stack), eye, closure_tol)
    if where < 0:
        raise ValueError("element list does not contain the identity")
    order = [where] + [k for k in range(len(stack)) if k != where]
    stack = stack[order]
    closure = closure_status(stack, closure_tol)
    if closure == "broken":
        raise ValueError("element list is not closed under multiplication, even up to phase")
    if closure == "projective":
        log.warning("element list closes only up to global phases; projector idempotency not guaranteed")
    return GroupRep(_freeze(stack), closure_tol, closure == "exact")


def _match_up_to_phase(stack, cand, tol):
    d = cand.shape[0]
    for k, m in enumerate(stack):
        overlap = np.vdot(m, cand) / d
        if abs(abs(overlap) - 1) < tol and np.max(np.abs(cand - overlap * m)) < tol:
            return k
    return -1


def closure_status(stack, tol=DEFAULT_CLOSURE_TOL):
    """``"exact"``, ``"projective"`` (closed only up to phase) or ``"broken"``."""
    stack = np.ascontiguousarray(stack, dtype=np.complex128)
    n = len(stack)
    status = "exact"
    for i in range(n):
        for j in range(n):
            prod = stack[i] @ stack[j]
            if _kernels.find_match(stack, n, prod, tol) >= 0:
                continue
            if _match_up_to_phase(stack, prod, tol) < 0:
                return "broken"
            status = "projective"
    return status


def inverse_indices(rep):
    """For each element, the index of its inverse (``U(g)^dag``); -1 if absent."""
    return [_kernels.find_match(rep.elements, rep.order, dagger(u), rep.closure_tol) for u in rep.elements]


def group_projector(rep):
    """``(1/|G|) sum_g conj(U(g)) (x) U(g)`` on the doubled space of dimension ``d^2``."""
    d = rep.dim
    out = np.zeros((d * d, d * d), dtype=np.complex128)
    for u in rep.elements:
        out += np.kron(u.conj(), u)
    return out / rep.order


def twirl(rep, x):
    """``(1/|G|) sum_g U(g) X U(g)^dag``."""
    x = as_matrix(x, "X")
    if x.shape[0] != rep.dim:
        raise DimensionMismatch(f"X has dimension {x.shape[0]}, group acts on {rep.dim}")
    return _kernels.twirl_sum(rep.elements, x)


def check_projector(rep, atol=None):
    """Return ``(hermitian, idempotent)`` flags for :func:`group_projector`."""
    atol = get_atol() if atol is None else atol
    p = group_projector(rep)
    herm = bool(np.max(np.abs(p - dagger(p))) <= atol)
    idem = bool(np.max(np.abs(p @ p - p)) <= atol)
    return herm, idem
