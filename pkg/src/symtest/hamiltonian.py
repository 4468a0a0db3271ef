"""Pauli-sum Hamiltonians, the two-spin NMR example and first-order Trotterization."""
import math
import re
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import BadWordLength, ExplicitMatrixUnsupported, NonRealCoefficient, NotHermitian
from .numerics import as_matrix, expm_hermitian_evolution, get_atol, is_hermitian, spectral_norm

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

_TERM_RE = re.compile(r"^\s*(?P<coeff>[^*]+?)\s*\*\s*(?P<word>[A-Za-z]+)\s*$")


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    word: str

    def __post_init__(self):
        coeff = self.coefficient
        if isinstance(coeff, complex):
            if coeff.imag != 0:
                raise NonRealCoefficient(f"coefficient {coeff} of {self.word} is not real")
            coeff = coeff.real
        coeff = float(coeff)
        if not math.isfinite(coeff):
            raise ValueError(f"coefficient of {self.word} is not finite")
        word = self.word.upper()
        if not word or any(ch not in PAULI for ch in word):
            raise ValueError(f"Pauli word {self.word!r} must use only I, X, Y, Z")
        object.__setattr__(self, "coefficient", coeff)
        object.__setattr__(self, "word", word)

    def matrix(self):
        return self.coefficient * word_matrix(self.word)


def word_matrix(word):
    """Kronecker product of single-qubit Paulis; ``word[0]`` is the leftmost factor."""
    return reduce(np.kron, (PAULI[ch] for ch in word))


def parse_pauli_term(text):
    """Parse ``"<coeff> * <WORD>"``, e.g. ``"-0.5 * ZI"``."""
    m = _TERM_RE.match(text)
    if m is None:
        raise ValueError(f"cannot parse Pauli term {text!r}; expected '<coeff> * <WORD>'")
    raw = m.group("coeff").replace(" ", "")
    try:
        coeff = complex(raw)
    except ValueError:
        raise ValueError(f"bad coefficient {raw!r} in {text!r}") from None
    if coeff.imag != 0:
        raise NonRealCoefficient(f"coefficient {raw} in {text!r} is not real")
    return PauliTerm(coeff.real, m.group("word"))


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """A Hamiltonian on ``qubits`` qubits, given by Pauli terms or an explicit matrix."""

    qubits: int
    terms: tuple = None
    explicit: np.ndarray = None
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.qubits < 1:
            raise ValueError("qubits must be positive")
        if (self.terms is None) == (self.explicit is None):
            raise ValueError("exactly one of terms / explicit must be given")
        if self.terms is not None:
            terms = tuple(t if isinstance(t, PauliTerm) else parse_pauli_term(t) for t in self.terms)
            for term in terms:
                if len(term.word) != self.qubits:
                    raise BadWordLength(
                        f"word {term.word!r} has length {len(term.word)}, expected {self.qubits}")
            object.__setattr__(self, "terms", terms)
        else:
            m = as_matrix(self.explicit, "explicit Hamiltonian")
            if m.shape[0] != 2**self.qubits:
                raise ValueError(f"explicit matrix is {m.shape}, expected dimension {2**self.qubits}")
            if not is_hermitian(m):
                raise NotHermitian("explicit Hamiltonian is not Hermitian")
            m = m.copy()
            m.setflags(write=False)
            object.__setattr__(self, "explicit", m)

    @property
    def dim(self):
        return 2**self.qubits

    @property
    def is_pauli(self):
        return self.terms is not None

    def matrix(self):
        if "matrix" not in self._cache:
            m = pauli_sum_to_matrix(self) if self.is_pauli else self.explicit
            m = np.array(m)
            m.setflags(write=False)
            self._cache["matrix"] = m
        return self._cache["matrix"]

    def norm(self):
        return spectral_norm(self.matrix())


def pauli_sum_to_matrix(spec):
    if not spec.is_pauli:
        raise ExplicitMatrixUnsupported("spec has no Pauli-term form")
    out = np.zeros((spec.dim, spec.dim), dtype=np.complex128)
    for term in spec.terms:
        out += term.matrix()
    return out


def build_nmr_hamiltonian(omega1, omega2, j):
    """Weakly J-coupled two-spin NMR Hamiltonian (hbar = 1, angular frequencies).

    Diagonal in the computational basis with entries
    ``(-w_avg + pi J/2, (dw - pi J)/2, -(dw + pi J)/2, w_avg + pi J/2)``,
    where ``w_avg = (w1 + w2)/2`` and ``dw = w2 - w1``. Returned in Pauli form
    ``-(w1/2) ZI - (w2/2) IZ + (pi J/2) ZZ``; :func:`nmr_matrix` gives the
    diagonal directly.
    """
    terms = (
        PauliTerm(-omega1 / 2, "ZI"),
        PauliTerm(-omega2 / 2, "IZ"),
        PauliTerm(math.pi * j / 2, "ZZ"),
    )
    return HamiltonianSpec(2, terms=terms, label=f"nmr({omega1}, {omega2}, {j})")


def nmr_matrix(omega1, omega2, j):
    avg = (omega1 + omega2) / 2
    dw = omega2 - omega1
    pj = math.pi * j
    return np.diag([-avg + pj / 2, (dw - pj) / 2, -(dw + pj) / 2, avg + pj / 2]).astype(np.complex128)


@dataclass(frozen=True)
class TrotterPlan:
    steps: int
    order: int = 1

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.order != 1:
            raise ValueError("only first-order product formulas are supported")


def _plan(plan):
    return plan if isinstance(plan, TrotterPlan) else TrotterPlan(int(plan))


def trotter_evolution(spec, t, plan):
    """``(prod_i exp(-i H_i t/r))^r`` with the product in term declaration order.

    Term 1 is the leftmost factor. An empty term list gives the identity.
    """
    if not spec.is_pauli:
        raise ExplicitMatrixUnsupported("Trotterization needs a Pauli-term Hamiltonian")
    plan = _plan(plan)
    step = np.eye(spec.dim, dtype=np.complex128)
    for term in spec.terms:
        step = step @ expm_hermitian_evolution(term.matrix(), t / plan.steps)
    return np.linalg.matrix_power(step, plan.steps)


def trotter_error(spec, t, plan):
    """Spectral-norm distance between the product formula and exact evolution."""
    approx = trotter_evolution(spec, t, plan)
    exact = expm_hermitian_evolution(spec.matrix(), t)
    return spectral_norm(approx - exact)


def hamiltonian_matrix(h):
    """Accept a :class:`HamiltonianSpec` or an array; return a validated Hermitian matrix."""
    if isinstance(h, HamiltonianSpec):
        return h.matrix()
    m = as_matrix(h, "H")
    if not is_hermitian(m, get_atol()):
        raise NotHermitian("H is not Hermitian")
    return m
