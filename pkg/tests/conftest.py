import numpy as np
import pytest

from symtest import GateSpec, build_nmr_hamiltonian, close_generators
from symtest.hamiltonian import HamiltonianSpec, PauliTerm

ACCEPTANCE_LINES = []

WORDS_2Q = [a + b for a in "IXYZ" for b in "IXYZ" if a + b != "II"]


@pytest.fixture(scope="session")
def nmr():
    return build_nmr_hamiltonian(1.0, 2.0, 0.1)


@pytest.fixture(scope="session")
def d3():
    return close_generators([GateSpec("CNOT", (0, 1)), GateSpec("SWAP", (0, 1))], qubits=2)


@pytest.fixture(scope="session")
def z2z2():
    return close_generators([GateSpec("Z", (0,)), GateSpec("Z", (1,))], qubits=2)


def random_pauli_hamiltonian(rng, max_norm=2.0):
    """Random 2-qubit Pauli sum rescaled to spectral norm in [0.5, max_norm]."""
    coeffs = rng.standard_normal(len(WORDS_2Q))
    raw = HamiltonianSpec(2, terms=tuple(PauliTerm(c, w) for c, w in zip(coeffs, WORDS_2Q)))
    scale = rng.uniform(0.5, max_norm) / raw.norm()
    return HamiltonianSpec(2, terms=tuple(PauliTerm(c * scale, w) for c, w in zip(coeffs, WORDS_2Q)))


def random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2


def random_state(rng, d):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def record(criterion, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
