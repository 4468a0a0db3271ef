"""End-to-end acceptance criteria.

Each test prints one ``[PASS|FAIL] criterion N`` line; the lines are also
collected into the pytest terminal summary. Run with ``pytest -s`` to see
them inline.
"""
import math
import time

import numpy as np
import pytest

from symtest import symcore
from symtest.hamiltonian import HamiltonianSpec, PauliTerm, TrotterPlan, trotter_error
from symtest.simulator import CircuitInstance, sample_shots, simulate_exact
from symtest.variational import optimize_with_restarts

import oracle
from conftest import random_pauli_hamiltonian, random_state, record
from oracle import ORACLE_D3

pytestmark = pytest.mark.acceptance

TIMES_RANDOM = (0.1, 0.7, 1.3)
# order high enough that the series remainder is far below 1e-9 on [0.2, 2]
DENSE_SERIES_ORDER = 40


def _circuit(h, rep, t):
    return simulate_exact(CircuitInstance("mixed", h, rep, t))


@pytest.fixture(scope="module")
def random_instances(d3, z2z2):
    rng = np.random.default_rng(20240611)
    hams = [random_pauli_hamiltonian(rng) for _ in range(20)]
    return [(h, rep, t) for h in hams for rep in (z2z2, d3) for t in TIMES_RANDOM]


def test_criterion_1_flat_curve(nmr, z2z2):
    start = time.perf_counter()
    worst = 0.0
    for t in np.linspace(0, 2 * np.pi, 50):
        vals = [
            symcore.acceptance_probability_trace(nmr, z2z2, t),
            symcore.acceptance_probability_choi(nmr, z2z2, t),
            symcore.acceptance_probability_series(nmr, z2z2, t, order=12).value,
            _circuit(nmr, z2z2, t),
            simulate_exact(CircuitInstance("choi", nmr, z2z2, t)),
        ]
        worst = max(worst, max(abs(v - 1) for v in vals))
    elapsed = time.perf_counter() - start
    ok = z2z2.order == 4 and worst < 1e-10 and elapsed < 10
    record(1, ok, f"|G|={z2z2.order}, max |P-1|={worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_criterion_2_asymmetric_decay(nmr, d3):
    grid = np.union1d(np.linspace(0.2, 2.0, 181), list(ORACLE_D3))
    max_p, spread, worst_remainder = 0.0, 0.0, 0.0
    for t in grid:
        s = symcore.acceptance_probability_series(nmr, d3, t, order=DENSE_SERIES_ORDER)
        vals = [
            symcore.acceptance_probability_trace(nmr, d3, t),
            symcore.acceptance_probability_choi(nmr, d3, t),
            s.value,
            _circuit(nmr, d3, t),
        ]
        max_p = max(max_p, max(vals))
        spread = max(spread, max(vals) - min(vals))
        worst_remainder = max(worst_remainder, s.remainder)
    frozen_err = max(abs(symcore.acceptance_probability_trace(nmr, d3, t) - p) for t, p in ORACLE_D3.items())
    ok = d3.order == 6 and max_p < 1 - 1e-6 and spread < 1e-9 and frozen_err < 1e-9
    record(2, ok, f"|G|={d3.order}, max P={max_p:.6f}, method spread={spread:.1e}, "
                  f"oracle err={frozen_err:.1e}, series remainder<={worst_remainder:.1e}")
    assert ok


def test_criterion_2_live_oracle(nmr, d3):
    # independent high-precision recomputation off the frozen grid
    for t in (0.25, 0.95, 1.75):
        expected = float(oracle.p_acc(oracle.mp.mpf(t)).real)
        assert abs(symcore.acceptance_probability_trace(nmr, d3, t) - expected) < 1e-9


def test_criterion_3_route_equivalence(random_instances):
    choi_err = circ_err = 0.0
    for h, rep, t in random_instances:
        p = symcore.acceptance_probability_trace(h, rep, t)
        choi_err = max(choi_err, abs(p - symcore.acceptance_probability_choi(h, rep, t)))
        circ_err = max(circ_err, abs(p - _circuit(h, rep, t)))
    ok = len(random_instances) == 120 and choi_err < 1e-9 and circ_err < 1e-9
    record(3, ok, f"{len(random_instances)} instances, max |trace-choi|={choi_err:.1e}, "
                  f"max |trace-circuit|={circ_err:.1e}")
    assert ok


def test_criterion_4_evenness(random_instances):
    worst = max(
        abs(symcore.acceptance_probability_trace(h, rep, t) - symcore.acceptance_probability_trace(h, rep, -t))
        for h, rep, t in random_instances
    )
    ok = worst < 1e-12
    record(4, ok, f"max |P(t)-P(-t)|={worst:.1e}")
    assert ok


def test_criterion_5_second_order(nmr, d3):
    ratios = []
    for t in (0.02, 0.04, 0.08):
        approx, c = symcore.second_order_acceptance(nmr, d3, t)
        ratios.append(abs(symcore.acceptance_probability_trace(nmr, d3, t) - approx) / t**4)
    steps = [max(a, b) / min(a, b) for a, b in zip(ratios, ratios[1:])]
    ok = c > 0 and all(r > 0 for r in ratios) and max(steps) < 2
    record(5, ok, f"C={c:.6f}, remainder/t^4={[f'{r:.5f}' for r in ratios]}")
    assert ok


def test_criterion_6_series_convergence(nmr, d3):
    exact = symcore.acceptance_probability_trace(nmr, d3, 0.5)
    errs = [abs(symcore.acceptance_probability_series(nmr, d3, 0.5, order=n).value - exact) for n in (2, 4, 8, 12)]
    ok = all(a > b for a, b in zip(errs, errs[1:])) and errs[-1] < 1e-8
    record(6, ok, "errors N=2,4,8,12: " + ", ".join(f"{e:.1e}" for e in errs))
    assert ok


def test_criterion_7_trotter(nmr):
    commuting = max(trotter_error(nmr, t, TrotterPlan(1)) for t in (0.5, 1.0, 3.0, 2 * np.pi))
    h = HamiltonianSpec(2, terms=(PauliTerm(1.0, "XI"), PauliTerm(1.0, "ZZ")))
    steps = [4, 8, 16, 32, 64]
    errs = [trotter_error(h, 0.5, TrotterPlan(r)) for r in steps]
    slope = np.polyfit(np.log(steps), np.log(errs), 1)[0]
    ok = commuting < 1e-12 and all(a > b for a, b in zip(errs, errs[1:])) and -2.2 <= slope <= -0.8
    record(7, ok, f"commuting err={commuting:.1e}, slope={slope:.3f}")
    assert ok


def test_criterion_8_variational(nmr, d3):
    start = time.perf_counter()
    res = optimize_with_restarts(nmr, d3, 1.0, qubits=2, layers=3, restarts=20, seed=0)
    elapsed = time.perf_counter() - start
    opt = res.oracle_optimum
    svd_ref = float(oracle.svd_optimum(oracle.mp.mpf(1)))
    bounds = symcore.variational_lower_bounds(nmr, d3, 1.0).valid_bounds()
    # also check the bounds at other times, where they are not all trivial
    bound_ok = all(v <= opt + 1e-9 for v in bounds.values())
    for t in (0.05, 0.2, 0.5, 2.0):
        bs = symcore.variational_lower_bounds(nmr, d3, t)
        bound_ok &= all(v <= bs.optimal_exact + 1e-9 for v in bs.valid_bounds().values())
    over = max(res.restart_values) - opt
    ok = (abs(opt - svd_ref) < 1e-9 and abs(res.final_value - opt) < 1e-3 and over <= 1e-9
          and bound_ok and elapsed < 60)
    record(8, ok, f"best={res.final_value:.9f}, oracle={opt:.9f}, max overshoot={over:.1e}, "
                  f"bounds={ {k: round(v, 6) for k, v in bounds.items()} }, {elapsed:.1f}s")
    assert ok


def test_criterion_9_kadison_schwarz(nmr, d3, z2z2):
    rng = np.random.default_rng(99)
    worst = min(symcore.kadison_schwarz_gap(nmr, rep, random_state(rng, 4)) for rep in (z2z2, d3) for _ in range(100))
    ok = worst >= -1e-12
    record(9, ok, f"min gap over 200 states={worst:.2e}")
    assert ok


def test_criterion_10_shot_statistics(nmr, d3):
    shots = 100_000
    inst = CircuitInstance("mixed", nmr, d3, 1.0)
    p = simulate_exact(inst)
    runs = [sample_shots(inst, shots, seed) for seed in range(10)]
    replay = all(sample_shots(inst, shots, r.seed) == r for r in runs)
    rms = math.sqrt(np.mean([(r.estimate - p) ** 2 for r in runs]))
    ratio = rms / math.sqrt(p * (1 - p) / shots)
    ok = 0.5 <= ratio <= 2.0 and replay
    record(10, ok, f"RMS/binomial={ratio:.3f}, replayable={replay}")
    assert ok


def test_criterion_11_gentle_measurement(nmr, d3, z2z2, random_instances):
    instances = [(nmr, z2z2, t) for t in np.linspace(0, 2 * np.pi, 50)]
    instances += [(nmr, d3, t) for t in np.linspace(0.2, 2.0, 50)]
    instances += random_instances
    disagree = [(h, rep.order, t) for h, rep, t in instances
                if len(set(symcore.gentle_measurement_check(h, rep, t))) != 1]
    ok = not disagree
    record(11, ok, f"{len(instances)} instances, {len(disagree)} disagreements")
    assert ok
