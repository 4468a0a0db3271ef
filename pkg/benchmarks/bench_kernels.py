"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N] [--quick]

Each kernel is run once per backend for warm-up (this triggers JIT
compilation), outputs are checked for agreement, and then the best of
``--repeat`` timings is reported.
"""
import argparse
import time

import numpy as np

from symtest import GateSpec, build_nmr_hamiltonian, close_generators
from symtest._kernels import numba_backend, numpy_backend
from symtest.variational import ring_pairs


def _cases(quick):
    rng = np.random.default_rng(0)
    h = build_nmr_hamiltonian(1.0, 2.0, 0.1).matrix()
    rep = close_generators([GateSpec("CNOT", (0, 1)), GateSpec("SWAP", (0, 1))], qubits=2)
    elems = np.ascontiguousarray(rep.elements)
    x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    state = rng.standard_normal((6, 4)) + 0j
    n, layers = 2, 3
    batch = 64 if quick else 1024
    thetas = rng.uniform(0, 2 * np.pi, (batch, layers * n * 2))
    pairs = np.array(ring_pairs(n), dtype=np.int64).reshape(-1, 2)
    shots = 10_000 if quick else 1_000_000
    xs = rng.integers(0, 4, shots)
    us = rng.random(shots)
    probs = rng.random(4)
    return {
        "nested_commutators": (h, elems[1], 12),
        "twirl_sum": (elems, x),
        "find_match": (elems, len(elems), elems[-1].copy(), 1e-8),
        "controlled_apply": (elems, state),
        "ansatz_states": (thetas, n, layers, pairs),
        "count_accepts": (xs, us, probs),
    }


def _best(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--quick", action="store_true", help="small inputs, for smoke testing")
    args = ap.parse_args(argv)
    if numba_backend is None:
        raise SystemExit("numba is not importable; nothing to compare")

    rows = []
    for name, kargs in _cases(args.quick).items():
        f_np, f_jit = getattr(numpy_backend, name), getattr(numba_backend, name)
        t0 = time.perf_counter()
        out_jit = f_jit(*kargs)
        compile_s = time.perf_counter() - t0
        out_np = f_np(*kargs)
        if not np.allclose(out_np, out_jit, atol=1e-10):
            raise SystemExit(f"{name}: backends disagree")
        rows.append((name, _best(f_np, kargs, args.repeat), _best(f_jit, kargs, args.repeat), compile_s))

    print(f"{'kernel':<20} {'numpy [us]':>12} {'numba [us]':>12} {'speedup':>8} {'first call [s]':>15}")
    for name, t_np, t_jit, c in rows:
        print(f"{name:<20} {t_np * 1e6:12.1f} {t_jit * 1e6:12.1f} {t_np / t_jit:8.2f} {c:15.3f}")
    return rows


if __name__ == "__main__":
    main()
