"""``symtest`` command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 internal
consistency violation between computation routes.
"""
import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, group, hamiltonian, symcore
from .errors import ConfigError, SymtestError
from .config import parse_config
from .report import CSV_COLUMNS, evaluate

log = logging.getLogger("symtest")

EXIT_OK, EXIT_USAGE, EXIT_INCONSISTENT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser():
    p = _Parser(
        prog="symtest",
        description="Test whether a Hamiltonian is symmetric under a finite group of unitaries.",
        epilog="NMR frequencies omega1, omega2 are angular frequencies in units with hbar = 1; "
               "J is the coupling constant.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "group": "close the generators and report order and closure status",
        "test": "full symmetry report at a single time",
        "sweep": "acceptance probabilities over all configured times",
        "variational": "variational maximization of the fixed-state acceptance probability",
        "trotter": "first-order Trotter error versus number of steps",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text, description=text)
        sp.add_argument("--config", required=True, help="path to the JSON run configuration")
        sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker threads")
        sp.add_argument("--seed", type=int, default=None, help="override the configured seed")
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        if name in ("test", "variational", "trotter"):
            sp.add_argument("--t", type=float, default=None, help="time (default: first configured time)")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _dump_json(data):
    return json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n"


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _rep(cfg):
    return group.close_generators(cfg.generators, qubits=cfg.qubits, max_order=cfg.max_order,
                                  closure_tol=cfg.closure_tol)


def _pick_t(args, cfg):
    return args.t if args.t is not None else cfg.times[0]


def cmd_group(args, cfg):
    rep = _rep(cfg)
    herm, idem = group.check_projector(rep)
    proj = group.group_projector(rep)
    data = {
        "order": rep.order,
        "dim": rep.dim,
        "phase_exact": rep.phase_exact,
        "closure": group.closure_status(rep.elements, rep.closure_tol),
        "inverses": group.inverse_indices(rep),
        "projector_hermitian": herm,
        "projector_idempotent": idem,
        "projector_rank": int(round(np.real(np.trace(proj)))),
    }
    _emit(_dump_json(data), args.out)
    return EXIT_OK


def cmd_test(args, cfg):
    rep = _rep(cfg)
    t = _pick_t(args, cfg)
    h = cfg.hamiltonian
    rpt = evaluate(h, rep, t, cfg.methods, cfg.series_order, cfg.shots, cfg.seed, 0, cfg.variational)
    approx, _ = symcore.second_order_acceptance(h, rep, t)
    bounds = symcore.variational_lower_bounds(h, rep, t, cfg.series_order)
    opt, _ = symcore.optimal_acceptance_exact(h, rep, t)
    data = rpt.to_dict()
    data.update(
        group_order=rep.order,
        second_order_approximation=approx,
        optimal_fixed_state=opt,
        bounds=bounds.__dict__,
        gentle_measurement=list(symcore.gentle_measurement_check(h, rep, t)),
    )
    _emit(_dump_json(data), args.out)
    return _report_consistency(rpt.diagnostics)


def _report_consistency(problems):
    if problems:
        sys.stderr.write("consistency check failed:\n" + "".join(f"  {p}\n" for p in problems))
        return EXIT_INCONSISTENT
    return EXIT_OK


def cmd_sweep(args, cfg, fmt):
    rep = _rep(cfg)
    h = cfg.hamiltonian

    def point(item):
        index, t = item
        return evaluate(h, rep, t, cfg.methods, cfg.series_order, cfg.shots, cfg.seed, index, cfg.variational)

    jobs = max(1, args.jobs)
    items = list(enumerate(cfg.times))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(point, items))
    else:
        reports = [point(i) for i in items]
    problems = [p for r in reports for p in r.diagnostics]
    if fmt == "json":
        data = {
            "group_order": rep.order,
            "methods": list(cfg.methods),
            "seed": cfg.seed,
            "points": [r.to_dict() for r in reports],
            "diagnostics": problems,
        }
        _emit(_dump_json(data), args.out)
    else:
        _emit(_csv_text(CSV_COLUMNS, [r.csv_row() for r in reports]), args.out)
    return _report_consistency(problems)


def cmd_variational(args, cfg):
    from .variational import OptimizerConfig, optimize_with_restarts

    rep = _rep(cfg)
    t = _pick_t(args, cfg)
    v = cfg.variational
    res = optimize_with_restarts(
        cfg.hamiltonian, rep, t, cfg.qubits, int(v.get("layers", 3)),
        OptimizerConfig(max_iters=int(v.get("max_iters", 500))),
        restarts=int(v.get("restarts", 20)), seed=cfg.seed,
    )
    bounds = symcore.variational_lower_bounds(cfg.hamiltonian, rep, t, cfg.series_order)
    data = {
        "t": t,
        "final_value": res.final_value,
        "oracle_optimum": res.oracle_optimum,
        "gap": res.gap,
        "iterations": res.iterations,
        "converged": res.converged,
        "theta_final": res.theta_final,
        "trace": res.trace,
        "restart_values": res.restart_values,
        "bounds": bounds.__dict__,
    }
    _emit(_dump_json(data), args.out)
    return EXIT_OK


def cmd_trotter(args, cfg, fmt):
    t = _pick_t(args, cfg)
    rows = [(t, r, hamiltonian.trotter_error(cfg.hamiltonian, t, r)) for r in cfg.trotter_steps]
    if fmt == "json":
        _emit(_dump_json({"t": t, "rows": [{"r": r, "error": e} for _, r, e in rows]}), args.out)
    else:
        _emit(_csv_text(("t", "r", "error"), [("%.12e" % a, str(r), "%.12e" % e) for a, r, e in rows]), args.out)
    return EXIT_OK


def main(argv=None):
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        sys.stderr.write(f"symtest: cannot read config: {exc}\n")
        return EXIT_USAGE
    except ConfigError as exc:
        sys.stderr.write(f"symtest: invalid config: {exc}\n")
        return EXIT_USAGE
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is None:
        args.out = cfg.output_path
    fmt = args.format or cfg.output_format
    try:
        if args.command == "group":
            return cmd_group(args, cfg)
        if args.command == "test":
            return cmd_test(args, cfg)
        if args.command == "sweep":
            return cmd_sweep(args, cfg, fmt or "csv")
        if args.command == "variational":
            return cmd_variational(args, cfg)
        return cmd_trotter(args, cfg, fmt or "csv")
    except SymtestError as exc:
        sys.stderr.write(f"symtest: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
