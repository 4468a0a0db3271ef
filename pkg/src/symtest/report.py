"""Assemble per-time symmetry reports from the individual computation routes."""
from dataclasses import asdict, dataclass, field

from . import symcore
from .simulator import CircuitInstance, ShotRecord, sample_shots, simulate_exact, splitmix64

METHODS = ("trace", "choi", "series", "circuit", "shots", "variational")
CONSISTENCY_TOL = 1e-9

CSV_COLUMNS = (
    "t", "p_trace", "p_choi", "p_series", "series_remainder", "p_circuit",
    "shot_estimate", "shot_stderr", "commutator_norm_C", "tau", "verdict",
)


@dataclass
class SymmetryReport:
    t: float
    tau: float
    commutator_norm_C: float
    per_element_norms: list
    verdict: str
    p_trace: float = None
    p_choi: float = None
    p_series: float = None
    series_order: int = None
    series_remainder: float = None
    p_circuit: float = None
    shots: ShotRecord = None
    variational: dict = None
    diagnostics: list = field(default_factory=list)

    def probabilities(self):
        return {k: v for k, v in (("trace", self.p_trace), ("choi", self.p_choi), ("circuit", self.p_circuit))
                if v is not None}

    def to_dict(self):
        out = asdict(self)
        out["per_element_norms"] = [[i, v] for i, v in self.per_element_norms]
        for key in ("p_trace", "p_choi", "p_series", "p_circuit"):
            value = out[key]
            out[key + "_clipped"] = None if value is None else symcore.clip_probability(value)
        return out

    def csv_row(self):
        vals = {
            "t": self.t,
            "p_trace": self.p_trace,
            "p_choi": self.p_choi,
            "p_series": self.p_series,
            "series_remainder": self.series_remainder,
            "p_circuit": self.p_circuit,
            "shot_estimate": None if self.shots is None else self.shots.estimate,
            "shot_stderr": None if self.shots is None else self.shots.std_error,
            "commutator_norm_C": self.commutator_norm_C,
            "tau": self.tau,
        }
        cells = ["" if vals[c] is None else "%.12e" % vals[c] for c in CSV_COLUMNS[:-1]]
        return cells + [self.verdict]


def consistency_problems(report, tol=CONSISTENCY_TOL):
    probs = report.probabilities()
    names = sorted(probs)
    problems = []
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            diff = abs(probs[a] - probs[b])
            if diff > tol:
                problems.append(f"t={report.t!r}: |p_{a} - p_{b}| = {diff:.3e} > {tol:.0e}")
    return problems


def evaluate(h, rep, t, methods=("trace",), series_order=symcore.DEFAULT_SERIES_ORDER,
             shots=10_000, seed=0, index=0, variational=None):
    """Evaluate every requested method at time ``t``.

    ``index`` selects the shot sub-seed ``splitmix64(seed, index)`` so a sweep
    is reproducible point by point. ``variational`` is a dict of
    ``layers``, ``restarts``, ``max_iters``.
    """
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown methods {sorted(unknown)}")
    c, per = symcore.commutator_norms(h, rep)
    rpt = SymmetryReport(
        t=float(t),
        tau=symcore.tau(h, t),
        commutator_norm_C=c,
        per_element_norms=list(enumerate(per)),
        verdict=symcore.verdict(c),
    )
    if "trace" in methods:
        rpt.p_trace = symcore.acceptance_probability_trace(h, rep, t)
    if "choi" in methods:
        rpt.p_choi = symcore.acceptance_probability_choi(h, rep, t)
    if "series" in methods:
        s = symcore.acceptance_probability_series(h, rep, t, series_order)
        rpt.p_series, rpt.series_order, rpt.series_remainder = s.value, s.order, s.remainder
    if "circuit" in methods:
        rpt.p_circuit = simulate_exact(CircuitInstance("mixed", h, rep, t))
    if "shots" in methods:
        rpt.shots = sample_shots(CircuitInstance("mixed", h, rep, t), shots, splitmix64(seed, index))
    if "variational" in methods:
        from .hamiltonian import hamiltonian_matrix
        from .variational import OptimizerConfig, optimize_with_restarts

        cfg = dict(variational or {})
        qubits = hamiltonian_matrix(h).shape[0].bit_length() - 1
        res = optimize_with_restarts(
            h, rep, t, qubits, int(cfg.get("layers", 3)),
            OptimizerConfig(max_iters=int(cfg.get("max_iters", 500))),
            restarts=int(cfg.get("restarts", 20)), seed=splitmix64(seed, index),
        )
        rpt.variational = {
            "final_value": res.final_value,
            "oracle_optimum": res.oracle_optimum,
            "gap": res.gap,
            "iterations": res.iterations,
            "converged": res.converged,
        }
    rpt.diagnostics = consistency_problems(rpt)
    return rpt
