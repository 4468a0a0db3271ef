"""JSON run configuration for the command-line interface."""
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import NotUnitary, ParseError, ValidationError
from .group import DEFAULT_CLOSURE_TOL, GateSpec
from .hamiltonian import HamiltonianSpec, build_nmr_hamiltonian, parse_pauli_term
from .report import METHODS
from .symcore import DEFAULT_SERIES_ORDER


@dataclass
class RunConfig:
    hamiltonian: HamiltonianSpec
    generators: list
    times: tuple
    methods: tuple
    max_order: int = 1024
    closure_tol: float = DEFAULT_CLOSURE_TOL
    shots: int = 10_000
    seed: int = 0
    series_order: int = DEFAULT_SERIES_ORDER
    variational: dict = field(default_factory=lambda: {"layers": 3, "restarts": 20, "max_iters": 500})
    trotter_steps: tuple = (1, 2, 4, 8, 16, 32, 64)
    output_path: str = None
    output_format: str = None

    @property
    def qubits(self):
        return self.hamiltonian.qubits


def _need(obj, key, where):
    if not isinstance(obj, dict):
        raise ParseError(f"expected an object", field=where)
    if key not in obj:
        raise ParseError(f"missing required field", field=f"{where}.{key}" if where else key)
    return obj[key]


def _number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"expected a number, got {value!r}", field=name)
    return float(value)


def _complex_entries(entries, name):
    try:
        arr = np.asarray(entries, dtype=float)
    except (TypeError, ValueError):
        raise ParseError("matrix entries must be [re, im] pairs", field=name) from None
    if arr.shape[-1:] != (2,):
        raise ParseError("matrix entries must be [re, im] pairs", field=name)
    flat = (arr[..., 0] + 1j * arr[..., 1]).reshape(-1)
    d = int(round(np.sqrt(flat.size)))
    if d * d != flat.size or d < 2 or d & (d - 1):
        raise ValidationError(f"{flat.size} entries is not a 2^n x 2^n matrix", "DimensionMismatch")
    return flat.reshape(d, d)


def _hamiltonian(node):
    kind = _need(node, "type", "hamiltonian")
    if kind == "nmr":
        return build_nmr_hamiltonian(
            _number(_need(node, "omega1", "hamiltonian"), "hamiltonian.omega1"),
            _number(_need(node, "omega2", "hamiltonian"), "hamiltonian.omega2"),
            _number(_need(node, "j", "hamiltonian"), "hamiltonian.j"),
        )
    if kind == "pauli":
        qubits = _need(node, "qubits", "hamiltonian")
        terms = _need(node, "terms", "hamiltonian")
        if not isinstance(qubits, int) or qubits < 1:
            raise ValidationError("qubits must be a positive integer", "qubits")
        parsed = []
        for k, text in enumerate(terms):
            try:
                parsed.append(parse_pauli_term(text))
            except (ValueError, TypeError) as exc:
                raise ParseError(str(exc), field=f"hamiltonian.terms[{k}]") from None
        try:
            return HamiltonianSpec(qubits, terms=tuple(parsed), label="pauli")
        except ValueError as exc:
            raise ValidationError(str(exc), type(exc).__name__) from None
    if kind == "matrix":
        m = _complex_entries(_need(node, "entries", "hamiltonian"), "hamiltonian.entries")
        try:
            return HamiltonianSpec(int(m.shape[0]).bit_length() - 1, explicit=m, label="matrix")
        except ValueError as exc:
            raise ValidationError(str(exc), type(exc).__name__) from None
    raise ParseError(f"unknown hamiltonian type {kind!r}", field="hamiltonian.type")


def _generators(node, qubits):
    gens = []
    for k, item in enumerate(node.get("generators", [])):
        where = f"group.generators[{k}]"
        if not isinstance(item, dict):
            raise ParseError("generator must be an object", field=where)
        if "matrix" in item:
            spec = GateSpec(matrix=_complex_entries(item["matrix"], where + ".matrix"))
        elif "gate" in item:
            spec = GateSpec(name=str(item["gate"]), qubits=tuple(item.get("qubits", ())))
        else:
            raise ParseError("generator needs 'gate' or 'matrix'", field=where)
        try:
            spec.realize(qubits)
        except NotUnitary as exc:
            raise ValidationError(f"{where}: {exc}", "NotUnitary") from None
        except ValueError as exc:
            raise ValidationError(f"{where}: {exc}", type(exc).__name__) from None
        gens.append(spec)
    return gens


def _times(node):
    if isinstance(node, list):
        times = [_number(v, "times") for v in node]
    elif isinstance(node, dict):
        if "linspace" in node:
            start, stop, count = node["linspace"]
        else:
            start, stop, count = node.get("start"), node.get("stop"), node.get("count")
        if not isinstance(count, int) or count < 1:
            raise ValidationError("linspace count must be a positive integer", "times non-empty")
        times = list(np.linspace(_number(start, "times.start"), _number(stop, "times.stop"), count))
    else:
        raise ParseError("times must be a list or a linspace object", field="times")
    if not times:
        raise ValidationError("no time points", "times non-empty")
    return tuple(float(t) for t in times)


def parse_config(text):
    """Parse and validate a JSON run configuration."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    ham = _hamiltonian(_need(doc, "hamiltonian", ""))
    group = doc.get("group", {})
    if not isinstance(group, dict):
        raise ParseError("group must be an object", field="group")
    gens = _generators(group, ham.qubits)
    times = _times(_need(doc, "times", ""))
    methods = doc.get("methods", ["trace"])
    if not isinstance(methods, list) or not methods:
        raise ValidationError("at least one method is required", "methods non-empty")
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise ValidationError(f"unknown methods {bad}; choose from {list(METHODS)}", "methods")
    cfg = RunConfig(
        hamiltonian=ham,
        generators=gens,
        times=times,
        methods=tuple(dict.fromkeys(methods)),
        max_order=int(group.get("max_order", 1024)),
        closure_tol=float(group.get("tol", DEFAULT_CLOSURE_TOL)),
        shots=int(doc.get("shots", 10_000)),
        seed=int(doc.get("seed", 0)),
        series_order=int(doc.get("series_order", DEFAULT_SERIES_ORDER)),
    )
    if cfg.shots < 1:
        raise ValidationError("shots must be >= 1", "shots")
    if cfg.series_order < 0:
        raise ValidationError("series_order must be >= 0", "series_order")
    if "variational" in doc:
        cfg.variational.update(doc["variational"])
    if "trotter" in doc:
        cfg.trotter_steps = tuple(int(r) for r in doc["trotter"].get("steps", cfg.trotter_steps))
    out = doc.get("output")
    if isinstance(out, dict):
        cfg.output_path = out.get("path")
        cfg.output_format = out.get("format")
    return cfg
