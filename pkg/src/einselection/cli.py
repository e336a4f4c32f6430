"""Scenario-driven command line: ``run``, ``sweep`` and ``validate``.

Scenario files are JSON::

    {"version": "1", "mode": "discord", "seed": 0,
     "params": {"state": {"preset": "bell"}}}

Complex numbers are ``[re, im]`` pairs and matrices are row-major nested
lists. Output JSON is written with sorted keys so identical inputs give
identical bytes.

Exit codes: 0 success (non-convergence is reported as a warning), 2 parse
or schema error, 3 invariant violation, 4 dimension cap exceeded.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, config
from .discord import (
    DephasingSpec,
    DiscordSearch,
    basis_angle_degrees,
    classicality_test,
    dephase,
    discord,
)
from .dynamics import CShiftSpec, cnot, cshift_unitary, interaction_unitary, minimal_correlating_action, premeasure
from .errors import DimensionCapError, InvariantViolation
from .infotheory import (
    action_cost,
    entropy,
    min_action_bound,
    minimize_action,
    mutual_information,
    per_bit_cost,
)
from .qstate import DensityMatrix, MeasurementBasis, PureState, SubsystemLayout, partial_trace, to_density
from .randomness import make_rng
from .witness import BranchingScenario, Event, env_label, evolve, maximize_redundancy_J, redundancy, redundancy_rate

SUPPORTED_VERSIONS = ("1",)
EXIT_OK, EXIT_PARSE, EXIT_INVARIANT, EXIT_CAP = 0, 2, 3, 4

_number = {"type": "number"}
_complex = {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}]}
_vector = {"type": "array", "items": _complex, "minItems": 2}

TOP_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["version", "mode", "params"],
    "properties": {
        "version": {"type": "string"},
        "mode": {"enum": ["cshift", "action", "discord", "witness"]},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "description": {"type": "string"},
        "params": {"type": "object"},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"table": {"type": "boolean"}},
        },
    },
}

PARAM_SCHEMAS = {
    "cshift": {
        "type": "object",
        "additionalProperties": False,
        "required": ["n", "N"],
        "properties": {
            "n": {"type": "integer", "minimum": 2},
            "N": {"type": "integer", "minimum": 2},
            "G": {"type": "integer", "minimum": 1, "default": 1},
            "action_fraction": {"type": "number", "default": 1.0},
            "system_amplitudes": _vector,
        },
    },
    "action": {
        "type": "object",
        "additionalProperties": False,
        "required": ["N"],
        "properties": {
            "N": {"type": "integer", "minimum": 2},
            "weights": {"type": "array", "items": {"type": "number", "minimum": 0}},
            "optimize": {"type": "boolean", "default": False},
            "starts": {"type": "integer", "minimum": 1, "default": 64},
            "saturating": {"type": "boolean", "default": False},
        },
    },
    "discord": {
        "type": "object",
        "additionalProperties": False,
        "required": ["state"],
        "properties": {
            "state": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "preset": {"enum": ["bell", "decohered_bell", "product", "premeasured", "separable_mixture"]},
                    "amplitudes": _vector,
                    "N": {"type": "integer", "minimum": 2},
                    "G": {"type": "integer", "minimum": 1},
                    "density": {"type": "array", "items": {"type": "array", "items": _complex}},
                    "dims": {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 2, "maxItems": 2},
                },
            },
            "dephasing": {"type": "number", "minimum": 0, "maximum": 1, "default": 0.0},
            "basis": {"type": "array", "items": _vector},
            "minimize": {"type": "boolean", "default": True},
            "starts": {"type": "integer", "minimum": 1, "default": 128},
            "grid_step_deg": {"type": ["number", "null"], "exclusiveMinimum": 0, "default": 1.0},
            "tolerance": {"type": "number", "exclusiveMinimum": 0, "default": 1e-6},
        },
    },
    "witness": {
        "type": "object",
        "additionalProperties": False,
        "required": ["system_amplitudes"],
        "properties": {
            "system_amplitudes": _vector,
            "env_dims": {"type": "array", "items": {"type": "integer", "minimum": 2}},
            "M": {"type": "integer", "minimum": 1},
            "schedule": {
                "type": "array",
                "items": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["source", "target", "time"],
                    "properties": {
                        "source": {"type": "string"},
                        "target": {"type": "string"},
                        "time": {"type": "number"},
                        "gain": {"type": "integer", "minimum": 1},
                        "fraction": {"type": "number", "minimum": 0, "maximum": 1},
                    },
                },
            },
            "schedule_preset": {"enum": ["branching", "secondary"]},
            "max_events": {"type": "integer", "minimum": 0},
            "maximize": {"type": "boolean", "default": False},
            "starts": {"type": "integer", "minimum": 1, "default": 32},
            "record_threshold": {"type": "number", "minimum": 0, "default": 0.1},
        },
    },
}


class ScenarioError(Exception):
    """Malformed scenario; ``field`` is the dotted path of the offending entry."""

    def __init__(self, message: str, field: str = ""):
        super().__init__(message)
        self.field = field


# ---------------------------------------------------------------- loading


def _path_str(parts) -> str:
    return ".".join(str(p) for p in parts)


def _validate_schema(instance, schema, prefix=()):
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(instance), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        err = errors[0]
        field = _path_str(list(prefix) + list(err.absolute_path))
        if err.validator == "additionalProperties":
            extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            field = _path_str(list(prefix) + list(err.absolute_path) + extra[:1])
        raise ScenarioError(err.message, field)


def _apply_defaults(params: dict, schema: dict) -> dict:
    out = dict(params)
    for key, sub in schema.get("properties", {}).items():
        if key not in out and "default" in sub:
            out[key] = copy.deepcopy(sub["default"])
    return out


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(scenario: dict, assignment: str) -> dict:
    """Set ``key=value``; keys are dotted paths, resolved under ``params`` unless top-level."""
    if "=" not in assignment:
        raise ScenarioError(f"override {assignment!r} is not key=value", assignment)
    key, value = assignment.split("=", 1)
    parts = key.strip().split(".")
    if parts[0] not in TOP_SCHEMA["properties"]:
        parts = ["params"] + parts
    out = copy.deepcopy(scenario)
    node = out
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ScenarioError(f"cannot set {key!r}: parent is not an object", key)
    node[parts[-1]] = _parse_value(value)
    return out


def normalize(raw) -> dict:
    """Schema-check a scenario and fill defaults. Raises :class:`ScenarioError`."""
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object", "")
    _validate_schema(raw, TOP_SCHEMA)
    if raw["version"] not in SUPPORTED_VERSIONS:
        raise ScenarioError(f"unsupported version {raw['version']!r}; expected one of {SUPPORTED_VERSIONS}", "version")
    schema = PARAM_SCHEMAS[raw["mode"]]
    _validate_schema(raw["params"], schema, ("params",))
    out = dict(raw)
    out.setdefault("seed", 0)
    out.setdefault("output", {"table": False})
    out["params"] = _apply_defaults(raw["params"], schema)
    return out


def load_scenario(path, overrides=()) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}", "scenario") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}", "") from None
    for o in overrides:
        raw = apply_override(raw, o)
    return normalize(raw)


def bundled_scenarios() -> dict[str, Path]:
    root = resources.files("einselection") / "scenarios"
    return {p.name: Path(str(p)) for p in sorted(root.iterdir(), key=lambda p: p.name) if p.name.endswith(".json")}


# ---------------------------------------------------------------- serialization


def _complex(z) -> complex:
    if isinstance(z, (list, tuple)):
        return complex(z[0], z[1])
    return complex(z)


def _cvec(values) -> np.ndarray:
    return np.array([_complex(z) for z in values], dtype=complex)


def _pairs(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).reshape(-1)]


def _matrix_pairs(m) -> list:
    return [_pairs(row) for row in np.asarray(m, dtype=complex)]


def _clean(obj, reasons: dict, path: str = ""):
    """Replace non-finite floats by ``None`` and record why."""
    if isinstance(obj, dict):
        return {k: _clean(v, reasons, f"{path}.{k}" if path else k) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v, reasons, f"{path}[{i}]") for i, v in enumerate(obj)]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if not math.isfinite(x):
            reasons[path] = f"non-finite value {x!r}"
            return None
        return x
    return obj


def digest(scenario: dict) -> str:
    canon = json.dumps(scenario, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------- modes


def _seeds(seed: int, count: int) -> list[int]:
    rng = make_rng(seed)
    return [int(x) for x in rng.integers(0, 2**32, size=count)]


def _run_cshift(p: dict, seed: int) -> tuple[dict, list, list]:
    n, N, G = p["n"], p["N"], p["G"]
    if n * N > config.TOLERANCES.max_dimension:
        raise DimensionCapError(f"n*N = {n * N} exceeds cap {config.TOLERANCES.max_dimension}")
    spec = CShiftSpec(n, N, G, action=p["action_fraction"] * G * 2 * math.pi / N)
    u = interaction_unitary(spec)
    perfect = cshift_unitary(spec)
    amps = _cvec(p["system_amplitudes"]) if "system_amplitudes" in p else np.full(n, 1 / math.sqrt(n))
    if amps.size != n:
        raise InvariantViolation(f"system_amplitudes has {amps.size} entries, expected n={n}")
    system = PureState(amps, SubsystemLayout((n,), ("S",)))
    ready = np.zeros(N, complex)
    ready[0] = 1.0
    out = PureState(u @ np.kron(system.amplitudes, ready), SubsystemLayout((n, N), ("S", "A")))
    rho = to_density(out)
    warnings = []
    if not spec.amplifies:
        warnings.append(f"n*G = {n * G} exceeds N = {N}: records collide")
    records = [int(np.argmax(np.abs(perfect[:, j * N]))) % N for j in range(n)]
    results = {
        "n": n, "N": N, "G": G,
        "action": spec.action,
        "shift_action": spec.shift_action,
        "amplifies": spec.amplifies,
        "amplifies_strict": spec.amplifies_strict,
        "max_deviation_from_shift": float(np.max(np.abs(u - perfect))),
        "records": records,
        "H_S": entropy(partial_trace(rho, ["S"])),
        "H_A": entropy(partial_trace(rho, ["A"])),
        "mutual_information": mutual_information(rho),
        "apparatus_populations": [float(x) for x in np.real(np.diag(partial_trace(rho, ["A"]).matrix))],
    }
    if n == N == 2 and G == 1:
        results["max_deviation_from_cnot"] = float(np.max(np.abs(u - cnot())))
    return results, [], warnings


def _run_action(p: dict, seed: int) -> tuple[dict, list, list]:
    N = p["N"]
    weights = np.asarray(p.get("weights") or np.full(N, 1.0 / N), dtype=float)
    if weights.size != N:
        raise InvariantViolation(f"weights has {weights.size} entries, expected N={N}")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise InvariantViolation("weights must sum to 1")
    outcomes = np.eye(N)
    # ready state orthogonal to every outcome: the extra dial position N
    ext = np.eye(N + 1)
    per_bit = per_bit_cost(N)
    results = {
        "N": N,
        "weights": [float(w) for w in weights],
        "orthogonal_action": action_cost(weights, ext[N], ext[:N]),
        "min_action_bound": min_action_bound(N),
        "per_bit_approximate": per_bit.approximate,
        "per_bit_exact": per_bit.exact,
        "per_bit_bits": math.log2(N),
    }
    warnings = []
    if p["optimize"]:
        (s,) = _seeds(seed, 1)
        res = minimize_action(weights, outcomes, starts=p["starts"], seed=s)
        results["optimized_action"] = res.cost
        results["optimized_ready"] = _pairs(res.ready)
        results["optimized_minus_bound"] = res.cost - min_action_bound(N)
        if not res.converged:
            warnings.append("action minimization did not report convergence")
    if p["saturating"]:
        sat = minimal_correlating_action(N)
        results["saturating_gt"] = sat["gt"]
        results["saturating_action"] = sat["action"]
        results["saturating_fidelity"] = sat["fidelity"]
    return results, [], warnings


def _discord_state(s: dict) -> DensityMatrix:
    layout = SubsystemLayout.of(S=2, A=2)
    preset = s.get("preset")
    if "density" in s:
        dims = s.get("dims")
        m = np.array([[_complex(z) for z in row] for row in s["density"]], dtype=complex)
        if dims is None:
            raise ScenarioError("density needs dims", "params.state.dims")
        return DensityMatrix(m, SubsystemLayout(tuple(dims), ("S", "A")))
    if preset == "bell":
        return to_density(PureState.normalized([1, 0, 0, 1], layout))
    if preset == "decohered_bell":
        return DensityMatrix(np.diag([0.5, 0, 0, 0.5]), layout)
    if preset == "product":
        rho_s = np.array([[0.7, 0.2], [0.2, 0.3]])
        rho_a = np.array([[0.6, 0.1j], [-0.1j, 0.4]])
        return DensityMatrix(np.kron(rho_s, rho_a), layout)
    if preset == "separable_mixture":
        return separable_discordant_state()
    if preset == "premeasured":
        if "amplitudes" not in s:
            raise ScenarioError("premeasured preset needs amplitudes", "params.state.amplitudes")
        amps = _cvec(s["amplitudes"])
        N = s.get("N", amps.size)
        system = PureState(amps, SubsystemLayout((amps.size,), ("S",)))
        return to_density(premeasure(system, N, s.get("G", 1)))
    raise ScenarioError("state needs a preset or a density matrix", "params.state")


def separable_discordant_state() -> DensityMatrix:
    """``(|0><0| (x) |0><0| + |1><1| (x) |+><+|) / 2``: unentangled but discordant when A is measured."""
    plus = np.full((2, 2), 0.5)
    m = 0.5 * (np.kron(np.diag([1.0, 0.0]), np.diag([1.0, 0.0])) + np.kron(np.diag([0.0, 1.0]), plus))
    return DensityMatrix(m, SubsystemLayout.of(S=2, A=2))


def _run_discord(p: dict, seed: int) -> tuple[dict, list, list]:
    rho = _discord_state(p["state"])
    dS, dA = rho.layout.dims
    lam = p["dephasing"]
    if lam > 0:
        rho = dephase(rho, DephasingSpec(MeasurementBasis.computational("S", dS),
                                         MeasurementBasis.computational("A", dA), lam))
    if "basis" in p:
        basis = MeasurementBasis("A", np.array([_cvec(v) for v in p["basis"]]).T)
    else:
        basis = MeasurementBasis.computational("A", dA)
    fixed = discord(rho, basis)
    results = {
        "dims": list(rho.layout.dims),
        "dephasing": lam,
        "entropy_SA": entropy(rho),
        "symmetric_I": fixed.symmetric_I,
        "J_basis": fixed.asymmetric_J,
        "discord_basis": fixed.discord,
        "basis": [_pairs(basis.vector(j)) for j in range(basis.dim)],
    }
    warnings = []
    if p["minimize"]:
        (s,) = _seeds(seed, 1)
        grid = p["grid_step_deg"] if dA == 2 else None
        search = DiscordSearch(starts=p["starts"], seed=s, grid_step_deg=grid)
        cls = classicality_test(rho, p["tolerance"], search)
        rep = cls.report
        results.update({
            "min_discord": rep.discord,
            "min_J": rep.asymmetric_J,
            "min_basis": [_pairs(rep.basis.vector(j)) for j in range(rep.basis.dim)],
            "min_basis_angle_from_pointer_deg": basis_angle_degrees(rep.basis.vectors, np.eye(dA)),
            "alternative_minimizers": len(rep.alternatives),
            "oracle_discord": rep.oracle_discord,
            "trivial": rep.trivial,
            "classical": cls.classical,
            "product_eigenbasis": cls.product_eigenbasis,
        })
        if not rep.converged:
            warnings.append("discord minimization did not report convergence")
    return results, [], warnings


def _witness_scenario(p: dict) -> BranchingScenario:
    amps = _cvec(p["system_amplitudes"])
    if "env_dims" in p:
        env = tuple(p["env_dims"])
    elif "M" in p:
        env = (amps.size,) * p["M"]
    else:
        raise ScenarioError("witness needs env_dims or M", "params.env_dims")
    M = len(env)
    if "schedule" in p:
        events = [Event(e["source"], e["target"], e["time"], e.get("gain", 1), e.get("fraction", 1.0))
                  for e in p["schedule"]]
    else:
        preset = p.get("schedule_preset", "branching")
        if preset == "branching":
            events = [Event("S", env_label(k), float(k + 1)) for k in range(M)]
        else:
            half = (M + 1) // 2
            events = [Event("S", env_label(k), float(k + 1)) for k in range(half)]
            events += [Event(env_label(k % half), env_label(k), float(k + 1)) for k in range(half, M)]
    if "max_events" in p:
        events = events[: p["max_events"]]
    if abs(np.linalg.norm(amps) - 1.0) > config.TOLERANCES.norm:
        raise InvariantViolation("system_amplitudes must be normalized")
    return BranchingScenario(tuple(amps), env, tuple(events))


def _run_witness(p: dict, seed: int) -> tuple[dict, list, list]:
    sc = _witness_scenario(p)
    traj = evolve(sc)
    pointer = MeasurementBasis.computational("S", sc.system_dim)
    rows = []
    for t, st in traj:
        rep = redundancy(st, "S", pointer, timestamp=t, record_threshold=p["record_threshold"])
        rows.append({
            "time": t, "R_I": rep.R_I, "R_J_pointer": rep.R_J, "H_S": rep.H_S,
            "records": rep.records, "undefined": rep.undefined or "",
        })
    rates = redundancy_rate(traj) if len(traj) >= 2 and len({t for t, _ in traj}) == len(traj) else []
    for row, (_, r) in zip(rows, rates):
        row["R_I_rate"] = r
    final = redundancy(traj[-1][1], "S", pointer, record_threshold=p["record_threshold"])
    warnings = [f"event {e} overflows its target dial" for e in sc.collisions()]
    results = {
        "env_dims": list(sc.env_dims),
        "events": len(sc.schedule),
        "R_I": final.R_I,
        "R_J_pointer": final.R_J,
        "H_S": final.H_S,
        "records": final.records,
        "mutual_informations": list(final.mutual_informations),
        "J_pointer": list(final.J),
        "R_I_undefined": final.undefined,
        "staircase_R_I": [r["R_I"] for r in rows],
        "rate_R_I": [r for _, r in rates],
    }
    if p["maximize"]:
        (s,) = _seeds(seed, 1)
        best = maximize_redundancy_J(traj[-1][1], "S", starts=p["starts"], seed=s)
        results["max_R_J"] = best.R_J
        results["max_R_J_basis"] = [_pairs(best.basis.vector(j)) for j in range(best.basis.dim)]
        if not best.converged:
            warnings.append("redundancy maximization did not report convergence")
    return results, rows, warnings


MODES = {"cshift": _run_cshift, "action": _run_action, "discord": _run_discord, "witness": _run_witness}


def execute(scenario: dict) -> tuple[dict, list]:
    """Run a normalized scenario; returns the result record and its table rows."""
    results, rows, warnings = MODES[scenario["mode"]](scenario["params"], scenario["seed"])
    reasons: dict = {}
    results = _clean(results, reasons)
    rows = [_clean(r, reasons) for r in rows]
    record = {
        "tool": "einselection",
        "version": __version__,
        "mode": scenario["mode"],
        "seed": scenario["seed"],
        "scenario_digest": digest(scenario),
        "results": results,
        "warnings": warnings,
        "null_reasons": reasons,
    }
    return record, rows


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    fields = list(rows[0].keys())
    for r in rows[1:]:
        fields += [k for k in r if k not in fields]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _csv_cell(r.get(k)) for k in fields})
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return v


def sweep(scenario: dict, parameter: str, values) -> list[dict]:
    """One result row per value of ``parameter`` (dotted path under ``params``)."""
    parts = parameter.split(".")
    if parts[0] == "params":
        parts = parts[1:]
    node = scenario["params"]
    for p in parts[:-1]:
        node = node.get(p) if isinstance(node, dict) else None
    if not isinstance(node, dict) or parts[-1] not in node or isinstance(node[parts[-1]], bool) \
            or not isinstance(node[parts[-1]], (int, float)):
        raise ScenarioError(f"sweep parameter {parameter!r} is not a numeric scenario parameter", parameter)
    is_int = isinstance(node[parts[-1]], int)
    rows = []
    for v in values:
        v = int(v) if is_int and float(v).is_integer() else float(v)
        sc = apply_override(scenario, f"params.{'.'.join(parts)}={json.dumps(v)}")
        sc = normalize(sc)
        record, _ = execute(sc)
        row = {parameter: v}
        for k, val in record["results"].items():
            if isinstance(val, (int, float, bool)) or val is None:
                row[k] = val
        rows.append(row)
    return rows


def diagnose(scenario_raw) -> list[dict]:
    """Schema and invariant diagnostics without running anything."""
    diags = []
    try:
        sc = normalize(scenario_raw)
    except ScenarioError as exc:
        return [{"kind": "schema", "field": exc.field, "message": str(exc)}]
    p = sc["params"]
    cap = config.TOLERANCES.max_dimension
    mode = sc["mode"]
    if mode == "cshift":
        if p["n"] * p["N"] > cap:
            diags.append({"kind": "dimension_cap", "field": "params", "message": f"n*N exceeds {cap}"})
        if p["n"] * p["G"] > p["N"]:
            diags.append({"kind": "gain_overflow", "field": "params.G", "message": "n*G exceeds N"})
    elif mode == "action":
        if p.get("weights") is not None and len(p["weights"]) != p["N"]:
            diags.append({"kind": "shape", "field": "params.weights", "message": "length differs from N"})
    elif mode == "discord":
        st = p["state"]
        dims = st.get("dims")
        if dims is None and st.get("preset") == "premeasured":
            n_amp = len(st.get("amplitudes", [0, 0]))
            dims = [n_amp, st.get("N", n_amp)]
        if dims is not None and int(np.prod(dims)) > cap:
            diags.append({"kind": "dimension_cap", "field": "params.state.dims", "message": f"dims exceed {cap}"})
    elif mode == "witness":
        n = len(p["system_amplitudes"])
        env = p.get("env_dims") or ([n] * p.get("M", 0))
        total = n * int(np.prod(env)) if env else n
        if total > cap:
            diags.append({"kind": "dimension_cap", "field": "params.env_dims",
                          "message": f"total dimension {total} exceeds {cap}"})
        times = [e["time"] for e in p.get("schedule", [])]
        for i in range(1, len(times)):
            if times[i] < times[i - 1]:
                diags.append({"kind": "ordering", "field": f"params.schedule.{i}.time",
                              "message": "schedule timestamps decrease"})
        amps = _cvec(p["system_amplitudes"])
        if abs(np.linalg.norm(amps) - 1.0) > config.TOLERANCES.norm:
            diags.append({"kind": "normalization", "field": "params.system_amplitudes",
                          "message": "amplitudes are not normalized"})
    return diags


# ---------------------------------------------------------------- entry point


def _parse_values(tokens) -> list[float]:
    out = []
    for tok in tokens:
        for part in tok.split(","):
            part = part.strip()
            if not part:
                continue
            if ":" in part:
                bits = [float(x) for x in part.split(":")]
                start, stop = bits[0], bits[1]
                step = bits[2] if len(bits) > 2 else 1.0
                k = int(math.floor((stop - start) / step + 1e-9))
                out.extend(start + i * step for i in range(k + 1))
            else:
                out.append(float(part))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="einselection", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario JSON file (or name of a bundled one)")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a scenario entry, e.g. --set N=5")
        p.add_argument("--format", choices=["json", "csv"], default="json")

    common(sub.add_parser("run", help="run a scenario and emit a result record"))
    sw = sub.add_parser("sweep", help="run a scenario for several values of one parameter")
    common(sw)
    sw.add_argument("--param", required=True, help="numeric parameter to vary (path under params)")
    sw.add_argument("--values", required=True, nargs="+", help="values, comma lists, or start:stop[:step]")
    va = sub.add_parser("validate", help="check a scenario without running it")
    va.add_argument("--scenario", required=True)
    va.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    return parser


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = bundled_scenarios()
    name = p.name if p.name.endswith(".json") else p.name + ".json"
    return bundled.get(name, p)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _error(kind: str, message: str, field: str | None, code: int, out: str | None) -> int:
    payload = {"error": kind, "message": message, "exit_code": code}
    if field is not None:
        payload["field"] = field
    text = dumps(payload)
    sys.stdout.write(text)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = getattr(args, "out", None)
    overrides = list(args.overrides)
    if getattr(args, "seed", None) is not None:
        overrides.append(f"seed={args.seed}")
    path = _resolve(args.scenario)

    if args.command == "validate":
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
            for o in overrides:
                raw = apply_override(raw, o)
        except (OSError, json.JSONDecodeError, ScenarioError) as exc:
            sys.stdout.write(dumps({"status": "invalid", "diagnostics": [
                {"kind": "parse", "field": getattr(exc, "field", ""), "message": str(exc)}]}))
            return EXIT_PARSE
        diags = diagnose(raw)
        if diags:
            sys.stdout.write(dumps({"status": "invalid", "diagnostics": diags}))
            return EXIT_PARSE
        sys.stdout.write(dumps({"status": "ok", "scenario": normalize(raw)}))
        return EXIT_OK

    try:
        scenario = load_scenario(path, overrides)
        if args.command == "run":
            record, rows = execute(scenario)
            if args.format == "csv":
                _emit(rows_to_csv(rows) if rows else rows_to_csv([record["results"]]), out)
                if out:
                    Path(out).with_suffix(".json").write_text(dumps(record), encoding="utf-8")
            else:
                _emit(dumps(record), out)
                if out and (rows and scenario["output"].get("table")):
                    Path(out).with_suffix(".csv").write_text(rows_to_csv(rows), encoding="utf-8")
        else:
            rows = sweep(scenario, args.param, _parse_values(args.values))
            _emit(rows_to_csv(rows) if args.format == "csv" else dumps(rows), out)
    except ScenarioError as exc:
        return _error("parse", str(exc), exc.field, EXIT_PARSE, out)
    except DimensionCapError as exc:
        return _error("dimension_cap", str(exc), None, EXIT_CAP, out)
    except (InvariantViolation, ValueError) as exc:
        return _error("invariant", str(exc), None, EXIT_INVARIANT, out)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
