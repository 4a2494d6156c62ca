"""Scenario runner: structured problem files in, deterministic reports out.

A scenario is a JSON file naming a geometric payload (a set pair, an
optimization problem, or a pair of epigraph functions) plus a list of
analyses to run on it.  ``run_scenario`` executes the analyses and returns a
report dict; ``run_corpus`` maps a directory of scenarios to reports plus a
summary table; ``hilbert_cube_scaling`` emits the dimension-scaling CSV for
the truncated-cube-versus-ray family.

Determinism contract: every randomized routine is seeded from the scenario's
mandatory ``seed`` field, report floats are canonicalized to 12 significant
digits, and keys are sorted on dump, so rerunning the same scenario with the
same seed produces byte-identical report files.  Wall-clock timings break
that guarantee by nature, so they are only recorded when explicitly
requested.

Failure policy: malformed files raise :class:`ScenarioFormatError` before
any analysis runs (configuration errors), while a toolkit error inside one
analysis is recorded in that analysis's result slot and never aborts the
rest of the run.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .cones import SAMPLED_TOL
from .errors import PreconditionError, ScenarioFormatError, ToolkitError
from .gapreduce import check_metric_form, gap_reduction_solve
from .instances import hilbert_khat, truncated_cube_ray
from .intersection import check_bouligand_derivable, check_clarke
from .lagrange import (
    MultiplierPair,
    NotSubtransversalVerdict,
    OptimalityContradiction,
    OptProblem,
    multiplier_rule,
    multiplier_rule_massive,
    qualification_equivalences,
)
from .numkernel import as_vector
from .sets import (
    AffineSet,
    Ball,
    Epigraph,
    FunctionSpec,
    Polyhedron,
    ProductSet,
    SetSpec,
    Translate,
    UnionSet,
    indicator_fn,
    linear_fn,
    maxlin_fn,
)
from .transversality import (
    altproj_rate,
    certify_massive_dense,
    certify_prop44,
    certify_transversality_kruger,
    estimate_subtransversality_constant,
    estimate_tangential_constants,
    verify_implication_chain,
)

SCENARIO_VERSION = 1
REPORT_VERSION = "1"
TOOLKIT_VERSION = "0.1.0"


# ---------------------------------------------------------------------------
# canonical JSON values
# ---------------------------------------------------------------------------


def canonical_value(obj):
    """Rewrite a result tree into plain JSON types with floats rounded to 12
    significant digits; non-finite floats become strings so dumps never
    emits bare NaN/Infinity tokens."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(f"{v:.12g}") if np.isfinite(v) else str(v)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return [canonical_value(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): canonical_value(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical_value(v) for v in obj]
    return str(obj)


def dump_report(report: dict) -> str:
    return json.dumps(canonical_value(report), sort_keys=True, indent=2) + "\n"


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# set payload codec
# ---------------------------------------------------------------------------


def _vec(payload, what: str) -> np.ndarray:
    try:
        v = np.asarray(payload, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ScenarioFormatError(f"{what} is not a numeric vector: {exc}") from exc
    if v.ndim != 1 or v.size == 0:
        raise ScenarioFormatError(f"{what} must be a nonempty flat list of numbers")
    return v


def _mat(payload, what: str) -> np.ndarray:
    try:
        m = np.asarray(payload, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ScenarioFormatError(f"{what} is not a numeric matrix: {exc}") from exc
    if m.ndim == 1 and m.size == 0:
        return m.reshape(0, 0)
    if m.ndim != 2:
        raise ScenarioFormatError(f"{what} must be a list of equal-length rows")
    return m


def function_from_payload(payload: dict) -> FunctionSpec:
    if not isinstance(payload, dict) or "kind" not in payload:
        raise ScenarioFormatError("epigraph func needs a 'kind' tag")
    kind = payload["kind"]
    if kind == "linear":
        return linear_fn(_vec(payload.get("c"), "linear c"), float(payload.get("d", 0.0)))
    if kind == "maxlin":
        return maxlin_fn(_mat(payload.get("pieces"), "maxlin pieces"))
    if kind == "indicator":
        return indicator_fn(set_from_payload(payload.get("inner")))
    raise ScenarioFormatError(f"unknown function kind {kind!r}")


def function_to_payload(fn: FunctionSpec) -> dict:
    if fn.kind == "linear":
        return {"kind": "linear", "c": fn.c, "d": fn.d}
    if fn.kind == "maxlin":
        return {"kind": "maxlin", "pieces": fn.pieces}
    return {"kind": "indicator", "inner": set_to_payload(fn.inner)}


def set_from_payload(payload) -> SetSpec:
    """Construct a set from its tagged dict form; unknown tags name
    themselves in the error."""
    if not isinstance(payload, dict) or "variant" not in payload:
        raise ScenarioFormatError("set payload needs a 'variant' tag")
    tag = payload["variant"]
    try:
        if tag == "polyhedron":
            return Polyhedron(_mat(payload.get("a"), "polyhedron a"), _vec(payload.get("b"), "polyhedron b"))
        if tag == "ball":
            return Ball(_vec(payload.get("center"), "ball center"), float(payload.get("radius", -1.0)))
        if tag == "affine":
            point = _vec(payload.get("point"), "affine point")
            dirs = payload.get("directions", [])
            d = np.asarray(dirs, dtype=float)
            if d.size == 0:
                d = np.zeros((0, point.shape[0]))
            return AffineSet(point, np.atleast_2d(d))
        if tag == "translate":
            return Translate(set_from_payload(payload.get("inner")), _vec(payload.get("shift"), "translate shift"))
        if tag == "product":
            blocks = payload.get("blocks")
            if not isinstance(blocks, list) or not blocks:
                raise ScenarioFormatError("product needs a nonempty 'blocks' list")
            return ProductSet(tuple(set_from_payload(b) for b in blocks))
        if tag == "union":
            members = payload.get("members")
            if not isinstance(members, list) or not members:
                raise ScenarioFormatError("union needs a nonempty 'members' list")
            return UnionSet(tuple(set_from_payload(m) for m in members))
        if tag == "epigraph":
            return Epigraph(func=function_from_payload(payload.get("func")))
    except ScenarioFormatError:
        raise
    except ToolkitError as exc:
        raise ScenarioFormatError(f"invalid {tag} payload: {exc}") from exc
    raise ScenarioFormatError(f"unknown set variant {tag!r}")


def set_to_payload(s: SetSpec) -> dict:
    if isinstance(s, Polyhedron):
        return {"variant": "polyhedron", "a": s.a, "b": s.b}
    if isinstance(s, Ball):
        return {"variant": "ball", "center": s.center, "radius": s.radius}
    if isinstance(s, AffineSet):
        return {"variant": "affine", "point": s.basepoint, "directions": s.raw_directions}
    if isinstance(s, Translate):
        return {"variant": "translate", "inner": set_to_payload(s.inner), "shift": s.shift}
    if isinstance(s, ProductSet):
        return {"variant": "product", "blocks": [set_to_payload(b) for b in s.blocks]}
    if isinstance(s, UnionSet):
        return {"variant": "union", "members": [set_to_payload(m) for m in s.members]}
    if isinstance(s, Epigraph):
        if s.func is None:
            raise ScenarioFormatError("raw-callable epigraphs have no file form")
        return {"variant": "epigraph", "func": function_to_payload(s.func)}
    raise ScenarioFormatError(f"set type {type(s).__name__} has no file form")


# ---------------------------------------------------------------------------
# analysis registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalysisSpec:
    payload: str  # "pair" | "problem" | "functions"
    required: tuple[str, ...]
    optional: tuple[str, ...]
    run: object


def _num(params: dict, key: str) -> float:
    v = params[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ScenarioFormatError(f"analysis parameter {key!r} must be a number")
    return float(v)


def _budget(ctx, p, default: int) -> int:
    if "budget" in p:
        return int(p["budget"])
    return ctx["budget"] if ctx["budget"] else default


def _run_kruger(ctx, p):
    cert = certify_transversality_kruger(
        ctx["a"], ctx["b"], ctx["x0"],
        alpha=_num(p, "alpha"), delta=_num(p, "delta"),
        budget=_budget(ctx, p, 6), seed=ctx["seed"],
        sampled_fallback=bool(p.get("sampled_fallback", False)),
    )
    return cert.serialize()


def _run_tangential(ctx, p):
    cert = estimate_tangential_constants(
        ctx["a"], ctx["b"], ctx["x0"],
        budget=_budget(ctx, p, 12), delta=float(p.get("delta", 0.5)),
        seed=ctx["seed"], refinement_levels=int(p.get("refinement_levels", 3)),
    )
    return cert.serialize()


def _run_sub(ctx, p):
    cert = estimate_subtransversality_constant(
        ctx["a"], ctx["b"], ctx["x0"],
        delta=float(p.get("delta", 0.5)), budget=_budget(ctx, p, 200),
        seed=ctx["seed"], levels=int(p.get("levels", 4)),
    )
    return cert.serialize()


def _run_chain(ctx, p):
    return verify_implication_chain(
        ctx["a"], ctx["b"], ctx["x0"],
        alpha=_num(p, "alpha"), delta=_num(p, "delta"),
        budget=_budget(ctx, p, 8), seed=ctx["seed"],
    )


def _run_prop44(ctx, p):
    cert = certify_prop44(
        ctx["a"], ctx["b"], ctx["x0"],
        delta=_num(p, "delta"), alpha=_num(p, "alpha"), m=_num(p, "m"),
        seed=ctx["seed"], net_size=int(p.get("net_size", 360)),
        budget=_budget(ctx, p, 4),
    )
    return cert.serialize()


def _run_massive(ctx, p):
    cert = certify_massive_dense(
        ctx["a"], ctx["b"], ctx["x0"],
        cross_check=bool(p.get("cross_check", True)), seed=ctx["seed"],
    )
    return cert.serialize()


def _run_altproj(ctx, p):
    start = _vec(p["start"], "altproj start")
    return altproj_rate(ctx["a"], ctx["b"], start, iters=int(p.get("iters", 60)))


def _run_metric_form(ctx, p):
    return check_metric_form(
        ctx["a"], ctx["b"], ctx["x0"],
        m=_num(p, "m"), eta=_num(p, "eta"), delta=_num(p, "delta"),
        samples=int(p.get("samples", 12)), seed=ctx["seed"],
    )


def _run_gap_reduction(ctx, p):
    trace = gap_reduction_solve(
        ctx["a"], ctx["b"], _vec(p["xa"], "gap xa"), _vec(p["xb"], "gap xb"),
        m=_num(p, "m"), eta=_num(p, "eta"), delta=_num(p, "delta"),
        tol=ctx["tol"] or 1e-8, max_iter=int(p.get("max_iter", 200)),
        seed=ctx["seed"], oracle_budget=int(p.get("oracle_budget", 8)),
    )
    out = trace.serialize()
    out["invariants"] = trace.verify_invariants()
    return out


def _intersection_ctx_cert(ctx, p):
    if not p.get("with_certificate", False):
        return None
    cert = estimate_subtransversality_constant(
        ctx["a"], ctx["b"], ctx["x0"],
        delta=float(p.get("delta", 0.5)), budget=_budget(ctx, p, 160),
        seed=ctx["seed"],
    )
    return cert if cert.certified else None


def _run_intersection_bouligand(ctx, p):
    cert = _intersection_ctx_cert(ctx, p)
    rep = check_bouligand_derivable(
        ctx["a"], ctx["b"], ctx["x0"], cert,
        budget_scale=float(p.get("budget_scale", 1.0)),
        tol=ctx["tol"] or SAMPLED_TOL,
    )
    return rep.serialize()


def _run_intersection_clarke(ctx, p):
    cert = _intersection_ctx_cert(ctx, p)
    rep = check_clarke(
        ctx["a"], ctx["b"], ctx["x0"], cert,
        budget_scale=float(p.get("budget_scale", 1.0)),
        tol=ctx["tol"] or SAMPLED_TOL,
    )
    return rep.serialize()


def _multiplier_outcome(res) -> dict:
    if isinstance(res, MultiplierPair):
        return {"outcome": "multiplier", **res.serialize()}
    if isinstance(res, NotSubtransversalVerdict):
        return {"outcome": "not_subtransversal", **res.serialize()}
    if isinstance(res, OptimalityContradiction):
        return {"outcome": "optimality_contradiction", **res.serialize()}
    raise ToolkitError(f"unexpected multiplier outcome {type(res).__name__}")


def _run_multiplier(ctx, p):
    res = multiplier_rule(
        ctx["problem"],
        validate=bool(p.get("validate", True)),
        samples=int(p.get("samples", 100)), seed=ctx["seed"],
    )
    return _multiplier_outcome(res)


def _run_multiplier_massive(ctx, p):
    res = multiplier_rule_massive(
        ctx["problem"], samples=int(p.get("samples", 100)), seed=ctx["seed"],
    )
    return _multiplier_outcome(res)


def _run_qualification(ctx, p):
    return qualification_equivalences(ctx["f1"], ctx["f2"], ctx["x0f"])


ANALYSES: dict[str, AnalysisSpec] = {
    "kruger_transversality": AnalysisSpec(
        "pair", ("alpha", "delta"), ("sampled_fallback", "budget"), _run_kruger),
    "tangential_constants": AnalysisSpec(
        "pair", (), ("delta", "refinement_levels", "budget"), _run_tangential),
    "subtransversality": AnalysisSpec(
        "pair", (), ("delta", "levels", "budget"), _run_sub),
    "implication_chain": AnalysisSpec(
        "pair", ("alpha", "delta"), ("budget",), _run_chain),
    "prop44": AnalysisSpec(
        "pair", ("delta", "alpha", "m"), ("net_size", "budget"), _run_prop44),
    "massive_dense": AnalysisSpec(
        "pair", (), ("cross_check",), _run_massive),
    "altproj_rate": AnalysisSpec(
        "pair", ("start",), ("iters",), _run_altproj),
    "metric_form": AnalysisSpec(
        "pair", ("m", "eta", "delta"), ("samples",), _run_metric_form),
    "gap_reduction": AnalysisSpec(
        "pair", ("xa", "xb", "m", "eta", "delta"),
        ("max_iter", "oracle_budget"), _run_gap_reduction),
    "intersection_bouligand": AnalysisSpec(
        "pair", (), ("with_certificate", "budget_scale", "delta", "budget"),
        _run_intersection_bouligand),
    "intersection_clarke": AnalysisSpec(
        "pair", (), ("with_certificate", "budget_scale", "delta", "budget"),
        _run_intersection_clarke),
    "multiplier_rule": AnalysisSpec(
        "problem", (), ("validate", "samples"), _run_multiplier),
    "multiplier_rule_massive": AnalysisSpec(
        "problem", (), ("samples",), _run_multiplier_massive),
    "qualification_equivalences": AnalysisSpec(
        "functions", (), (), _run_qualification),
}


# ---------------------------------------------------------------------------
# scenario parsing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    id: str
    seed: int
    description: str = ""
    budgets: dict = field(default_factory=dict)
    pair: dict | None = None          # {"a": SetSpec, "b": SetSpec, "x0": vec}
    problem: OptProblem | None = None
    functions: dict | None = None     # {"f1": Epigraph, "f2": Epigraph, "x0": vec}
    analyses: tuple[dict, ...] = ()
    version: int = SCENARIO_VERSION

    def serialize(self) -> dict:
        out: dict = {"version": self.version, "id": self.id, "seed": self.seed}
        if self.description:
            out["description"] = self.description
        if self.budgets:
            out["budgets"] = dict(self.budgets)
        if self.pair is not None:
            out["pair"] = {
                "a": set_to_payload(self.pair["a"]),
                "b": set_to_payload(self.pair["b"]),
                "x0": self.pair["x0"],
            }
        if self.problem is not None:
            out["problem"] = {
                "objective": set_to_payload(self.problem.objective),
                "s": set_to_payload(self.problem.s),
                "x0": self.problem.x0,
                "value": self.problem.value,
            }
        if self.functions is not None:
            out["functions"] = {
                "f1": set_to_payload(self.functions["f1"]),
                "f2": set_to_payload(self.functions["f2"]),
                "x0": self.functions["x0"],
            }
        out["analyses"] = [
            {"name": a["name"], "params": dict(a["params"])} for a in self.analyses
        ]
        return canonical_value(out)


_BUDGET_KEYS = ("budget", "tol")


def _parse_budgets(raw) -> dict:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ScenarioFormatError("'budgets' must be an object")
    out = {}
    for k, v in raw.items():
        if k not in _BUDGET_KEYS:
            raise ScenarioFormatError(
                f"unknown budget key {k!r}; allowed: {', '.join(_BUDGET_KEYS)}")
        if not isinstance(v, (int, float)) or isinstance(v, bool) or v <= 0:
            raise ScenarioFormatError(f"budget {k!r} must be a positive number")
        out[k] = int(v) if k == "budget" else float(v)
    return out


def _parse_analyses(raw) -> tuple[dict, ...]:
    if not isinstance(raw, list) or not raw:
        raise ScenarioFormatError("'analyses' must be a nonempty list")
    items = []
    for entry in raw:
        if isinstance(entry, str):
            entry = {"name": entry}
        if not isinstance(entry, dict) or "name" not in entry:
            raise ScenarioFormatError("each analysis needs a 'name'")
        extra = set(entry) - {"name", "params"}
        if extra:
            raise ScenarioFormatError(
                f"unknown analysis keys {sorted(extra)} on {entry.get('name')!r}")
        name = entry["name"]
        spec = ANALYSES.get(name)
        if spec is None:
            raise ScenarioFormatError(
                f"unknown analysis {name!r}; known: {', '.join(sorted(ANALYSES))}")
        params = entry.get("params", {})
        if not isinstance(params, dict):
            raise ScenarioFormatError(f"analysis {name!r} params must be an object")
        allowed = set(spec.required) | set(spec.optional)
        unknown = set(params) - allowed
        if unknown:
            raise ScenarioFormatError(
                f"analysis {name!r} has unknown parameters {sorted(unknown)}")
        missing = [k for k in spec.required if k not in params]
        if missing:
            raise ScenarioFormatError(
                f"analysis {name!r} is missing required parameters {missing}")
        items.append({"name": name, "params": dict(params)})
    return tuple(items)


def scenario_from_dict(raw: dict, origin: str = "<dict>") -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioFormatError(f"{origin}: scenario must be a JSON object")
    version = raw.get("version")
    if version != SCENARIO_VERSION:
        raise ScenarioFormatError(
            f"{origin}: unsupported scenario version {version!r} (expected {SCENARIO_VERSION})")
    sid = raw.get("id")
    if not isinstance(sid, str) or not sid:
        raise ScenarioFormatError(f"{origin}: 'id' must be a nonempty string")
    seed = raw.get("seed")
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ScenarioFormatError(f"{origin}: 'seed' is mandatory and must be an integer")
    known = {"version", "id", "seed", "description", "budgets",
             "pair", "problem", "functions", "analyses"}
    extra = set(raw) - known
    if extra:
        raise ScenarioFormatError(f"{origin}: unknown scenario keys {sorted(extra)}")

    pair = problem = functions = None
    try:
        if "pair" in raw:
            p = raw["pair"]
            if not isinstance(p, dict) or {"a", "b", "x0"} - set(p):
                raise ScenarioFormatError("'pair' needs 'a', 'b', 'x0'")
            pair = {
                "a": set_from_payload(p["a"]),
                "b": set_from_payload(p["b"]),
                "x0": _vec(p["x0"], "pair x0"),
            }
        if "problem" in raw:
            q = raw["problem"]
            if not isinstance(q, dict) or {"objective", "s", "x0"} - set(q):
                raise ScenarioFormatError("'problem' needs 'objective', 's', 'x0'")
            obj = set_from_payload(q["objective"])
            if not isinstance(obj, Epigraph):
                raise ScenarioFormatError("problem objective must be an epigraph payload")
            problem = OptProblem(
                objective=obj, s=set_from_payload(q["s"]),
                x0=_vec(q["x0"], "problem x0"),
                value=None if q.get("value") is None else float(q["value"]),
            )
        if "functions" in raw:
            fpay = raw["functions"]
            if not isinstance(fpay, dict) or {"f1", "f2", "x0"} - set(fpay):
                raise ScenarioFormatError("'functions' needs 'f1', 'f2', 'x0'")
            f1 = set_from_payload(fpay["f1"])
            f2 = set_from_payload(fpay["f2"])
            if not (isinstance(f1, Epigraph) and isinstance(f2, Epigraph)):
                raise ScenarioFormatError("'functions' entries must be epigraph payloads")
            functions = {"f1": f1, "f2": f2, "x0": _vec(fpay["x0"], "functions x0")}
    except ScenarioFormatError as exc:
        raise ScenarioFormatError(f"{origin}: {exc}") from exc
    except ToolkitError as exc:
        raise ScenarioFormatError(f"{origin}: invalid payload: {exc}") from exc

    try:
        analyses = _parse_analyses(raw.get("analyses"))
        budgets = _parse_budgets(raw.get("budgets"))
    except ScenarioFormatError as exc:
        raise ScenarioFormatError(f"{origin}: {exc}") from exc

    for a in analyses:
        need = ANALYSES[a["name"]].payload
        have = {"pair": pair, "problem": problem, "functions": functions}[need]
        if have is None:
            raise ScenarioFormatError(
                f"{origin}: analysis {a['name']!r} needs a '{need}' payload")

    desc = raw.get("description", "")
    if not isinstance(desc, str):
        raise ScenarioFormatError(f"{origin}: 'description' must be a string")
    return Scenario(
        id=sid, seed=seed, description=desc, budgets=budgets,
        pair=pair, problem=problem, functions=functions,
        analyses=analyses,
    )


def parse_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioFormatError(f"cannot read scenario {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return scenario_from_dict(raw, origin=str(path))


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------


def _result_has_discrepancy(result: dict) -> bool:
    return isinstance(result, dict) and bool(result.get("has_discrepancy"))


def run_scenario(
    scenario,
    out_dir=None,
    *,
    seed: int | None = None,
    budget: int | None = None,
    tol: float | None = None,
    timings: bool = False,
) -> dict:
    """Execute every analysis in a scenario and return the report dict.

    ``scenario`` is a path or an already-parsed :class:`Scenario`.  When
    ``out_dir`` is given, the report is also written atomically to
    ``<out_dir>/<id>.report.json``.  ``seed``/``budget``/``tol`` override the
    file's own values; per-analysis toolkit errors are recorded in place.
    """
    sc = scenario if isinstance(scenario, Scenario) else parse_scenario(scenario)
    eff_seed = sc.seed if seed is None else int(seed)
    ctx = {
        "seed": eff_seed,
        "budget": budget if budget is not None else sc.budgets.get("budget"),
        "tol": tol if tol is not None else sc.budgets.get("tol"),
    }
    if sc.pair is not None:
        ctx.update(a=sc.pair["a"], b=sc.pair["b"], x0=sc.pair["x0"])
    if sc.problem is not None:
        ctx["problem"] = sc.problem
    if sc.functions is not None:
        ctx.update(f1=sc.functions["f1"], f2=sc.functions["f2"],
                   x0f=sc.functions["x0"])

    entries = []
    discrepancies = []
    total0 = time.perf_counter()
    for item in sc.analyses:
        spec = ANALYSES[item["name"]]
        t0 = time.perf_counter()
        try:
            result = spec.run(ctx, item["params"])
        except ToolkitError as exc:
            result = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        entry = {"name": item["name"], "params": dict(item["params"]), "result": result}
        if timings:
            entry["wall_clock_s"] = time.perf_counter() - t0
        if _result_has_discrepancy(result):
            discrepancies.append(item["name"])
        entries.append(entry)

    report = {
        "report_version": REPORT_VERSION,
        "toolkit_version": TOOLKIT_VERSION,
        "scenario_id": sc.id,
        "seed": eff_seed,
        "analyses": entries,
        "discrepancies": discrepancies,
    }
    if timings:
        report["total_wall_clock_s"] = time.perf_counter() - total0
    report = canonical_value(report)
    if out_dir is not None:
        _write_atomic(Path(out_dir) / f"{sc.id}.report.json", dump_report(report))
    return report


# ---------------------------------------------------------------------------
# corpus runs
# ---------------------------------------------------------------------------


def _summarize_analysis(name: str, result: dict) -> tuple[str, dict]:
    """One short verdict token plus any constants, for the summary table."""
    if not isinstance(result, dict):
        return f"{name}:?", {}
    if "error" in result:
        return f"{name}:ERROR", {}
    constants = result.get("constants") or {}
    if "status" in result and "notion" in result:
        return f"{result['notion']}={result['status']}", constants
    if "has_discrepancy" in result:
        if result["has_discrepancy"]:
            tag = "DISCREPANCY"
        elif any(c.get("verdict") == "fails" for c in result.get("claims", [])):
            tag = "counterexample"
        else:
            tag = "ok"
        return f"{result.get('variant', name)}={tag}", {}
    if "outcome" in result:
        return f"{name}={result['outcome']}", {}
    if "qualification_holds" in result:
        return f"qualification={result['qualification_holds']}", {}
    if "status" in result:
        return f"{name}={result['status']}", constants
    if "held" in result:
        return f"{name}={'held' if result['held'] else 'violated'}", {}
    if "chain" in result:
        return f"chain={result['chain']}", {}
    if "rate" in result:
        return f"{name}:rate={result['rate']}", {}
    return f"{name}:done", {}


def _corpus_row(stem: str, report: dict | None, error: str | None) -> dict:
    if report is None:
        return {"scenario": stem, "verdicts": "", "constants": "",
                "discrepancy": "", "errors": error or "unreadable"}
    verdicts, consts = [], []
    for entry in report["analyses"]:
        v, c = _summarize_analysis(entry["name"], entry["result"])
        verdicts.append(v)
        for k, val in c.items():
            if isinstance(val, (int, float)):
                consts.append(f"{k}={float(val):.6g}")
            else:
                consts.append(f"{k}={val}")
    nerr = sum(1 for e in report["analyses"]
               if isinstance(e["result"], dict) and "error" in e["result"])
    return {
        "scenario": report["scenario_id"],
        "verdicts": "; ".join(verdicts),
        "constants": "; ".join(consts),
        "discrepancy": "yes" if report["discrepancies"] else "no",
        "errors": str(nerr) if nerr else "",
    }


_TABLE_COLS = ("scenario", "verdicts", "constants", "discrepancy", "errors")


def _format_table(rows: list[dict]) -> str:
    widths = {c: len(c) for c in _TABLE_COLS}
    for r in rows:
        for c in _TABLE_COLS:
            widths[c] = max(widths[c], len(str(r[c])))
    lines = ["  ".join(c.ljust(widths[c]) for c in _TABLE_COLS)]
    lines.append("  ".join("-" * widths[c] for c in _TABLE_COLS))
    for r in rows:
        lines.append("  ".join(str(r[c]).ljust(widths[c]) for c in _TABLE_COLS))
    return "\n".join(lines)


def run_corpus(
    corpus_dir,
    out_dir=None,
    *,
    workers: int | None = None,
    seed: int | None = None,
    budget: int | None = None,
    tol: float | None = None,
    timings: bool = False,
) -> dict:
    """Run every ``*.json`` scenario under ``corpus_dir`` (sorted by name).

    Returns ``{"rows", "table", "reports", "any_discrepancy"}``.  A scenario
    that fails to parse gets an error row; it never aborts the others.  When
    ``out_dir`` is given, per-scenario reports plus ``corpus_summary.csv``
    are written there.
    """
    corpus = Path(corpus_dir)
    if not corpus.is_dir():
        raise ScenarioFormatError(f"corpus directory {corpus} does not exist")
    files = sorted(corpus.glob("*.json"))

    def _one(path: Path):
        try:
            rep = run_scenario(path, out_dir, seed=seed, budget=budget,
                               tol=tol, timings=timings)
            return path, rep, None
        except ToolkitError as exc:
            return path, None, f"{type(exc).__name__}: {exc}"

    results: list[tuple[Path, dict | None, str | None]] = []
    if files:
        n_workers = workers if workers else min(8, len(files))
        with ThreadPoolExecutor(max_workers=max(1, n_workers)) as pool:
            results = list(pool.map(_one, files))

    rows = [_corpus_row(p.stem, rep, err) for p, rep, err in results]
    reports = {rep["scenario_id"]: rep for _, rep, _ in results if rep is not None}
    any_disc = any(rep is not None and rep["discrepancies"] for _, rep, _ in results)
    table = _format_table(rows)
    if out_dir is not None:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=_TABLE_COLS)
        writer.writeheader()
        writer.writerows(rows)
        _write_atomic(Path(out_dir) / "corpus_summary.csv", buf.getvalue())
    return {"rows": rows, "table": table, "reports": reports,
            "any_discrepancy": any_disc}


# ---------------------------------------------------------------------------
# dimension scaling study
# ---------------------------------------------------------------------------

HILBERT_DIM_CAP = 12


def hilbert_cube_scaling(nmax: int, *, budget: int = 160, seed: int = 0) -> dict:
    """Subtransversality-constant growth of the truncated-cube-versus-ray
    family over dimensions 1..nmax.

    For each n the estimator is anchored at the pinch point (the segment
    endpoint where the ratio blows up as the dimension grows) and
    cross-checked against the structured ray probe.  Returns row dicts plus
    a CSV rendering with columns n, khat, probe_khat, status, flag.
    """
    if not isinstance(nmax, int) or isinstance(nmax, bool) or nmax < 1:
        raise PreconditionError("nmax must be a positive integer")
    if nmax > HILBERT_DIM_CAP:
        raise PreconditionError(
            f"nmax {nmax} exceeds the dimension cap {HILBERT_DIM_CAP}")
    rows = []
    for n in range(1, nmax + 1):
        inst = truncated_cube_ray(n)
        pinch = inst["t_star"] * inst["y"]
        est = estimate_subtransversality_constant(
            inst["a"], inst["b"], pinch,
            delta=0.25 * inst["t_star"], budget=budget, seed=seed,
        )
        probe = hilbert_khat(n)["k_hat"]
        if est.certified:
            khat = float(est.constants["K"])
            flag = ""
        else:
            ratios = (est.witness or {}).get("level_max_ratios", [])
            khat = float(max(ratios)) if len(ratios) else float("nan")
            flag = "escalating" if est.status == "REFUTED" else "unsettled"
        rows.append({
            "n": n,
            "khat": khat,
            "probe_khat": float(probe),
            "status": est.status,
            "flag": flag,
        })
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=("n", "khat", "probe_khat", "status", "flag"))
    writer.writeheader()
    for r in rows:
        writer.writerow({**r, "khat": f"{r['khat']:.12g}",
                         "probe_khat": f"{r['probe_khat']:.12g}"})
    return {"rows": rows, "csv": buf.getvalue()}
