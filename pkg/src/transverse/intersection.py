"""Tangent-cone intersection property checks at a common point.

Two checks are provided, both anchored at a point of A intersect B:

* ``check_bouligand_derivable``: the mixed inclusion
  T_A(x0) & G_B(x0) <= T_{A&B}(x0) (Bouligand/contingent cone T,
  derivable cone G) together with the derivable-cone equality
  G_A(x0) & G_B(x0) = G_{A&B}(x0), both valid under subtransversality.
* ``check_clarke``: the Clarke-cone inclusion
  Tc_A(x0) & Tc_B(x0) <= Tc_{A&B}(x0), same hypothesis.

Each claim in a report separates the mathematics from its hypothesis: a
failed inclusion whose subtransversality hypothesis is unmet is labeled
a "consistent counterexample" (the theory permits it), while a failure
under a certified hypothesis is labeled "DISCREPANCY" (the theory
forbids it; corpus runs treat it as fatal).  A monotonicity sanity
claim, T_{A&B} <= T_A and T_{A&B} <= T_B on Bouligand cones, is
asserted on every run regardless of hypothesis; it holds for arbitrary
closed sets, so its failure is always a discrepancy.

When every cone admits an exact polyhedral computation (convex
variants with exact rules and an exact meet), verdicts are decided by
generator containment with rational arithmetic.  Otherwise the whole
check runs sampled: a deterministic direction net is classified
against each cone by residual profiles dist(x0 + t v, S)/t, and the
report carries the per-direction table as a CSV appendix.  Sampled
derivable-cone classification is approximate by nature, so sampled
claims carry a confidence field (the decisive fraction of the net) and
Clarke verdicts are flagged as derivable-mode surrogates.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .cones import (
    IN,
    OUT,
    SAMPLED_TOL,
    UNDECIDED,
    PolyCone,
    SampledCone,
    clarke_cone_convex,
    cone_intersect,
)
from .errors import PreconditionError, ToolkitError, UnsupportedVariantError
from .numkernel import as_vector, direction_net
from .sets import SetSpec, intersect
from .transversality import CERTIFIED, NOTION_SUB, TransversalityCertificate

__all__ = [
    "HOLDS",
    "FAILS",
    "LABEL_CONSISTENT",
    "LABEL_DISCREPANCY",
    "VARIANT_BOULIGAND_DERIVABLE",
    "VARIANT_CLARKE",
    "IntersectionReport",
    "check_bouligand_derivable",
    "check_clarke",
]

HOLDS = "holds"
FAILS = "fails"
LABEL_CONSISTENT = "consistent counterexample"
LABEL_DISCREPANCY = "DISCREPANCY"
VARIANT_BOULIGAND_DERIVABLE = "bouligand_derivable"
VARIANT_CLARKE = "clarke"

_MEMBER_TOL = 1e-7


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


@dataclass
class IntersectionReport:
    """Outcome of one tangent-cone intersection check.

    ``claims`` is a list of dicts with keys ``name``, ``relation``,
    ``verdict`` (holds/fails), ``label`` (None, "consistent
    counterexample", or "DISCREPANCY"), ``counterexamples``, and, on
    sampled runs, ``confidence``.  ``cones`` holds the exact generator
    data (exact mode) or the sampling parameters (sampled mode);
    ``directions_csv`` is the per-direction verdict table for sampled
    runs and None otherwise.
    """

    variant: str
    mode: str
    x0: np.ndarray
    hypothesis: dict
    cones: dict
    claims: list = field(default_factory=list)
    directions_csv: str | None = None

    def claim(self, name: str) -> dict:
        for c in self.claims:
            if c["name"] == name:
                return c
        raise KeyError(name)

    @property
    def has_discrepancy(self) -> bool:
        return any(c["label"] == LABEL_DISCREPANCY for c in self.claims)

    def serialize(self) -> dict:
        out = {
            "variant": self.variant,
            "mode": self.mode,
            "x0": [float(v) for v in self.x0],
            "hypothesis": self.hypothesis,
            "cones": self.cones,
            "claims": self.claims,
            "has_discrepancy": self.has_discrepancy,
        }
        if self.directions_csv is not None:
            out["directions_csv"] = self.directions_csv
        return out


# ---------------------------------------------------------------------------
# Hypothesis gating
# ---------------------------------------------------------------------------


def _hypothesis(sub_cert: TransversalityCertificate | None, x0: np.ndarray) -> dict:
    if sub_cert is None:
        return {
            "status": "unmet",
            "reason": "no subtransversality certificate supplied",
            "certificate": None,
        }
    base = {"certificate": sub_cert.serialize()}
    if sub_cert.notion != NOTION_SUB:
        base.update(
            status="unmet",
            reason=f"certificate is for notion {sub_cert.notion}, "
            "not subtransversality",
        )
        return base
    if sub_cert.status != CERTIFIED:
        base.update(
            status="unmet",
            reason=f"subtransversality certificate has status {sub_cert.status}",
        )
        return base
    anchor = as_vector(sub_cert.x0, x0.size)
    if float(np.linalg.norm(anchor - x0)) > 1e-9:
        base.update(
            status="unmet",
            reason="certificate is anchored at a different point",
        )
        return base
    base.update(status="certified", constants=dict(sub_cert.constants))
    return base


def _label(holds: bool, hyp: dict) -> str | None:
    if holds:
        return None
    return LABEL_DISCREPANCY if hyp["status"] == "certified" else LABEL_CONSISTENT


# ---------------------------------------------------------------------------
# Exact path
# ---------------------------------------------------------------------------


def _cone_contains(outer: PolyCone, inner: PolyCone) -> tuple[bool, list]:
    bad = [g for g in inner.generators() if not outer.contains_vector(g, tol=0)]
    return (not bad), [[float(v) for v in g] for g in bad]


def _worst_relative_residual(ca: PolyCone, cb: PolyCone, cab: PolyCone, bad: list) -> float:
    """Largest halfspace violation of the escaped meet generators, scaled by
    the product of the normal and generator magnitudes."""
    worst = 0.0
    for g in bad:
        gn = float(np.linalg.norm(g))
        for cone in (ca, cb):
            for n in cone.halfspace_normals():
                nf = [float(x) for x in n]
                dot = float(np.dot(nf, g))
                scale = gn * float(np.linalg.norm(nf))
                if scale > 0 and dot > 0:
                    worst = max(worst, dot / scale)
    return worst


def _exact_claims(
    variant: str,
    ca: PolyCone,
    cb: PolyCone,
    cab: PolyCone,
    hyp: dict,
) -> list:
    lhs = cone_intersect(ca, cb)
    inc_ok, inc_bad = _cone_contains(cab, lhs)
    claims = []
    if variant == VARIANT_BOULIGAND_DERIVABLE:
        claims.append(
            {
                "name": "tangent_meet_inclusion",
                "relation": "T_A(x0) & G_B(x0) <= T_{A&B}(x0)",
                "verdict": HOLDS if inc_ok else FAILS,
                "label": _label(inc_ok, hyp),
                "counterexamples": inc_bad,
            }
        )
        # forward direction is unconditional monotonicity of derivable cones
        fwd_ok, fwd_bad = _cone_contains(lhs, cab)
        eq_ok = inc_ok and fwd_ok
        claims.append(
            {
                "name": "derivable_equality",
                "relation": "G_A(x0) & G_B(x0) = G_{A&B}(x0)",
                "verdict": HOLDS if eq_ok else FAILS,
                "label": LABEL_DISCREPANCY if not fwd_ok else _label(eq_ok, hyp),
                "counterexamples": fwd_bad + inc_bad,
            }
        )
    else:
        claims.append(
            {
                "name": "clarke_meet_inclusion",
                "relation": "Tc_A(x0) & Tc_B(x0) <= Tc_{A&B}(x0)",
                "verdict": HOLDS if inc_ok else FAILS,
                "label": _label(inc_ok, hyp),
                "counterexamples": inc_bad,
            }
        )
    mono_a, bad_a = _cone_contains(ca, cab)
    mono_b, bad_b = _cone_contains(cb, cab)
    if not (mono_a and mono_b):
        # T_{A&B} <= T_A holds for arbitrary sets, so an exact violation is
        # either float-derived meet data that is not bit-consistent with the
        # operands (tiny relative residual: hand off to the sampled path) or
        # a genuine meet bug (anything larger)
        worst = _worst_relative_residual(ca, cb, cab, bad_a + bad_b)
        if worst <= 1e-9:
            raise UnsupportedVariantError(
                "exact meet representation is not bit-consistent with the "
                f"operands (relative residual {worst:.1e}); sampling instead"
            )
        raise ToolkitError(
            "exact monotone sanity violated; the meet construction is wrong"
        )
    claims.append(
        {
            "name": "monotone_sanity",
            "relation": "T_{A&B}(x0) <= T_A(x0) and T_{A&B}(x0) <= T_B(x0)",
            "verdict": HOLDS,
            "label": None,
            "counterexamples": bad_a + bad_b,
        }
    )
    return claims


# ---------------------------------------------------------------------------
# Sampled path
# ---------------------------------------------------------------------------


class _MeetProxy(SetSpec):
    """Alternating-projection surrogate for A & B without an exact meet.

    The distance estimate adds the residual membership defect of the
    landing point so that a stalled projection cannot impersonate a
    nearby intersection point.
    """

    def __init__(self, a: SetSpec, b: SetSpec, iters: int = 120):
        self.a = a
        self.b = b
        self.iters = iters
        self.dim = a.dim

    @property
    def oracle_exact(self) -> bool:
        return False

    def project(self, x) -> np.ndarray:
        y = as_vector(x, self.dim)
        for _ in range(self.iters):
            y2 = self.b.project(self.a.project(y))
            if float(np.linalg.norm(y2 - y)) < 1e-13:
                return y2
            y = y2
        return y

    def member(self, x, tol: float = _MEMBER_TOL) -> bool:
        x = as_vector(x, self.dim)
        return self.a.distance(x) <= tol and self.b.distance(x) <= tol

    def distance(self, x) -> float:
        x = as_vector(x, self.dim)
        y = self.project(x)
        defect = max(self.a.distance(y), self.b.distance(y))
        return float(np.linalg.norm(x - y)) + defect


def _net_count(dim: int, budget_scale: float) -> int:
    base = {2: 720, 3: 2000}.get(dim, 2000)
    return max(32, int(round(base * budget_scale)))


def _verdicts(profile: np.ndarray, tol: float) -> tuple[str, str]:
    """Bouligand (liminf) and derivable (whole curve) verdicts from one
    residual profile; OUT needs the profile to clear 10 * tol."""
    mn = float(np.min(profile))
    mx = float(np.max(profile))
    t_verdict = IN if mn <= tol else (OUT if mn >= 10.0 * tol else UNDECIDED)
    g_verdict = IN if mx <= tol else (OUT if mn >= 10.0 * tol else UNDECIDED)
    return t_verdict, g_verdict


def _sampled_tables(
    a: SetSpec,
    b: SetSpec,
    meet: SetSpec,
    x0: np.ndarray,
    tol: float,
    budget_scale: float,
) -> tuple[list, int]:
    dim = x0.size
    count = _net_count(dim, budget_scale)
    net = direction_net(dim, count)
    sc_a = SampledCone(base=a, point=x0, tol=tol)
    sc_b = SampledCone(base=b, point=x0, tol=tol)
    # a proxy meet is noisy at tiny t, so its probe grid stops earlier
    t_lo = 1e-5 if getattr(meet, "oracle_exact", True) else 1e-4
    sc_m = SampledCone(base=meet, point=x0, tol=tol, t_lo=t_lo)
    rows = []
    for v in net:
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0:
            continue
        v = v / nrm
        pa = sc_a.residual_profile(v)
        pb = sc_b.residual_profile(v)
        pm = sc_m.residual_profile(v)
        ta, ga = _verdicts(pa, tol)
        tb, gb = _verdicts(pb, tol)
        tm, gm = _verdicts(pm, tol)
        rows.append(
            {
                "direction": v,
                "T_A": ta,
                "G_A": ga,
                "T_B": tb,
                "G_B": gb,
                "T_M": tm,
                "G_M": gm,
                "min_A": float(np.min(pa)),
                "min_B": float(np.min(pb)),
                "min_M": float(np.min(pm)),
                "max_A": float(np.max(pa)),
                "max_B": float(np.max(pb)),
                "max_M": float(np.max(pm)),
            }
        )
    return rows, count


def _rows_csv(rows: list, dim: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    head = ["index"] + [f"v{i}" for i in range(dim)]
    head += ["T_A", "G_A", "T_B", "G_B", "T_meet", "G_meet"]
    head += ["min_A", "min_B", "min_meet", "max_A", "max_B", "max_meet"]
    writer.writerow(head)
    for i, r in enumerate(rows):
        writer.writerow(
            [i]
            + [f"{v:.12g}" for v in r["direction"]]
            + [r["T_A"], r["G_A"], r["T_B"], r["G_B"], r["T_M"], r["G_M"]]
            + [
                f"{r[k]:.6g}"
                for k in ("min_A", "min_B", "min_M", "max_A", "max_B", "max_M")
            ]
        )
    return buf.getvalue()


def _counterexample(row: dict, keys: tuple[str, str, str]) -> dict:
    return {
        "direction": [float(v) for v in row["direction"]],
        "verdicts": {k: row[k] for k in keys},
        "min_residuals": {
            "A": row["min_A"],
            "B": row["min_B"],
            "meet": row["min_M"],
        },
    }


def _sampled_claims(variant: str, rows: list, hyp: dict) -> list:
    claims = []

    def decisive(keys):
        return sum(1 for r in rows if all(r[k] != UNDECIDED for k in keys))

    def fraction(keys):
        return decisive(keys) / len(rows) if rows else 0.0

    if variant == VARIANT_BOULIGAND_DERIVABLE:
        keys = ("T_A", "G_B", "T_M")
        bad = [r for r in rows if r["T_A"] == IN and r["G_B"] == IN and r["T_M"] == OUT]
        ok = not bad
        claims.append(
            {
                "name": "tangent_meet_inclusion",
                "relation": "T_A(x0) & G_B(x0) <= T_{A&B}(x0)",
                "verdict": HOLDS if ok else FAILS,
                "label": _label(ok, hyp),
                "confidence": fraction(keys),
                "counterexamples": [_counterexample(r, keys) for r in bad[:8]],
            }
        )
        gkeys = ("G_A", "G_B", "G_M")
        bwd_bad = [
            r for r in rows if r["G_A"] == IN and r["G_B"] == IN and r["G_M"] == OUT
        ]
        fwd_bad = [
            r
            for r in rows
            if r["G_M"] == IN and (r["G_A"] == OUT or r["G_B"] == OUT)
        ]
        eq_ok = not bwd_bad and not fwd_bad
        claims.append(
            {
                "name": "derivable_equality",
                "relation": "G_A(x0) & G_B(x0) = G_{A&B}(x0)",
                "verdict": HOLDS if eq_ok else FAILS,
                "label": LABEL_DISCREPANCY if fwd_bad else _label(eq_ok, hyp),
                "confidence": fraction(gkeys),
                "counterexamples": [
                    _counterexample(r, gkeys) for r in (fwd_bad + bwd_bad)[:8]
                ],
            }
        )
    else:
        # Clarke cones have no direct sampling criterion; the derivable-mode
        # curve test is the conservative point surrogate and is flagged
        keys = ("G_A", "G_B", "G_M")
        bad = [r for r in rows if r["G_A"] == IN and r["G_B"] == IN and r["G_M"] == OUT]
        ok = not bad
        claims.append(
            {
                "name": "clarke_meet_inclusion",
                "relation": "Tc_A(x0) & Tc_B(x0) <= Tc_{A&B}(x0)",
                "verdict": HOLDS if ok else FAILS,
                "label": _label(ok, hyp),
                "confidence": fraction(keys),
                "note": "derivable-mode sampling used as the Clarke surrogate",
                "counterexamples": [_counterexample(r, keys) for r in bad[:8]],
            }
        )
    mkeys = ("T_A", "T_B", "T_M")
    mono_bad = [
        r for r in rows if r["T_M"] == IN and (r["T_A"] == OUT or r["T_B"] == OUT)
    ]
    mono_ok = not mono_bad
    claims.append(
        {
            "name": "monotone_sanity",
            "relation": "T_{A&B}(x0) <= T_A(x0) and T_{A&B}(x0) <= T_B(x0)",
            "verdict": HOLDS if mono_ok else FAILS,
            "label": None if mono_ok else LABEL_DISCREPANCY,
            "confidence": fraction(mkeys),
            "counterexamples": [_counterexample(r, mkeys) for r in mono_bad[:8]],
        }
    )
    return claims


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------


def _run_check(
    variant: str,
    a: SetSpec,
    b: SetSpec,
    x0,
    sub_cert: TransversalityCertificate | None,
    budget_scale: float,
    tol: float,
) -> IntersectionReport:
    x0 = as_vector(x0, a.dim)
    if a.dim != b.dim:
        raise PreconditionError("sets live in different dimensions")
    if not (a.member(x0, _MEMBER_TOL) and b.member(x0, _MEMBER_TOL)):
        raise PreconditionError("base point must belong to both sets")
    hyp = _hypothesis(sub_cert, x0)

    fallback = None
    try:
        ca = clarke_cone_convex(a, x0)
        cb = clarke_cone_convex(b, x0)
        meet = intersect(a, b)
        cab = clarke_cone_convex(meet, x0)
        claims = _exact_claims(variant, ca, cb, cab, hyp)
    except UnsupportedVariantError as exc:
        fallback = str(exc)
    else:
        cones = {
            "T_A": ca.serialize(),
            "T_B": cb.serialize(),
            "T_meet": cab.serialize(),
            "meet_variant": type(meet).__name__,
        }
        return IntersectionReport(
            variant=variant,
            mode="exact",
            x0=x0,
            hypothesis=hyp,
            cones=cones,
            claims=claims,
        )

    try:
        meet = intersect(a, b)
    except UnsupportedVariantError:
        meet = _MeetProxy(a, b)
    rows, count = _sampled_tables(a, b, meet, x0, tol, budget_scale)
    claims = _sampled_claims(variant, rows, hyp)
    cones = {
        "kind": "sampled",
        "tol": tol,
        "net_count": count,
        "meet": type(meet).__name__,
        "fallback_reason": fallback,
    }
    return IntersectionReport(
        variant=variant,
        mode="sampled",
        x0=x0,
        hypothesis=hyp,
        cones=cones,
        claims=claims,
        directions_csv=_rows_csv(rows, x0.size),
    )


def check_bouligand_derivable(
    a: SetSpec,
    b: SetSpec,
    x0,
    sub_cert: TransversalityCertificate | None = None,
    *,
    budget_scale: float = 1.0,
    tol: float = SAMPLED_TOL,
) -> IntersectionReport:
    """Check T_A & G_B <= T_{A&B} and G_A & G_B = G_{A&B} at x0.

    Both relations hold whenever A and B are subtransversal at x0; pass
    the certificate through ``sub_cert`` to assert that hypothesis.  A
    failed claim without a certified hypothesis is reported as a
    consistent counterexample; with one, as a discrepancy.
    """
    return _run_check(
        VARIANT_BOULIGAND_DERIVABLE, a, b, x0, sub_cert, budget_scale, tol
    )


def check_clarke(
    a: SetSpec,
    b: SetSpec,
    x0,
    sub_cert: TransversalityCertificate | None = None,
    *,
    budget_scale: float = 1.0,
    tol: float = SAMPLED_TOL,
) -> IntersectionReport:
    """Check the Clarke-cone inclusion Tc_A & Tc_B <= Tc_{A&B} at x0.

    Exact on convex variants, where the Clarke cone has a closed form
    and coincides with the Bouligand cone; sampled elsewhere with a
    derivable-mode surrogate, which the report flags.
    """
    return _run_check(VARIANT_CLARKE, a, b, x0, sub_cert, budget_scale, tol)
