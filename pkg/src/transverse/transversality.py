"""Certifiers and estimators for transversality notions of closed sets.

Covered notions, each reported through :class:`TransversalityCertificate`:

* ``Transversal`` - the translate-intersection criterion: for sampled
  radii rho, shift vectors w1, w2 of norm <= alpha and base points near x0,
  ``(A - xA - rho*w1) ∩ (B - xB - rho*w2) ∩ rho*Ball != empty``.
* ``TangentiallyTransversal`` - constants (M, delta, eta): from any nearby
  pair (xA, xB) there is a small step (t, wA, wB), norms <= M, staying in
  the sets and shrinking the gap by at least t*eta.
* ``Subtransversal`` - constants (K, delta): the error bound
  ``d(x, A∩B) <= K (d(x,A) + d(x,B))`` near x0.
* ``Prop44Sufficient`` - a tangent-cone covering condition whose constants
  transfer to tangential transversality.
* ``MassiveDense`` - density of the Clarke-cone difference (massiveness is
  automatic in finite dimension), which implies tangential transversality.

Exact constant transfers between the notions are provided with their
formula strings.  Certifiers from sampled paths label their result
``empirical``; only exact cone/polyhedral paths emit ``exact``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import sets as _sets
from .cones import (
    PolyCone,
    clarke_cone_convex,
    cone_diff,
    is_dense_difference,
    _fr,
)
from .errors import (
    InfeasibleProblemError,
    PreconditionError,
    UnsupportedVariantError,
)
from .numkernel import FEAS_TOL, as_vector, direction_net, project_polyhedron
from .sets import (
    AffineSet,
    Ball,
    Polyhedron,
    SetSpec,
    approx_intersection_projection,
    intersect,
    points_of,
)

STEP_RESIDUAL_TOL = 1e-9
REFUTE_FACTOR = 10.0

CERTIFIED = "CERTIFIED"
REFUTED = "REFUTED"
INCONCLUSIVE = "INCONCLUSIVE"

NOTION_TRANSVERSAL = "Transversal"
NOTION_TANGENTIAL = "TangentiallyTransversal"
NOTION_SUB = "Subtransversal"
NOTION_PROP44 = "Prop44Sufficient"
NOTION_MASSIVE_DENSE = "MassiveDense"


@dataclass
class TransversalityCertificate:
    notion: str
    x0: np.ndarray
    status: str
    constants: dict = field(default_factory=dict)
    witness: dict | None = None
    mode: str = "empirical"
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status == CERTIFIED:
            required = {
                NOTION_TRANSVERSAL: ("alpha", "delta"),
                NOTION_TANGENTIAL: ("M", "eta", "delta"),
                NOTION_SUB: ("K", "delta"),
                NOTION_PROP44: ("M", "eta", "delta", "alpha"),
                NOTION_MASSIVE_DENSE: (),
            }[self.notion]
            missing = [k for k in required if k not in self.constants]
            if missing:
                raise PreconditionError(
                    f"certified {self.notion} certificate lacks constants {missing}"
                )
        if self.status == REFUTED and self.witness is None:
            raise PreconditionError("refuted certificate lacks a witness")

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def serialize(self) -> dict:
        out = {
            "notion": self.notion,
            "x0": [float(v) for v in self.x0],
            "status": self.status,
            "constants": {k: float(v) for k, v in self.constants.items()},
            "mode": self.mode,
        }
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        if self.details:
            out["details"] = _jsonable(self.details)
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [float(v) for v in obj]
    if isinstance(obj, (np.floating, Fraction)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


@dataclass(frozen=True)
class StepPair:
    """One admissible gap-reducing move for a pair (xA, xB)."""

    t: float
    wa: np.ndarray
    wb: np.ndarray
    gap_decrease: float


# ---------------------------------------------------------------------------
# Step oracle
# ---------------------------------------------------------------------------


def verify_step(
    a: SetSpec,
    b: SetSpec,
    xa: np.ndarray,
    xb: np.ndarray,
    step: StepPair,
    m: float,
    eta: float,
    tol: float = STEP_RESIDUAL_TOL,
) -> bool:
    """Independent re-check of the step invariants (defense in depth)."""
    t, wa, wb = step.t, step.wa, step.wb
    if t <= 0:
        return False
    if np.linalg.norm(wa) > m + tol or np.linalg.norm(wb) > m + tol:
        return False
    if not a.member(xa + t * wa, tol) or not b.member(xb + t * wb, tol):
        return False
    gap0 = float(np.linalg.norm(xa - xb))
    gap1 = float(np.linalg.norm(xa - xb + t * (wa - wb)))
    return gap1 <= gap0 - t * eta + 1e-12 * max(1.0, gap0)


def default_tgrid(t0: float, levels: int = 24, floor: float = 1e-8) -> np.ndarray:
    ts = []
    t = t0
    while t >= floor and len(ts) < levels:
        ts.append(t)
        t *= 0.5
    return np.asarray(ts if ts else [floor])


def tangential_step_oracle(
    a: SetSpec,
    b: SetSpec,
    xa,
    xb,
    m: float,
    eta: float,
    tgrid: Sequence[float] | None = None,
    rng: np.random.Generator | None = None,
    budget: int = 8,
) -> StepPair | None:
    """Search a gap-reducing step for the pair (xa, xb).

    Candidate moves per step size t: move each point toward the other (or
    toward a joint near-intersection target) and re-project onto its set,
    plus randomized perturbations of those directions.  Every candidate is
    re-verified against the defining inequality before being returned;
    ``None`` means the budget was exhausted.
    """
    xa = as_vector(xa)
    xb = as_vector(xb, xa.shape[0])
    gap = float(np.linalg.norm(xa - xb))
    if gap <= 0:
        raise PreconditionError("step oracle needs distinct base points")
    if rng is None:
        rng = np.random.default_rng(0)
    if tgrid is None:
        tgrid = default_tgrid(min(1.0, gap / max(eta, 1e-12)))

    u_ab = (xb - xa) / gap

    target = None
    try:
        target = approx_intersection_projection(a, b, 0.5 * (xa + xb), rng=rng)
    except Exception:
        target = None

    def candidates(t: float) -> Iterable[tuple[np.ndarray, np.ndarray]]:
        reach = t * m
        # toward each other, both moving
        pa = a.project(xa + min(reach, 0.5 * gap) * u_ab)
        pb = b.project(xb - min(reach, 0.5 * gap) * u_ab)
        yield (pa - xa) / t, (pb - xb) / t
        # one-sided moves (covers the convex A == B case exactly)
        pa_full = a.project(xa + min(reach, gap) * u_ab)
        pb_full = b.project(xb - min(reach, gap) * u_ab)
        yield (pa_full - xa) / t, np.zeros_like(xb)
        yield np.zeros_like(xa), (pb_full - xb) / t
        # toward a joint near-intersection target
        if target is not None:
            da, db = target - xa, target - xb
            na, nb = np.linalg.norm(da), np.linalg.norm(db)
            qa = a.project(xa + (min(reach, na) / na) * da) if na > 0 else xa
            qb = b.project(xb + (min(reach, nb) / nb) * db) if nb > 0 else xb
            yield (qa - xa) / t, (qb - xb) / t
        # randomized perturbations of the directed move
        for _ in range(budget):
            noise_a = rng.standard_normal(xa.shape[0])
            noise_b = rng.standard_normal(xb.shape[0])
            ra = a.project(xa + reach * _unit(u_ab + 0.5 * noise_a))
            rb = b.project(xb + reach * _unit(-u_ab + 0.5 * noise_b))
            yield (ra - xa) / t, (rb - xb) / t

    for t in tgrid:
        for wa, wb in candidates(float(t)):
            na, nb = float(np.linalg.norm(wa)), float(np.linalg.norm(wb))
            if na > m + FEAS_TOL:
                wa = wa * ((m - FEAS_TOL) / na)
                wa = (a.project(xa + t * wa) - xa) / t
            if nb > m + FEAS_TOL:
                wb = wb * ((m - FEAS_TOL) / nb)
                wb = (b.project(xb + t * wb) - xb) / t
            gap1 = float(np.linalg.norm(xa - xb + t * (wa - wb)))
            step = StepPair(float(t), wa, wb, gap - gap1)
            if verify_step(a, b, xa, xb, step, m, eta):
                return step
    return None


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    return v / n if n > 0 else v


# ---------------------------------------------------------------------------
# Pair / point sampling
# ---------------------------------------------------------------------------


def _sample_in_set(
    s: SetSpec, x0: np.ndarray, delta: float, rng: np.random.Generator, count: int
) -> list[np.ndarray]:
    pts = [x0.copy()] if s.member(x0, 1e-7) else []
    for radius in (delta, 0.5 * delta, 0.1 * delta, 0.01 * delta):
        pts.extend(points_of(s, x0, radius, rng, count=max(2, count // 4)))
    out, seen = [], set()
    for p in pts:
        key = tuple(np.round(p, 12))
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out[: max(count, 4)]


def _sample_pairs(
    a: SetSpec,
    b: SetSpec,
    x0: np.ndarray,
    delta: float,
    rng: np.random.Generator,
    count: int,
) -> list[tuple[np.ndarray, np.ndarray]]:
    pa = _sample_in_set(a, x0, delta, rng, count)
    pb = _sample_in_set(b, x0, delta, rng, count)
    # projection-matched pairs straddle the geometry at matched offsets;
    # for tangency-type instances these are the pairs that defeat linear rates
    for xa in list(pa):
        pb.append(b.project(xa))
    for xb in list(pb):
        pa.append(a.project(xb))
    pairs = []
    for xa in pa:
        for xb in pb:
            if np.linalg.norm(xa - xb) > 1e-10:
                pairs.append((xa, xb))

    def adversity(p) -> float:
        gap = float(np.linalg.norm(p[0] - p[1]))
        scale = max(
            float(np.linalg.norm(p[0] - x0)), float(np.linalg.norm(p[1] - x0)), 1e-300
        )
        return gap / scale

    pairs.sort(key=adversity)
    head = pairs[: max(2, count // 2)]
    tail = pairs[len(head):]
    rng.shuffle(tail)
    return head + tail[: max(0, count - len(head))]


# ---------------------------------------------------------------------------
# Tangential constants estimator
# ---------------------------------------------------------------------------

DEFAULT_M_GRID = (1.0, 2.0, 4.0)
DEFAULT_ETA_GRID = (2.0, 1.5, 1.0, 0.75, 0.5, 0.25, 0.1, 0.05)


def estimate_tangential_constants(
    a: SetSpec,
    b: SetSpec,
    x0,
    budget: int = 12,
    delta: float = 0.5,
    m_grid: Sequence[float] = DEFAULT_M_GRID,
    eta_grid: Sequence[float] = DEFAULT_ETA_GRID,
    seed: int = 0,
    refinement_levels: int = 3,
) -> TransversalityCertificate:
    """Empirical (M, eta, delta) search over sampled nearby pairs.

    For each refinement level (delta shrinking 4x) sample pairs in the
    delta-balls and find, per pair, the largest grid eta some grid M
    validates through the step oracle.  CERTIFIED(empirical) carries the
    largest eta validated by every pair; a pair failing at every (M, eta)
    yields INCONCLUSIVE with that pair as witness.  Per-pair rates are
    reported so the profile near x0 stays visible rather than averaged.
    """
    x0 = as_vector(x0)
    if not (a.member(x0, 1e-7) and b.member(x0, 1e-7)):
        raise PreconditionError("x0 must lie in both sets")

    last_failure = None
    for level in range(refinement_levels):
        dlevel = delta * (0.25 ** level)
        rng = np.random.default_rng(seed + level)
        pairs = _sample_pairs(a, b, x0, dlevel, rng, budget)
        if not pairs:
            continue
        per_pair = []
        all_ok = True
        for xa, xb in pairs:
            best = None
            for eta in eta_grid:
                for m in m_grid:
                    step = tangential_step_oracle(
                        a, b, xa, xb, m, eta, rng=np.random.default_rng(seed), budget=4
                    )
                    if step is not None:
                        best = {"eta": eta, "M": m, "t": step.t}
                        break
                if best is not None:
                    break
            per_pair.append(
                {
                    "xa": xa,
                    "xb": xb,
                    "gap": float(np.linalg.norm(xa - xb)),
                    "validated": best,
                }
            )
            if best is None:
                all_ok = False
                last_failure = {"xa": xa, "xb": xb, "level": level}
        if all_ok:
            etas = [p["validated"]["eta"] for p in per_pair]
            ms = [p["validated"]["M"] for p in per_pair]
            eta_hat = min(etas)
            # the certified rate must hold for every pair at a single M
            m_hat = max(ms)
            return TransversalityCertificate(
                notion=NOTION_TANGENTIAL,
                x0=x0,
                status=CERTIFIED,
                constants={"M": m_hat, "eta": eta_hat, "delta": dlevel},
                mode="empirical",
                details={"per_pair": per_pair, "level": level},
            )
    return TransversalityCertificate(
        notion=NOTION_TANGENTIAL,
        x0=x0,
        status=INCONCLUSIVE,
        witness=None,
        mode="empirical",
        details={"failing_pair": last_failure, "budget": budget},
    )


# ---------------------------------------------------------------------------
# Subtransversality estimator
# ---------------------------------------------------------------------------


def _distance_to_intersection(
    a: SetSpec, b: SetSpec, x: np.ndarray, rng: np.random.Generator
) -> tuple[float, bool]:
    try:
        meet = intersect(a, b)
        return meet.distance(x), True
    except UnsupportedVariantError:
        y = approx_intersection_projection(a, b, x, rng=rng)
        return float(np.linalg.norm(x - y)), False
    except InfeasibleProblemError:
        raise


def estimate_subtransversality_constant(
    a: SetSpec,
    b: SetSpec,
    x0,
    delta: float,
    budget: int = 200,
    seed: int = 0,
    levels: int = 4,
) -> TransversalityCertificate:
    """Estimate K_hat = sup d(x, A∩B) / (d(x,A) + d(x,B)) near x0.

    The sample cloud depends only on (x0, delta, budget, seed), never on the
    operand order, and each base point is augmented with its projections onto
    both sets, so swapping A and B reproduces the identical estimate.  Points
    with denominator below 1e-12 carry no information and are excluded.
    REFUTED requires monotone escalation: the per-level maximum ratio doubles
    at each of 3 consecutive refinement levels (delta shrinking 4x per level,
    a genuine-unboundedness signature rather than one bad sample).
    """
    x0 = as_vector(x0)
    if not (a.member(x0, 1e-7) and b.member(x0, 1e-7)):
        raise PreconditionError("x0 must lie in both sets")
    level_max: list[float] = []
    best = {"ratio": 0.0, "x": None}
    exact = True
    details_levels = []
    for level in range(levels):
        dlevel = delta * (0.25 ** level)
        rng = np.random.default_rng(seed)  # same unit cloud at every level
        base = [x0 + dlevel * u for u in _unit_cloud(x0.shape[0], budget, rng)]
        cloud: list[np.ndarray] = []
        for p in base:
            cloud.append(p)
            cloud.append(a.project(p))
            cloud.append(b.project(p))
        dist_rng = np.random.default_rng(seed + 1)
        lvl_max = 0.0
        for x in cloud:
            if float(np.linalg.norm(x - x0)) > dlevel + 1e-12:
                continue
            da, db = a.distance(x), b.distance(x)
            denom = da + db
            if denom < 1e-12:
                continue
            dmeet, was_exact = _distance_to_intersection(a, b, x, dist_rng)
            exact = exact and was_exact
            ratio = dmeet / denom
            if ratio > lvl_max:
                lvl_max = ratio
            if ratio > best["ratio"]:
                best = {"ratio": ratio, "x": x.copy()}
        level_max.append(lvl_max)
        details_levels.append({"delta": dlevel, "max_ratio": lvl_max})
    escalations = sum(
        1
        for i in range(len(level_max) - 1)
        if level_max[i] > 0 and level_max[i + 1] >= 2.0 * level_max[i]
    )
    monotone_tail = all(
        level_max[i + 1] >= 2.0 * level_max[i]
        for i in range(len(level_max) - 3, len(level_max) - 1)
        if i >= 0 and level_max[i] > 0
    )
    if escalations >= 3 and monotone_tail:
        return TransversalityCertificate(
            notion=NOTION_SUB,
            x0=x0,
            status=REFUTED,
            witness={
                "x": best["x"],
                "ratio": best["ratio"],
                "level_max_ratios": level_max,
            },
            mode="empirical",
            details={"levels": details_levels},
        )
    k_hat = max(level_max)
    return TransversalityCertificate(
        notion=NOTION_SUB,
        x0=x0,
        status=CERTIFIED,
        constants={"K": k_hat, "delta": delta},
        witness={"x": best["x"], "ratio": best["ratio"]} if best["x"] is not None else None,
        mode="exact" if exact else "empirical",
        details={"levels": details_levels, "intersection_exact": exact},
    )


def _unit_cloud(dim: int, budget: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Deterministic net plus seeded uniform ball points, radii in (0, 1]."""
    out = [u for u in direction_net(dim, max(8, budget // 3))]
    out.extend(0.5 * u for u in direction_net(dim, max(4, budget // 6)))
    while len(out) < budget:
        v = rng.standard_normal(dim)
        n = float(np.linalg.norm(v))
        if n == 0:
            continue
        r = rng.random() ** (1.0 / dim)
        out.append((r / n) * v)
    return out[:budget]


# ---------------------------------------------------------------------------
# Translate-intersection criterion
# ---------------------------------------------------------------------------


def _as_rows(s: SetSpec) -> tuple[np.ndarray, np.ndarray] | None:
    """Inequality rows for the exact feasibility path, if available."""
    base = _sets._debase(s) if hasattr(_sets, "_debase") else s
    if isinstance(base, Polyhedron):
        return base.a, base.b
    if isinstance(base, AffineSet):
        poly = _sets._affine_as_polyhedron(base)
        return poly.a, poly.b
    return None


def certify_transversality_kruger(
    a: SetSpec,
    b: SetSpec,
    x0,
    alpha: float,
    delta: float,
    budget: int = 6,
    seed: int = 0,
    sampled_fallback: bool = False,
) -> TransversalityCertificate:
    """Translate-intersection criterion with constants (alpha, delta).

    For sampled rho in (0, delta), shifts w1, w2 on the alpha-sphere (the
    adversarial extremes, paired as +/- the same direction, plus random
    draws) and base points xA, xB near x0, checks
    ``(A - xA - rho*w1) ∩ (B - xB - rho*w2) ∩ rho*Ball != empty``.
    Exact path: both operands reduce to inequality rows and feasibility is a
    min-norm projection; REFUTED needs the norm to exceed rho by 10x
    tolerance.  Non-polyhedral operands require ``sampled_fallback`` and
    label the certificate empirical.
    """
    x0 = as_vector(x0)
    if alpha <= 0 or delta <= 0:
        raise PreconditionError("alpha and delta must be positive")
    if not (a.member(x0, 1e-7) and b.member(x0, 1e-7)):
        raise PreconditionError("x0 must lie in both sets")
    rows_a, rows_b = _as_rows(a), _as_rows(b)
    exact = rows_a is not None and rows_b is not None
    if not exact and not sampled_fallback:
        raise UnsupportedVariantError(
            "translate-intersection criterion needs inequality-row operands; "
            "pass sampled_fallback=True to allow the projection-residual path"
        )
    rng = np.random.default_rng(seed)
    rhos = [delta * f for f in (0.9, 0.3, 0.05)]
    dirs = direction_net(x0.shape[0], max(6, budget))
    shift_pairs = [(alpha * u, -alpha * u) for u in dirs]
    shift_pairs += [(alpha * u, alpha * u) for u in dirs[: len(dirs) // 3]]
    for _ in range(budget):
        u1 = _unit(rng.standard_normal(x0.shape[0]))
        u2 = _unit(rng.standard_normal(x0.shape[0]))
        shift_pairs.append((alpha * u1, alpha * u2))
    pa = _sample_in_set(a, x0, delta, rng, max(3, budget // 2))[: max(3, budget // 2)]
    pb = _sample_in_set(b, x0, delta, rng, max(3, budget // 2))[: max(3, budget // 2)]
    checked = 0
    for rho in rhos:
        for xa in pa:
            for xb in pb:
                for w1, w2 in shift_pairs:
                    checked += 1
                    ok, margin, point = _translate_meet(
                        a, b, rows_a, rows_b, xa, xb, rho, w1, w2, rng
                    )
                    if not ok:
                        witness = {
                            "rho": rho,
                            "w1": w1,
                            "w2": w2,
                            "xa": xa,
                            "xb": xb,
                            "violation": margin,
                        }
                        return TransversalityCertificate(
                            notion=NOTION_TRANSVERSAL,
                            x0=x0,
                            status=REFUTED,
                            witness=witness,
                            mode="exact" if exact else "empirical",
                            details={"checked": checked},
                        )
    return TransversalityCertificate(
        notion=NOTION_TRANSVERSAL,
        x0=x0,
        status=CERTIFIED,
        constants={"alpha": alpha, "delta": delta},
        mode="exact" if exact else "empirical",
        details={"checked": checked, "rhos": rhos},
    )


def _translate_meet(
    a: SetSpec,
    b: SetSpec,
    rows_a,
    rows_b,
    xa: np.ndarray,
    xb: np.ndarray,
    rho: float,
    w1: np.ndarray,
    w2: np.ndarray,
    rng: np.random.Generator,
) -> tuple[bool, float, np.ndarray | None]:
    """Does (A - xa - rho w1) ∩ (B - xb - rho w2) meet the rho-ball?"""
    if rows_a is not None and rows_b is not None:
        aa, ba = rows_a
        ab, bb = rows_b
        shift_a = xa + rho * w1
        shift_b = xb + rho * w2
        rows = np.vstack([aa, ab]) if aa.size or ab.size else np.zeros((0, xa.shape[0]))
        rhs = np.concatenate(
            [ba - (aa @ shift_a if aa.size else np.zeros(0)),
             bb - (ab @ shift_b if ab.size else np.zeros(0))]
        )
        try:
            y = project_polyhedron(np.zeros(xa.shape[0]), rows, rhs)
        except InfeasibleProblemError:
            return False, float("inf"), None
        nrm = float(np.linalg.norm(y))
        if nrm <= rho + REFUTE_FACTOR * FEAS_TOL:
            return True, 0.0, y
        return False, nrm - rho, y
    # sampled path: alternating projections between the two translated sets
    y = np.zeros(xa.shape[0])
    for _ in range(200):
        y = a.project(y + xa + rho * w1) - xa - rho * w1
        y = b.project(y + xb + rho * w2) - xb - rho * w2
        n = float(np.linalg.norm(y))
        if n > rho:
            y = y * (rho / n)
        resid_a = a.distance(y + xa + rho * w1)
        resid_b = b.distance(y + xb + rho * w2)
        if max(resid_a, resid_b) <= FEAS_TOL and float(np.linalg.norm(y)) <= rho + FEAS_TOL:
            return True, 0.0, y
    violation = max(
        a.distance(y + xa + rho * w1), b.distance(y + xb + rho * w2)
    )
    if violation < REFUTE_FACTOR * FEAS_TOL:
        return True, 0.0, y
    return False, violation, y


# ---------------------------------------------------------------------------
# Constant transfers
# ---------------------------------------------------------------------------


def transfer_constants_transversal_to_tangential(alpha, delta):
    """(alpha, delta) -> (M, eta, delta) = (alpha + 1, alpha, delta), exact."""
    al, dl = _fr(alpha), _fr(delta)
    if al <= 0 or dl <= 0:
        raise PreconditionError("alpha and delta must be positive")
    out = (al + 1, al, dl)
    return out


def transfer_constants_tangential_to_sub(m, eta, delta):
    """(M, eta, delta) -> (K, zeta) = (1 + M/eta, delta / (2 (1 + 2M/eta)))."""
    mm, ee, dd = _fr(m), _fr(eta), _fr(delta)
    if mm <= 0 or ee <= 0 or dd <= 0:
        raise PreconditionError("M, eta, delta must be positive")
    k = 1 + mm / ee
    zeta = dd / (2 * (1 + 2 * mm / ee))
    return k, zeta


TRANSFER_FORMULAS = {
    "transversal_to_tangential": "M = alpha + 1; eta = alpha; delta unchanged",
    "tangential_to_sub": "K = 1 + M/eta; zeta = delta / (2 (1 + 2 M/eta))",
}


# ---------------------------------------------------------------------------
# Covering sufficient condition
# ---------------------------------------------------------------------------


def _dist_to_clamped_cone_diff(
    v: np.ndarray, cone_a: PolyCone, cone_b: PolyCone, m: float, iters: int = 400
) -> float:
    """Distance from v to (cone_a ∩ M·Ball) - cone_b via projected gradient.

    The objective ||v - u + w||^2 is jointly convex; the feasible sets are a
    radially clamped cone (its projection is the clamp of the cone
    projection) and a cone, both projected exactly through the active-row
    solver.
    """
    na = cone_a.halfspace_array()
    nb = cone_b.halfspace_array()
    dim = v.shape[0]

    def proj_cone(z: np.ndarray, rows: np.ndarray) -> np.ndarray:
        if rows.shape[0] == 0:
            return z
        return project_polyhedron(z, rows, np.zeros(rows.shape[0]))

    def proj_clamped(z: np.ndarray) -> np.ndarray:
        p = proj_cone(z, na)
        n = float(np.linalg.norm(p))
        return p if n <= m else p * (m / n)

    u = proj_clamped(v)
    w = proj_cone(np.zeros(dim), nb)
    lr = 0.25
    for _ in range(iters):
        r = v - u + w
        u_new = proj_clamped(u + lr * 2.0 * r)
        w_new = proj_cone(w - lr * 2.0 * r, nb)
        if max(
            float(np.linalg.norm(u_new - u)), float(np.linalg.norm(w_new - w))
        ) < 1e-12:
            u, w = u_new, w_new
            break
        u, w = u_new, w_new
    return float(np.linalg.norm(v - u + w))


def certify_prop44(
    a: SetSpec,
    b: SetSpec,
    x0,
    delta: float,
    alpha: float,
    m: float,
    seed: int = 0,
    net_size: int = 360,
    budget: int = 4,
) -> TransversalityCertificate:
    """Tangent-cone covering condition: the unit ball must be covered by
    ``(G_A(xA) ∩ M·Ball) - T_B(xB) + alpha·Ball`` at sampled nearby base
    points; success transfers to tangential constants (M+3, eta < 1-alpha,
    delta)."""
    x0 = as_vector(x0)
    if not 0 <= alpha < 1:
        raise PreconditionError("alpha must lie in [0, 1)")
    if not (a.member(x0, 1e-7) and b.member(x0, 1e-7)):
        raise PreconditionError("x0 must lie in both sets")
    rng = np.random.default_rng(seed)
    net = direction_net(x0.shape[0], net_size)
    net_resolution = _net_resolution(x0.shape[0], net_size)
    pa = _sample_in_set(a, x0, delta, rng, budget)
    pb = _sample_in_set(b, x0, delta, rng, budget)
    worst = {"deficit": 0.0, "v": None, "xa": None, "xb": None}
    for xa in pa:
        cone_a = clarke_cone_convex(a, xa)
        for xb in pb:
            cone_b = clarke_cone_convex(b, xb)
            for v in net:
                d = _dist_to_clamped_cone_diff(v, cone_a, cone_b, m)
                deficit = d - alpha - net_resolution
                if deficit > worst["deficit"]:
                    worst = {"deficit": deficit, "v": v, "xa": xa, "xb": xb, "dist": d}
    eta = 0.9 * (1.0 - alpha)
    if worst["v"] is not None and worst["deficit"] > REFUTE_FACTOR * FEAS_TOL:
        return TransversalityCertificate(
            notion=NOTION_PROP44,
            x0=x0,
            status=REFUTED,
            witness=worst,
            mode="exact",
            details={"net_size": net_size, "net_resolution": net_resolution},
        )
    return TransversalityCertificate(
        notion=NOTION_PROP44,
        x0=x0,
        status=CERTIFIED,
        constants={"M": m + 3.0, "eta": eta, "delta": delta, "alpha": alpha},
        mode="exact",
        details={
            "net_size": net_size,
            "net_resolution": net_resolution,
            "eta_note": "any rate below 1 - alpha transfers; 0.9 (1 - alpha) reported",
        },
    )


def _net_resolution(dim: int, count: int) -> float:
    if dim == 1:
        return 0.0
    if dim == 2:
        return float(np.pi / count)
    return float(2.0 / np.sqrt(count))


# ---------------------------------------------------------------------------
# Massive + dense cone difference
# ---------------------------------------------------------------------------


def certify_massive_dense(
    a: SetSpec,
    b: SetSpec,
    x0,
    cross_check: bool = True,
    seed: int = 0,
) -> TransversalityCertificate:
    """Dense Clarke-cone difference at x0 (massiveness is automatic in finite
    dimension: K = eps*Ball is compact and k := v keeps x + t(v - k) = x in
    the set).  CERTIFIED iff T_A(x0) - T_B(x0) is dense; the certificate then
    records an empirical tangential-constants cross-check alongside."""
    x0 = as_vector(x0)
    cone_a = clarke_cone_convex(a, x0)
    cone_b = clarke_cone_convex(b, x0)
    dense, cert = is_dense_difference(cone_a, cone_b)
    details = {
        "massiveness": "automatic in finite dimension (compact K = eps*Ball)",
        "density_certificate": cert,
        "cone_a": cone_a.serialize(),
        "cone_b": cone_b.serialize(),
    }
    if not dense:
        return TransversalityCertificate(
            notion=NOTION_MASSIVE_DENSE,
            x0=x0,
            status=REFUTED,
            witness={
                "separating_functional": cert["witness_float"],
                "violation": "cone difference stays inside a closed halfspace",
            },
            mode="exact",
            details=details,
        )
    if cross_check:
        emp = estimate_tangential_constants(a, b, x0, budget=6, seed=seed)
        details["tangential_cross_check"] = {
            "status": emp.status,
            "constants": {k: float(v) for k, v in emp.constants.items()},
        }
    return TransversalityCertificate(
        notion=NOTION_MASSIVE_DENSE,
        x0=x0,
        status=CERTIFIED,
        constants={},
        mode="exact",
        details=details,
    )


# ---------------------------------------------------------------------------
# Alternating projections
# ---------------------------------------------------------------------------


def altproj_rate(
    a: SetSpec,
    b: SetSpec,
    x_start,
    iters: int = 60,
) -> dict:
    """Run x <- P_A(P_B(x)) and fit an R-linear rate to the intersection gap.

    Returns the per-iteration trace, the fitted rate (slope of log gap), and
    stall/sublinear flags; a start already in A∩B reports zero iterations
    with the rate flagged undefined.
    """
    x = as_vector(x_start)
    rng = np.random.default_rng(0)
    try:
        meet = intersect(a, b)
        gap_fn = meet.distance
        exact = True
    except (UnsupportedVariantError, InfeasibleProblemError):
        gap_fn = lambda p: float(
            np.linalg.norm(p - approx_intersection_projection(a, b, p, rng=rng))
        )
        exact = False
    if a.member(x, 1e-9) and b.member(x, 1e-9):
        return {
            "iterations": 0,
            "rate": None,
            "flag": "start already in the intersection; rate undefined",
            "trace": [],
            "exact_gap": exact,
        }
    trace = []
    for k in range(iters):
        x = a.project(b.project(x))
        g = gap_fn(x)
        trace.append({"k": k, "gap": g})
        if g < 1e-14:
            break
    gaps = np.asarray([t["gap"] for t in trace])
    pos = gaps > 1e-15
    flags = []
    rate = None
    if pos.sum() >= 4:
        ks = np.arange(len(gaps))[pos]
        logs = np.log(gaps[pos])
        tail = slice(max(0, len(ks) // 4), None)
        slope = np.polyfit(ks[tail], logs[tail], 1)[0]
        rate = float(np.exp(slope))
        quarter = len(ks) // 4
        if quarter >= 3:
            s1 = np.polyfit(ks[:quarter], logs[:quarter], 1)[0]
            s2 = np.polyfit(ks[-quarter:], logs[-quarter:], 1)[0]
            if np.exp(s2) > 0.9 and np.exp(s2) > np.exp(s1) + 0.02:
                flags.append("sublinear decay: windowed rate drifting toward 1")
        if len(gaps) >= 2 and gaps[-1] >= gaps[max(0, len(gaps) - 5)] * 0.999:
            flags.append("stalled")
    return {
        "iterations": len(trace),
        "rate": rate,
        "flag": "; ".join(flags) if flags else None,
        "trace": trace,
        "exact_gap": exact,
    }


# ---------------------------------------------------------------------------
# Implication chain
# ---------------------------------------------------------------------------


def verify_implication_chain(
    a: SetSpec,
    b: SetSpec,
    x0,
    alpha: float,
    delta: float,
    budget: int = 8,
    seed: int = 0,
) -> dict:
    """Certify the translate-intersection criterion, then validate the
    transferred tangential constants pair-by-pair on one shared sample set,
    then check the transferred (K, zeta) bounds every sampled
    subtransversality ratio within +5%."""
    x0 = as_vector(x0)
    report: dict = {"alpha": alpha, "delta": delta}
    kruger = certify_transversality_kruger(a, b, x0, alpha, delta, budget=budget, seed=seed)
    report["kruger_status"] = kruger.status
    if kruger.status != CERTIFIED:
        report["chain"] = "stopped: criterion not certified"
        return report
    m, eta, dl = transfer_constants_transversal_to_tangential(alpha, delta)
    m_f, eta_f, dl_f = float(m), float(eta), float(dl)
    report["transferred_tangential"] = {"M": m_f, "eta": eta_f, "delta": dl_f}
    rng = np.random.default_rng(seed)
    pairs = _sample_pairs(a, b, x0, dl_f, rng, budget)
    failures = []
    for xa, xb in pairs:
        step = tangential_step_oracle(
            a, b, xa, xb, m_f, eta_f, rng=np.random.default_rng(seed), budget=6
        )
        if step is None:
            failures.append({"xa": xa.tolist(), "xb": xb.tolist()})
    report["tangential_pairs"] = len(pairs)
    report["tangential_failures"] = failures
    if failures:
        report["chain"] = "broken: transferred tangential constants failed on a pair"
        return report
    k, zeta = transfer_constants_tangential_to_sub(m, eta, dl)
    k_f, zeta_f = float(k), float(zeta)
    report["transferred_sub"] = {"K": k_f, "zeta": zeta_f}
    sub = estimate_subtransversality_constant(a, b, x0, zeta_f, budget=120, seed=seed)
    report["sub_status"] = sub.status
    k_hat = float(sub.constants.get("K", float("inf"))) if sub.certified else float("inf")
    report["K_hat"] = k_hat
    report["bound_ok"] = bool(sub.certified and k_hat <= 1.05 * k_f)
    report["chain"] = "validated" if report["bound_ok"] else "broken: ratio exceeded transferred K"
    return report
