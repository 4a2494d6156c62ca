"""Gap-reduction intersection solver with verified trace bounds.

The solver drives a pair of points, one per set, toward a common point by
repeatedly applying a verified gap-reducing step supplied by the step oracle.
Every run emits a trace whose estimates are re-checked rather than trusted:
gap decay, cumulative step time, per-iterate drift, and the terminal distance
bound.  The module also hosts the admissible starting radius, the
nonseparation sequence constructor, the product-space unit-vector
construction, and the metric reformulation check.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .cones import PolyCone, cone_times_nonpositive_ray, is_dense_difference
from .errors import (
    InfeasibleProblemError,
    NonConvergenceError,
    PreconditionError,
)
from .numkernel import FEAS_TOL, LpProblem, as_vector, lp_solve, max_product, norm
from .sets import SetSpec, intersect
from .errors import UnsupportedVariantError
from .transversality import _sample_pairs, default_tgrid, tangential_step_oracle

__all__ = [
    "CONVERGED",
    "STALLED",
    "BUDGET",
    "ProductVector",
    "GapTrace",
    "gap_reduction_solve",
    "admissible_radius",
    "nonseparation_sequence",
    "product_unit_vectors",
    "check_metric_form",
]

CONVERGED = "CONVERGED"
STALLED = "STALLED"
BUDGET = "BUDGET"


@dataclass(frozen=True)
class ProductVector:
    """Point (x, r) of the product of a Euclidean space with the reals,
    measured in the uniform product norm max{||x||, |r|}."""

    x: np.ndarray
    r: float

    def __post_init__(self):
        object.__setattr__(self, "x", as_vector(self.x))
        object.__setattr__(self, "r", float(self.r))

    @property
    def norm(self) -> float:
        return max(float(np.linalg.norm(self.x)), abs(self.r))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, [self.r]])

    def serialize(self) -> dict:
        return {"x": self.x.tolist(), "r": self.r, "norm": self.norm}


# ---------------------------------------------------------------------------
# Gap-reduction solver
# ---------------------------------------------------------------------------


@dataclass
class GapTrace:
    """Immutable record of one gap-reduction run.

    ``records`` holds one dict per iteration with keys ``k`` (1-based),
    ``t`` (step size), ``wa``/``wb`` (step directions), ``gap`` (pair gap
    after the step), ``t_cum`` (cumulative step time), ``drift`` (larger of
    the two per-iterate movements), and the post-step iterates ``xa``/``xb``.
    """

    xa_start: np.ndarray
    xb_start: np.ndarray
    x0: np.ndarray
    m: float
    eta: float
    delta: float
    tol: float
    records: list[dict]
    xab: np.ndarray | None
    status: str
    bounds: dict
    flags: list[str] = field(default_factory=list)

    @property
    def gap_start(self) -> float:
        return float(np.linalg.norm(self.xa_start - self.xb_start))

    def iterates(self, side: str) -> list[np.ndarray]:
        start = self.xa_start if side == "a" else self.xb_start
        key = "xa" if side == "a" else "xb"
        return [start] + [r[key] for r in self.records]

    def times(self) -> list[float]:
        return [0.0] + [r["t_cum"] for r in self.records]

    def verify_invariants(self, slack: float = 1e-9) -> dict:
        """Re-check every estimate the run claims.

        Named checks: gap decay and the step-time budget, the distance of
        each iterate from the center, and the drift bound between every
        pair of iterates on each side; ``terminal`` re-checks the distance
        bound of the terminal point on converged runs.  Margins are the
        worst signed violations (negative means satisfied with room).
        """
        g0 = self.gap_start
        scale = max(
            1.0,
            g0,
            float(np.linalg.norm(self.xa_start - self.x0)),
            float(np.linalg.norm(self.xb_start - self.x0)),
        )
        tol = slack * scale
        margins: dict[str, float] = {}

        gaps = [g0] + [r["gap"] for r in self.records]
        ts = [r["t"] for r in self.records]
        tcum = self.times()
        worst = -np.inf
        for k in range(1, len(gaps)):
            worst = max(worst, gaps[k] - (gaps[k - 1] - ts[k - 1] * self.eta))
            worst = max(worst, gaps[k] - (g0 - tcum[k] * self.eta))
        if self.records:
            worst = max(worst, tcum[-1] - g0 / self.eta)
        margins["gap_decay"] = worst if self.records else -np.inf

        for name, side in (("drift_a", "a"), ("drift_b", "b")):
            pts = self.iterates(side)
            start = pts[0]
            worst = -np.inf
            for k in range(1, len(pts)):
                worst = max(
                    worst,
                    float(np.linalg.norm(pts[k] - self.x0))
                    - (float(np.linalg.norm(start - self.x0)) + tcum[k] * self.m),
                )
                for j in range(k):
                    worst = max(
                        worst,
                        float(np.linalg.norm(pts[k] - pts[j]))
                        - self.m * (tcum[k] - tcum[j]),
                    )
            margins[name] = worst if self.records else -np.inf

        if self.status == CONVERGED and self.xab is not None:
            rhs = (self.m / self.eta) * g0 + self.m * self.tol / self.eta
            margins["terminal"] = max(
                float(np.linalg.norm(self.xab - self.xa_start)) - rhs,
                float(np.linalg.norm(self.xab - self.xb_start)) - rhs,
            )

        checks = {name: bool(v <= tol) for name, v in margins.items()}
        checks["ok"] = all(checks.values())
        checks["margins"] = margins
        return checks

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["k", "t_k", "gap_k", "t_cum_k", "drift_k"])
        for r in self.records:
            writer.writerow([r["k"], r["t"], r["gap"], r["t_cum"], r["drift"]])
        return buf.getvalue()

    def serialize(self) -> dict:
        return {
            "status": self.status,
            "constants": {
                "M": self.m,
                "eta": self.eta,
                "delta": self.delta,
                "tol": self.tol,
            },
            "x0": self.x0.tolist(),
            "start": {
                "xa": self.xa_start.tolist(),
                "xb": self.xb_start.tolist(),
                "gap": self.gap_start,
            },
            "iterations": len(self.records),
            "xab": None if self.xab is None else self.xab.tolist(),
            "bounds": self.bounds,
            "flags": list(self.flags),
            "trace": [
                {
                    "k": r["k"],
                    "t": r["t"],
                    "gap": r["gap"],
                    "t_cum": r["t_cum"],
                    "drift": r["drift"],
                }
                for r in self.records
            ],
        }


def gap_reduction_solve(
    a: SetSpec,
    b: SetSpec,
    xa,
    xb,
    m: float,
    eta: float,
    delta: float,
    tol: float,
    x0=None,
    max_iter: int = 200,
    seed: int = 0,
    oracle_budget: int = 8,
) -> GapTrace:
    """Drive (xa, xb) to a common point of a and b by verified gap steps.

    The starting pair is checked against the guaranteed-radius inequality
    max{||xa - x0||, ||xb - x0||} + (M/eta) * ||xa - xb|| <= delta; violation
    flags the run but does not abort it.  The loop exits once the pair gap
    falls below a safety fraction of ``tol``; the terminal point is the
    midpoint reconciled by projecting onto a then b, accepted only when both
    residuals stay within ``tol``.  On convergence the distance bound
    ||xab - xa_start|| <= (M/eta) * gap_start + M * tol / eta is recorded and
    re-checked (both sides).
    """
    xa = as_vector(xa)
    xb = as_vector(xb, xa.shape[0])
    if min(m, eta, delta, tol) <= 0:
        raise PreconditionError("M, eta, delta, tol must all be positive")
    x0 = 0.5 * (xa + xb) if x0 is None else as_vector(x0, xa.shape[0])
    rng = np.random.default_rng(seed)
    flags: list[str] = []

    gap0 = float(np.linalg.norm(xa - xb))
    radius_lhs = max(
        float(np.linalg.norm(xa - x0)), float(np.linalg.norm(xb - x0))
    ) + (m / eta) * gap0
    if radius_lhs > delta + FEAS_TOL:
        flags.append(
            "starting pair outside the guaranteed radius: "
            f"{radius_lhs:.6g} > delta = {delta:.6g}; proceeding flagged"
        )
    if eta > 2.0 * m + FEAS_TOL:
        flags.append("eta exceeds 2M; no step of norm <= M can achieve the decrease")

    # exit below tol * min(1, M/(2 eta)) so the reconciliation detour
    # (at most twice the final gap) stays inside the M*tol/eta slack
    tol_eff = tol * min(1.0, m / (2.0 * eta))
    records: list[dict] = []
    cur_a, cur_b = xa.copy(), xb.copy()
    t_cum = 0.0
    status = BUDGET
    gap = gap0
    for k in range(1, max_iter + 1):
        gap = float(np.linalg.norm(cur_a - cur_b))
        if gap <= tol_eff:
            status = CONVERGED
            break
        # grid floor scales with the exit tolerance so the final steps can
        # stay well below the remaining gap instead of demanding gap == 0
        tgrid = default_tgrid(
            min(1.0, gap / eta), floor=min(1e-8, 0.05 * tol_eff / eta)
        )
        step = tangential_step_oracle(
            a, b, cur_a, cur_b, m, eta, tgrid=tgrid, rng=rng, budget=oracle_budget
        )
        if step is None:
            trace = GapTrace(
                xa_start=xa, xb_start=xb, x0=x0, m=m, eta=eta, delta=delta,
                tol=tol, records=records, xab=None, status=STALLED,
                bounds={
                    "stuck_pair": {"xa": cur_a.tolist(), "xb": cur_b.tolist()},
                    "gap": gap,
                    "gap_start": gap0,
                    "reason": "step oracle found no verified gap-reducing step",
                },
                flags=flags,
            )
            return trace
        new_a = cur_a + step.t * step.wa
        new_b = cur_b + step.t * step.wb
        t_cum += step.t
        records.append(
            {
                "k": k,
                "t": step.t,
                "wa": step.wa,
                "wb": step.wb,
                "gap": float(np.linalg.norm(new_a - new_b)),
                "t_cum": t_cum,
                "drift": max(
                    float(np.linalg.norm(new_a - cur_a)),
                    float(np.linalg.norm(new_b - cur_b)),
                ),
                "xa": new_a,
                "xb": new_b,
            }
        )
        cur_a, cur_b = new_a, new_b
    else:
        gap = float(np.linalg.norm(cur_a - cur_b))
        if gap <= tol_eff:
            status = CONVERGED

    bounds: dict = {"gap_start": gap0, "gap_end": gap, "tol_eff": tol_eff}
    if status != CONVERGED:
        return GapTrace(
            xa_start=xa, xb_start=xb, x0=x0, m=m, eta=eta, delta=delta,
            tol=tol, records=records, xab=None, status=BUDGET,
            bounds={**bounds, "reason": f"gap {gap:.3e} > {tol_eff:.3e} after {max_iter} iterations"},
            flags=flags,
        )

    if gap == 0.0:
        xab = cur_a.copy()
    else:
        mid = 0.5 * (cur_a + cur_b)
        xab = b.project(a.project(mid))
    res_a, res_b = float(a.distance(xab)), float(b.distance(xab))
    if max(res_a, res_b) > tol:
        return GapTrace(
            xa_start=xa, xb_start=xb, x0=x0, m=m, eta=eta, delta=delta,
            tol=tol, records=records, xab=xab, status=STALLED,
            bounds={
                **bounds,
                "stuck_pair": {"xa": cur_a.tolist(), "xb": cur_b.tolist()},
                "residuals": {"a": res_a, "b": res_b},
                "reason": "midpoint reconciliation left a residual above tol",
            },
            flags=flags,
        )

    rhs = (m / eta) * gap0 + m * tol / eta
    dist_a = float(np.linalg.norm(xab - xa))
    dist_b = float(np.linalg.norm(xab - xb))
    bounds.update(
        {
            "terminal_bound_rhs": rhs,
            "dist_xab_to_xa_start": dist_a,
            "dist_xab_to_xb_start": dist_b,
            "residuals": {"a": res_a, "b": res_b},
        }
    )
    trace = GapTrace(
        xa_start=xa, xb_start=xb, x0=x0, m=m, eta=eta, delta=delta, tol=tol,
        records=records, xab=xab, status=CONVERGED, bounds=bounds, flags=flags,
    )
    slack = 1e-9 * max(1.0, gap0)
    if max(dist_a, dist_b) > rhs + slack:
        raise NonConvergenceError(
            "terminal distance bound violated: "
            f"max({dist_a:.6g}, {dist_b:.6g}) > {rhs:.6g}"
        )
    return trace


def admissible_radius(m, eta, delta):
    """Starting radius zeta = delta / (1 + 2 M / eta).

    Any pair within this distance of the center satisfies the solver's
    guaranteed-radius inequality: the pair gap is at most 2 zeta, so
    zeta + (M/eta) * 2 zeta = delta.  Exact (Fraction) when every input is
    rational, float otherwise.
    """
    if min(m, eta, delta) <= 0:
        raise PreconditionError("M, eta, delta must all be positive")
    if all(isinstance(v, Rational) for v in (m, eta, delta)):
        return Fraction(delta) / (1 + 2 * Fraction(m) / Fraction(eta))
    return float(delta / (1.0 + 2.0 * m / eta))


# ---------------------------------------------------------------------------
# Nonseparation sequences
# ---------------------------------------------------------------------------


def nonseparation_sequence(
    a: SetSpec,
    b: SetSpec,
    x0,
    va,
    vb,
    k_const: float,
    count: int,
    t_start: float = 0.25,
    max_tries: int | None = None,
) -> list[np.ndarray]:
    """Construct common points marching to x0 along nearby tangent directions.

    Given unit directions va (tangent to a at x0) and vb (tangent to b at
    x0) with ||va - vb|| < 1/K, realize x_m = x0 + t_m * v and project onto
    the intersection; each returned point is re-verified against the bounds
    ||xab_m - x_m^a|| <= (K + eps/2) ||x_m^a - x_m^b|| and
    ||xab_m - x0|| <= 2 t_m ||v_m^a||, is distinct from x0, and the distances
    to x0 decrease strictly over the tail of the sequence.
    """
    x0 = as_vector(x0)
    va = as_vector(va, x0.shape[0])
    vb = as_vector(vb, x0.shape[0])
    if k_const <= 0:
        raise PreconditionError("K must be positive")
    if abs(float(np.linalg.norm(va)) - 1.0) > 1e-9 or abs(
        float(np.linalg.norm(vb)) - 1.0
    ) > 1e-9:
        raise PreconditionError("va and vb must have unit norm")
    gap_v = float(np.linalg.norm(va - vb))
    if gap_v >= 1.0 / k_const:
        raise PreconditionError(
            f"direction gap {gap_v:.6g} is not below 1/K = {1.0 / k_const:.6g}"
        )
    # slack must keep gap < 1/(K + eps); the halved-gap choice satisfies
    # that iff gap < 2K, so shrink to the reciprocal-scale midpoint when
    # a small K (< 1/sqrt(2)) meets a wide direction gap
    eps = (1.0 / k_const - gap_v) / 2.0
    if gap_v > 0.0 and not gap_v < 1.0 / (k_const + eps):
        eps = (1.0 / gap_v - k_const) / 2.0
    if count <= 0:
        raise PreconditionError("count must be positive")
    if max_tries is None:
        max_tries = count + 24

    try:
        meet = intersect(a, b)
        meet_project = meet.project
        # exact meet: memberships are exact, any nonzero point is honest
        distinct_floor = 1e-12
    except UnsupportedVariantError:
        meet_project = lambda p: _strict_alternating(a, b, p)
        # approximate meet: points are certified common only to ~1e-10, so
        # anything closer to the center than the square-root resolution of
        # that fuzz cannot be certified distinct from it (near-tangency
        # stall points live inside exactly that band)
        distinct_floor = 3.2e-4 * max(1.0, float(np.linalg.norm(x0)))

    points: list[np.ndarray] = []
    failures: list[str] = []
    t = float(t_start)
    for _ in range(max_tries):
        if len(points) == count:
            break
        xm_a = a.project(x0 + t * va)
        xm_b = b.project(x0 + t * vb)
        vm_a = (xm_a - x0) / t
        pair_gap = float(np.linalg.norm(xm_a - xm_b))
        reasons = []
        xab = None
        # no coincidence shortcut: a collapsed pair can be a tangency
        # artifact far from the intersection, so every candidate goes
        # through the meet (a genuinely common point projects to itself)
        try:
            xab = meet_project(xm_a)
        except InfeasibleProblemError:
            reasons.append("projection left the intersection")
        if xab is not None:
            dist_to_x0 = float(np.linalg.norm(xab - x0))
            slack = 1e-7 * max(1.0, t)
            if not (a.member(xab, 1e-8) and b.member(xab, 1e-8)):
                reasons.append("projection left the intersection")
            if dist_to_x0 <= distinct_floor:
                reasons.append("point not certifiably distinct from the center")
            if (
                float(np.linalg.norm(xab - xm_a))
                > (k_const + eps / 2.0) * pair_gap + slack
            ):
                reasons.append("intersection distance exceeds (K + eps/2) * pair gap")
            if dist_to_x0 > 2.0 * t * float(np.linalg.norm(vm_a)) + slack:
                reasons.append("distance to center exceeds 2 t ||v_m||")
        if reasons:
            failures.append(f"t={t:.3e}: " + "; ".join(reasons))
        else:
            points.append(xab)
        t *= 0.5
    if len(points) < count:
        detail = failures[-1] if failures else "no admissible step size found"
        raise NonConvergenceError(
            f"realized only {len(points)}/{count} nonseparation points ({detail})"
        )

    dists = [float(np.linalg.norm(p - x0)) for p in points]
    tail = dists[len(dists) // 2 :]
    for prev, nxt in zip(tail, tail[1:]):
        if not nxt < prev:
            raise NonConvergenceError(
                "tail of the nonseparation sequence is not strictly decreasing"
            )
    return points


def _strict_alternating(
    a: SetSpec,
    b: SetSpec,
    p: np.ndarray,
    iters: int = 4000,
    move_tol: float = 1e-14,
    mem_tol: float = 1e-10,
) -> np.ndarray:
    """Alternating projections held to certification accuracy.

    Unlike the best-effort sampler helper, a stalled run whose endpoint is
    not within ``mem_tol`` of both sets refuses instead of returning a
    near-tangency point.
    """
    y = np.asarray(p, dtype=float)
    for _ in range(iters):
        y_new = b.project(a.project(y))
        step = float(np.linalg.norm(y_new - y))
        y = y_new
        if step <= move_tol:
            break
    if max(float(a.distance(y)), float(b.distance(y))) > mem_tol:
        raise InfeasibleProblemError(
            "alternating projections stalled outside the intersection"
        )
    return y


# ---------------------------------------------------------------------------
# Product-space unit vectors
# ---------------------------------------------------------------------------


def product_unit_vectors(
    c1: PolyCone, c2base: PolyCone, epsilon: float
) -> tuple[ProductVector, ProductVector]:
    """Unit vectors w1 in C1, w2 in C2 x (-inf, 0] with ||w1 - w2|| < epsilon.

    Requires the difference C1 - C2 x (-inf, 0] to be dense (for polyhedral
    cones: equal to the whole product space).  Construction: represent
    (0, -1) as a difference of cone elements by linear programming over the
    generators, then normalize (v1, r1) and (v2, r2 - 1) in the uniform
    product norm; the normalization at most doubles the representation
    error, so the LP target is epsilon/2.
    """
    if not 0.0 < epsilon < 1.0:
        raise PreconditionError("epsilon must lie in (0, 1)")
    dim_x = c2base.dim
    if c1.dim != dim_x + 1:
        raise PreconditionError(
            f"C1 must live in the product space: expected dim {dim_x + 1}, got {c1.dim}"
        )
    c2tilde = cone_times_nonpositive_ray(c2base)
    dense, cert = is_dense_difference(c1, c2tilde)
    if not dense:
        raise PreconditionError(
            "difference cone is not dense in the product space; "
            f"separating witness {cert.get('witness_float')}"
        )

    g1 = c1.generator_array()
    g2 = c2tilde.generator_array()
    # canonical generators of float-derived cones are gcd-reduced integer
    # vectors that can reach 1e15; unit-scale them (a positive scaling never
    # leaves the cone) so the representation LP stays well conditioned
    g1 = g1 / np.maximum(np.linalg.norm(g1, axis=1, keepdims=True), 1e-300)
    g2 = g2 / np.maximum(np.linalg.norm(g2, axis=1, keepdims=True), 1e-300)
    n1, n2 = g1.shape[0], g2.shape[0]
    dim = dim_x + 1
    target = np.zeros(dim)
    target[-1] = -1.0
    # variables z = (lam, mu, s): minimize s (plus a small coefficient pull)
    # subject to |(G1^T lam - G2^T mu - target)_i| <= s and z >= 0
    nz = n1 + n2 + 1
    c = np.full(nz, 1e-7)
    c[-1] = 1.0
    combo = np.hstack([g1.T, -g2.T])  # dim x (n1+n2)
    a_ub = np.zeros((2 * dim + nz, nz))
    b_ub = np.zeros(2 * dim + nz)
    a_ub[:dim, :-1] = combo
    a_ub[:dim, -1] = -1.0
    b_ub[:dim] = target
    a_ub[dim : 2 * dim, :-1] = -combo
    a_ub[dim : 2 * dim, -1] = -1.0
    b_ub[dim : 2 * dim] = -target
    a_ub[2 * dim :] = -np.eye(nz)
    res = lp_solve(LpProblem(c=c, a_ub=a_ub, b_ub=b_ub))
    if res.status != "OPTIMAL" or res.x is None:
        raise NonConvergenceError(f"representation LP ended {res.status}")
    lam, mu = res.x[:n1], res.x[n1 : n1 + n2]
    v1 = g1.T @ lam
    v2 = g2.T @ mu
    prod_norm = max_product(dim_x)
    rep_err = norm(v1 - v2 - target, prod_norm)
    if rep_err > epsilon / 2.0:
        raise NonConvergenceError(
            f"representation error {rep_err:.3e} exceeds epsilon/2"
        )

    shifted = v2.copy()  # (v2, r2 - 1): stays in C2 x (-inf, 0], norm >= 1
    shifted[-1] -= 1.0
    n_w1 = norm(v1, prod_norm)
    n_w2 = norm(shifted, prod_norm)
    if min(n_w1, n_w2) <= 0.25:
        raise NonConvergenceError("degenerate representation: near-zero factor norms")
    w1 = ProductVector(v1[:-1] / n_w1, v1[-1] / n_w1)
    w2 = ProductVector(shifted[:-1] / n_w2, shifted[-1] / n_w2)

    for w, name in ((w1, "w1"), (w2, "w2")):
        if abs(w.norm - 1.0) > 1e-12:
            raise NonConvergenceError(f"{name} norm {w.norm!r} is not 1 to 1e-12")
    # membership up to rounding: canonical halfspace normals of float-derived
    # cones are huge integers, so the residual must be scaled by the normal
    for w, cone, name in ((w1, c1, "w1"), (w2, c2tilde, "w2")):
        arr = w.as_array()
        for n in cone.halfspace_normals():
            nf = np.array([float(x) for x in n])
            scale = float(np.linalg.norm(nf))
            if scale > 0 and float(nf @ arr) > 1e-9 * scale:
                raise NonConvergenceError(f"{name} escaped its cone")
    dist = norm(w1.as_array() - w2.as_array(), prod_norm)
    if not dist < epsilon:
        raise NonConvergenceError(
            f"unit vectors are {dist:.6g} apart, not below epsilon = {epsilon:.6g}"
        )
    return w1, w2


# ---------------------------------------------------------------------------
# Metric reformulation check
# ---------------------------------------------------------------------------


def check_metric_form(
    a: SetSpec,
    b: SetSpec,
    x0,
    m: float,
    eta: float,
    delta: float,
    samples: int = 12,
    seed: int = 0,
) -> dict:
    """Check the ball-restricted distance inequality with zeta = eta / M.

    For sampled pairs, a verified step (t, wa, wb) places moved points in
    the radius-s balls with s = M t; their distance bounds the restricted
    set distance, which must drop below ||xa - xb|| - s * zeta.  Reports the
    fraction of sampled pairs where the inequality is verified.
    """
    x0 = as_vector(x0)
    if min(m, eta, delta) <= 0:
        raise PreconditionError("M, eta, delta must all be positive")
    zeta = eta / m
    rng = np.random.default_rng(seed)
    pairs = _sample_pairs(a, b, x0, delta, rng, max(2, samples))
    details: list[dict] = []
    held = 0
    with_step = 0
    violations = 0
    for xa, xb in pairs[:samples]:
        gap = float(np.linalg.norm(xa - xb))
        if gap <= 1e-14:
            held += 1
            with_step += 1
            details.append({"gap": gap, "s": 0.0, "held": True, "note": "coincident pair"})
            continue
        step = tangential_step_oracle(a, b, xa, xb, m, eta, rng=rng)
        if step is None:
            details.append({"gap": gap, "s": None, "held": False, "note": "no verified step"})
            continue
        with_step += 1
        s = m * step.t
        lhs = float(np.linalg.norm((xa + step.t * step.wa) - (xb + step.t * step.wb)))
        rhs = gap - s * zeta
        ok = lhs <= rhs + 1e-9 * max(1.0, gap)
        held += int(ok)
        violations += int(not ok)
        details.append({"gap": gap, "s": s, "lhs": lhs, "rhs": rhs, "held": bool(ok)})
    total = len(details)
    return {
        "zeta": zeta,
        "delta": delta,
        "samples": total,
        "with_step": with_step,
        "held": held,
        "fraction": held / total if total else 0.0,
        # a pair with a verified step that still breaks the restricted
        # inequality would contradict the transfer; must stay at zero
        "transfer_violations": violations,
        "details": details,
    }
