"""Numeric substrate: vectors, norms, polyhedral projection, small LP layer.

Conventions used throughout the toolkit:

* vectors are 1-D numpy arrays of finite floats (``as_vector`` validates);
* a polyhedron is ``{y : A y <= b}`` with ``A`` of shape (m, n);
* the Euclidean norm is the default; product spaces ``X x R x ... x R`` use the
  uniform norm ``max(||x_block||_2, |r_1|, ..., |r_k|)`` selected by a
  :class:`NormKind` with a split index.

Default tolerances: ``FEAS_TOL = 1e-9`` for feasibility / activity tests and
``OPT_TOL = 1e-7`` for optimality certificates.  Every public routine accepts
an override.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DimensionMismatchError,
    InfeasibleProblemError,
    NonConvergenceError,
    PreconditionError,
)

FEAS_TOL = 1e-9
OPT_TOL = 1e-7


def unit_row(r: np.ndarray) -> tuple[np.ndarray, float]:
    """Scale a constraint row to unit norm, returning (row, scale).

    Idempotent at the bit level: rows already within a few ulp of unit norm
    (including the output of a previous call) are returned unchanged, so
    every consumer that canonicalizes the same float row gets the same bits.
    Exact cone arithmetic downstream relies on that consistency.  Zero rows
    pass through with scale 1.
    """
    nrm = float(np.linalg.norm(r))
    if nrm <= 0.0 or abs(nrm - 1.0) <= 4.0 * np.finfo(float).eps:
        return r, 1.0
    return r / nrm, nrm


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Validate and return ``x`` as a finite 1-D float array.

    Raises PreconditionError on non-finite entries and
    DimensionMismatchError when ``dim`` is given and does not match.
    """
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise PreconditionError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise PreconditionError("vector has non-finite entries")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.shape[0]}")
    return v


@dataclass(frozen=True)
class NormKind:
    """Norm selector.

    ``kind == "euclidean"``: plain 2-norm.
    ``kind == "maxprod"``: uniform product norm on ``R^split x R^(n-split)``,
    the max of the 2-norm of the leading block and the absolute values of the
    trailing scalar coordinates.  ``split == n`` degenerates to the 2-norm.
    """

    kind: str = "euclidean"
    split: int | None = None

    def __post_init__(self):
        if self.kind not in ("euclidean", "maxprod"):
            raise PreconditionError(f"unknown norm kind {self.kind!r}")
        if self.kind == "maxprod" and (self.split is None or self.split < 0):
            raise PreconditionError("maxprod norm needs a nonnegative split index")


EUCLIDEAN = NormKind()


def max_product(split: int) -> NormKind:
    return NormKind(kind="maxprod", split=split)


def norm(x, kind: NormKind = EUCLIDEAN) -> float:
    """Norm of ``x`` under ``kind``; zero vector has norm exactly 0.0."""
    v = as_vector(x)
    if kind.kind == "euclidean":
        return float(np.linalg.norm(v))
    split = int(kind.split)  # type: ignore[arg-type]
    if split > v.shape[0]:
        raise DimensionMismatchError(
            f"maxprod split {split} exceeds dimension {v.shape[0]}"
        )
    head = float(np.linalg.norm(v[:split]))
    tail = float(np.max(np.abs(v[split:]))) if split < v.shape[0] else 0.0
    return max(head, tail)


def direction_net(dim: int, count: int) -> np.ndarray:
    """Deterministic unit-direction net: ``count`` angles in R^2, a Fibonacci
    sphere in R^3, and normalized Halton-like lattice points above.

    Coordinate axes (+/-) are always included.
    """
    if dim < 1:
        raise PreconditionError("dimension must be positive")
    axes = np.vstack([np.eye(dim), -np.eye(dim)])
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        ang = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
    elif dim == 3:
        # Fibonacci sphere: evenly distributed, reproducible.
        i = np.arange(count, dtype=float)
        phi = math.pi * (3.0 - math.sqrt(5.0)) * i
        z = 1.0 - 2.0 * (i + 0.5) / count
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    else:
        # Deterministic low-discrepancy fallback for higher dimensions.
        rng = np.random.Generator(np.random.PCG64(0))
        pts = rng.standard_normal((count, dim))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return np.vstack([axes, pts])


# ---------------------------------------------------------------------------
# Polyhedral projection (dense primal active-set QP)
# ---------------------------------------------------------------------------

MAX_QP_CONSTRAINTS = 64


def _feasible_point(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    """Any point of {y : a y <= b}, via a zero-objective LP."""
    n = a.shape[1]
    res = linprog(c=np.zeros(n), A_ub=a, b_ub=b, bounds=[(None, None)] * n,
                  method="highs")
    if res.status == 2 or res.x is None:
        raise InfeasibleProblemError("polyhedron is empty")
    y = np.asarray(res.x, dtype=float)
    viol = float(np.max(a @ y - b)) if a.shape[0] else 0.0
    if viol > 10.0 * tol:
        raise InfeasibleProblemError(f"phase-1 point infeasible by {viol:.3e}")
    return y


def project_polyhedron(
    x,
    a,
    b,
    tol: float = FEAS_TOL,
    max_iter: int | None = None,
) -> np.ndarray:
    """Euclidean projection of ``x`` onto ``{y : a y <= b}``.

    Primal active-set method on the QP ``min ||y - x||^2``.  The working set
    is updated one constraint at a time; equality subproblems are solved via
    least squares so redundant active rows are tolerated.  Iteration cap is
    ``10 * m`` (raises NonConvergenceError when exceeded).
    """
    x = as_vector(x)
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = as_vector(b) if np.ndim(b) else np.asarray([b], dtype=float)
    if a.size == 0 or a.shape[0] == 0:
        return x.copy()
    if a.shape[1] != x.shape[0]:
        raise DimensionMismatchError(
            f"constraint matrix has {a.shape[1]} columns, point has {x.shape[0]}"
        )
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatchError("constraint matrix and rhs disagree")
    m = a.shape[0]
    if m > MAX_QP_CONSTRAINTS:
        raise PreconditionError(
            f"{m} constraints exceeds the projection cap {MAX_QP_CONSTRAINTS}"
        )
    cap = max_iter if max_iter is not None else 10 * m

    resid = a @ x - b
    if np.all(resid <= tol):
        return x.copy()

    # one-facet fast path: projecting onto the most violated halfspace is the
    # exact answer whenever the result satisfies every remaining row, since
    # that halfspace contains the polyhedron
    row_norms = np.linalg.norm(a, axis=1)
    scaled = np.where(row_norms > 0, resid / np.maximum(row_norms, 1e-300), resid)
    worst = int(np.argmax(scaled))
    if row_norms[worst] > 0:
        shift = (resid[worst] / row_norms[worst] ** 2) * a[worst]
        y_fast = x - shift
        if np.all(a @ y_fast - b <= tol):
            return y_fast

    # KKT warm start: equality-project onto the violated rows and accept when
    # the KKT conditions of the inequality QP verify (sufficient by convexity)
    viol = np.flatnonzero(resid > tol)
    if viol.size:
        aw = a[viol]
        gram = aw @ aw.T
        lam, *_ = np.linalg.lstsq(gram, resid[viol], rcond=None)
        y_kkt = x - aw.T @ lam
        act = aw @ y_kkt - b[viol]
        if (
            np.all(a @ y_kkt - b <= tol)
            and np.all(lam >= -1e-12)
            and np.all(np.abs(act[lam > tol]) <= 10.0 * tol)
        ):
            return y_kkt

    y = _feasible_point(a, b, tol)
    work = [i for i in range(m) if abs(float(a[i] @ y - b[i])) <= 10.0 * tol]

    for _ in range(cap):
        if work:
            aw = a[work]
            bw = b[work]
            # Equality-constrained projection: y* = x - aw^T nu,
            # (aw aw^T) nu = aw x - bw; lstsq handles rank deficiency.
            gram = aw @ aw.T
            rhs = aw @ x - bw
            nu = np.linalg.lstsq(gram, rhs, rcond=None)[0]
            y_eq = x - aw.T @ nu
        else:
            y_eq = x.copy()
        p = y_eq - y
        if float(np.linalg.norm(p)) <= tol:
            if not work:
                return y
            lam = np.linalg.lstsq(a[work].T, x - y, rcond=None)[0]
            if np.all(lam >= -10.0 * tol):
                return y
            work.pop(int(np.argmin(lam)))
            continue
        # Longest feasible step toward the subproblem solution.
        alpha = 1.0
        blocker = -1
        for i in range(m):
            if i in work:
                continue
            ap = float(a[i] @ p)
            if ap > tol:
                step = float((b[i] - a[i] @ y) / ap)
                if step < alpha:
                    alpha = max(step, 0.0)
                    blocker = i
        y = y + alpha * p
        if blocker >= 0:
            work.append(blocker)
    raise NonConvergenceError(f"active-set projection exceeded {cap} iterations")


def distance_polyhedron(x, a, b, tol: float = FEAS_TOL) -> float:
    x = as_vector(x)
    return float(np.linalg.norm(x - project_polyhedron(x, a, b, tol=tol)))


# ---------------------------------------------------------------------------
# Small LP layer
# ---------------------------------------------------------------------------

LP_OPTIMAL = "OPTIMAL"
LP_INFEASIBLE = "INFEASIBLE"
LP_UNBOUNDED = "UNBOUNDED"


@dataclass(frozen=True)
class LpProblem:
    """min c.x  s.t.  a_ub x <= b_ub,  a_eq x = b_eq  (variables free)."""

    c: np.ndarray
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None

    def dim(self) -> int:
        return int(np.asarray(self.c).shape[0])


@dataclass(frozen=True)
class LpResult:
    status: str
    x: np.ndarray | None = None
    value: float | None = None
    duals_ub: np.ndarray | None = None
    duals_eq: np.ndarray | None = None
    details: dict = field(default_factory=dict)


def lp_solve(problem: LpProblem, tol: float = FEAS_TOL) -> LpResult:
    """Solve a small dense LP; statuses OPTIMAL / INFEASIBLE / UNBOUNDED.

    Post: on OPTIMAL the primal is feasible within ``tol`` and the duality gap
    (primal value vs dual objective reconstructed from the marginals) is at
    most 1e-8 * (1 + |value|); violated gaps raise NonConvergenceError.
    """
    c = as_vector(problem.c)
    n = c.shape[0]
    kw: dict = {"bounds": [(None, None)] * n, "method": "highs"}
    if problem.a_ub is not None:
        kw["A_ub"] = np.atleast_2d(np.asarray(problem.a_ub, dtype=float))
        kw["b_ub"] = np.asarray(problem.b_ub, dtype=float)
    if problem.a_eq is not None:
        kw["A_eq"] = np.atleast_2d(np.asarray(problem.a_eq, dtype=float))
        kw["b_eq"] = np.asarray(problem.b_eq, dtype=float)
    res = linprog(c=c, **kw)
    if res.status == 2:
        return LpResult(status=LP_INFEASIBLE)
    if res.status == 3:
        return LpResult(status=LP_UNBOUNDED)
    if res.status != 0 or res.x is None:
        raise NonConvergenceError(f"LP backend failed: {res.message}")
    x = np.asarray(res.x, dtype=float)
    value = float(c @ x)
    duals_ub = np.asarray(res.ineqlin.marginals, dtype=float) if problem.a_ub is not None else None
    duals_eq = np.asarray(res.eqlin.marginals, dtype=float) if problem.a_eq is not None else None
    # Duality gap: value == b_ub.(-duals_ub) + b_eq.(-duals_eq) at optimum
    # (HiGHS marginals are <= 0 on <= rows).
    dual_obj = 0.0
    if duals_ub is not None:
        dual_obj += float(kw["b_ub"] @ duals_ub)
    if duals_eq is not None:
        dual_obj += float(kw["b_eq"] @ duals_eq)
    gap = abs(value - dual_obj)
    if gap > 1e-8 * (1.0 + abs(value)):
        raise NonConvergenceError(f"LP duality gap {gap:.3e} exceeds tolerance")
    feas = 0.0
    if problem.a_ub is not None:
        feas = max(feas, float(np.max(kw["A_ub"] @ x - kw["b_ub"], initial=0.0)))
    if problem.a_eq is not None:
        feas = max(feas, float(np.max(np.abs(kw["A_eq"] @ x - kw["b_eq"]), initial=0.0)))
    if feas > 10.0 * max(tol, 1e-9):
        raise NonConvergenceError(f"LP solution infeasible by {feas:.3e}")
    return LpResult(status=LP_OPTIMAL, x=x, value=value,
                    duals_ub=duals_ub, duals_eq=duals_eq,
                    details={"duality_gap": gap, "feasibility": feas})
