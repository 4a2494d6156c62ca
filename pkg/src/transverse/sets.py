"""Closed subsets of R^n: membership, distance, projection, intersection.

Variants
--------
Polyhedron      {x : a x <= b}
Ball            closed Euclidean ball
AffineSet       basepoint + span(directions); zero directions = single point
LevelSet        {x : g(x) <= 0} or {x : g(x) = 0} for smooth g (approximate oracles)
Translate       inner set shifted by a vector
UnionSet        finite union (projection = nearest member)
Epigraph        {(x, r) : f(x) <= r}; +infty handled by the domain predicate,
                never by a sentinel value
ProductSet      block product; distances under the uniform product norm
                (max of blockwise Euclidean distances)

Exactness: Polyhedron / Ball / AffineSet / Translate / ProductSet / UnionSet of
exact members / structured Epigraph have exact oracles.  LevelSet and raw
callable Epigraph are approximate and say so via ``oracle_exact``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InfeasibleProblemError,
    PreconditionError,
    UnsupportedVariantError,
)
from .numkernel import FEAS_TOL, as_vector, distance_polyhedron, project_polyhedron, unit_row

MEMBER_TOL = 1e-9


class SetSpec:
    """Common interface; concrete variants are the dataclasses below."""

    dim: int

    @property
    def oracle_exact(self) -> bool:
        return True

    def member(self, x, tol: float = MEMBER_TOL) -> bool:
        raise NotImplementedError

    def project(self, x) -> np.ndarray:
        raise NotImplementedError

    def distance(self, x) -> float:
        x = as_vector(x, self.dim)
        return float(np.linalg.norm(x - self.project(x)))


def member(s: SetSpec, x, tol: float = MEMBER_TOL) -> bool:
    return s.member(x, tol)


def project(s: SetSpec, x) -> np.ndarray:
    return s.project(x)


def distance(s: SetSpec, x) -> float:
    return s.distance(x)


# ---------------------------------------------------------------------------
# Variants
# ---------------------------------------------------------------------------


def _canonical_rows(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalize rows to unit norm, drop trivial rows, sort lexicographically.

    Canonical ordering makes intersect() symmetric bit-for-bit in its operands.
    """
    keep_a, keep_b = [], []
    for i in range(a.shape[0]):
        row, scale = unit_row(a[i])
        if float(np.linalg.norm(row)) <= 0.0:
            if b[i] < -FEAS_TOL:
                raise InfeasibleProblemError("zero row with negative rhs")
            continue
        keep_a.append(row)
        keep_b.append(b[i] / scale)
    if not keep_a:
        return np.zeros((0, a.shape[1])), np.zeros(0)
    am = np.asarray(keep_a)
    bm = np.asarray(keep_b)
    order = np.lexsort(tuple(am[:, j] for j in range(am.shape[1] - 1, -1, -1)) + (bm,))
    # final key: rows then rhs, via stacked lexsort on [b | a] columns reversed
    stacked = np.column_stack([am, bm])
    order = np.lexsort(tuple(stacked[:, j] for j in range(stacked.shape[1] - 1, -1, -1)))
    am, bm = am[order], bm[order]
    uniq = [0] if am.shape[0] else []
    for i in range(1, am.shape[0]):
        if not (np.allclose(am[i], am[i - 1], atol=1e-14) and abs(bm[i] - bm[i - 1]) <= 1e-14):
            uniq.append(i)
    return am[uniq], bm[uniq]


@dataclass(frozen=True)
class Polyhedron(SetSpec):
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if a.shape[0] != b.shape[0]:
            raise DimensionMismatchError("constraint matrix and rhs disagree")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise PreconditionError("polyhedron data must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "dim", a.shape[1])

    def member(self, x, tol: float = MEMBER_TOL) -> bool:
        x = as_vector(x, self.dim)
        if self.a.shape[0] == 0:
            return True
        return float(np.max(self.a @ x - self.b)) <= tol

    def project(self, x) -> np.ndarray:
        return project_polyhedron(as_vector(x, self.dim), self.a, self.b)

    def distance(self, x) -> float:
        return distance_polyhedron(as_vector(x, self.dim), self.a, self.b)

    def canonical(self) -> "Polyhedron":
        a, b = _canonical_rows(self.a, self.b)
        return Polyhedron(a.reshape(-1, self.dim), b)


@dataclass(frozen=True)
class Ball(SetSpec):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = as_vector(self.center)
        if self.radius < 0:
            raise PreconditionError("ball radius must be nonnegative")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "dim", c.shape[0])

    def member(self, x, tol: float = MEMBER_TOL) -> bool:
        x = as_vector(x, self.dim)
        return float(np.linalg.norm(x - self.center)) <= self.radius + tol

    def project(self, x) -> np.ndarray:
        x = as_vector(x, self.dim)
        d = x - self.center
        nrm = float(np.linalg.norm(d))
        if nrm <= self.radius:
            return x.copy()
        return self.center + (self.radius / nrm) * d

    def distance(self, x) -> float:
        x = as_vector(x, self.dim)
        return max(0.0, float(np.linalg.norm(x - self.center)) - self.radius)


def _orthonormal_rows(d: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    if d.size == 0:
        return d.reshape(0, d.shape[1] if d.ndim == 2 else 0)
    q, r = np.linalg.qr(d.T)
    keep = [j for j in range(r.shape[0]) if abs(r[j, j]) > tol]
    return q[:, keep].T


@dataclass(frozen=True)
class AffineSet(SetSpec):
    basepoint: np.ndarray
    directions: np.ndarray  # (k, n) rows; may be empty for a single point

    def __post_init__(self):
        p = as_vector(self.basepoint)
        d = np.asarray(self.directions, dtype=float)
        if d.size == 0:
            d = np.zeros((0, p.shape[0]))
        d = np.atleast_2d(d)
        if d.shape[1] != p.shape[0]:
            raise DimensionMismatchError("directions and basepoint disagree")
        q = _orthonormal_rows(d)
        object.__setattr__(self, "basepoint", p)
        object.__setattr__(self, "raw_directions", d)
        object.__setattr__(self, "directions", q)
        object.__setattr__(self, "dim", p.shape[0])

    def member(self, x, tol: float = MEMBER_TOL) -> bool:
        return self.distance(x) <= tol

    def project(self, x) -> np.ndarray:
        x = as_vector(x, self.dim)
        rel = x - self.basepoint
        if self.directions.shape[0] == 0:
            return self.basepoint.copy()
        return self.basepoint + self.directions.T @ (self.directions @ rel)


@dataclass(frozen=True)
class LevelSet(SetSpec):
    """{x : g(x) <= 0} (sense "le") or {x : g(x) = 0} (sense "eq").

    Oracles are iterative (gradient-Newton toward the zero level) and
    approximate; ``oracle_exact`` is False.
    """

    g: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    dim: int
    sense: str = "le"

    def __post_init__(self):
        if self.sense not in ("le", "eq"):
            raise PreconditionError("level set sense must be 'le' or 'eq'")

    @property
    def oracle_exact(self) -> bool:
        return False

    def member(self, x, tol: float = 1e-7) -> bool:
        val = float(self.g(as_vector(x, self.dim)))
        return abs(val) <= tol if self.sense == "eq" else val <= tol

    def project(self, x, max_iter: int = 200, tol: float = 1e-10) -> np.ndarray:
        x = as_vector(x, self.dim)
        if self.sense == "le" and float(self.g(x)) <= 0.0:
            return x.copy()
        y = x.copy()
        for _ in range(max_iter):
            val = float(self.g(y))
            if self.sense == "le" and val <= 0.0:
                break
            grad = as_vector(self.grad(y), self.dim)
            gg = float(grad @ grad)
            if gg <= 1e-16:
                raise PreconditionError("vanishing gradient on level-set search")
            step = val / gg
            y = y - step * grad
            if abs(val) <= tol:
                break
        return y


@dataclass(frozen=True)
class Translate(SetSpec):
    inner: SetSpec
    shift: np.ndarray

    def __post_init__(self):
        s = as_vector(self.shift, self.inner.dim)
        object.__setattr__(self, "shift", s)
        object.__setattr__(self, "dim", self.inner.dim)

    @property
    def oracle_exact(self) -> bool:
        return self.inner.oracle_exact

    def member(self, x, tol: float = MEMBER_TOL) -> bool:
        return self.inner.member(as_vector(x, self.dim) - self.shift, tol)

    def project(self, x) -> np.ndarray:
        return self.inner.project(as_vector(x, self.dim) - self.shift) + self.shift


@dataclass(frozen=True)
class UnionSet(SetSpec):
    members: tuple[SetSpec, ...]

    def __post_init__(self):
        ms = tuple(self.members)
        if not ms:
            raise PreconditionError("union needs at least one member")
        dims = {m.dim for m in ms}
        if len(dims) != 1:
            raise DimensionMismatchError("union members have mixed dimensions")
        object.__setattr__(self, "members", ms)
        object.__setattr__(self, "dim", ms[0].dim)

    @property
    def oracle_exact(self) -> bool:
        return all(m.oracle_exact for m in self.members)

    def member(self, x, tol: float = MEMBER_TOL) -> bool:
        return any(m.member(x, tol) for m in self.members)

    def project(self, x) -> np.ndarray:
        x = as_vector(x, self.dim)
        best, best_d = None, np.inf
        for m in self.members:
            p = m.project(x)
            d = float(np.linalg.norm(x - p))
            if d < best_d:
                best, best_d = p, d
        return best  # type: ignore[return-value]

    def distance(self, x) -> float:
        return min(m.distance(x) for m in self.members)


# -- functions for epigraphs -------------------------------------------------


@dataclass(frozen=True)
class FunctionSpec:
    """Structured convex function for exact epigraph oracles.

    kind "linear": f(x) = c.x + d.
    kind "maxlin": f(x) = max_i (c_i.x + d_i); pieces rows are [c_i | d_i].
    kind "indicator": 0 on the inner set, +infty outside.
    """

    kind: str
    c: np.ndarray | None = None
    d: float = 0.0
    pieces: np.ndarray | None = None
    inner: SetSpec | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "maxlin", "indicator"):
            raise PreconditionError(f"unknown function kind {self.kind!r}")
        if self.kind == "linear":
            object.__setattr__(self, "c", as_vector(self.c))
        elif self.kind == "maxlin":
            p = np.atleast_2d(np.asarray(self.pieces, dtype=float))
            if p.shape[0] == 0:
                raise PreconditionError("maxlin needs at least one piece")
            object.__setattr__(self, "pieces", p)
        elif self.inner is None:
            raise PreconditionError("indicator needs an inner set")

    def base_dim(self) -> int:
        if self.kind == "linear":
            return self.c.shape[0]  # type: ignore[union-attr]
        if self.kind == "maxlin":
            return self.pieces.shape[1] - 1  # type: ignore[union-attr]
        return self.inner.dim  # type: ignore[union-attr]

    def in_domain(self, x) -> bool:
        if self.kind == "indicator":
            return self.inner.member(x)  # type: ignore[union-attr]
        return True

    def value(self, x) -> float:
        x = as_vector(x, self.base_dim())
        if self.kind == "linear":
            return float(self.c @ x) + self.d  # type: ignore[operator]
        if self.kind == "maxlin":
            return float(np.max(self.pieces[:, :-1] @ x + self.pieces[:, -1]))  # type: ignore[index]
        if not self.inner.member(x):  # type: ignore[union-attr]
            raise PreconditionError("indicator evaluated outside its domain")
        return 0.0


def linear_fn(c, d: float = 0.0) -> FunctionSpec:
    return FunctionSpec(kind="linear", c=as_vector(c), d=float(d))


def maxlin_fn(pieces) -> FunctionSpec:
    return FunctionSpec(kind="maxlin", pieces=np.atleast_2d(np.asarray(pieces, dtype=float)))


def indicator_fn(inner: SetSpec) -> FunctionSpec:
    return FunctionSpec(kind="indicator", inner=inner)


@dataclass(frozen=True)
class Epigraph(SetSpec):
    """{(x, r) : x in dom f, f(x) <= r} in R^(base_dim + 1).

    Structured functions get exact polyhedral / product oracles.  A raw
    callable (with an explicit domain predicate for +infty) gets approximate
    oracles and reports ``oracle_exact == False``.
    """

    func: FunctionSpec | None = None
    f: Callable[[np.ndarray], float] | None = None
    domain: Callable[[np.ndarray], bool] | None = None
    base_dim: int | None = None

    def __post_init__(self):
        if self.func is not None:
            object.__setattr__(self, "base_dim", self.func.base_dim())
        elif self.f is None or self.base_dim is None:
            raise PreconditionError("epigraph needs a FunctionSpec or (f, base_dim)")
        object.__setattr__(self, "dim", int(self.base_dim) + 1)

    @property
    def oracle_exact(self) -> bool:
        if self.func is None:
            return False
        if self.func.kind == "indicator":
            return self.func.inner.oracle_exact  # type: ignore[union-attr]
        return True

    def value(self, x) -> float:
        if self.func is not None:
            return self.func.value(x)
        x = as_vector(x, self.base_dim)
        if self.domain is not None and not self.domain(x):
            raise PreconditionError("objective evaluated outside its domain")
        return float(self.f(x))  # type: ignore[misc]

    def in_domain(self, x) -> bool:
        if self.func is not None:
            return self.func.in_domain(x)
        return True if self.domain is None else bool(self.domain(as_vector(x, self.base_dim)))

    def as_polyhedron(self) -> Polyhedron:
        """Exact polyhedral form for linear / maxlin functions."""
        if self.func is None or self.func.kind not in ("linear", "maxlin"):
            raise UnsupportedVariantError("epigraph is not polyhedral")
        if self.func.kind == "linear":
            row = np.concatenate([self.func.c, [-1.0]])  # type: ignore[arg-type]
            return Polyhedron(row.reshape(1, -1), np.array([-self.func.d]))
        p = self.func.pieces  # type: ignore[assignment]
        a = np.column_stack([p[:, :-1], -np.ones(p.shape[0])])
        return Polyhedron(a, -p[:, -1])

    def _delegate(self) -> SetSpec:
        if self.func is None:
            raise UnsupportedVariantError("raw-callable epigraph has no exact form")
        if self.func.kind == "indicator":
            halfline = Polyhedron(np.array([[-1.0]]), np.array([0.0]))  # r >= 0
            return ProductSet((self.func.inner, halfline))  # type: ignore[arg-type]
        return self.as_polyhedron()

    def member(self, x, tol: float = MEMBER_TOL) -> bool:
        x = as_vector(x, self.dim)
        base, r = x[:-1], float(x[-1])
        if not self.in_domain(base):
            return False
        if self.func is not None and self.func.kind == "indicator":
            return r >= -tol
        return self.value(base) <= r + tol

    def project(self, x) -> np.ndarray:
        if self.func is not None:
            return self._delegate().project(x)
        # Raw callable: descend on the squared distance along coordinate probes.
        x = as_vector(x, self.dim)
        if self.member(x):
            return x.copy()
        base, r = x[:-1].copy(), float(x[-1])
        y = base.copy()
        step = 0.5
        best = np.concatenate([y, [max(r, self.value(y))]])
        best_d = float(np.linalg.norm(best - x))
        for _ in range(400):
            improved = False
            for j in range(y.shape[0]):
                for sgn in (1.0, -1.0):
                    cand = y.copy()
                    cand[j] += sgn * step
                    if not self.in_domain(cand):
                        continue
                    pt = np.concatenate([cand, [max(r, self.value(cand))]])
                    d = float(np.linalg.norm(pt - x))
                    if d < best_d - 1e-14:
                        best, best_d, y = pt, d, cand
                        improved = True
            if not improved:
                step *= 0.5
                if step < 1e-10:
                    break
        return best

    def distance(self, x) -> float:
        if self.func is not None:
            return self._delegate().distance(x)
        x = as_vector(x, self.dim)
        return float(np.linalg.norm(x - self.project(x)))


@dataclass(frozen=True)
class ProductSet(SetSpec):
    """Block product; the natural norm is the uniform product norm, so
    distance is the MAX of blockwise Euclidean distances and projection is
    blockwise."""

    blocks: tuple[SetSpec, ...]

    def __post_init__(self):
        bs = tuple(self.blocks)
        if not bs:
            raise PreconditionError("product needs at least one block")
        object.__setattr__(self, "blocks", bs)
        object.__setattr__(self, "dim", sum(b.dim for b in bs))

    @property
    def oracle_exact(self) -> bool:
        return all(b.oracle_exact for b in self.blocks)

    def _split(self, x) -> list[np.ndarray]:
        x = as_vector(x, self.dim)
        out, k = [], 0
        for blk in self.blocks:
            out.append(x[k:k + blk.dim])
            k += blk.dim
        return out

    def member(self, x, tol: float = MEMBER_TOL) -> bool:
        return all(blk.member(part, tol) for blk, part in zip(self.blocks, self._split(x)))

    def project(self, x) -> np.ndarray:
        return np.concatenate([blk.project(part) for blk, part in zip(self.blocks, self._split(x))])

    def distance(self, x) -> float:
        return max(blk.distance(part) for blk, part in zip(self.blocks, self._split(x)))


# ---------------------------------------------------------------------------
# Intersection
# ---------------------------------------------------------------------------


def _debase(s: SetSpec) -> SetSpec:
    """Push Translate shifts into structured inners; unwrap structured epigraphs."""
    if isinstance(s, Translate):
        inner = _debase(s.inner)
        sh = s.shift
        if isinstance(inner, Polyhedron):
            return Polyhedron(inner.a, inner.b + inner.a @ sh)
        if isinstance(inner, Ball):
            return Ball(inner.center + sh, inner.radius)
        if isinstance(inner, AffineSet):
            return AffineSet(inner.basepoint + sh, inner.directions)
        if isinstance(inner, UnionSet):
            return UnionSet(tuple(_debase(Translate(m, sh)) for m in inner.members))
        return Translate(inner, sh)
    if isinstance(s, Epigraph) and s.func is not None:
        return s._delegate()
    return s


def _affine_as_polyhedron(s: AffineSet) -> Polyhedron:
    """Affine subspace as paired inequality rows over a complement basis."""
    n = s.dim
    q = s.directions
    full = np.eye(n)
    if q.shape[0]:
        full = full - q.T @ q
    comp = _orthonormal_rows(full)
    rows, rhs = [], []
    for c in comp:
        rows.append(c)
        rhs.append(float(c @ s.basepoint))
        rows.append(-c)
        rhs.append(-float(c @ s.basepoint))
    if not rows:
        return Polyhedron(np.zeros((0, n)), np.zeros(0))
    return Polyhedron(np.asarray(rows), np.asarray(rhs))


def _check_nonempty_polyhedron(p: Polyhedron) -> Polyhedron:
    if p.a.shape[0]:
        try:
            project_polyhedron(np.zeros(p.dim), p.a, p.b)
        except InfeasibleProblemError:
            raise InfeasibleProblemError("intersection is empty")
    return p


def intersect(s1: SetSpec, s2: SetSpec, tol: float = 1e-9) -> SetSpec:
    """Exact intersection SetSpec, or UnsupportedVariantError for combinations
    with no exact rule (e.g. two properly overlapping balls).

    Raises InfeasibleProblemError when the intersection is provably empty.
    The polyhedral path canonicalizes rows so the result is independent of
    operand order.
    """
    if s1.dim != s2.dim:
        raise DimensionMismatchError("sets live in different dimensions")
    a, b = _debase(s1), _debase(s2)

    if isinstance(a, UnionSet) or isinstance(b, UnionSet):
        u, other = (a, b) if isinstance(a, UnionSet) else (b, a)
        parts = []
        for m in u.members:  # type: ignore[union-attr]
            try:
                parts.append(intersect(m, other, tol))
            except InfeasibleProblemError:
                continue
        if not parts:
            raise InfeasibleProblemError("intersection is empty")
        return parts[0] if len(parts) == 1 else UnionSet(tuple(parts))

    if isinstance(a, Polyhedron) and isinstance(b, Polyhedron):
        merged = Polyhedron(np.vstack([a.a, b.a]), np.concatenate([a.b, b.b]))
        return _check_nonempty_polyhedron(merged.canonical())

    if isinstance(a, Polyhedron) and isinstance(b, AffineSet):
        return intersect(a, _affine_as_polyhedron(b), tol)
    if isinstance(a, AffineSet) and isinstance(b, Polyhedron):
        return intersect(_affine_as_polyhedron(a), b, tol)

    if isinstance(a, AffineSet) and isinstance(b, AffineSet):
        d1, d2 = a.directions, b.directions
        k1, k2 = d1.shape[0], d2.shape[0]
        lhs = np.column_stack([d1.T, -d2.T]) if (k1 + k2) else np.zeros((a.dim, 0))
        rhs = b.basepoint - a.basepoint
        if k1 + k2:
            sol, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
            resid = float(np.linalg.norm(lhs @ sol - rhs))
            point = a.basepoint + (d1.T @ sol[:k1] if k1 else 0.0)
        else:
            resid = float(np.linalg.norm(rhs))
            point = a.basepoint
        if resid > 1e-8:
            raise InfeasibleProblemError("affine sets do not meet")
        proj1 = d1.T @ d1 if k1 else np.zeros((a.dim, a.dim))
        proj2 = d2.T @ d2 if k2 else np.zeros((a.dim, a.dim))
        stacked = np.vstack([np.eye(a.dim) - proj1, np.eye(a.dim) - proj2])
        _, sv, vt = np.linalg.svd(stacked)
        null = vt[sv.shape[0]:] if vt.shape[0] > sv.shape[0] else vt[np.abs(sv) <= 1e-10]
        common = null if null.size else np.zeros((0, a.dim))
        return AffineSet(point, common)

    if isinstance(a, Ball) and isinstance(b, Ball):
        gap = float(np.linalg.norm(a.center - b.center))
        if gap + a.radius <= b.radius + tol:
            return a
        if gap + b.radius <= a.radius + tol:
            return b
        if gap > a.radius + b.radius + tol:
            raise InfeasibleProblemError("balls do not meet")
        if abs(gap - (a.radius + b.radius)) <= tol:
            point = a.center + (a.radius / gap) * (b.center - a.center)
            return AffineSet(point, np.zeros((0, a.dim)))
        raise UnsupportedVariantError("properly overlapping balls have no exact form")

    if isinstance(a, ProductSet) and isinstance(b, ProductSet):
        if tuple(blk.dim for blk in a.blocks) == tuple(blk.dim for blk in b.blocks):
            return ProductSet(tuple(intersect(x, y, tol) for x, y in zip(a.blocks, b.blocks)))

    raise UnsupportedVariantError(
        f"no exact intersection rule for {type(a).__name__} x {type(b).__name__}"
    )


def approx_intersection_projection(
    s1: SetSpec,
    s2: SetSpec,
    x,
    rng: np.random.Generator,
    starts: int = 4,
    iters: int = 200,
    tol: float = 1e-10,
) -> np.ndarray:
    """Multi-start alternating projections onto s1 ∩ s2 from x (approximate:
    returns the best common point found; an upper bound for d(x, s1 ∩ s2))."""
    x = as_vector(x, s1.dim)
    best, best_d = None, np.inf
    for k in range(starts):
        y = x if k == 0 else x + 0.5 * rng.standard_normal(x.shape[0])
        for _ in range(iters):
            y_new = s2.project(s1.project(y))
            if float(np.linalg.norm(y_new - y)) <= tol:
                y = y_new
                break
            y = y_new
        if s1.member(y, 1e-7) and s2.member(y, 1e-7):
            d = float(np.linalg.norm(y - x))
            if d < best_d:
                best, best_d = y, d
    if best is None:
        raise InfeasibleProblemError("alternating projections found no common point")
    return best


def points_of(s: SetSpec, around, radius: float, rng: np.random.Generator, count: int) -> list[np.ndarray]:
    """Sample points of ``s`` within the closed ball around ``around`` by
    projecting ball samples onto the set; used by the samplers."""
    around = as_vector(around, s.dim)
    out: list[np.ndarray] = []
    p0 = s.project(around)
    if float(np.linalg.norm(p0 - around)) <= radius + 1e-12:
        out.append(p0)
    tries = 0
    while len(out) < count and tries < 20 * count:
        tries += 1
        z = around + radius * _ball_sample(rng, s.dim)
        p = s.project(z)
        if float(np.linalg.norm(p - around)) <= radius + 1e-12:
            out.append(p)
    return out


def _ball_sample(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim)
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0:
        return np.zeros(dim)
    return (rng.random() ** (1.0 / dim)) * v / nrm


def ball_sample(rng: np.random.Generator, center, radius: float) -> np.ndarray:
    """Uniform sample from the closed ball (seeded, reproducible)."""
    center = as_vector(center)
    return center + radius * _ball_sample(rng, center.shape[0])
