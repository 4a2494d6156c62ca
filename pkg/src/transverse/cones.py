"""Polyhedral convex cones over exact rational arithmetic, tangent cones,
polars, and the dense-difference test.

A :class:`PolyCone` is stored canonically as

* ``lines``: the reduced-row-echelon basis of its lineality space, and
* ``rays``: the extreme rays of the pointed part, projected onto the
  orthocomplement of the lineality space, in primitive integer form,
  lexicographically sorted.

Equal cones therefore compare equal structurally, whatever representation
they were built from.  All arithmetic is over ``fractions.Fraction``; float
input converts exactly (every float is rational), so the rational path also
covers float-entered data.

The double-description conversion processes halfspaces incrementally.  While
a new halfspace cuts the current lineality space, one basis line pivots into
a ray and every ray is shifted onto the new hyperplane (an exact, count+1
update).  Once the halfspace is parallel to all remaining lines, the classic
positive/negative ray combination runs, followed by an exact extremeness
filter: a ray is extreme modulo the lineality space iff its active processed
normals have rank (dim - dim lineality - 1).  The filter is valid because the
span of the maintained lines always equals the lineality space of the
intermediate cone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    PreconditionError,
    RepresentationCapError,
    UnsupportedVariantError,
)
from . import sets as _sets
from .numkernel import as_vector, direction_net, unit_row

RAY_CAP = 256
ACTIVITY_TOL = 1e-9
SAMPLED_TOL = 1e-4

Vec = tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# Exact rational linear algebra
# ---------------------------------------------------------------------------


def _fr(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x))
    if isinstance(x, str):
        return Fraction(x)
    raise PreconditionError(f"cannot convert {type(x).__name__} to a rational")


def _frvec(v, dim: int | None = None) -> Vec:
    out = tuple(_fr(x) for x in v)
    if dim is not None and len(out) != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {len(out)}")
    return out


def _dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _is_zero(v: Vec) -> bool:
    return all(x == 0 for x in v)


def _primitive(v: Vec) -> Vec:
    """Scale by a positive rational to coprime integers (sign preserved)."""
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for k in ints:
        g = gcd(g, abs(k))
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(k // g) for k in ints)


def _line_primitive(v: Vec) -> Vec:
    p = _primitive(v)
    for x in p:
        if x != 0:
            return p if x > 0 else tuple(-y for y in p)
    return p


def _rref(rows: Sequence[Vec]) -> list[Vec]:
    if not rows:
        return []
    mat = [list(r) for r in rows]
    m, n = len(mat), len(mat[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(m):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        r += 1
        if r == m:
            break
    return [_line_primitive(tuple(row)) for row in mat[:r] if any(x != 0 for x in row)]


def _rank(rows: Sequence[Vec]) -> int:
    return len(_rref(rows))


def _solve_gram(basis: Sequence[Vec], target: Vec) -> list[Fraction]:
    """Solve (B B^T) alpha = B target for an independent row basis B."""
    k = len(basis)
    a = [[_dot(basis[i], basis[j]) for j in range(k)] for i in range(k)]
    b = [_dot(basis[i], target) for i in range(k)]
    for col in range(k):
        piv = next((i for i in range(col, k) if a[i][col] != 0), None)
        if piv is None:
            raise PreconditionError("gram system is singular")
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        b[col] = b[col] / pv
        for i in range(k):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
                b[i] = b[i] - f * b[col]
    return b


def _project_off(v: Vec, basis: Sequence[Vec]) -> Vec:
    """Exact orthogonal projection of v onto the complement of span(basis)."""
    if not basis:
        return v
    alpha = _solve_gram(basis, v)
    out = list(v)
    for coef, row in zip(alpha, basis):
        out = [x - coef * y for x, y in zip(out, row)]
    return tuple(out)


# ---------------------------------------------------------------------------
# Double description
# ---------------------------------------------------------------------------


def _dd(normals: Sequence[Vec], dim: int, ray_cap: int = RAY_CAP) -> tuple[list[Vec], list[Vec]]:
    """V-representation (lines, rays) of {v : n.v <= 0 for n in normals}."""
    lines: list[Vec] = [
        tuple(Fraction(1 if j == i else 0) for j in range(dim)) for i in range(dim)
    ]
    rays: list[Vec] = []
    processed: list[Vec] = []
    for raw in normals:
        a = _frvec(raw, dim)
        if _is_zero(a):
            continue
        line_vals = [_dot(a, b) for b in lines]
        pivot = next((j for j, val in enumerate(line_vals) if val != 0), None)
        if pivot is not None:
            b0, s = lines[pivot], line_vals[pivot]
            new_lines = []
            for j, b in enumerate(lines):
                if j == pivot:
                    continue
                new_lines.append(
                    _line_primitive(tuple(x - (line_vals[j] / s) * y for x, y in zip(b, b0)))
                )
            rays = [
                _primitive(tuple(x - (_dot(a, r) / s) * y for x, y in zip(r, b0)))
                for r in rays
            ]
            r0 = tuple(-x for x in b0) if s > 0 else b0
            rays.append(_primitive(r0))
            lines = new_lines
        else:
            vals = [_dot(a, r) for r in rays]
            if any(val > 0 for val in vals):
                neg = [(r, val) for r, val in zip(rays, vals) if val < 0]
                zero = [r for r, val in zip(rays, vals) if val == 0]
                pos = [(r, val) for r, val in zip(rays, vals) if val > 0]
                combos = []
                for p, vp in pos:
                    for m, vm in neg:
                        combo = _primitive(tuple(vp * x - vm * y for x, y in zip(m, p)))
                        if not _is_zero(combo):
                            combos.append(combo)
                seen: set[Vec] = set()
                merged: list[Vec] = []
                for r in [m for m, _ in neg] + zero + combos:
                    if r not in seen:
                        seen.add(r)
                        merged.append(r)
                quota = dim - len(lines) - 1
                active_tbl = processed + [a]
                rays = [
                    r
                    for r in merged
                    if _rank([h for h in active_tbl if _dot(h, r) == 0]) >= quota
                ]
        processed.append(a)
        if len(rays) > ray_cap:
            raise RepresentationCapError(
                f"double description exceeded the ray cap ({ray_cap})"
            )
    return lines, rays


def _canonicalize(lines: Sequence[Vec], rays: Sequence[Vec], dim: int) -> tuple[tuple[Vec, ...], tuple[Vec, ...]]:
    lin = _rref(lines)
    out: list[Vec] = []
    seen: set[Vec] = set()
    for r in rays:
        p = _primitive(_project_off(r, lin))
        if not _is_zero(p) and p not in seen:
            seen.add(p)
            out.append(p)
    return tuple(sorted(lin)), tuple(sorted(out))


# ---------------------------------------------------------------------------
# PolyCone
# ---------------------------------------------------------------------------


@dataclass
class PolyCone:
    """Closed convex polyhedral cone in canonical dual-consistent form."""

    dim: int
    lines: tuple[Vec, ...]
    rays: tuple[Vec, ...]
    _polar: "PolyCone | None" = field(default=None, repr=False, compare=False)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_halfspaces(normals: Iterable, dim: int, ray_cap: int = RAY_CAP) -> "PolyCone":
        ns = [_frvec(n, dim) for n in normals]
        lines, rays = _dd(ns, dim, ray_cap)
        lin, ry = _canonicalize(lines, rays, dim)
        return PolyCone(dim, lin, ry)

    @staticmethod
    def from_generators(gens: Iterable, dim: int, ray_cap: int = RAY_CAP) -> "PolyCone":
        gs = [_frvec(g, dim) for g in gens]
        gs = [g for g in gs if not _is_zero(g)]
        polar = PolyCone.from_halfspaces(gs, dim, ray_cap)
        cone = PolyCone.from_halfspaces(polar.generators(), dim, ray_cap)
        cone._polar = polar
        polar._polar = cone
        return cone

    @staticmethod
    def full(dim: int) -> "PolyCone":
        return PolyCone.from_halfspaces([], dim)

    @staticmethod
    def zero(dim: int) -> "PolyCone":
        return PolyCone.from_generators([], dim)

    # -- structure ----------------------------------------------------------

    def generators(self) -> list[Vec]:
        """Exact generator list: both signs of each line, then the rays."""
        out: list[Vec] = []
        for l in self.lines:
            out.append(l)
            out.append(tuple(-x for x in l))
        out.extend(self.rays)
        return out

    def generator_array(self) -> np.ndarray:
        gens = self.generators()
        if not gens:
            return np.zeros((0, self.dim))
        return np.array([[float(x) for x in g] for g in gens])

    def polar(self) -> "PolyCone":
        """Polar cone {w : w.v <= 0 for all v in self}; exact involution."""
        if self._polar is None:
            gens = self.generators()
            p = PolyCone.from_halfspaces(gens, self.dim)
            p._polar = self
            self._polar = p
        return self._polar

    def halfspace_normals(self) -> list[Vec]:
        """Minimal outer description: self == {v : n.v <= 0 for n in result}."""
        return self.polar().generators()

    def halfspace_array(self) -> np.ndarray:
        ns = self.halfspace_normals()
        if not ns:
            return np.zeros((0, self.dim))
        return np.array([[float(x) for x in n] for n in ns])

    @property
    def is_trivial(self) -> bool:
        return not self.lines and not self.rays

    @property
    def is_full(self) -> bool:
        return len(self.lines) == self.dim

    def contains_vector(self, v, tol: Fraction | float = 0) -> bool:
        w = _frvec(v, self.dim)
        t = _fr(tol)
        return all(_dot(n, w) <= t for n in self.halfspace_normals())

    def contains_cone(self, other: "PolyCone") -> bool:
        if other.dim != self.dim:
            raise DimensionMismatchError("cones live in different dimensions")
        return all(self.contains_vector(g) for g in other.generators())

    def equals(self, other: "PolyCone") -> bool:
        return (
            self.dim == other.dim
            and self.lines == other.lines
            and self.rays == other.rays
        )

    def verify_dual_consistency(self) -> bool:
        """Every generator satisfies every canonical halfspace, exactly."""
        ns = self.halfspace_normals()
        return all(_dot(n, g) <= 0 for n in ns for g in self.generators())

    def sample_points(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Random elements: nonnegative combinations of generators (float)."""
        gens = self.generator_array()
        if gens.shape[0] == 0:
            return np.zeros((count, self.dim))
        w = rng.random((count, gens.shape[0]))
        return w @ gens

    def serialize(self) -> dict:
        return {
            "dim": self.dim,
            "lines": [[str(x) for x in l] for l in self.lines],
            "rays": [[str(x) for x in r] for r in self.rays],
        }


# ---------------------------------------------------------------------------
# Cone arithmetic
# ---------------------------------------------------------------------------


def _negate_flat(c: PolyCone) -> PolyCone:
    rays = tuple(sorted(tuple(-x for x in r) for r in c.rays))
    return PolyCone(c.dim, c.lines, rays)


def cone_negate(c: PolyCone) -> PolyCone:
    out = _negate_flat(c)
    if c._polar is not None:
        p = _negate_flat(c._polar)
        out._polar = p
        p._polar = out
    return out


def cone_sum(c1: PolyCone, c2: PolyCone, ray_cap: int = RAY_CAP) -> PolyCone:
    """Minkowski sum (= conic hull of the union of generators)."""
    if c1.dim != c2.dim:
        raise DimensionMismatchError("cones live in different dimensions")
    return PolyCone.from_generators(c1.generators() + c2.generators(), c1.dim, ray_cap)


def cone_diff(c1: PolyCone, c2: PolyCone, ray_cap: int = RAY_CAP) -> PolyCone:
    """Minkowski difference cone {v1 - v2}; closed because both are polyhedral."""
    if c1.dim != c2.dim:
        raise DimensionMismatchError("cones live in different dimensions")
    neg = [tuple(-x for x in g) for g in c2.generators()]
    return PolyCone.from_generators(c1.generators() + neg, c1.dim, ray_cap)


def cone_intersect(c1: PolyCone, c2: PolyCone, ray_cap: int = RAY_CAP) -> PolyCone:
    if c1.dim != c2.dim:
        raise DimensionMismatchError("cones live in different dimensions")
    return PolyCone.from_halfspaces(
        c1.halfspace_normals() + c2.halfspace_normals(), c1.dim, ray_cap
    )


def cone_product(c1: PolyCone, c2: PolyCone) -> PolyCone:
    """Direct product; canonical form assembles blockwise (faces of a product
    are products of faces, so extreme rays embed directly)."""
    d1, d2 = c1.dim, c2.dim
    z1, z2 = (Fraction(0),) * d1, (Fraction(0),) * d2
    lines = [l + z2 for l in c1.lines] + [z1 + l for l in c2.lines]
    rays = [r + z2 for r in c1.rays] + [z1 + r for r in c2.rays]
    lin, ry = _canonicalize(lines, rays, d1 + d2)
    return PolyCone(d1 + d2, lin, ry)


def cone_insert_coordinate(c: PolyCone, index: int, free: bool = True) -> PolyCone:
    """Embed into one more dimension by inserting a coordinate at ``index``;
    the new coordinate is unconstrained when ``free`` else pinned to zero."""
    if not 0 <= index <= c.dim:
        raise PreconditionError("insertion index out of range")

    def ins(v: Vec) -> Vec:
        return v[:index] + (Fraction(0),) + v[index:]

    gens = [ins(g) for g in c.generators()]
    if free:
        axis = tuple(Fraction(1 if j == index else 0) for j in range(c.dim + 1))
        gens.append(axis)
        gens.append(tuple(-x for x in axis))
    return PolyCone.from_generators(gens, c.dim + 1)


def cone_drop_zero_coordinate(c: PolyCone, index: int) -> PolyCone:
    """Drop a coordinate that is identically zero on the cone."""
    for g in c.generators():
        if g[index] != 0:
            raise PreconditionError("coordinate is not identically zero on the cone")
    gens = [g[:index] + g[index + 1:] for g in c.generators()]
    return PolyCone.from_generators(gens, c.dim - 1)


def cone_slice_last_zero(c: PolyCone) -> PolyCone:
    """Intersect with {v_last = 0} and drop the coordinate."""
    axis = [Fraction(0)] * c.dim
    axis[-1] = Fraction(1)
    hyper = PolyCone.from_halfspaces([tuple(axis), tuple(-x for x in axis)], c.dim)
    sliced = cone_intersect(c, hyper)
    return cone_drop_zero_coordinate(sliced, c.dim - 1)


def ray_cone(direction, dim: int | None = None) -> PolyCone:
    v = _frvec(direction, dim)
    return PolyCone.from_generators([v], len(v))


def halfspace_cone(normal, dim: int | None = None) -> PolyCone:
    n = _frvec(normal, dim)
    return PolyCone.from_halfspaces([n], len(n))


def cone_times_nonpositive_ray(c: PolyCone) -> PolyCone:
    """C x (-inf, 0]: the product used for constraint-side difference cones."""
    return cone_product(c, ray_cone([-1], 1))


def is_dense_difference(c1: PolyCone, c2: PolyCone) -> tuple[bool, dict]:
    """Whether C1 - C2 is dense (for polyhedral cones: equal to the space).

    Test: polar(C1) ∩ (-polar(C2)) == {0}.  The certificate carries either the
    trivial polar intersection or a nonzero witness w with w.v <= 0 on C1 and
    w.v >= 0 on C2 (so C1 - C2 lies in the halfspace {w.v <= 0}).
    """
    if c1.dim != c2.dim:
        raise DimensionMismatchError("cones live in different dimensions")
    meet = cone_intersect(c1.polar(), cone_negate(c2.polar()))
    dense = meet.is_trivial
    cert: dict = {"polar_intersection": meet.serialize(), "dense": dense}
    if not dense:
        witness = meet.lines[0] if meet.lines else meet.rays[0]
        cert["witness"] = [str(x) for x in witness]
        cert["witness_float"] = [float(x) for x in witness]
    return dense, cert


# ---------------------------------------------------------------------------
# Tangent cones: exact paths
# ---------------------------------------------------------------------------


def tangent_cone_polyhedral(p: _sets.Polyhedron, x0, act_tol: float = ACTIVITY_TOL) -> PolyCone:
    """Tangent cone of a polyhedron at a member point: the active-row cone.

    A row is active when |a_i.x0 - b_i| <= act_tol.  For polyhedra the
    Bouligand, derivable and Clarke cones all coincide with this cone.
    """
    x0 = as_vector(x0, p.dim)
    # canonical unit rows: the same bits intersect() stores for a meet, so
    # cones of a meet and of its operands stay exactly comparable
    rows = []
    rhs = []
    for i in range(p.a.shape[0]):
        r, scale = unit_row(p.a[i])
        if float(np.linalg.norm(r)) > 0.0:
            rows.append(r)
            rhs.append(p.b[i] / scale)
    resid = (
        np.array([r @ x0 - c for r, c in zip(rows, rhs)]) if rows else np.zeros(0)
    )
    if resid.size and float(np.max(resid)) > act_tol:
        raise PreconditionError("base point is not in the polyhedron")
    active = [i for i in range(len(rows)) if abs(float(resid[i])) <= act_tol]
    if not active:
        return PolyCone.full(p.dim)
    return PolyCone.from_halfspaces([tuple(_fr(v) for v in rows[i]) for i in active], p.dim)


def clarke_cone_convex(s: _sets.SetSpec, x0, act_tol: float = ACTIVITY_TOL) -> PolyCone:
    """Clarke (= Bouligand = derivable) tangent cone for convex variants with
    an exact rule: polyhedra, balls, affine sets, translates, products and
    structured epigraphs."""
    x0 = as_vector(x0, s.dim)
    if isinstance(s, _sets.Polyhedron):
        return tangent_cone_polyhedral(s, x0, act_tol)
    if isinstance(s, _sets.AffineSet):
        if not s.member(x0, 1e-7):
            raise PreconditionError("base point is not in the affine set")
        dirs = getattr(s, "raw_directions", s.directions)
        gens: list = []
        for d in np.atleast_2d(dirs):
            if d.size and float(np.linalg.norm(d)) > 0:
                gens.append(tuple(_fr(v) for v in d))
                gens.append(tuple(-_fr(v) for v in d))
        return PolyCone.from_generators(gens, s.dim)
    if isinstance(s, _sets.Ball):
        gap = float(np.linalg.norm(x0 - s.center))
        if gap > s.radius + 1e-7:
            raise PreconditionError("base point is not in the ball")
        if gap < s.radius - 1e-7:
            return PolyCone.full(s.dim)
        return halfspace_cone(tuple(_fr(v) for v in (x0 - s.center)))
    if isinstance(s, _sets.Translate):
        return clarke_cone_convex(s.inner, x0 - s.shift, act_tol)
    if isinstance(s, _sets.ProductSet):
        parts = []
        k = 0
        for blk in s.blocks:
            parts.append(clarke_cone_convex(blk, x0[k:k + blk.dim], act_tol))
            k += blk.dim
        out = parts[0]
        for nxt in parts[1:]:
            out = cone_product(out, nxt)
        return out
    if isinstance(s, _sets.Epigraph) and s.func is not None:
        return clarke_cone_convex(s._delegate(), x0, act_tol)
    raise UnsupportedVariantError(
        f"no exact tangent cone rule for {type(s).__name__}"
    )


tangent_cone_convex = clarke_cone_convex


# ---------------------------------------------------------------------------
# Sampled tangent cones
# ---------------------------------------------------------------------------

IN = "IN"
OUT = "OUT"
UNDECIDED = "UNDECIDED"


@dataclass
class SampledCone:
    """Direction-sampled tangent cone surrogate at a point.

    mode "bouligand": a direction is IN when the residual profile
    dist(x0 + t v, S)/t dips below tol for SOME probe t (liminf criterion);
    mode "derivable": the single projection curve xi(t) = P_S(x0 + t v) must
    stay within tol * t for EVERY probe t (curve criterion; a sampled
    surrogate, and flagged as such).
    OUT requires the profile to stay above 10 * tol; anything else is
    UNDECIDED.
    """

    base: _sets.SetSpec
    point: np.ndarray
    mode: str = "bouligand"
    tol: float = SAMPLED_TOL
    t_hi: float = 1.0
    t_lo: float = 1e-5
    table: list = field(default_factory=list)

    def __post_init__(self):
        if self.mode not in ("bouligand", "derivable"):
            raise PreconditionError("mode must be 'bouligand' or 'derivable'")
        self.point = as_vector(self.point, self.base.dim)

    def t_grid(self) -> np.ndarray:
        ts = [self.t_hi]
        while ts[-1] * 0.5 >= self.t_lo:
            ts.append(ts[-1] * 0.5)
        return np.asarray(ts)

    def residual_profile(self, v) -> np.ndarray:
        v = as_vector(v, self.base.dim)
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0:
            return np.zeros(1)
        v = v / nrm
        return np.asarray(
            [self.base.distance(self.point + t * v) / t for t in self.t_grid()]
        )

    def classify(self, v) -> str:
        prof = self.residual_profile(v)
        if self.mode == "bouligand":
            score = float(np.min(prof))
        else:
            score = float(np.max(prof))
        if score <= self.tol:
            return IN
        if float(np.min(prof)) >= 10.0 * self.tol:
            return OUT
        return UNDECIDED

    def record(self, v) -> dict:
        v = as_vector(v, self.base.dim)
        entry = {
            "direction": v,
            "profile": self.residual_profile(v),
            "verdict": self.classify(v),
        }
        self.table.append(entry)
        return entry


def tangent_cone_sampled(
    s: _sets.SetSpec,
    x0,
    rng: np.random.Generator,
    budget: int = 64,
    tol: float = SAMPLED_TOL,
    mode: str = "bouligand",
) -> SampledCone:
    """Probe a direction net (plus random directions) and return the sampled
    cone with its classification table."""
    x0 = as_vector(x0, s.dim)
    if not s.member(x0, 1e-6):
        raise PreconditionError("base point is not in the set")
    cone = SampledCone(base=s, point=x0, mode=mode, tol=tol)
    net = direction_net(s.dim, max(8, budget // 2))
    extra = rng.standard_normal((max(0, budget - net.shape[0]), s.dim))
    for v in np.vstack([net, extra]):
        nrm = float(np.linalg.norm(v))
        if nrm > 0:
            cone.record(v / nrm)
    return cone
