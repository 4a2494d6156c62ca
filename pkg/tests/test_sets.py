"""Set variants: membership, projection, distance, intersection, codecs."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transverse import (
    AffineSet,
    Ball,
    Epigraph,
    InfeasibleProblemError,
    Polyhedron,
    PreconditionError,
    ProductSet,
    Translate,
    UnionSet,
    indicator_fn,
    intersect,
    linear_fn,
    maxlin_fn,
)
from transverse.numkernel import unit_row
from transverse.sets import points_of

import oracles


def box(lo, hi):
    dim = len(lo)
    a = np.vstack([np.eye(dim), -np.eye(dim)])
    b = np.concatenate([np.asarray(hi, float), -np.asarray(lo, float)])
    return Polyhedron(a, b)


# ---------------------------------------------------------------------------
# basic variants against closed forms
# ---------------------------------------------------------------------------


def test_polyhedron_box_matches_clamp_oracle():
    s = box([-1.0, -2.0], [1.0, 0.5])
    for x in ([2.0, 2.0], [-3.0, 0.0], [0.0, 0.0]):
        want = oracles.clamp_box(np.array(x), np.array([-1.0, -2.0]), np.array([1.0, 0.5]))
        np.testing.assert_allclose(s.project(x), want, atol=1e-9)
        assert s.member(x) == bool(np.allclose(want, x))
        assert s.distance(x) == pytest.approx(float(np.linalg.norm(want - np.array(x))), abs=1e-9)


def test_ball_projection_closed_form():
    s = Ball(center=[1.0, 1.0], radius=2.0)
    x = np.array([4.0, 5.0])
    np.testing.assert_allclose(
        s.project(x), oracles.project_sphere_ball(x, s.center, 2.0), atol=1e-12
    )
    assert s.distance(x) == pytest.approx(3.0, abs=1e-12)
    assert s.member([2.0, 2.0]) and not s.member([4.0, 4.0])


def test_affine_line_projection_closed_form():
    s = AffineSet(basepoint=[1.0, 0.0], directions=[[1.0, 1.0]])
    x = np.array([2.0, 3.0])
    np.testing.assert_allclose(
        s.project(x),
        oracles.project_line(x, np.array([1.0, 0.0]), np.array([1.0, 1.0])),
        atol=1e-12,
    )


def test_affine_point_projects_to_basepoint():
    p = AffineSet(basepoint=[2.0, -1.0], directions=np.zeros((0, 2)))
    np.testing.assert_allclose(p.project([9.0, 9.0]), [2.0, -1.0])
    assert p.member([2.0, -1.0]) and not p.member([2.0, -0.9])


def test_translate_shifts_inner_oracles():
    s = Translate(inner=Ball(center=[0.0, 0.0], radius=1.0), shift=[3.0, 0.0])
    assert s.member([3.5, 0.0]) and not s.member([1.0, 0.0])
    np.testing.assert_allclose(s.project([5.0, 0.0]), [4.0, 0.0], atol=1e-12)


def test_union_takes_nearest_member():
    s = UnionSet(members=(Ball([0.0, 0.0], 1.0), Ball([10.0, 0.0], 1.0)))
    np.testing.assert_allclose(s.project([8.0, 0.0]), [9.0, 0.0], atol=1e-12)
    assert s.distance([8.0, 0.0]) == pytest.approx(1.0, abs=1e-12)
    assert s.member([0.5, 0.0]) and s.member([10.0, 0.5])


def test_product_set_is_blockwise_with_max_distance():
    s = ProductSet(blocks=(Ball([0.0], 1.0), Ball([0.0], 2.0)))
    x = [4.0, 5.0]
    np.testing.assert_allclose(s.project(x), [1.0, 2.0], atol=1e-12)
    # uniform product norm: the distance is the max of the block distances
    assert s.distance(x) == pytest.approx(3.0, abs=1e-12)


# ---------------------------------------------------------------------------
# epigraphs
# ---------------------------------------------------------------------------


def test_epigraph_linear_polyhedral_form():
    epi = Epigraph(func=linear_fn([2.0], d=1.0))
    assert epi.dim == 2 and epi.oracle_exact
    assert epi.member([0.0, 1.0]) and not epi.member([0.0, 0.5])
    p = epi.as_polyhedron()
    np.testing.assert_allclose(p.a, [[2.0, -1.0]])
    np.testing.assert_allclose(p.b, [-1.0])


def test_epigraph_abs_projection():
    epi = Epigraph(func=maxlin_fn([[1.0, 0.0], [-1.0, 0.0]]))
    # straight below the kink the nearest point is the kink itself: the
    # perpendicular feet on both edges fall outside their pieces
    got = epi.project([0.0, -1.0])
    assert epi.member(got, 1e-9)
    np.testing.assert_allclose(got, [0.0, 0.0], atol=1e-8)
    # off-axis, the foot on the edge r = x is interior and optimal
    got = epi.project([1.0, 0.0])
    np.testing.assert_allclose(got, [0.5, 0.5], atol=1e-8)


def test_epigraph_indicator_is_product_with_halfline():
    inner = box([-1.0], [1.0])
    epi = Epigraph(func=indicator_fn(inner))
    assert epi.member([0.5, 3.0]) and not epi.member([0.5, -0.1])
    assert not epi.member([2.0, 1.0])
    np.testing.assert_allclose(epi.project([2.0, -1.0]), [1.0, 0.0], atol=1e-9)
    with pytest.raises(PreconditionError):
        epi.value([2.0])


def test_epigraph_raw_callable_is_marked_inexact():
    epi = Epigraph(f=lambda x: float(x @ x), base_dim=2)
    assert not epi.oracle_exact
    got = epi.project([0.0, 0.0, -1.0])
    assert epi.member(got, 1e-6)


# ---------------------------------------------------------------------------
# intersection
# ---------------------------------------------------------------------------


def test_intersect_halfplanes_is_canonical_polyhedron():
    s1 = Polyhedron([[2.0, 0.0]], [0.0])
    s2 = Polyhedron([[0.0, -3.0]], [0.0])
    meet = intersect(s1, s2)
    assert isinstance(meet, Polyhedron)
    # rows come out canonicalized to unit norm
    np.testing.assert_allclose(np.linalg.norm(meet.a, axis=1), 1.0, atol=1e-15)
    assert meet.member([-1.0, 1.0]) and not meet.member([1.0, 1.0])


def test_intersect_rows_share_unit_row_bits():
    row = np.array([-0.95283592, -0.30348593])
    s1 = Polyhedron([row], [0.0])
    s2 = Polyhedron([[1.0, 0.0]], [1.0])
    meet = intersect(s1, s2)
    expected, _ = unit_row(row)
    assert any(r.tobytes() == expected.tobytes() for r in meet.a)


def test_intersect_crossing_lines_is_the_origin():
    a = AffineSet([0.0, 0.0], [[1.0, 0.0]])
    b = AffineSet([0.0, 0.0], [[1.0, 1.0]])
    meet = intersect(a, b)
    assert meet.member([0.0, 0.0]) and not meet.member([0.5, 0.0])
    np.testing.assert_allclose(meet.project([3.0, 4.0]), [0.0, 0.0], atol=1e-9)


def test_intersect_disjoint_raises():
    s1 = Polyhedron([[1.0, 0.0]], [-1.0])  # x <= -1
    s2 = Polyhedron([[-1.0, 0.0]], [-1.0])  # x >= 1
    with pytest.raises(InfeasibleProblemError):
        intersect(s1, s2)


def test_intersect_ball_and_halfplane_is_unsupported_exactly():
    # no exact rule exists for this mix; the error names the variants so
    # callers can fall back to approximate machinery deliberately
    from transverse import UnsupportedVariantError

    with pytest.raises(UnsupportedVariantError, match="Ball"):
        intersect(Ball([0.0, 0.0], 1.0), Polyhedron([[0.0, -1.0]], [0.0]))


# ---------------------------------------------------------------------------
# sampling and properties
# ---------------------------------------------------------------------------


def test_points_of_returns_members_within_radius():
    s = box([-1.0, -1.0], [1.0, 1.0])
    rng = np.random.default_rng(0)
    pts = points_of(s, [0.0, 0.0], 0.5, rng, 20)
    assert len(pts) == 20
    for p in pts:
        assert s.member(p, 1e-9)
        assert float(np.linalg.norm(p)) <= 0.5 + 1e-9


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_projection_is_idempotent_across_variants(seed):
    rng = np.random.default_rng(seed)
    for s in (
        box([-1.0, -1.0], [1.0, 1.0]),
        Ball([0.5, 0.0], 1.5),
        AffineSet([0.0, 1.0], [[2.0, 1.0]]),
        Epigraph(func=maxlin_fn([[1.0, 0.0], [-1.0, 0.0]])),
    ):
        x = rng.standard_normal(s.dim) * 3.0
        p = s.project(x)
        assert s.member(p, 1e-7)
        np.testing.assert_allclose(s.project(p), p, atol=1e-7)
