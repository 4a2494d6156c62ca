"""Exact polyhedral cones, polarity, cone algebra, sampled surrogates."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transverse import (
    IN,
    OUT,
    UNDECIDED,
    AffineSet,
    Ball,
    PolyCone,
    Polyhedron,
    clarke_cone_convex,
    cone_insert_coordinate,
    cone_intersect,
    cone_negate,
    cone_product,
    cone_slice_last_zero,
    cone_sum,
    halfspace_cone,
    intersect,
    is_dense_difference,
    ray_cone,
    tangent_cone_polyhedral,
    tangent_cone_sampled,
)
from transverse.instances import quadrant

import oracles


def frozen(vecs):
    return {tuple(map(Fraction, v)) for v in vecs}


# ---------------------------------------------------------------------------
# construction and canonical structure
# ---------------------------------------------------------------------------


def test_quadrant_cone_has_axis_rays():
    c = PolyCone.from_halfspaces([[-1, 0], [0, -1]], 2)
    assert not c.lines
    assert frozen(c.rays) == frozen([[1, 0], [0, 1]])
    assert c.contains_vector([2, 3]) and not c.contains_vector([-1, 0])


def test_halfspace_cone_has_one_line_one_ray():
    c = halfspace_cone([0, 1], 2)  # y <= 0
    assert frozen(c.lines) == frozen([[1, 0]])
    assert frozen(c.rays) == frozen([[0, -1]])


def test_full_and_zero_cones():
    full = PolyCone.full(3)
    zero = PolyCone.zero(3)
    assert full.is_full and not full.is_trivial
    assert zero.is_trivial and not zero.is_full
    assert full.contains_cone(zero)
    assert zero.polar().is_full and full.polar().is_trivial


def test_generators_roundtrip_through_double_description():
    for normals in ([[-1, 0], [0, -1]], [[1, 1], [-1, 2]], [[1, 0, 0], [0, 1, -1]]):
        dim = len(normals[0])
        c = PolyCone.from_halfspaces(normals, dim)
        back = PolyCone.from_generators(c.generators(), dim)
        assert c.equals(back)


def test_polar_is_an_exact_involution():
    c = PolyCone.from_halfspaces([[-3, 1], [2, -5]], 2)
    assert c.polar().polar().equals(c)
    assert c.verify_dual_consistency()


@given(
    st.lists(
        st.tuples(st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4)),
        min_size=0,
        max_size=4,
    )
)
@settings(max_examples=40, deadline=None)
def test_polar_involution_on_random_integer_cones(normals):
    c = PolyCone.from_halfspaces([list(n) for n in normals], 3)
    assert c.polar().polar().equals(c)
    assert c.verify_dual_consistency()
    # every stored generator really satisfies every stored halfspace
    for g in c.generators():
        assert all(
            sum(ni * gi for ni, gi in zip(n, g)) <= 0 for n in c.halfspace_normals()
        )


# ---------------------------------------------------------------------------
# cone algebra
# ---------------------------------------------------------------------------


def test_cone_intersect_quadrant_with_halfspace():
    q = PolyCone.from_halfspaces([[-1, 0], [0, -1]], 2)
    h = halfspace_cone([1, -1], 2)  # x <= y
    m = cone_intersect(q, h)
    assert m.contains_vector([1, 2]) and m.contains_vector([0, 1])
    assert not m.contains_vector([2, 1])


def test_cone_sum_of_axis_rays_is_quadrant():
    s = cone_sum(ray_cone([1, 0]), ray_cone([0, 1]))
    assert s.equals(PolyCone.from_halfspaces([[-1, 0], [0, -1]], 2))


def test_cone_negate_flips_rays():
    q = PolyCone.from_halfspaces([[-1, 0], [0, -1]], 2)
    n = cone_negate(q)
    assert n.contains_vector([-1, -2]) and not n.contains_vector([1, 0])


def test_cone_product_concatenates_coordinates():
    p = cone_product(ray_cone([1]), ray_cone([-1]))
    assert p.dim == 2
    assert p.contains_vector([2, -3]) and not p.contains_vector([2, 3])


def test_cone_insert_and_slice_coordinates():
    q = PolyCone.from_halfspaces([[-1, 0], [0, -1]], 2)
    lifted = cone_insert_coordinate(q, 1, free=True)
    assert lifted.dim == 3
    assert lifted.contains_vector([1, -9, 2]) and lifted.contains_vector([1, 9, 2])
    assert not lifted.contains_vector([-1, 0, 2])
    sliced = cone_slice_last_zero(cone_product(q, ray_cone([1])))
    assert sliced.dim == 2 and sliced.equals(q)


def test_is_dense_difference_for_crossing_and_parallel_lines():
    span_x = PolyCone.from_generators([[1, 0], [-1, 0]], 2)
    span_diag = PolyCone.from_generators([[1, 1], [-1, -1]], 2)
    dense, cert = is_dense_difference(span_x, span_diag)
    assert dense and cert.get("witness") is None
    not_dense, cert2 = is_dense_difference(span_x, span_x)
    assert not not_dense
    w = np.asarray(cert2["witness_float"], dtype=float)
    # the witness separates: nonnegative on the first cone, and then some
    assert abs(w[1]) > 0 and abs(w[0]) <= 1e-12


# ---------------------------------------------------------------------------
# tangent and Clarke cones
# ---------------------------------------------------------------------------


def test_tangent_cone_of_quadrant_matches_active_set_oracle():
    q = quadrant(2)
    at_corner = tangent_cone_polyhedral(q, [0.0, 0.0])
    assert frozen(at_corner.rays) == frozen([[1, 0], [0, 1]])
    at_facet = tangent_cone_polyhedral(q, [0.0, 1.0])
    want = oracles.quadrant_tangent_rays(active=[0], dim=2)
    gens = {tuple(float(x) for x in g) for g in at_facet.generators()}
    assert gens == want
    interior = tangent_cone_polyhedral(q, [1.0, 1.0])
    assert interior.is_full


def test_tangent_cone_bits_match_intersect_rows():
    # the meet of two halfplanes and the operands yield literally identical
    # halfspace data, so exact cone comparisons of a meet never see noise
    r1 = np.array([-0.95283592, -0.30348593])
    r2 = np.array([0.82585695, -0.56387969])
    a = Polyhedron([r1], [0.0])
    b = Polyhedron([r2], [0.0])
    meet = intersect(a, b)
    tc_meet = tangent_cone_polyhedral(meet, [0.0, 0.0])
    tc_a = tangent_cone_polyhedral(a, [0.0, 0.0])
    tc_b = tangent_cone_polyhedral(b, [0.0, 0.0])
    assert tc_a.contains_cone(tc_meet) and tc_b.contains_cone(tc_meet)
    assert tc_meet.equals(cone_intersect(tc_a, tc_b))


def test_clarke_cone_of_ball_at_boundary_is_halfspace():
    c = clarke_cone_convex(Ball([0.0, 0.0], 1.0), [1.0, 0.0])
    assert c.equals(halfspace_cone([1, 0], 2))
    interior = clarke_cone_convex(Ball([0.0, 0.0], 1.0), [0.0, 0.0])
    assert interior.is_full


def test_clarke_cone_of_affine_set_is_its_span():
    line = AffineSet([0.0, 0.0], [[1.0, 1.0]])
    c = clarke_cone_convex(line, [0.5, 0.5])
    assert c.contains_vector([2, 2]) and c.contains_vector([-1, -1])
    assert not c.contains_vector([1, 0])
    point = AffineSet([1.0, 2.0], np.zeros((0, 2)))
    assert clarke_cone_convex(point, [1.0, 2.0]).is_trivial


# ---------------------------------------------------------------------------
# sampled cones
# ---------------------------------------------------------------------------


def test_sampled_cone_classifies_disk_directions():
    disk = Ball([0.0, 1.0], 1.0)
    rng = np.random.default_rng(0)
    cone = tangent_cone_sampled(disk, [0.0, 0.0], rng, budget=16)
    assert cone.classify([1.0, 0.0]) == IN  # tangent direction
    assert cone.classify([0.0, 1.0]) == IN  # inward
    assert cone.classify([0.0, -1.0]) == OUT  # outward normal
    verdicts = {r["verdict"] for r in cone.table}
    assert verdicts <= {IN, OUT, UNDECIDED}


def test_sampled_cone_derivable_mode_is_stricter():
    disk = Ball([0.0, 1.0], 1.0)
    rng = np.random.default_rng(0)
    bouligand = tangent_cone_sampled(disk, [0.0, 0.0], rng, budget=8, mode="bouligand")
    derivable = tangent_cone_sampled(disk, [0.0, 0.0], rng, budget=8, mode="derivable")
    # the curve criterion can only demote verdicts, never promote OUT to IN
    for v in ([1.0, 0.0], [0.0, 1.0], [0.0, -1.0]):
        db = bouligand.classify(v)
        dd = derivable.classify(v)
        if db == OUT:
            assert dd == OUT
