"""Numeric kernel: vectors, norms, projections, the LP layer."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transverse import (
    DimensionMismatchError,
    LpProblem,
    PreconditionError,
    as_vector,
    direction_net,
    distance_polyhedron,
    lp_solve,
    max_product,
    norm,
    project_polyhedron,
)
from transverse.numkernel import unit_row

import oracles


# ---------------------------------------------------------------------------
# vectors and norms
# ---------------------------------------------------------------------------


def test_as_vector_accepts_lists_scalars_and_arrays():
    np.testing.assert_array_equal(as_vector([1, 2]), np.array([1.0, 2.0]))
    np.testing.assert_array_equal(as_vector(3), np.array([3.0]))
    v = as_vector(np.arange(4), dim=4)
    assert v.dtype == float and v.shape == (4,)


def test_as_vector_rejects_bad_input():
    with pytest.raises(DimensionMismatchError):
        as_vector([1.0, 2.0], dim=3)
    with pytest.raises(PreconditionError):
        as_vector([1.0, float("nan")])
    with pytest.raises(PreconditionError):
        as_vector(np.zeros((2, 2)))


def test_norm_euclidean_matches_numpy():
    x = [3.0, 4.0]
    assert norm(x) == 5.0


def test_maxprod_norm_is_max_of_block_norm_and_scalars():
    # R^2 x R with split 2: max(||(3,4)||, |r|)
    assert norm([3.0, 4.0, 2.0], max_product(2)) == 5.0
    assert norm([3.0, 4.0, -7.0], max_product(2)) == 7.0
    # split == n degenerates to the 2-norm
    assert norm([3.0, 4.0], max_product(2)) == 5.0


def test_maxprod_norm_split_validation():
    with pytest.raises(PreconditionError):
        max_product(-1)
    with pytest.raises(DimensionMismatchError):
        norm([1.0, 2.0], max_product(5))


@given(
    st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=6),
    st.floats(-1e6, 1e6),
)
def test_maxprod_norm_formula(head, tail):
    v = head + [tail]
    expected = max(float(np.linalg.norm(head)), abs(tail))
    assert norm(v, max_product(len(head))) == pytest.approx(expected, abs=1e-12)


def test_unit_row_is_bitwise_idempotent():
    r = np.array([3.0, -4.0, 12.0])
    once, s1 = unit_row(r)
    twice, s2 = unit_row(once)
    assert s1 == pytest.approx(13.0)
    assert s2 == 1.0
    assert once.tobytes() == twice.tobytes()


def test_unit_row_passes_zero_rows_through():
    z = np.zeros(3)
    row, scale = unit_row(z)
    assert scale == 1.0 and row.tobytes() == z.tobytes()


def test_direction_net_contains_axes_and_unit_vectors():
    for dim in (1, 2, 3, 5):
        net = direction_net(dim, 16)
        np.testing.assert_allclose(np.linalg.norm(net, axis=1), 1.0, atol=1e-12)
        rows = {tuple(r) for r in np.round(net, 12)}
        for i in range(dim):
            e = np.zeros(dim)
            e[i] = 1.0
            assert tuple(e) in rows and tuple(-e) in rows


def test_direction_net_is_deterministic():
    a = direction_net(4, 32)
    b = direction_net(4, 32)
    assert a.tobytes() == b.tobytes()


# ---------------------------------------------------------------------------
# polyhedral projection
# ---------------------------------------------------------------------------


def box_rows(lo, hi):
    dim = len(lo)
    a = np.vstack([np.eye(dim), -np.eye(dim)])
    b = np.concatenate([hi, -np.asarray(lo, dtype=float)])
    return a, b


@given(
    st.lists(st.floats(-5, 5), min_size=2, max_size=4),
    st.data(),
)
@settings(max_examples=60, deadline=None)
def test_project_polyhedron_matches_box_clamp(point, data):
    dim = len(point)
    lo = np.array([data.draw(st.floats(-3, 0)) for _ in range(dim)])
    hi = np.array([data.draw(st.floats(0.1, 3)) for _ in range(dim)])
    a, b = box_rows(lo, hi)
    got = project_polyhedron(np.array(point), a, b)
    np.testing.assert_allclose(got, oracles.clamp_box(point, lo, hi), atol=1e-8)


def test_project_polyhedron_matches_halfspace_formula():
    a = np.array([[1.0, 2.0]])
    b = np.array([1.0])
    for x in ([3.0, 3.0], [0.0, 0.0], [-1.0, 5.0]):
        got = project_polyhedron(np.array(x), a, b)
        want = oracles.project_halfspace(np.array(x), a[0], b[0])
        np.testing.assert_allclose(got, want, atol=1e-10)


def test_project_polyhedron_is_idempotent_and_feasible():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((6, 3))
    b = rng.uniform(0.5, 2.0, 6)
    for _ in range(10):
        x = rng.standard_normal(3) * 4.0
        p = project_polyhedron(x, a, b)
        assert np.all(a @ p <= b + 1e-8)
        np.testing.assert_allclose(project_polyhedron(p, a, b), p, atol=1e-8)


def test_distance_polyhedron_is_projection_distance():
    a, b = box_rows([-1.0, -1.0], [1.0, 1.0])
    assert distance_polyhedron([3.0, 0.0], a, b) == pytest.approx(2.0, abs=1e-9)
    assert distance_polyhedron([0.2, -0.3], a, b) == 0.0


def test_project_polyhedron_rejects_oversized_systems():
    a = np.ones((65, 2))
    b = np.ones(65)
    with pytest.raises(PreconditionError):
        project_polyhedron([0.0, 0.0], a, b)


# ---------------------------------------------------------------------------
# LP layer
# ---------------------------------------------------------------------------


def test_lp_solve_matches_vertex_enumeration_oracle():
    rng = np.random.default_rng(11)
    for _ in range(25):
        # bounded region: random rows plus a box safety net
        rows = rng.standard_normal((4, 2))
        rhs = rng.uniform(0.5, 2.0, 4)
        a = np.vstack([rows, np.eye(2), -np.eye(2)])
        b = np.concatenate([rhs, [5.0, 5.0, 5.0, 5.0]])
        c = rng.standard_normal(2)
        res = lp_solve(LpProblem(c=c, a_ub=a, b_ub=b))
        status, value, _ = oracles.lp_by_vertex_enumeration(c, a, b)
        assert res.status == status == "OPTIMAL"
        assert res.value == pytest.approx(value, abs=1e-7)


def test_lp_solve_reports_infeasible_and_unbounded():
    infeasible = LpProblem(
        c=np.array([1.0]), a_ub=np.array([[1.0], [-1.0]]), b_ub=np.array([-2.0, 1.0])
    )
    assert lp_solve(infeasible).status == "INFEASIBLE"
    unbounded = LpProblem(c=np.array([-1.0, 0.0]), a_ub=np.array([[0.0, 1.0]]),
                          b_ub=np.array([1.0]))
    assert lp_solve(unbounded).status == "UNBOUNDED"


def test_lp_solve_equality_constraints_and_duals():
    # min x + y on the segment x + y = 1, 0 <= x, y <= 1 collapses to value 1
    res = lp_solve(
        LpProblem(
            c=np.array([1.0, 1.0]),
            a_ub=np.vstack([np.eye(2), -np.eye(2)]),
            b_ub=np.array([1.0, 1.0, 0.0, 0.0]),
            a_eq=np.array([[1.0, 1.0]]),
            b_eq=np.array([1.0]),
        )
    )
    assert res.status == "OPTIMAL"
    assert res.value == pytest.approx(1.0, abs=1e-9)
    assert res.duals_eq is not None and res.duals_ub is not None
    assert res.details["duality_gap"] <= 1e-8 * 2.0
