"""Multiplier rules, cone separation, qualification equivalences."""

import numpy as np
import pytest

from transverse import (
    AffineSet,
    Epigraph,
    MultiplierPair,
    NotSubtransversalVerdict,
    OptimalityContradiction,
    OptProblem,
    PolyCone,
    Polyhedron,
    PreconditionError,
    indicator_fn,
    linear_fn,
    maxlin_fn,
    multiplier_rule,
    multiplier_rule_massive,
    qualification_equivalences,
    separate_cones,
    strong_minimum_transform,
)
from transverse.instances import gen_lp_instance


def unit_square_at_origin():
    # [-1, 0]^2: the corner (-1, -1) is the minimizer of any c > 0 objective
    return Polyhedron(np.vstack([np.eye(2), -np.eye(2)]),
                      np.array([0.0, 0.0, 1.0, 1.0]))


@pytest.fixture(scope="module")
def corner_problem():
    return OptProblem(
        objective=Epigraph(func=linear_fn([1.0, 2.0])),
        s=unit_square_at_origin(),
        x0=[-1.0, -1.0],
    )


@pytest.fixture(scope="module")
def non_minimizer_problem():
    return OptProblem(
        objective=Epigraph(func=linear_fn([-1.0, 0.0])),
        s=unit_square_at_origin(),
        x0=[-1.0, -1.0],
    )


# ---------------------------------------------------------------------------
# problem validation and separation primitive
# ---------------------------------------------------------------------------


def test_opt_problem_validates_candidate():
    with pytest.raises(PreconditionError):
        OptProblem(objective=Epigraph(func=linear_fn([1.0, 0.0])),
                   s=unit_square_at_origin(), x0=[1.0, 1.0])
    with pytest.raises(PreconditionError):
        OptProblem(objective=Epigraph(func=linear_fn([1.0, 0.0])),
                   s=unit_square_at_origin(), x0=[-1.0, -1.0], value=5.0)


def test_separate_cones_returns_unit_functional():
    c = PolyCone.from_halfspaces([[0, 1]], 2)  # y <= 0
    out = separate_cones(c, [0.0, 1.0], 0.25)
    assert out is not None
    xi, bound = out
    np.testing.assert_allclose(xi, [0.0, -1.0], atol=1e-12)
    assert bound == 0.0
    # nonnegative on the cone, strictly negative on the separated direction
    for g in c.generator_array():
        assert float(xi @ g) >= -1e-12
    assert float(xi @ np.array([0.0, 1.0])) < 0


def test_separate_cones_none_for_full_cone():
    assert separate_cones(PolyCone.full(2), [1.0, 0.0], 0.25) is None


def test_separate_cones_validates_inputs():
    with pytest.raises(PreconditionError):
        separate_cones(PolyCone.full(2), [1.0, 0.0], 0.0)
    with pytest.raises(PreconditionError):
        separate_cones(PolyCone.full(2), [0.0, 0.0], 0.5)


# ---------------------------------------------------------------------------
# multiplier rule
# ---------------------------------------------------------------------------


def test_multiplier_at_the_corner_is_minus_gradient(corner_problem):
    mp = multiplier_rule(corner_problem, seed=0)
    assert isinstance(mp, MultiplierPair)
    assert mp.eta == 1.0
    np.testing.assert_allclose(mp.xi, [-1.0, -2.0], atol=1e-9)
    assert mp.checks["nonzero"]
    assert mp.checks["worst_constraint_margin"] >= -1e-9
    assert mp.checks["worst_epigraph_margin"] >= -1e-9
    assert mp.details["validation"]["derivable_side_corroborated"]


def test_multiplier_pairing_sign_convention(corner_problem):
    mp = multiplier_rule(corner_problem, seed=0)
    # (iv): the pair is nonnegative against epigraph directions (w, s) with
    # s >= c.w, and (iii): nonpositive against constraint directions
    assert mp.pairing([1.0, 0.0], 1.0) >= -1e-9
    assert float(mp.xi @ np.array([1.0, 0.0])) <= 1e-9


def test_non_minimizer_returns_not_subtransversal_branch(non_minimizer_problem):
    res = multiplier_rule(non_minimizer_problem, seed=0)
    assert isinstance(res, NotSubtransversalVerdict)
    assert res.density_certificate["dense"]
    assert res.evidence is not None and "assessment" in res.evidence
    d = res.serialize()
    assert d["verdict"] == "NOT_SUBTRANSVERSAL"


def test_massive_rule_keeps_multiplier_on_minimizers(corner_problem):
    mp = multiplier_rule_massive(corner_problem, seed=0)
    assert isinstance(mp, MultiplierPair)
    assert "automatic in finite dimension" in mp.details["massiveness"]


def test_massive_rule_contradicts_non_minimizers(non_minimizer_problem):
    res = multiplier_rule_massive(non_minimizer_problem, seed=0)
    assert isinstance(res, OptimalityContradiction)
    d = np.asarray(res.witness["direction"], dtype=float)
    # genuine descent: objective falls along d and d stays feasible
    assert float(np.array([-1.0, 0.0]) @ d) < 0
    s = non_minimizer_problem.s
    assert s.member(non_minimizer_problem.x0 + 0.25 * d, 1e-9)
    assert res.witness["corroboration"]
    assert res.evidence["minimality_warning"] is not None


def test_kkt_multipliers_recovered_up_to_positive_scaling():
    rng = np.random.default_rng(42)
    inst = gen_lp_instance(rng, dim=2, minimizer=True)
    p = OptProblem(objective=Epigraph(func=linear_fn(inst["c"])), s=inst["s"],
                   x0=inst["x0"])
    mp = multiplier_rule(p, seed=0)
    assert isinstance(mp, MultiplierPair)
    # c = -lam.N and xi = eta * N^T lam, so solving against N^T recovers lam
    lam_hat = np.linalg.solve(inst["normals"].T, np.asarray(mp.xi))
    ratio = lam_hat / inst["kkt_multipliers"]
    assert np.all(lam_hat > 0)
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-6)
    assert ratio[0] > 0


def test_multiplier_rule_handles_huge_exact_cone_data():
    # float margins must be measured per unit generator: the canonical
    # integer generators of this instance reach 7e15, and raw margins of
    # a perfectly valid witness look like -0.5
    rng = np.random.default_rng(42)
    inst = None
    for i in range(7):
        inst = gen_lp_instance(rng, dim=2 if i % 2 == 0 else 3, minimizer=True)
    p = OptProblem(objective=Epigraph(func=linear_fn(inst["c"])), s=inst["s"],
                   x0=inst["x0"])
    mp = multiplier_rule(p, seed=6)
    assert isinstance(mp, MultiplierPair)
    np.testing.assert_allclose(np.asarray(mp.xi), -np.asarray(inst["c"]), rtol=1e-9)


# ---------------------------------------------------------------------------
# qualification equivalences
# ---------------------------------------------------------------------------


def test_qualification_four_conditions_agree_when_holding():
    absf = Epigraph(func=maxlin_fn([[1.0, 0.0], [-1.0, 0.0]]))
    lin = Epigraph(func=linear_fn([0.5]))
    rep = qualification_equivalences(absf, lin, np.zeros(1))
    assert rep["agree"] and rep["qualification_holds"]
    assert set(rep["items"]) == {
        "difference_dense", "lifted_difference_dense",
        "lifted_normal_meet_trivial", "singular_meet_trivial",
    }
    assert all(rep["items"].values())


def test_qualification_four_conditions_agree_when_failing():
    point = AffineSet(np.zeros(1), np.zeros((0, 1)))
    ind = Epigraph(func=indicator_fn(point))
    rep = qualification_equivalences(ind, ind, np.zeros(1))
    assert rep["agree"] and not rep["qualification_holds"]
    assert not any(rep["items"].values())
    assert rep["certificates"]["difference"]["witness_float"] is not None


def test_qualification_validates_inputs():
    absf = Epigraph(func=maxlin_fn([[1.0, 0.0], [-1.0, 0.0]]))
    lin2 = Epigraph(func=linear_fn([1.0, 1.0]))
    with pytest.raises(PreconditionError):
        qualification_equivalences(absf, lin2, np.zeros(1))
    point = AffineSet(np.ones(1), np.zeros((0, 1)))
    ind = Epigraph(func=indicator_fn(point))
    with pytest.raises(PreconditionError):
        qualification_equivalences(absf, ind, np.zeros(1))


# ---------------------------------------------------------------------------
# strong-minimum preprocessing
# ---------------------------------------------------------------------------


def test_strong_minimum_transform_preserves_anchor_and_cones(corner_problem):
    q, report = strong_minimum_transform(corner_problem)
    np.testing.assert_array_equal(q.x0, corner_problem.x0)
    assert q.value == corner_problem.value
    assert not q.objective.oracle_exact
    assert report["checked"] > 0 and report["flips"] == 0
    # the shifted objective dominates the original away from the anchor
    y = corner_problem.x0 + np.array([0.3, 0.0])
    assert q.objective.value(y) > corner_problem.objective.value(y)
    assert q.objective.value(corner_problem.x0) == pytest.approx(
        corner_problem.objective.value(corner_problem.x0)
    )
