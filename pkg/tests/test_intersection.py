"""Tangent-cone intersection property checks: exact and sampled modes."""

import numpy as np
import pytest

from transverse import (
    CERTIFIED,
    NOTION_SUB,
    NOTION_TANGENTIAL,
    AffineSet,
    Polyhedron,
    TransversalityCertificate,
    UnionSet,
    check_bouligand_derivable,
    check_clarke,
    estimate_subtransversality_constant,
)
from transverse.instances import crossing_lines, quadrant, tangent_disks


@pytest.fixture(scope="module")
def lines60():
    return crossing_lines(np.deg2rad(60.0))


@pytest.fixture(scope="module")
def disks():
    return tangent_disks()


def test_exact_mode_holds_on_crossing_lines(lines60):
    rep = check_bouligand_derivable(lines60["a"], lines60["b"], lines60["x0"])
    assert rep.mode == "exact"
    names = [c["name"] for c in rep.claims]
    assert names == ["tangent_meet_inclusion", "derivable_equality", "monotone_sanity"]
    assert all(c["verdict"] == "holds" and c["label"] is None for c in rep.claims)
    assert not rep.has_discrepancy


def test_clarke_check_holds_on_crossing_lines(lines60):
    rep = check_clarke(lines60["a"], lines60["b"], lines60["x0"])
    assert rep.mode == "exact"
    assert rep.claim("clarke_meet_inclusion")["verdict"] == "holds"
    assert not rep.has_discrepancy


def test_disks_fail_consistently_without_hypothesis(disks):
    rep = check_bouligand_derivable(disks["a"], disks["b"], disks["x0"],
                                    budget_scale=0.25)
    assert rep.mode == "exact"
    for name in ("tangent_meet_inclusion", "derivable_equality"):
        claim = rep.claim(name)
        assert claim["verdict"] == "fails"
        assert claim["label"] == "consistent counterexample"
        assert claim["counterexamples"]
    assert rep.claim("monotone_sanity")["verdict"] == "holds"
    assert not rep.has_discrepancy


def test_disks_clarke_check_fails_consistently(disks):
    rep = check_clarke(disks["a"], disks["b"], disks["x0"], budget_scale=0.25)
    claim = rep.claim("clarke_meet_inclusion")
    assert claim["verdict"] == "fails"
    assert claim["label"] == "consistent counterexample"
    assert not rep.has_discrepancy


def test_certified_hypothesis_turns_failures_into_discrepancies(disks):
    # the label logic must escalate: under a certified subtransversality
    # hypothesis the inclusions are theorems, so a counterexample is a
    # discrepancy, not a data point
    cert = TransversalityCertificate(
        notion=NOTION_SUB, x0=np.zeros(2), status=CERTIFIED,
        constants={"K": 2.0, "delta": 0.5},
    )
    rep = check_bouligand_derivable(disks["a"], disks["b"], disks["x0"],
                                    sub_cert=cert, budget_scale=0.25)
    assert rep.has_discrepancy
    assert rep.claim("tangent_meet_inclusion")["label"] == "DISCREPANCY"


def test_genuine_certificate_passes_hypothesis_gate(lines60):
    cert = estimate_subtransversality_constant(
        lines60["a"], lines60["b"], lines60["x0"], delta=0.5, budget=120, seed=0
    )
    assert cert.status == CERTIFIED
    rep = check_bouligand_derivable(lines60["a"], lines60["b"], lines60["x0"],
                                    sub_cert=cert)
    assert rep.hypothesis["status"] == "certified"
    assert not rep.has_discrepancy


def test_wrong_notion_certificate_is_not_asserted(lines60):
    cert = TransversalityCertificate(
        notion=NOTION_TANGENTIAL, x0=np.zeros(2), status=CERTIFIED,
        constants={"M": 2.0, "eta": 1.0, "delta": 0.5},
    )
    rep = check_bouligand_derivable(lines60["a"], lines60["b"], lines60["x0"],
                                    sub_cert=cert)
    assert rep.hypothesis["status"] == "unmet"
    assert "notion" in rep.hypothesis["reason"]


def test_union_operand_falls_back_to_sampled_mode():
    u = UnionSet(members=(Polyhedron([[0.0, 1.0]], [0.0]), Polyhedron([[1.0, 0.0]], [0.0])))
    rep = check_bouligand_derivable(u, quadrant(2), [0.0, 0.0], budget_scale=0.25)
    assert rep.mode == "sampled"
    assert rep.directions_csv is not None
    assert rep.directions_csv.count("\n") > 4
    assert "UnionSet" in rep.cones["fallback_reason"]
    for c in rep.claims:
        assert 0.0 <= c["confidence"] <= 1.0
    assert not rep.has_discrepancy


def test_axis_aligned_plane_meet_stays_exact():
    p1 = AffineSet([0.0, 0.0, 0.0], [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    p2 = AffineSet([0.0, 0.0, 0.0], [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    rep = check_bouligand_derivable(p1, p2, [0.0, 0.0, 0.0])
    assert rep.mode == "exact"
    assert all(c["verdict"] == "holds" for c in rep.claims)


def test_rotated_plane_meet_uses_graduated_sampled_fallback():
    # a float least-squares meet is not bit-consistent with its operands;
    # the exact monotone probe sees a few-ulp escape and the check must
    # demote itself to sampling with the reason on record, never report a
    # fake discrepancy
    th = 0.3
    c, s = np.cos(th), np.sin(th)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]) @ np.array(
        [[1.0, 0.0, 0.0],
         [0.0, np.cos(0.7), np.sin(0.7)],
         [0.0, -np.sin(0.7), np.cos(0.7)]]
    )
    p1 = AffineSet([0.0, 0.0, 0.0], rot[:2])
    p2 = AffineSet([0.0, 0.0, 0.0], rot[1:])
    rep = check_bouligand_derivable(p1, p2, [0.0, 0.0, 0.0])
    assert rep.mode == "sampled"
    assert "bit-consistent" in rep.cones["fallback_reason"]
    assert all(c["verdict"] == "holds" for c in rep.claims)
    assert not rep.has_discrepancy


def test_report_serialization_shape(lines60):
    rep = check_bouligand_derivable(lines60["a"], lines60["b"], lines60["x0"])
    d = rep.serialize()
    assert {"variant", "mode", "x0", "hypothesis", "cones", "claims",
            "has_discrepancy"} <= set(d)
    assert d["has_discrepancy"] is False
    assert isinstance(d["claims"], list) and d["claims"]
