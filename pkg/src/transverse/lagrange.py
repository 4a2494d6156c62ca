"""Abstract Lagrange multiplier rule via convex-cone separation.

The rule is a dichotomy over the difference cone

    D = C_epi - C_S x (-inf, 0]

built from a closed convex subcone C_epi of the epigraph tangent cone
and a closed convex subcone C_S of the constraint tangent cone, both
anchored at the candidate solution.  When D is not dense, a separating
functional yields a multiplier pair (xi, eta) satisfying

    (i)   (xi, eta) != (0, 0);
    (ii)  eta in {0, 1};
    (iii) <xi, v> <= 0 for every v in C_S;
    (iv)  <xi, w> + eta*s >= 0 for every (w, s) in C_epi;

and every returned pair re-verifies (i)-(iv) on all cone generators
plus random cone samples.  When D is dense, the epigraph and the
constraint sublevel slab S x (-inf, f(x0)] cannot be subtransversal at
the anchor, and that branch verdict is returned instead, with the
empirical subtransversality estimate attached when the set oracles
allow one.  Exactly one of the two outcomes is emitted per call.

Functionals are identified with vectors through the Euclidean inner
product, and the pairing on X x R is <(xi, eta), (w, s)> = <xi, w> +
eta*s.  The massive variant runs the same dichotomy on the full Clarke
cones, where the dense branch contradicts local minimality and is
reported as an optimality contradiction with a descent witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import nnls

from .cones import (
    IN,
    OUT,
    UNDECIDED,
    PolyCone,
    SampledCone,
    clarke_cone_convex,
    cone_insert_coordinate,
    cone_intersect,
    cone_negate,
    cone_slice_last_zero,
    cone_times_nonpositive_ray,
    is_dense_difference,
)
from .errors import (
    InfeasibleProblemError,
    NonConvergenceError,
    PreconditionError,
    ToolkitError,
)
from .numkernel import LpProblem, as_vector, direction_net, lp_solve
from .sets import Epigraph, Polyhedron, ProductSet, SetSpec
from .transversality import estimate_subtransversality_constant

__all__ = [
    "NOT_SUBTRANSVERSAL",
    "MultiplierPair",
    "OptProblem",
    "NotSubtransversalVerdict",
    "OptimalityContradiction",
    "separate_cones",
    "multiplier_rule",
    "multiplier_rule_massive",
    "qualification_equivalences",
    "strong_minimum_transform",
]

NOT_SUBTRANSVERSAL = "NOT_SUBTRANSVERSAL"

_VERIFY_TOL = 1e-9


def _fdot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiplierPair:
    """Multiplier (xi, eta) with eta in {0, 1} and (xi, eta) != 0.

    ``checks`` records the (i)-(iv) re-verification; ``details`` keeps
    the separation certificate and cone-validation metadata.
    """

    xi: np.ndarray
    eta: float
    checks: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "xi", as_vector(self.xi))
        if self.eta not in (0.0, 1.0):
            raise PreconditionError("eta must be exactly 0 or 1")
        if max(float(np.linalg.norm(self.xi)), self.eta) == 0.0:
            raise PreconditionError("(xi, eta) must be nonzero")

    def pairing(self, w, s: float) -> float:
        w = as_vector(w, self.xi.shape[0])
        return float(self.xi @ w) + self.eta * float(s)

    def serialize(self) -> dict:
        return {
            "xi": [float(v) for v in self.xi],
            "eta": self.eta,
            "checks": self.checks,
        }


@dataclass(frozen=True)
class OptProblem:
    """Minimize f over S at candidate x0, with f given as its epigraph.

    ``value`` defaults to f(x0) and must agree with it when supplied;
    x0 must belong to S and to the effective domain of f.
    """

    objective: Epigraph
    s: SetSpec
    x0: np.ndarray
    value: float | None = None

    def __post_init__(self):
        x0 = as_vector(self.x0, self.s.dim)
        object.__setattr__(self, "x0", x0)
        if self.objective.base_dim != self.s.dim:
            raise PreconditionError("objective and constraint dimensions differ")
        if not self.s.member(x0, 1e-7):
            raise PreconditionError("candidate point is not in the constraint set")
        if not self.objective.in_domain(x0):
            raise PreconditionError("candidate point is outside the domain of f")
        fx = float(self.objective.value(x0))
        if self.value is None:
            object.__setattr__(self, "value", fx)
        elif abs(float(self.value) - fx) > 1e-6 * max(1.0, abs(fx)):
            raise PreconditionError("supplied value disagrees with f(x0)")
        else:
            object.__setattr__(self, "value", float(self.value))

    @property
    def anchor(self) -> np.ndarray:
        return np.concatenate([self.x0, [self.value]])


@dataclass(frozen=True)
class NotSubtransversalVerdict:
    """Dense-branch outcome: epi f and S x (-inf, f(x0)] are not
    subtransversal at the anchor."""

    density_certificate: dict
    evidence: dict | None = None
    verdict: str = NOT_SUBTRANSVERSAL

    def serialize(self) -> dict:
        out = {
            "verdict": self.verdict,
            "density_certificate": self.density_certificate,
        }
        if self.evidence is not None:
            out["evidence"] = self.evidence
        return out


@dataclass(frozen=True)
class OptimalityContradiction:
    """Dense branch under the massive hypothesis: the candidate cannot
    be a local minimizer; carries a descent witness."""

    witness: dict
    evidence: dict = field(default_factory=dict)
    message: str = "optimality contradiction: x0 is not a local minimizer"

    def serialize(self) -> dict:
        return {
            "verdict": self.message,
            "witness": self.witness,
            "evidence": self.evidence,
        }


# ---------------------------------------------------------------------------
# Separation primitive
# ---------------------------------------------------------------------------


def separate_cones(
    c: PolyCone, d_dir, d_radius: float
) -> tuple[np.ndarray, float] | None:
    """Separate a closed polyhedral cone from the open cone over a ball.

    Returns a unit functional xi with <xi, g> >= 0 on every generator of
    ``c`` and <xi, d> < 0 throughout the open conic hull of
    d_dir + d_radius * Ball, paired with the bound 0 (both cones pass
    through the origin).  Returns None when ``c`` is the whole space.
    """
    if d_radius <= 0:
        raise PreconditionError("ball radius must be positive")
    z = as_vector(d_dir, c.dim)
    z_norm = float(np.linalg.norm(z))
    if z_norm == 0.0:
        raise PreconditionError("ball center direction must be nonzero")
    if c.is_full:
        return None
    gens = c.generator_array()
    if gens.shape[0] == 0:
        y = np.zeros(c.dim)
    else:
        lam, _ = nnls(gens.T, z)
        y = gens.T @ lam
    xi = y - z
    dist = float(np.linalg.norm(xi))
    if dist <= d_radius * (1.0 - 1e-9):
        raise InfeasibleProblemError(
            "the open cone over the ball meets the cone; no separation exists"
        )
    xi = xi / dist
    for g in gens:
        gn = float(np.linalg.norm(g))
        if float(xi @ g) < -_VERIFY_TOL * max(1.0, gn):
            raise NonConvergenceError("separating functional fails on a generator")
    rng = np.random.default_rng(0)
    for _ in range(64):
        u = rng.standard_normal(c.dim)
        u = u / max(float(np.linalg.norm(u)), 1e-300)
        d = z + 0.95 * d_radius * u
        if float(xi @ d) >= -1e-9 * float(np.linalg.norm(d)):
            raise NonConvergenceError("separating functional is not strict on D")
    return xi, 0.0


# ---------------------------------------------------------------------------
# Multiplier construction
# ---------------------------------------------------------------------------


def _validate_subcone(cone: PolyCone, base: SetSpec, anchor: np.ndarray, name: str) -> dict:
    sc_t = SampledCone(base=base, point=anchor, mode="bouligand")
    sc_g = SampledCone(base=base, point=anchor, mode="derivable")
    checked = derivable_in = decisive = 0
    for g in cone.generator_array():
        gn = float(np.linalg.norm(g))
        if gn == 0.0:
            continue
        g = g / gn
        checked += 1
        if sc_t.classify(g) == OUT:
            raise PreconditionError(
                f"{name} contains the non-tangent direction {g.tolist()}"
            )
        verdict = sc_g.classify(g)
        if verdict != UNDECIDED:
            decisive += 1
        if verdict == IN:
            derivable_in += 1
    return {
        "generators_checked": checked,
        "derivable_in": derivable_in,
        "derivable_decisive": decisive,
    }


def _verify_pair(
    xi: np.ndarray,
    eta: float,
    cepi: PolyCone,
    cs: PolyCone,
    samples: int,
    seed: int,
) -> dict | None:
    """Re-verify (i)-(iv) on all generators plus random cone samples;
    returns the check record, or None when a check fails."""
    pair = np.concatenate([xi, [eta]])
    worst_s = worst_e = np.inf
    # canonical generators of float-derived cones are gcd-reduced integers
    # that can reach 1e15; margins are only meaningful per unit generator
    cs_gens = cs.generator_array()
    if cs_gens.shape[0]:
        cs_gens = cs_gens / np.maximum(
            np.linalg.norm(cs_gens, axis=1, keepdims=True), 1e-300
        )
    for g in cs_gens:
        margin = -float(xi @ g)
        worst_s = min(worst_s, margin)
    epi_gens = cepi.generator_array()
    if epi_gens.shape[0]:
        epi_gens = epi_gens / np.maximum(
            np.linalg.norm(epi_gens, axis=1, keepdims=True), 1e-300
        )
    for g in epi_gens:
        margin = float(pair @ g)
        worst_e = min(worst_e, margin)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        if cs_gens.shape[0]:
            coeffs = rng.uniform(0.0, 1.0, cs_gens.shape[0])
            v = coeffs @ cs_gens
            worst_s = min(worst_s, -float(xi @ v))
        if epi_gens.shape[0]:
            coeffs = rng.uniform(0.0, 1.0, epi_gens.shape[0])
            w = coeffs @ epi_gens
            worst_e = min(worst_e, float(pair @ w))
    scale = max(1.0, float(np.max(np.abs(pair))))
    ok = worst_s >= -_VERIFY_TOL * scale and worst_e >= -_VERIFY_TOL * scale
    if not ok:
        return None
    return {
        "nonzero": True,
        "eta": eta,
        "worst_constraint_margin": worst_s if np.isfinite(worst_s) else None,
        "worst_epigraph_margin": worst_e if np.isfinite(worst_e) else None,
        "random_samples": samples,
    }


def _separated_multiplier(
    cepi: PolyCone,
    cs: PolyCone,
    cert: dict,
    samples: int,
    seed: int,
) -> MultiplierPair:
    witness = [Fraction(s) for s in cert["witness"]]
    pair_exact = [-w for w in witness]
    # exact pre-normalization verification on the rational witness
    for g in cs.generators():
        if _fdot(pair_exact[:-1], g) > 0:
            raise NonConvergenceError("separation witness fails (iii) exactly")
    for g in cepi.generators():
        if _fdot(pair_exact, g) < 0:
            raise NonConvergenceError("separation witness fails (iv) exactly")
    if pair_exact[-1] < 0:
        raise NonConvergenceError("separation witness has negative eta")
    pair = np.array([float(v) for v in pair_exact])
    eta_raw = pair[-1]
    scale = float(np.max(np.abs(pair)))
    candidates = []
    if eta_raw > 1e-9 * scale:
        candidates.append((pair[:-1] / eta_raw, 1.0))
    xi_norm = float(np.linalg.norm(pair[:-1]))
    if xi_norm > 0:
        candidates.append((pair[:-1] / xi_norm, 0.0))
    if eta_raw > 0 and not any(e == 1.0 for _, e in candidates):
        candidates.append((pair[:-1] / eta_raw, 1.0))
    for xi, eta in candidates:
        checks = _verify_pair(xi, eta, cepi, cs, samples, seed)
        if checks is not None:
            return MultiplierPair(
                xi=xi, eta=eta, checks=checks, details={"witness": cert["witness"]}
            )
    raise NonConvergenceError("no normalization of the witness verifies (i)-(iv)")


def multiplier_rule(
    p: OptProblem,
    cepi: PolyCone | None = None,
    cs: PolyCone | None = None,
    *,
    validate: bool = True,
    samples: int = 100,
    seed: int = 0,
) -> MultiplierPair | NotSubtransversalVerdict:
    """Multiplier pair or the not-subtransversal branch verdict.

    ``cepi`` and ``cs`` are closed convex subcones of the epigraph and
    constraint tangent cones; they default to the full exact tangent
    cones.  Supplied cones are validated by sampling when the set
    oracles permit: a generator classified strictly outside the
    corresponding Bouligand cone is rejected.
    """
    anchor = p.anchor
    if cepi is None:
        cepi = clarke_cone_convex(p.objective, anchor)
    if cs is None:
        cs = clarke_cone_convex(p.s, p.x0)
    if cepi.dim != p.s.dim + 1 or cs.dim != p.s.dim:
        raise PreconditionError("cone dimensions do not match the problem")
    validation = {}
    if validate:
        validation["epigraph"] = _validate_subcone(cepi, p.objective, anchor, "epigraph cone")
        validation["constraint"] = _validate_subcone(cs, p.s, p.x0, "constraint cone")
        # the rule needs one side derivable; sampling can only corroborate
        derivable = any(
            v["derivable_in"] == v["generators_checked"] and v["generators_checked"] > 0
            for v in validation.values()
        )
        validation["derivable_side_corroborated"] = derivable
    dense, cert = is_dense_difference(cepi, cone_times_nonpositive_ray(cs))
    if dense:
        evidence: dict | None
        try:
            slab = ProductSet(
                (p.s, Polyhedron(np.array([[1.0]]), np.array([p.value])))
            )
            est = estimate_subtransversality_constant(
                p.objective, slab, anchor, delta=0.5, budget=160, seed=seed
            )
            assessment = {
                "REFUTED": "non-subtransversality corroborated empirically",
                "INCONCLUSIVE": "empirical estimate inconclusive",
                "CERTIFIED": "subtransversality certified empirically, so "
                "either the candidate is not a solution or the supplied "
                "cones exceed the true tangent cones",
            }[est.status]
            evidence = {"estimate": est.serialize(), "assessment": assessment}
        except ToolkitError as err:
            evidence = {"note": f"empirical corroboration unavailable: {err}"}
        return NotSubtransversalVerdict(density_certificate=cert, evidence=evidence)
    mp = _separated_multiplier(cepi, cs, cert, samples, seed)
    mp.details["validation"] = validation
    return mp


def multiplier_rule_massive(
    p: OptProblem,
    *,
    samples: int = 100,
    seed: int = 0,
) -> MultiplierPair | OptimalityContradiction:
    """Multiplier rule on the full Clarke cones under massiveness.

    In finite dimension the epigraph is automatically massive, so a
    dense difference cone forces non-subtransversality, which at a true
    local minimizer is impossible; the dense branch therefore reports
    an optimality contradiction carrying a descent witness.  Failing
    sampled minimality is a recorded warning, never fatal.
    """
    anchor = p.anchor
    cepi = clarke_cone_convex(p.objective, anchor)
    cs = clarke_cone_convex(p.s, p.x0)
    rng = np.random.default_rng(seed)
    descent_samples = []
    for _ in range(48):
        y = p.s.project(p.x0 + 0.3 * rng.standard_normal(p.s.dim))
        if float(np.linalg.norm(y - p.x0)) > 0.6 or not p.objective.in_domain(y):
            continue
        fy = float(p.objective.value(y))
        if fy < p.value - 1e-9 * max(1.0, abs(p.value)):
            descent_samples.append({"x": y.tolist(), "f": fy})
    warning = (
        "x0 fails minimality on sampled neighborhoods" if descent_samples else None
    )
    dense, cert = is_dense_difference(cepi, cone_times_nonpositive_ray(cs))
    if not dense:
        mp = _separated_multiplier(cepi, cs, cert, samples, seed)
        mp.details["massiveness"] = "automatic in finite dimension"
        if warning:
            mp.details["warning"] = warning
            mp.details["descent_samples"] = descent_samples[:4]
        return mp
    witness = _descent_witness(p, cepi, cs)
    return OptimalityContradiction(
        witness=witness,
        evidence={
            "density_certificate": cert,
            "minimality_warning": warning,
            "descent_samples": descent_samples[:4],
        },
    )


def _descent_witness(p: OptProblem, cepi: PolyCone, cs: PolyCone) -> dict:
    """A direction (w, s) in the epigraph cone with w in C_S and s < 0,
    found by LP over generator coefficients, plus sampled corroboration
    that f actually falls along w inside S."""
    gens = cepi.generator_array()
    if gens.shape[0] == 0:
        raise NonConvergenceError("dense branch with an empty epigraph cone")
    # unit-scale rows: canonical exact data reaches 1e15 and would sink the LP
    gens = gens / np.maximum(np.linalg.norm(gens, axis=1, keepdims=True), 1e-300)
    h = cs.halfspace_array()
    if h.shape[0]:
        h = h / np.maximum(np.linalg.norm(h, axis=1, keepdims=True), 1e-300)
    k = gens.shape[0]
    a_ub = [np.ones(k)]
    b_ub = [1.0]
    if h.shape[0]:
        a_ub.extend(h @ gens[:, :-1].T)
        b_ub.extend([0.0] * h.shape[0])
    a_ub.append(-np.eye(k))
    b_ub.extend([0.0] * k)
    res = lp_solve(
        LpProblem(
            c=gens[:, -1],
            a_ub=np.vstack([np.atleast_2d(r) for r in a_ub]),
            b_ub=np.array(b_ub),
        )
    )
    if res.status != "OPTIMAL" or res.value >= -1e-9:
        raise NonConvergenceError("dense difference cone without a descent direction")
    ws = res.x @ gens
    nrm = float(np.linalg.norm(ws))
    ws = ws / nrm
    w, s = ws[:-1], float(ws[-1])
    corroboration = []
    for t in (0.25, 0.0625, 0.015625):
        y = p.s.project(p.x0 + t * w)
        if not p.objective.in_domain(y):
            continue
        fy = float(p.objective.value(y))
        corroboration.append(
            {"t": t, "f_drop": p.value - fy, "expected_at_least": -s * t * 0.25}
        )
    return {
        "direction": w.tolist(),
        "rate": s,
        "corroboration": corroboration,
    }


# ---------------------------------------------------------------------------
# Qualification-condition equivalences
# ---------------------------------------------------------------------------


def qualification_equivalences(f1: Epigraph, f2: Epigraph, x0) -> dict:
    """Four independently computed, provably equivalent qualification
    conditions for a pair of functions given by polyhedral epigraphs.

    (i) density of the epigraph tangent-cone difference in X x R;
    (ii) density of the lifted-cone difference in X x R x R, the lifts
    putting each function on its own scalar slot; (iii) trivial
    intersection of the lifted Clarke normal cones; (iv) trivial
    intersection of the Clarke singular subdifferentials.  Verdict
    agreement is asserted and a disagreement raises, so the lemma acts
    as a cross-validation harness for the polarity code.
    """
    if not isinstance(f1, Epigraph) or not isinstance(f2, Epigraph):
        raise PreconditionError("inputs must be epigraph sets")
    if f1.base_dim != f2.base_dim:
        raise PreconditionError("functions live on different spaces")
    n = f1.base_dim
    x0 = as_vector(x0, n)
    if not (f1.in_domain(x0) and f2.in_domain(x0)):
        raise PreconditionError("x0 must lie in both effective domains")
    e1 = clarke_cone_convex(f1, np.concatenate([x0, [f1.value(x0)]]))
    e2 = clarke_cone_convex(f2, np.concatenate([x0, [f2.value(x0)]]))
    dense1, cert1 = is_dense_difference(e1, e2)

    lift1 = cone_insert_coordinate(e1, e1.dim, free=True)
    lift2 = cone_insert_coordinate(e2, n, free=True)
    dense2, cert2 = is_dense_difference(lift1, lift2)

    normal_meet = cone_intersect(lift1.polar(), cone_negate(lift2.polar()))
    trivial3 = normal_meet.is_trivial

    sing1 = cone_slice_last_zero(e1.polar())
    sing2 = cone_slice_last_zero(e2.polar())
    sing_meet = cone_intersect(sing1, cone_negate(sing2))
    trivial4 = sing_meet.is_trivial

    items = {
        "difference_dense": dense1,
        "lifted_difference_dense": dense2,
        "lifted_normal_meet_trivial": trivial3,
        "singular_meet_trivial": trivial4,
    }
    if len(set(items.values())) != 1:
        raise ToolkitError(f"equivalent qualification conditions disagree: {items}")
    return {
        "items": items,
        "agree": True,
        "qualification_holds": dense1,
        "certificates": {"difference": cert1, "lifted_difference": cert2},
        "cones": {
            "singular_1": sing1.serialize(),
            "singular_2": sing2.serialize(),
            "normal_meet": normal_meet.serialize(),
        },
    }


# ---------------------------------------------------------------------------
# Strong-minimum preprocessing
# ---------------------------------------------------------------------------


def strong_minimum_transform(
    p: OptProblem,
    *,
    samples: int = 24,
    assert_invariance: bool = True,
) -> tuple[OptProblem, dict]:
    """Replace f by f + ||x - x0||^2, turning a minimum into a strong one.

    The added term vanishes to first order at x0, so the epigraph
    tangent cones at the anchor are unchanged; the invariance is
    asserted on a sampled direction net (an IN/OUT flip between the two
    epigraphs raises).  The transformed epigraph is a raw callable with
    approximate oracles only, so exact cones computed on the original
    problem remain the ones to pass to the multiplier rules.
    """
    x0 = p.x0.copy()
    n = p.s.dim
    base = p.objective

    def f_shift(x):
        x = as_vector(x, n)
        return float(base.value(x)) + float(np.sum((x - x0) ** 2))

    shifted = Epigraph(f=f_shift, domain=base.in_domain, base_dim=n)
    q = OptProblem(objective=shifted, s=p.s, x0=p.x0, value=p.value)
    report = {"checked": 0, "flips": 0, "agreements": 0}
    if assert_invariance:
        sc_old = SampledCone(base=base, point=p.anchor)
        sc_new = SampledCone(base=shifted, point=q.anchor)
        for v in direction_net(n + 1, samples):
            nrm = float(np.linalg.norm(v))
            if nrm == 0.0:
                continue
            v = v / nrm
            old, new = sc_old.classify(v), sc_new.classify(v)
            report["checked"] += 1
            if {old, new} == {IN, OUT}:
                raise ToolkitError(
                    "strong-minimum shift changed a sampled tangent verdict"
                )
            if old == new:
                report["agreements"] += 1
    return q, report
