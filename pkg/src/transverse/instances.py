"""Built-in geometric instances and generators used by the scenario corpus
and the test suite: crossing lines, opposing halfplanes, tangent disks,
truncated cube vs ray families, and randomized polyhedral pair generators
with constants chosen so the translate-intersection criterion provably
holds.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import null_space

from .errors import PreconditionError
from .numkernel import as_vector
from .sets import AffineSet, Ball, Polyhedron, SetSpec, intersect


# ---------------------------------------------------------------------------
# Named instances
# ---------------------------------------------------------------------------


def crossing_lines(theta_rad: float, phi_rad: float = 0.0) -> dict:
    """Two lines through the origin in R^2 at angle theta (rotated by phi)."""
    if not 0 < theta_rad <= np.pi / 2:
        raise PreconditionError("theta must lie in (0, pi/2]")
    u1 = np.array([np.cos(phi_rad), np.sin(phi_rad)])
    u2 = np.array([np.cos(phi_rad + theta_rad), np.sin(phi_rad + theta_rad)])
    return {
        "name": f"crossing-lines-{np.degrees(theta_rad):.0f}",
        "a": AffineSet(np.zeros(2), u1.reshape(1, -1)),
        "b": AffineSet(np.zeros(2), u2.reshape(1, -1)),
        "x0": np.zeros(2),
        "theta": theta_rad,
    }


def opposing_halfplanes() -> dict:
    """A = {x2 <= 0}, B = {x2 >= 0}; they share the boundary line."""
    a = Polyhedron(np.array([[0.0, 1.0]]), np.array([0.0]))
    b = Polyhedron(np.array([[0.0, -1.0]]), np.array([0.0]))
    return {"name": "opposing-halfplanes", "a": a, "b": b, "x0": np.zeros(2)}


def halfplane() -> Polyhedron:
    return Polyhedron(np.array([[0.0, 1.0]]), np.array([0.0]))


def line_through_origin(direction) -> AffineSet:
    d = as_vector(direction)
    return AffineSet(np.zeros(d.shape[0]), d.reshape(1, -1))


def tangent_disks(radius: float = 1.0) -> dict:
    """Two disks tangent at the origin; the intersection is the single point 0."""
    a = Ball(np.array([0.0, radius]), radius)
    b = Ball(np.array([0.0, -radius]), radius)
    return {"name": "tangent-disks", "a": a, "b": b, "x0": np.zeros(2)}


def quadrant(dim: int = 2) -> Polyhedron:
    return Polyhedron(-np.eye(dim), np.zeros(dim))


# ---------------------------------------------------------------------------
# Truncated cube vs ray family
# ---------------------------------------------------------------------------


def truncated_cube_ray(n: int) -> dict:
    """Box |x_i| <= 1/i against the ray along y_i = i^(-3/4) in R^n.

    The intersection is the segment {t y : 0 <= t <= n^(-1/4)}; just past its
    endpoint the ray sits a distance O((t - t*) n^(-3/4)) from the box while
    the intersection stays (t - t*)*||y|| away, so the subtransversality
    ratio near the pinch grows like n^(3/4)*||y||.
    """
    if n < 1:
        raise PreconditionError("dimension must be at least 1")
    idx = np.arange(1, n + 1, dtype=float)
    a_rows = np.vstack([np.eye(n), -np.eye(n)])
    a_rhs = np.concatenate([1.0 / idx, 1.0 / idx])
    cube = Polyhedron(a_rows, a_rhs)
    y = idx ** (-0.75)
    if n == 1:
        ray = Polyhedron(np.array([[-1.0]]), np.array([0.0]))
    else:
        q = null_space(y.reshape(1, -1))  # (n, n-1) orthonormal
        rows = np.vstack([q.T, -q.T, -y.reshape(1, -1)])
        rhs = np.zeros(rows.shape[0])
        ray = Polyhedron(rows, rhs)
    return {
        "name": f"cube-ray-{n}",
        "a": cube,
        "b": ray,
        "x0": np.zeros(n),
        "y": y,
        "t_star": float(n ** (-0.25)),
    }


def hilbert_pinch_samples(n: int, h_grid=(0.5, 0.25, 0.1, 0.05, 0.02, 0.01)) -> list[np.ndarray]:
    """Ray points just past the cube exit, where the ratio escalates."""
    inst = truncated_cube_ray(n)
    return [(inst["t_star"] * (1.0 + h)) * inst["y"] for h in h_grid]


def hilbert_khat(n: int, h_grid=(0.5, 0.25, 0.1, 0.05, 0.02, 0.01)) -> dict:
    """Subtransversality ratio profile of the cube-vs-ray pair via the set
    oracles on the structured pinch samples."""
    inst = truncated_cube_ray(n)
    meet = intersect(inst["a"], inst["b"])
    best = 0.0
    rows = []
    for x in hilbert_pinch_samples(n, h_grid):
        da = inst["a"].distance(x)
        db = inst["b"].distance(x)
        dm = meet.distance(x)
        denom = da + db
        if denom < 1e-12:
            continue
        ratio = dm / denom
        rows.append({"x_scale": float(np.linalg.norm(x)), "ratio": ratio})
        best = max(best, ratio)
    return {"n": n, "k_hat": best, "rows": rows, "name": inst["name"]}


# ---------------------------------------------------------------------------
# Randomized generators
# ---------------------------------------------------------------------------


def gen_transversal_pair(rng: np.random.Generator, dim: int = 2) -> dict:
    """A pair of flats through the origin at a random opening angle, with
    (alpha, delta) safe for the translate-intersection criterion: the worst
    translated meet sits at distance rho*alpha/sin(theta/2) from the origin,
    so alpha = 0.5 sin(theta/2) keeps it inside the rho-ball."""
    theta = rng.uniform(np.deg2rad(45.0), np.deg2rad(90.0))
    if dim == 2:
        phi = rng.uniform(0.0, np.pi)
        u1 = np.array([np.cos(phi), np.sin(phi)])
        u2 = np.array([np.cos(phi + theta), np.sin(phi + theta)])
        a = AffineSet(np.zeros(2), u1.reshape(1, -1))
        b = AffineSet(np.zeros(2), u2.reshape(1, -1))
    elif dim == 3:
        frame = np.linalg.qr(rng.standard_normal((3, 3)))[0]
        m1 = frame[:, 0]
        m2 = np.cos(theta) * frame[:, 0] + np.sin(theta) * frame[:, 1]
        a = AffineSet(np.zeros(3), null_space(m1.reshape(1, -1)).T)
        b = AffineSet(np.zeros(3), null_space(m2.reshape(1, -1)).T)
    else:
        raise PreconditionError("generator supports dimensions 2 and 3")
    alpha = 0.5 * np.sin(theta / 2.0)
    return {
        "name": f"transversal-pair-d{dim}",
        "a": a,
        "b": b,
        "x0": np.zeros(dim),
        "alpha": float(alpha),
        "delta": 1.0,
        "theta": float(theta),
    }


def subtransversal_corpus(count: int, rng: np.random.Generator) -> list[dict]:
    """Convex polyhedral pairs with a common point; polyhedral pairs satisfy
    a linear error bound for the intersection, so every entry is
    subtransversal."""
    out: list[dict] = []
    k = 0
    while len(out) < count:
        kind = k % 4
        k += 1
        if kind == 0:
            theta = rng.uniform(np.deg2rad(15.0), np.deg2rad(90.0))
            inst = crossing_lines(theta, phi_rad=rng.uniform(0, np.pi))
            inst["name"] = f"lines-{len(out)}"
            out.append(inst)
        elif kind == 1:
            theta = rng.uniform(np.deg2rad(30.0), np.deg2rad(150.0))
            phi = rng.uniform(0, 2 * np.pi)
            n1 = np.array([np.cos(phi), np.sin(phi)])
            n2 = np.array([np.cos(phi + theta), np.sin(phi + theta)])
            out.append(
                {
                    "name": f"halfplanes-{len(out)}",
                    "a": Polyhedron(n1.reshape(1, -1), np.zeros(1)),
                    "b": Polyhedron(n2.reshape(1, -1), np.zeros(1)),
                    "x0": np.zeros(2),
                }
            )
        elif kind == 2:
            dim = 2 if rng.random() < 0.5 else 3
            rot = np.linalg.qr(rng.standard_normal((dim, dim)))[0]
            width = rng.uniform(0.4, 1.5)
            a_rows = np.vstack([rot[0], -rot[0]])
            b_rows = np.vstack([rot[1], -rot[1]])
            out.append(
                {
                    "name": f"strips-{len(out)}",
                    "a": Polyhedron(a_rows, np.full(2, width)),
                    "b": Polyhedron(b_rows, np.full(2, width)),
                    "x0": np.zeros(dim),
                }
            )
        else:
            dim = 2 if rng.random() < 0.5 else 3
            rot = np.linalg.qr(rng.standard_normal((dim, dim)))[0]
            spread = rng.uniform(0.2, 0.8)
            n1 = rot[0]
            n2 = -spread * rot[0] + np.sqrt(1 - spread**2) * rot[1]
            out.append(
                {
                    "name": f"cones-{len(out)}",
                    "a": Polyhedron(np.vstack([n1, n2]), np.zeros(2)),
                    "b": Polyhedron((-rot[0]).reshape(1, -1), np.zeros(1)),
                    "x0": np.zeros(dim),
                }
            )
    return out


def gen_lp_instance(rng: np.random.Generator, dim: int = 2, minimizer: bool = True) -> dict:
    """A linear objective over a polyhedral cone with vertex at the origin.

    With c = -sum(lam_i n_i), lam > 0, the origin minimizes c.x over
    {x : n_i.x <= 0} and lam is the KKT multiplier vector; flipping the sign
    of c destroys minimality (descent directions exist inside the cone).
    """
    while True:
        normals = rng.standard_normal((dim, dim))
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        if abs(np.linalg.det(normals)) > 0.3:
            break
    lam = rng.uniform(0.5, 2.0, size=dim)
    c = -(lam @ normals)
    if not minimizer:
        c = -c
    return {
        "name": f"lp-{dim}d-{'min' if minimizer else 'descent'}",
        "c": c,
        "s": Polyhedron(normals, np.zeros(dim)),
        "x0": np.zeros(dim),
        "kkt_multipliers": lam if minimizer else None,
        "normals": normals,
    }
