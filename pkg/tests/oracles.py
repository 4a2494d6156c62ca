"""Independent reference implementations used to freeze expected values.

Everything here is written directly from the defining formulas with plain
numpy (plus exhaustive enumeration where that is feasible) and must not
import the package under test.
"""

from __future__ import annotations

import itertools

import numpy as np


def clamp_box(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the box [lo, hi]: coordinatewise clamp."""
    return np.minimum(np.maximum(np.asarray(x, dtype=float), lo), hi)


def project_halfspace(x: np.ndarray, a: np.ndarray, b: float) -> np.ndarray:
    """Euclidean projection onto {y : a.y <= b}."""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    excess = float(a @ x) - float(b)
    if excess <= 0.0:
        return x.copy()
    return x - (excess / float(a @ a)) * a


def project_sphere_ball(x: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto the closed ball B(center, radius)."""
    x = np.asarray(x, dtype=float)
    center = np.asarray(center, dtype=float)
    d = x - center
    nd = float(np.linalg.norm(d))
    if nd <= radius:
        return x.copy()
    return center + (radius / nd) * d


def project_line(x: np.ndarray, point: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the line point + span{direction}."""
    x = np.asarray(x, dtype=float)
    point = np.asarray(point, dtype=float)
    d = np.asarray(direction, dtype=float)
    t = float(d @ (x - point)) / float(d @ d)
    return point + t * d


def lp_by_vertex_enumeration(
    c: np.ndarray, a_ub: np.ndarray, b_ub: np.ndarray
) -> tuple[str, float | None, np.ndarray | None]:
    """Solve min c.x s.t. a_ub x <= b_ub in R^2 by enumerating vertices.

    Only valid for bounded feasible regions: every optimum of a bounded LP
    sits on a vertex, and in the plane every vertex is the meet of two
    constraint rows.  Returns (status, value, x).
    """
    c = np.asarray(c, dtype=float)
    a_ub = np.atleast_2d(np.asarray(a_ub, dtype=float))
    b_ub = np.asarray(b_ub, dtype=float)
    if a_ub.shape[1] != 2:
        raise ValueError("vertex enumeration oracle is 2-d only")
    feas_tol = 1e-9
    vertices: list[np.ndarray] = []
    for i, j in itertools.combinations(range(a_ub.shape[0]), 2):
        m = a_ub[[i, j]]
        if abs(np.linalg.det(m)) < 1e-12:
            continue
        v = np.linalg.solve(m, b_ub[[i, j]])
        if np.all(a_ub @ v <= b_ub + feas_tol):
            vertices.append(v)
    if not vertices:
        return "INFEASIBLE", None, None
    vals = [float(c @ v) for v in vertices]
    k = int(np.argmin(vals))
    return "OPTIMAL", vals[k], vertices[k]


def crossing_lines_khat(theta_rad: float, grid_n: int, half_width: float) -> float:
    """Brute-force K_hat for two lines through the origin meeting at theta.

    A is the x-axis, B is the line at angle theta, A∩B = {0}.  Sweep a
    dense grid over the square [-half_width, half_width]^2 and take the
    largest d(x, A∩B) / (d(x, A) + d(x, B)); distances are closed forms.
    """
    u = np.array([np.cos(theta_rad), np.sin(theta_rad)])
    ticks = np.linspace(-half_width, half_width, grid_n)
    best = 0.0
    for x0 in ticks:
        for x1 in ticks:
            x = np.array([x0, x1])
            da = abs(x1)
            db = abs(float(x @ np.array([-u[1], u[0]])))
            dmeet = float(np.linalg.norm(x))
            denom = da + db
            if denom < 1e-12:
                continue
            best = max(best, dmeet / denom)
    return best


def disk_distance(x: np.ndarray, center: np.ndarray, radius: float) -> float:
    """Distance from x to the closed disk B(center, radius), closed form."""
    return max(0.0, float(np.linalg.norm(np.asarray(x) - np.asarray(center))) - radius)


def alternating_projections_rate(
    project_a, project_b, x_start: np.ndarray, meet_point: np.ndarray, iters: int
) -> float:
    """Fit the R-linear rate of x <- P_A(P_B(x)) toward a known meet point.

    Least-squares slope of log(gap_k); independent of the toolkit's fit.
    """
    x = np.asarray(x_start, dtype=float)
    gaps = []
    for _ in range(iters):
        x = project_a(project_b(x))
        gaps.append(float(np.linalg.norm(x - meet_point)))
    logs = np.log(np.maximum(gaps, 1e-300))
    k = np.arange(len(gaps), dtype=float)
    slope = float(np.polyfit(k, logs, 1)[0])
    return float(np.exp(slope))


def quadrant_tangent_rays(active: list[int], dim: int) -> set[tuple[float, ...]]:
    """Generators of the tangent cone to {x >= 0} at a point whose active
    (zero) coordinates are listed; free coordinates contribute +/- e_i."""
    rays: set[tuple[float, ...]] = set()
    for i in range(dim):
        e = [0.0] * dim
        e[i] = 1.0
        rays.add(tuple(e))
        if i not in active:
            e2 = [0.0] * dim
            e2[i] = -1.0
            rays.add(tuple(e2))
    return rays
