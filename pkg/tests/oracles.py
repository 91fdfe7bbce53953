"""Independent reference computations used by the tests."""

import math

import numpy as np
from scipy.optimize import linprog


def perp_distance(u, x, c, ray=False):
    """Distance from c to the line (or ray) x + t u, by explicit projection."""
    u = np.asarray(u, float)
    d = np.asarray(c, float) - np.asarray(x, float)
    t = float(d @ u) / float(u @ u)
    if ray:
        t = max(t, 0.0)
    return float(np.linalg.norm(d - t * u))


def ray_meets_hull_lp(u, x, vertices):
    """Feasibility LP: lambda >= 0, sum lambda = 1, t >= 0, V^T lambda - t u = x."""
    V = np.asarray(vertices, float)
    m, n = V.shape
    A_eq = np.zeros((n + 1, m + 1))
    A_eq[:n, :m] = V.T
    A_eq[:n, m] = -np.asarray(u, float)
    A_eq[n, :m] = 1.0
    b_eq = np.concatenate([np.asarray(x, float), [1.0]])
    res = linprog(np.zeros(m + 1), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * (m + 1),
                  method="highs")
    return res.status == 0


def ray_distance_to_hull(u, x, vertices, tmax):
    """Sampled distance from the ray segment [0, tmax] to the hull, via a QP-free LP bound."""
    from scipy.spatial import ConvexHull

    V = np.asarray(vertices, float)
    hull = ConvexHull(V)
    ts = np.linspace(0.0, tmax, 4001)
    pts = np.asarray(x, float) + ts[:, None] * np.asarray(u, float)
    # signed max over facets; <= 0 means inside
    s = pts @ hull.equations[:, :-1].T + hull.equations[:, -1]
    return float(s.max(axis=1).min())


def ob_linear_solve(r1, r2):
    """|OB| as the norm of P with P.e1 = sqrt(1-r1^2), P.e2 = sqrt(1-r2^2), angle(e1, e2) = theta."""
    theta = 2 * math.asin((r1 + r2) / 2)
    E = np.array([[1.0, 0.0], [math.cos(theta), math.sin(theta)]])
    rhs = np.array([math.sqrt(1 - r1 * r1), math.sqrt(1 - r2 * r2)])
    return float(np.linalg.norm(np.linalg.solve(E, rhs)))


def circle_covered_grid(intervals, count=200_000):
    """Fraction of a fine grid on the circle left uncovered by closed intervals."""
    th = np.linspace(0, 2 * math.pi, count, endpoint=False)
    hit = np.zeros(count, bool)
    for lo, hi in intervals:
        hit |= ((th - lo) % (2 * math.pi)) <= (hi - lo)
    return 1.0 - hit.mean()


def regular_simplex(n):
    """n+1 unit vectors in R^n with pairwise inner product -1/n."""
    E = np.eye(n + 1) - 1.0 / (n + 1)
    w, V = np.linalg.eigh(E)
    X = V[:, 1:] * np.sqrt(w[1:])
    return X / np.linalg.norm(X, axis=1)[:, None]
