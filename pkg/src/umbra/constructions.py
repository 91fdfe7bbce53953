"""Generators for the ball families of the shadow problem."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmbeddingFailed, ImagesOverlap, InvalidTriangle
from .geom import Ball, Configuration, Mode, Topology

PSD_TOL = 1e-9


def simplex_half_edge(n: int) -> float:
    """Half the edge of a regular n-simplex inscribed in the unit sphere."""
    return math.sqrt((n + 1) / (2 * n))


@dataclass(frozen=True)
class SimplexParams:
    dimension: int
    epsilon: float = 1e-2
    shrink_delta: float = 1e-4
    topology: Topology = Topology.CLOSED

    def __post_init__(self):
        if self.dimension < 2:
            raise ValueError("dimension must be at least 2")
        if self.epsilon < 0 or self.shrink_delta < 0:
            raise ValueError("epsilon and shrink_delta must be nonnegative")
        a = simplex_half_edge(self.dimension)
        if a - self.epsilon / 2 <= 0:
            raise ValueError(f"epsilon {self.epsilon} too large for half-edge {a:.6f}")

    @property
    def radii(self) -> list[float]:
        a = simplex_half_edge(self.dimension)
        e = self.epsilon
        return [a + e] + [a - e / 2**i for i in range(1, self.dimension + 1)]


def embed_distances(D: np.ndarray, dim: int) -> np.ndarray:
    """Points in R^dim with pairwise distances ``D`` (classical scaling).

    Raises EmbeddingFailed when the doubly-centred Gram matrix is not positive
    semidefinite or needs more than ``dim`` dimensions.
    """
    m = len(D)
    J = np.eye(m) - np.ones((m, m)) / m
    G = -0.5 * J @ (D**2) @ J
    w, V = np.linalg.eigh(G)
    w, V = w[::-1], V[:, ::-1]
    scale = max(1.0, float(np.abs(w).max()))
    if w[-1] < -PSD_TOL * scale:
        raise EmbeddingFailed(f"distance matrix is not Euclidean (eigenvalue {w[-1]:.3e})")
    if m > dim and np.any(np.abs(w[dim:]) > PSD_TOL * scale):
        raise EmbeddingFailed(f"distances need more than {dim} dimensions")
    k = min(dim, m)
    X = V[:, :k] * np.sqrt(np.clip(w[:k], 0.0, None))
    if k < dim:
        X = np.hstack([X, np.zeros((m, dim - k))])
    return X


def circumcenter(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Centre and radius of the sphere through n+1 affinely independent points in R^n."""
    P = np.asarray(points, dtype=float)
    A = 2.0 * (P[1:] - P[0])
    rhs = np.sum(P[1:] ** 2, axis=1) - np.sum(P[0] ** 2)
    try:
        c = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise EmbeddingFailed("centres are affinely dependent") from exc
    R = float(np.linalg.norm(P[0] - c))
    return c, R


def tangent_simplex_family(params: SimplexParams) -> Configuration:
    """n+1 pairwise tangent balls whose centres sit on the unit sphere.

    Radii ``a+eps, a-eps/2, ..., a-eps/2^n`` are realised by embedding the
    tangency distances, then the circumsphere of the centres is moved to the
    origin and scaled to radius 1.  ``shrink_delta`` is subtracted from every
    radius afterwards.
    """
    n = params.dimension
    r = np.array(params.radii)
    D = r[:, None] + r[None, :]
    np.fill_diagonal(D, 0.0)
    X = embed_distances(D, n)
    c, R = circumcenter(X)
    X = (X - c) / R
    residual = np.abs(np.linalg.norm(X, axis=1) - 1.0).max()
    if residual > 1e-9:
        raise EmbeddingFailed(f"circumcentre residual {residual:.3e}")
    radii = r / R - params.shrink_delta
    if np.any(radii <= 0):
        raise EmbeddingFailed("shrink_delta exceeds a radius")
    balls = [Ball(x, rad) for x, rad in zip(X, radii)]
    return Configuration(n, balls, mode=Mode.LINE, topology=params.topology)


def place_on_sphere(radii: Sequence[float], dim: int = 3,
                    topology: Topology = Topology.CLOSED, mode: Mode = Mode.LINE) -> Configuration:
    """Pairwise tangent balls with centres on the unit sphere.

    The first centre is put on the last coordinate axis, e.g. ``(0, 0, 1)``,
    the second in the plane of the last two axes.
    """
    r = np.asarray(radii, dtype=float)
    m = len(r)
    if np.any(r + r.max() > 2.0 + 1e-12):
        raise EmbeddingFailed("radius sums exceed the sphere diameter")
    G = 1.0 - (r[:, None] + r[None, :]) ** 2 / 2.0
    np.fill_diagonal(G, 1.0)
    w, V = np.linalg.eigh(G)
    if w.min() < -PSD_TOL:
        raise EmbeddingFailed("tangent placement is not realisable on the sphere")
    if m > dim and np.any(w[: m - dim] > PSD_TOL):
        raise EmbeddingFailed(f"tangent placement needs more than {dim} dimensions")
    X = V * np.sqrt(np.clip(w, 0.0, None))
    # Gram-Schmidt on the centres gives lower-triangular coordinates
    _, R = np.linalg.qr(X.T)
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    L = R.T * signs
    k = min(m, dim)
    if np.abs(L[:, k:]).max(initial=0.0) > 1e-7:
        raise EmbeddingFailed(f"tangent placement needs more than {dim} dimensions")
    Y = np.zeros((m, dim))
    Y[:, :k] = L[:, :k]
    Y = Y[:, ::-1]
    return Configuration(dim, [Ball(y, rad) for y, rad in zip(Y, r)], mode=mode,
                         topology=topology)


# ---------------------------------------------------------------------------
# two balls in the plane


@dataclass(frozen=True)
class ExtremalReport:
    r1: float
    r2: float
    root_residual: float
    tangent_segment: float
    separating_offset: float
    max_offset: float
    nudge: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def tangent_segment(r1: float, r2: float) -> float:
    """Length cut from the common outer tangent by its points of contact with two tangent balls."""
    return 2.0 * math.sqrt(r1 * r2)


def separating_offset(r1: float, r2: float) -> float:
    """Distance from the origin to the inner common tangent of two tangent balls on the unit circle."""
    return (r1 - r2) / 2.0


EXTREMAL_R2 = math.sqrt(5.0) - 2.0
EXTREMAL_OFFSET = (3.0 - math.sqrt(5.0)) / 2.0


def extremal_two_ball(eta: float, topology: Topology = Topology.CLOSED) -> tuple[Configuration, ExtremalReport]:
    """Two balls on the unit circle blocking every line through the centre.

    Limit picture (eta = 0): a unit ball at (0, 1) and a ball of radius
    sqrt(5)-2 tangent to it and to the x-axis.  For eta > 0 the big ball
    shrinks to 1-eta, which opens a gap of angular half-width
    g = pi/2 - arcsin(1-eta) around the x-axis; the small ball is rotated
    away from the big one by 2g so its occlusion arc spans the gap.
    """
    if not 0.0 < eta < 0.1:
        raise ValueError("eta must lie in (0, 0.1)")
    r1 = 1.0 - eta
    r2 = EXTREMAL_R2
    gap = math.pi / 2 - math.asin(r1)
    nudge = 2.0 * gap
    phi2 = math.asin(r2) - nudge
    balls = [
        Ball([0.0, 1.0], r1),
        Ball([math.cos(phi2), math.sin(phi2)], r2),
    ]
    cfg = Configuration(2, balls, mode=Mode.LINE, topology=topology)
    report = ExtremalReport(
        r1=r1,
        r2=r2,
        root_residual=r2 * r2 + 4 * r2 - 1,
        tangent_segment=tangent_segment(1.0, r2),
        separating_offset=separating_offset(r1, r2),
        max_offset=EXTREMAL_OFFSET,
        nudge=nudge,
    )
    return cfg, report


def inner_tangent_offsets(b1: Ball, b2: Ball) -> list[float]:
    """Distances from the origin to the two inner common tangents of two disjoint discs."""
    c1, c2 = b1.center, b2.center
    d = float(np.linalg.norm(c2 - c1))
    if d <= b1.radius + b2.radius:
        return []
    e = (c2 - c1) / d
    perp = np.array([-e[1], e[0]])
    # the line n.x = t separates the discs: n.c1 - t = r1, t - n.c2 = r2
    cos_a = (b1.radius + b2.radius) / d
    sin_a = math.sqrt(1.0 - cos_a * cos_a)
    out = []
    for s in (1.0, -1.0):
        nrm = -cos_a * e + s * sin_a * perp
        t = float(np.dot(nrm, c1)) - b1.radius
        out.append(abs(t))
    return out


def separating_line(b1: Ball, b2: Ball) -> tuple[np.ndarray, float]:
    """Line orthogonal to the centre segment through the middle of the gap.

    Returns (unit normal, signed offset) with the line {x : normal.x = offset}.
    For tangent balls this is the inner tangent at the contact point.
    """
    d = b2.center - b1.center
    L = float(np.linalg.norm(d))
    e = d / L
    gap = L - b1.radius - b2.radius
    return e, float(np.dot(e, b1.center)) + b1.radius + gap / 2


# ---------------------------------------------------------------------------
# triangle of tangent circles


@dataclass(frozen=True)
class TriangleSides:
    a: float
    b: float
    c: float

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if not (a > b > c > 0):
            raise InvalidTriangle(f"sides must satisfy a > b > c > 0, got {a}, {b}, {c}")
        if not a < b + c:
            raise InvalidTriangle(f"triangle inequality fails: {a} >= {b} + {c}")

    @property
    def p(self) -> float:
        return (self.a + self.b + self.c) / 2

    @property
    def circumradius(self) -> float:
        a, b, c = self.a, self.b, self.c
        q = (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c)
        return a * b * c / math.sqrt(q)


def triangle_family(sides: TriangleSides, topology: Topology = Topology.CLOSED) -> Configuration:
    """Circles of radii p-a, p-b, p-c at the vertices, scaled to the unit circumcircle.

    The vertex opposite side ``a`` carries radius ``p-a``, so neighbouring
    circles touch on the shared side.
    """
    a, b, c = sides.a, sides.b, sides.c
    R = sides.circumradius
    # central angles over the sides are twice the opposite angles
    ang_a = math.acos((b * b + c * c - a * a) / (2 * b * c))
    ang_c = math.acos((a * a + b * b - c * c) / (2 * a * b))
    t_a, t_b, t_c = 0.0, 2 * ang_c, 2 * ang_c + 2 * ang_a
    p = sides.p
    balls = [
        Ball([math.cos(t_a), math.sin(t_a)], (p - a) / R),
        Ball([math.cos(t_b), math.sin(t_b)], (p - b) / R),
        Ball([math.cos(t_c), math.sin(t_c)], (p - c) / R),
    ]
    return Configuration(2, balls, mode=Mode.RAY, topology=topology)


# ---------------------------------------------------------------------------
# ten balls on the 2-sphere


class TenBallVariant(str, enum.Enum):
    PRINTED = "printed"
    TANGENT = "tangent"


TEN_BALL_SIDE = math.sqrt(2.0) - 1.0
TEN_BALL_PRINTED = 3.0 - 2.0 * math.sqrt(2.0)
TEN_BALL_TANGENT = 2.0 * math.sin(math.pi / 8) - TEN_BALL_SIDE


def ten_ball_family(variant: TenBallVariant | str = TenBallVariant.PRINTED) -> Configuration:
    """Two unit pole balls, four balls of radius sqrt(2)-1 on the axes and four on the bisectors."""
    variant = TenBallVariant(variant)
    small = TEN_BALL_PRINTED if variant is TenBallVariant.PRINTED else TEN_BALL_TANGENT
    h = math.sqrt(2.0) / 2
    balls = [Ball([0, 0, 1], 1.0), Ball([0, 0, -1], 1.0)]
    balls += [Ball(c, TEN_BALL_SIDE) for c in ([1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0])]
    balls += [Ball(c, small) for c in ([h, h, 0], [-h, h, 0], [-h, -h, 0], [h, -h, 0])]
    return Configuration(3, balls, mode=Mode.RAY, topology=Topology.OPEN)


# ---------------------------------------------------------------------------
# negative homothety


def _image_gap(config: Configuration, k: float) -> float:
    C, r = config.centers, config.radii
    gaps = np.linalg.norm(C[:, None, :] - k * C[None, :, :], axis=2) - r[:, None] - abs(k) * r[None, :]
    return float(gaps.min())


def largest_homothety_ratio(config: Configuration, margin: float = 0.0) -> float:
    """Largest |k| < 1 for which the images under x -> kx (k < 0) clear the originals.

    Bisection on the image gap; returns a negative ratio.
    """
    lo, hi = 0.0, 1.0
    if _image_gap(config, -1e-9) <= margin:
        raise ImagesOverlap("no negative ratio separates the images")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _image_gap(config, -mid) > margin:
            lo = mid
        else:
            hi = mid
    return -lo


def homothety_double(config: Configuration, k: float) -> Configuration:
    """Append the images of all balls under x -> kx to a line-blocking family.

    Each line through the origin that meets a ball along +u meets its image
    along -u, so a line-covered family becomes ray-covered.
    """
    if config.mode is not Mode.LINE:
        raise ValueError("homothety doubling expects a line-mode configuration")
    if not (k < 0 and abs(abs(k) - 1.0) > 1e-12):
        raise ValueError("k must be negative with |k| != 1")
    gap = _image_gap(config, k)
    strict = config.topology is Topology.CLOSED
    if gap < 0 or (strict and gap <= 0) or abs(gap) <= 1e-12:
        raise ImagesOverlap(f"images under k={k} meet the originals (gap {gap:.6g})")
    images = [Ball(k * b.center, abs(k) * b.radius) for b in config.balls]
    return config.with_(balls=tuple(config.balls) + tuple(images), mode=Mode.RAY,
                        centers_free=True)
