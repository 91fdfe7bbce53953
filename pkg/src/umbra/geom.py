"""
Exact geometric primitives: balls, configurations, occlusion caps and
line/ray intersection tests.

Every boundary comparison uses the single signed tolerance ``TOL_GEOM``:
an ``Open`` obstacle resolves ties as a miss, a ``Closed`` one as a hit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial import ConvexHull

from .errors import (
    DimensionMismatch,
    GeometryError,
    NonUnitDirection,
    PointInsideBody,
    UnsupportedDimension,
    ViewpointInsideBall,
)

TOL_GEOM = 1e-9
TOL_ONSPHERE = 1e-9
TOL_TANGENCY = 1e-9
TOL_ANGLE = 1e-10
TOL_UNIT = 1e-9


class Mode(str, enum.Enum):
    LINE = "line"
    RAY = "ray"


class Topology(str, enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


def as_vector(x: ArrayLike, min_dim: int = 2) -> NDArray[np.float64]:
    v = np.array(x, dtype=float).reshape(-1)
    if v.size < min_dim:
        raise DimensionMismatch(f"vector needs at least {min_dim} coordinates, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise GeometryError("vector coordinates must be finite")
    v.setflags(write=False)
    return v


def unit(x: ArrayLike) -> NDArray[np.float64]:
    v = np.asarray(x, dtype=float)
    return v / np.linalg.norm(v)


def angle_between(u: ArrayLike, v: ArrayLike) -> float:
    """Angle between two unit vectors, accurate near 0 and pi."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    c = float(np.dot(u, v))
    s = float(np.linalg.norm(u - c * v))
    return math.atan2(s, c)


@dataclass(frozen=True, eq=False)
class Ball:
    center: NDArray[np.float64]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        r = float(self.radius)
        if not (r > 0 and math.isfinite(r)):
            raise GeometryError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.size


@dataclass(frozen=True, eq=False)
class Configuration:
    """A family of balls around a reference sphere centred at the origin."""

    dimension: int
    balls: tuple[Ball, ...]
    sphere_radius: float = 1.0
    mode: Mode = Mode.LINE
    topology: Topology = Topology.CLOSED
    centers_free: bool = False

    def __post_init__(self):
        if int(self.dimension) < 2:
            raise DimensionMismatch("dimension must be at least 2")
        object.__setattr__(self, "dimension", int(self.dimension))
        object.__setattr__(self, "balls", tuple(self.balls))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "topology", Topology(self.topology))
        if not self.sphere_radius > 0:
            raise GeometryError("sphere_radius must be positive")
        for i, b in enumerate(self.balls):
            if b.dim != self.dimension:
                raise DimensionMismatch(
                    f"ball {i} has dimension {b.dim}, configuration has {self.dimension}"
                )

    def with_(self, **changes) -> "Configuration":
        fields = dict(
            dimension=self.dimension,
            balls=self.balls,
            sphere_radius=self.sphere_radius,
            mode=self.mode,
            topology=self.topology,
            centers_free=self.centers_free,
        )
        fields.update(changes)
        return Configuration(**fields)

    @property
    def centers(self) -> NDArray[np.float64]:
        return np.array([b.center for b in self.balls]).reshape(len(self.balls), self.dimension)

    @property
    def radii(self) -> NDArray[np.float64]:
        return np.array([b.radius for b in self.balls])


@dataclass(frozen=True, eq=False)
class SphericalCap:
    axis: NDArray[np.float64]
    half_angle: float
    boundary: Topology = Topology.CLOSED

    def __post_init__(self):
        a = as_vector(self.axis)
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            a = as_vector(a / np.linalg.norm(a))
        object.__setattr__(self, "axis", a)
        h = float(self.half_angle)
        if not (0.0 < h <= math.pi + 1e-15):
            raise GeometryError(f"cap half-angle must lie in (0, pi], got {h}")
        object.__setattr__(self, "half_angle", min(h, math.pi))
        object.__setattr__(self, "boundary", Topology(self.boundary))

    @property
    def dim(self) -> int:
        return self.axis.size

    def contains(self, u: ArrayLike, tol: float = TOL_GEOM) -> bool:
        ang = angle_between(u, self.axis)
        if self.boundary is Topology.CLOSED:
            return ang <= self.half_angle + tol
        return ang < self.half_angle - tol

    def clearance(self, u: ArrayLike) -> float:
        """Signed angular distance from ``u`` to the cap; negative inside."""
        return angle_between(u, self.axis) - self.half_angle


def occlusion_caps(ball: Ball, viewpoint: ArrayLike, mode: Mode = Mode.RAY,
                   topology: Topology = Topology.CLOSED) -> list[SphericalCap]:
    """Directions from ``viewpoint`` whose ray (or line) meets ``ball``.

    A ball at distance ``d`` subtends a cap of half-angle ``arcsin(r/d)``
    around the direction of its centre; line mode adds the antipodal cap.
    The degenerate ``d == r`` case is accepted for open balls only and yields
    an open hemisphere.
    """
    mode, topology = Mode(mode), Topology(topology)
    v = np.asarray(viewpoint, dtype=float)
    w = ball.center - v
    d = float(np.linalg.norm(w))
    if d <= ball.radius + TOL_GEOM:
        if topology is Topology.OPEN and abs(d - ball.radius) <= TOL_GEOM and d > 0:
            half, boundary = math.pi / 2, Topology.OPEN
        else:
            raise ViewpointInsideBall(
                f"viewpoint at distance {d:.12g} from a ball of radius {ball.radius:.12g}"
            )
    else:
        half, boundary = math.asin(ball.radius / d), topology
    axis = w / d
    caps = [SphericalCap(axis, half, boundary)]
    if mode is Mode.LINE:
        caps.append(SphericalCap(-axis, half, boundary))
    return caps


def _check_direction(u: ArrayLike) -> NDArray[np.float64]:
    u = np.asarray(u, dtype=float)
    if abs(1.0 - float(np.linalg.norm(u))) > TOL_UNIT:
        raise NonUnitDirection(f"direction has norm {np.linalg.norm(u):.12g}")
    return u


def _clears(dist: float, radius: float, topology: Topology) -> bool:
    if topology is Topology.CLOSED:
        return dist <= radius + TOL_GEOM
    return dist < radius - TOL_GEOM


def line_distance(direction: ArrayLike, viewpoint: ArrayLike, center: ArrayLike,
                  ray: bool = False) -> float:
    """Distance from ``center`` to the line (or ray) ``viewpoint + t*direction``."""
    u = np.asarray(direction, dtype=float)
    w = np.asarray(center, dtype=float) - np.asarray(viewpoint, dtype=float)
    t = float(np.dot(w, u))
    if ray:
        t = max(t, 0.0)
    return float(np.linalg.norm(w - t * u))


def line_hits_ball(direction: ArrayLike, viewpoint: ArrayLike, ball: Ball,
                   topology: Topology = Topology.CLOSED) -> bool:
    u = _check_direction(direction)
    return _clears(line_distance(u, viewpoint, ball.center), ball.radius, Topology(topology))


def ray_hits_ball(direction: ArrayLike, viewpoint: ArrayLike, ball: Ball,
                  topology: Topology = Topology.CLOSED) -> bool:
    u = _check_direction(direction)
    return _clears(line_distance(u, viewpoint, ball.center, ray=True), ball.radius,
                   Topology(topology))


def hits_ball(direction, viewpoint, ball, mode: Mode, topology: Topology) -> bool:
    if Mode(mode) is Mode.LINE:
        return line_hits_ball(direction, viewpoint, ball, topology)
    return ray_hits_ball(direction, viewpoint, ball, topology)


# ---------------------------------------------------------------------------
# convex polytopes


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Convex hull of a finite vertex set in the plane or in space.

    The hull is stored as half-spaces ``A q <= b`` in coordinates ``q`` of its
    affine hull, so segments, flat polygons and single points are handled by
    the same clipping code as full-dimensional bodies.
    """

    vertices: NDArray[np.float64]
    _origin: NDArray[np.float64] = field(init=False, repr=False)
    _basis: NDArray[np.float64] = field(init=False, repr=False)
    _A: NDArray[np.float64] = field(init=False, repr=False)
    _b: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self):
        V = np.atleast_2d(np.array(self.vertices, dtype=float))
        if V.shape[0] == 0:
            raise GeometryError("a convex body needs at least one vertex")
        if V.shape[1] not in (2, 3):
            raise UnsupportedDimension(f"convex bodies are supported in 2 and 3 dimensions, got {V.shape[1]}")
        if not np.all(np.isfinite(V)):
            raise GeometryError("vertex coordinates must be finite")
        V.setflags(write=False)
        object.__setattr__(self, "vertices", V)

        origin = V.mean(axis=0)
        X = V - origin
        scale = max(1.0, float(np.abs(V).max()))
        if len(V) > 1:
            _, s, vt = np.linalg.svd(X, full_matrices=False)
            k = int(np.sum(s > 1e-10 * scale))
            basis = vt[:k].T
        else:
            k = 0
            basis = np.zeros((V.shape[1], 0))
        Q = X @ basis
        if k == 0:
            A, b = np.zeros((0, 0)), np.zeros(0)
        elif k == 1:
            A = np.array([[1.0], [-1.0]])
            b = np.array([Q[:, 0].max(), -Q[:, 0].min()])
        else:
            hull = ConvexHull(Q)
            A = hull.equations[:, :-1]
            b = -hull.equations[:, -1]
        object.__setattr__(self, "_origin", origin)
        object.__setattr__(self, "_basis", basis)
        object.__setattr__(self, "_A", A)
        object.__setattr__(self, "_b", b)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def affine_dim(self) -> int:
        return self._basis.shape[1]

    def contains(self, p: ArrayLike, topology: Topology = Topology.CLOSED) -> bool:
        p = np.asarray(p, dtype=float)
        d = p - self._origin
        q = d @ self._basis
        off = d - self._basis @ q
        slack = TOL_GEOM if Topology(topology) is Topology.CLOSED else -TOL_GEOM
        if np.linalg.norm(off) > TOL_GEOM:
            return False
        return bool(np.all(self._A @ q <= self._b + slack)) if self._A.size else slack > 0

    def ray_interval(self, direction: ArrayLike, viewpoint: ArrayLike,
                     topology: Topology = Topology.CLOSED) -> tuple[float, float] | None:
        """Parameter interval ``[t0, t1]`` (``t >= 0``) of the ray inside the body."""
        u = np.asarray(direction, dtype=float)
        d0 = np.asarray(viewpoint, dtype=float) - self._origin
        B = self._basis
        slack = TOL_GEOM if Topology(topology) is Topology.CLOSED else -TOL_GEOM
        e = d0 - B @ (B.T @ d0)
        f = u - B @ (B.T @ u)
        nf = float(np.linalg.norm(f))
        if nf <= 1e-12:
            # ray parallel to the affine hull
            if np.linalg.norm(e) > TOL_GEOM:
                return None
            return _clip(self._A, self._b + slack, B.T @ d0, B.T @ u)
        t0 = -float(np.dot(e, f)) / nf**2
        if t0 < -TOL_GEOM or np.linalg.norm(e + t0 * f) > TOL_GEOM:
            return None
        t0 = max(t0, 0.0)
        q = B.T @ (d0 + t0 * u)
        if self._A.size and not np.all(self._A @ q <= self._b + slack):
            return None
        if not self._A.size and slack < 0:
            return None
        return (t0, t0)


def _clip(A, b, q0, dq) -> tuple[float, float] | None:
    lo, hi = 0.0, math.inf
    for a_row, b_i in zip(A, b):
        alpha = float(np.dot(a_row, dq))
        beta = float(b_i - np.dot(a_row, q0))
        if abs(alpha) < 1e-15:
            if beta < 0:
                return None
        elif alpha > 0:
            hi = min(hi, beta / alpha)
        else:
            lo = max(lo, beta / alpha)
        if lo > hi:
            return None
    return (lo, hi)


def ray_hits_polytope(direction: ArrayLike, viewpoint: ArrayLike, body: ConvexBody,
                      topology: Topology = Topology.CLOSED) -> bool:
    u = _check_direction(direction)
    if u.size != body.dim:
        raise DimensionMismatch("direction and body dimensions differ")
    if u.size > 3:
        raise UnsupportedDimension("ray/polytope tests are limited to n <= 3")
    if body.contains(viewpoint):
        raise PointInsideBody("viewpoint lies in the body")
    return body.ray_interval(u, viewpoint, topology) is not None


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    centers_on_sphere: bool
    off_sphere: list[int]
    radii_ok: bool
    bad_radii: list[int]
    disjoint: bool
    overlapping: list[tuple[int, int]]
    tangent_pairs: list[tuple[int, int]]
    pair_gaps: list[tuple[int, int, float]]

    @property
    def ok(self) -> bool:
        return self.centers_on_sphere and self.radii_ok and self.disjoint

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "centers_on_sphere": self.centers_on_sphere,
            "off_sphere": self.off_sphere,
            "radii_ok": self.radii_ok,
            "bad_radii": self.bad_radii,
            "disjoint": self.disjoint,
            "overlapping": [list(p) for p in self.overlapping],
            "tangent_pairs": [list(p) for p in self.tangent_pairs],
            "pair_gaps": [[i, j, g] for i, j, g in self.pair_gaps],
        }


def validate_configuration(config: Configuration, tol_onsphere: float = TOL_ONSPHERE,
                           tol_tangency: float = TOL_TANGENCY) -> ValidationReport:
    C, r = config.centers, config.radii
    R = config.sphere_radius
    norms = np.linalg.norm(C, axis=1) if len(C) else np.zeros(0)
    off = [] if config.centers_free else [
        i for i, d in enumerate(norms) if abs(d - R) > tol_onsphere
    ]
    # with free centres each ball is measured against its own centre sphere
    limit = norms if config.centers_free else np.full(len(r), R)
    if config.topology is Topology.CLOSED:
        bad = [i for i in range(len(r)) if not r[i] < limit[i] - tol_onsphere]
    else:
        bad = [i for i in range(len(r)) if r[i] > limit[i] + tol_onsphere]

    overlapping, tangent, gaps = [], [], []
    for i, j in combinations(range(len(r)), 2):
        gap = float(np.linalg.norm(C[i] - C[j]) - r[i] - r[j])
        gaps.append((i, j, gap))
        if abs(gap) <= tol_tangency:
            tangent.append((i, j))
        if config.topology is Topology.CLOSED:
            if not gap > tol_tangency:
                overlapping.append((i, j))
        elif gap < -tol_tangency:
            overlapping.append((i, j))
    return ValidationReport(
        centers_on_sphere=not off,
        off_sphere=off,
        radii_ok=not bad,
        bad_radii=bad,
        disjoint=not overlapping,
        overlapping=overlapping,
        tangent_pairs=tangent,
        pair_gaps=gaps,
    )


def miss_distances(config: Configuration, direction: ArrayLike,
                   viewpoint: Sequence[float] | None = None) -> list[float]:
    """Signed gap between each ball and the witness line/ray (positive = miss)."""
    v = np.zeros(config.dimension) if viewpoint is None else np.asarray(viewpoint, float)
    ray = config.mode is Mode.RAY
    return [line_distance(direction, v, b.center, ray=ray) - b.radius for b in config.balls]
