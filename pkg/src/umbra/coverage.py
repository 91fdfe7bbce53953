"""
Coverage of the direction sphere by spherical caps.

``cover_s1`` is an exact interval merge on the circle, ``cover_s2`` decides
coverage of the 2-sphere by checking every cap boundary circle, and
``cover_sample`` estimates coverage in any dimension from deterministic
point sets.  ``shadow_verdict`` ties these to a ball configuration.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize
from scipy.special import ndtri
from scipy.stats import qmc

from .errors import (
    DimensionMismatch,
    OriginInsideBall,
    ViewpointInsideBall,
    WitnessVerificationError,
)
from .geom import (
    TOL_ANGLE,
    TOL_GEOM,
    Configuration,
    Mode,
    SphericalCap,
    Topology,
    angle_between,
    hits_ball,
    occlusion_caps,
)

TWO_PI = 2.0 * math.pi
TOL_PUSH = 1e-7
DEFAULT_SAMPLES = 100_000


class Status(str, enum.Enum):
    COVERED = "covered"
    UNCOVERED = "uncovered"
    ESTIMATED = "estimated"


@dataclass(frozen=True)
class AngularInterval:
    """Arc ``[lo, hi]`` on the circle, measured counterclockwise."""

    lo: float
    hi: float
    boundary: Topology = Topology.CLOSED

    def __post_init__(self):
        if not (0.0 < self.hi - self.lo):
            raise ValueError(f"interval must have positive width, got [{self.lo}, {self.hi}]")
        object.__setattr__(self, "boundary", Topology(self.boundary))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, theta: float, tol: float = TOL_ANGLE) -> bool:
        if self.width >= TWO_PI and self.boundary is Topology.CLOSED:
            return True
        t = (theta - self.lo) % TWO_PI
        # distance below lo measured the other way round
        below = TWO_PI - t
        if self.boundary is Topology.CLOSED:
            return t <= self.width + tol or below <= tol
        return tol < t < self.width - tol


@dataclass
class CoverageVerdict:
    status: Status
    witness: NDArray[np.float64] | None = None
    clearance: float | None = None
    uncovered_fraction: float | None = None
    gaps: list[tuple[float, float]] = field(default_factory=list)
    method: str = ""
    samples: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def covered(self) -> bool:
        return self.status is Status.COVERED

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "witness": None if self.witness is None else [float(x) for x in self.witness],
            "clearance": self.clearance,
            "uncovered_fraction": self.uncovered_fraction,
            "gaps": [[lo, hi] for lo, hi in self.gaps],
            "method": self.method,
            "samples": self.samples,
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# S^1


def caps_to_intervals(caps: Sequence[SphericalCap]) -> list[AngularInterval]:
    out = []
    for cap in caps:
        if cap.dim != 2:
            raise DimensionMismatch(f"expected a cap on S^1, got axis of dimension {cap.dim}")
        theta = math.atan2(cap.axis[1], cap.axis[0])
        out.append(AngularInterval(theta - cap.half_angle, theta + cap.half_angle, cap.boundary))
    return out


def _s1_gaps(intervals: Sequence[AngularInterval], tol: float) -> tuple[bool, list[tuple[float, float]]]:
    """Uncovered gaps of the circle as ``(lo, hi)`` pairs, ``lo <= hi``.

    A pair with ``lo == hi`` is an isolated uncovered point.  Angles are
    returned unwrapped relative to the first interval's midpoint.
    """
    if not intervals:
        return False, [(0.0, TWO_PI)]
    if any(iv.width >= TWO_PI and iv.boundary is Topology.CLOSED for iv in intervals):
        return True, []
    ref = intervals[0]
    # origin of the sweep sits strictly inside the first interval
    theta0 = 0.5 * (ref.lo + ref.hi)
    pieces = []  # (start, start_closed, end, end_closed)
    for iv in intervals:
        closed = iv.boundary is Topology.CLOSED
        w = min(iv.width, TWO_PI)
        s = (iv.lo - theta0) % TWO_PI
        e = s + w
        if e > TWO_PI:
            pieces.append((s, closed, TWO_PI, True))
            pieces.append((0.0, True, e - TWO_PI, closed))
        else:
            pieces.append((s, closed, e, closed))
    pieces.sort(key=lambda p: (p[0], not p[1]))

    gaps = []
    reach, reach_closed = 0.0, True
    for s, sc, e, ec in pieces:
        if s > reach + tol:
            gaps.append((reach, s))
        elif s >= reach - tol and not (reach_closed or sc):
            gaps.append((reach, reach))
        if e > reach + tol:
            reach, reach_closed = e, ec
        elif e >= reach - tol:
            reach_closed = reach_closed or ec
    if reach < TWO_PI - tol:
        gaps.append((reach, TWO_PI))

    # isolated points may have been covered by an interval seen later
    def covered_point(x):
        return any(iv.contains(x + theta0, tol) for iv in intervals)

    gaps = [(lo, hi) for lo, hi in gaps if hi > lo or not covered_point(lo)]
    return not gaps, [(lo + theta0, hi + theta0) for lo, hi in gaps]


def cover_s1(intervals: Sequence[AngularInterval], tol: float = TOL_ANGLE) -> CoverageVerdict:
    covered, gaps = _s1_gaps(intervals, tol)
    if covered:
        return CoverageVerdict(Status.COVERED, method="s1-merge")
    lo, hi = max(gaps, key=lambda g: g[1] - g[0])
    mid = 0.5 * (lo + hi)
    witness = np.array([math.cos(mid), math.sin(mid)])
    notes = []
    if hi == lo:
        notes.append("witness is an isolated uncovered point between open arcs")
    return CoverageVerdict(Status.UNCOVERED, witness=witness, clearance=0.5 * (hi - lo),
                           gaps=gaps, method="s1-merge", notes=notes)


# ---------------------------------------------------------------------------
# S^2


def _tangent_basis(a: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    helper = np.eye(3)[int(np.argmin(np.abs(a)))]
    e1 = np.cross(a, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(a, e1)
    return e1, e2


def _boundary_point(cap: SphericalCap, phi: float, offset: float = 0.0) -> NDArray[np.float64]:
    e1, e2 = _tangent_basis(cap.axis)
    h = cap.half_angle + offset
    return math.cos(h) * cap.axis + math.sin(h) * (math.cos(phi) * e1 + math.sin(phi) * e2)


def boundary_intervals(cap: SphericalCap, others: Sequence[SphericalCap]) -> tuple[bool, list[AngularInterval]]:
    """Arcs of ``cap``'s boundary circle lying inside each cap of ``others``.

    Returns ``(fully_covered, intervals)``; parametrisation by the angle
    ``phi`` of ``_boundary_point``.
    """
    a = cap.axis
    e1, e2 = _tangent_basis(a)
    ch, sh = math.cos(cap.half_angle), math.sin(cap.half_angle)
    out = []
    for o in others:
        # p(phi) . o.axis = A + B cos(phi - psi)
        A = ch * float(np.dot(a, o.axis))
        x, y = float(np.dot(e1, o.axis)), float(np.dot(e2, o.axis))
        B = sh * math.hypot(x, y)
        target = math.cos(o.half_angle)
        closed = o.boundary is Topology.CLOSED
        if B < 1e-14:
            if A > target + TOL_GEOM or (closed and A >= target - TOL_GEOM):
                return True, []
            continue
        kappa = (target - A) / B
        if kappa < -1.0 - 1e-12:
            return True, []
        if kappa >= 1.0:
            continue
        psi = math.atan2(y, x)
        half = math.acos(max(kappa, -1.0))
        out.append(AngularInterval(psi - half, psi + half, o.boundary))
    return False, out


def _uncovered(u: NDArray[np.float64], caps: Sequence[SphericalCap]) -> bool:
    return not any(c.contains(u) for c in caps)


def _clearance(u: NDArray[np.float64], caps: Sequence[SphericalCap]) -> float:
    if not caps:
        return math.pi
    return max(0.0, min(c.clearance(u) for c in caps))


def _refine_witness(w0: NDArray[np.float64], caps: Sequence[SphericalCap]) -> NDArray[np.float64]:
    """Move a verified witness towards the centre of its uncovered region."""
    n = w0.size
    basis = np.linalg.svd(np.eye(n) - np.outer(w0, w0))[0][:, : n - 1]

    def point(z):
        r = float(np.linalg.norm(z))
        if r == 0.0:
            return w0
        return math.cos(r) * w0 + math.sin(r) * (basis @ z) / r

    def objective(z):
        return -min(angle_between(point(z), c.axis) - c.half_angle for c in caps)

    start = objective(np.zeros(n - 1))
    best = w0
    for step in (1e-2, 1e-4):
        simplex = np.vstack([np.zeros(n - 1), step * np.eye(n - 1)])
        res = minimize(objective, np.zeros(n - 1), method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": 1e-12, "fatol": 1e-14,
                                "maxiter": 4000})
        if res.fun < start:
            cand = point(res.x)
            if _uncovered(cand, caps):
                return cand / np.linalg.norm(cand)
    return best


def cover_s2(caps: Sequence[SphericalCap], tol_push: float = TOL_PUSH,
             refine: bool = True) -> CoverageVerdict:
    """Decide whether closed/open caps cover the 2-sphere.

    The uncovered region, when it has inradius above ``tol_push``, is bounded
    by arcs of cap boundaries; every boundary circle is therefore reduced to a
    1-D coverage problem and the midpoint of each uncovered sub-arc, pushed
    just outside its cap, is tested as a witness.
    """
    for c in caps:
        if c.dim != 3:
            raise DimensionMismatch(f"expected a cap on S^2, got axis of dimension {c.dim}")
    caps = list(caps)
    note = f"boundary-witness method, push {tol_push:g} rad"
    if not caps:
        return CoverageVerdict(Status.UNCOVERED, witness=np.array([0.0, 0.0, 1.0]),
                               clearance=math.pi, method="s2-boundary", notes=[note])
    if any(c.half_angle >= math.pi and c.boundary is Topology.CLOSED for c in caps):
        return CoverageVerdict(Status.COVERED, method="s2-boundary", notes=[note])

    point_candidates = []
    for i, cap in enumerate(caps):
        others = caps[:i] + caps[i + 1:]
        full, ivs = boundary_intervals(cap, others)
        if full:
            continue
        covered, gaps = _s1_gaps(ivs, TOL_ANGLE)
        if covered:
            continue
        for lo, hi in sorted(gaps, key=lambda g: g[0] - g[1]):
            mid = 0.5 * (lo + hi)
            if hi > lo and cap.half_angle + tol_push < math.pi:
                w = _boundary_point(cap, mid, tol_push)
                if _uncovered(w, caps):
                    return _finish(w, caps, refine, note)
            if cap.boundary is Topology.OPEN:
                point_candidates.append(_boundary_point(cap, mid))
    for cap in caps:
        w = -cap.axis
        if _uncovered(w, caps):
            return _finish(w, caps, refine, note)
    for w in point_candidates:
        if _uncovered(w, caps):
            return CoverageVerdict(Status.UNCOVERED, witness=w, clearance=0.0,
                                   method="s2-boundary",
                                   notes=[note, "witness lies on an open cap boundary"])
    return CoverageVerdict(Status.COVERED, method="s2-boundary", notes=[note])


def _finish(w, caps, refine, note) -> CoverageVerdict:
    if refine:
        w = _refine_witness(w, caps)
    return CoverageVerdict(Status.UNCOVERED, witness=w, clearance=_clearance(w, caps),
                           method="s2-boundary", notes=[note])


# ---------------------------------------------------------------------------
# sampling


def fibonacci_sphere(count: int) -> NDArray[np.float64]:
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    golden = math.pi * (3.0 - math.sqrt(5.0))
    phi = golden * i
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def direction_samples(dim: int, count: int, seed: int | None = None,
                      random_count: int = 0) -> NDArray[np.float64]:
    """Deterministic low-discrepancy directions, optionally followed by a seeded batch."""
    if dim == 2:
        t = (np.arange(count) + 0.5) * (TWO_PI / count)
        pts = np.column_stack([np.cos(t), np.sin(t)])
    elif dim == 3:
        pts = fibonacci_sphere(count)
    else:
        sampler = qmc.Halton(d=dim, scramble=False)
        sampler.fast_forward(1)
        g = ndtri(sampler.random(count))
        pts = g / np.linalg.norm(g, axis=1, keepdims=True)
    if random_count:
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((random_count, dim))
        pts = np.vstack([pts, g / np.linalg.norm(g, axis=1, keepdims=True)])
    return pts


def covered_mask(points: NDArray[np.float64], caps: Sequence[SphericalCap],
                 chunk: int = 200_000) -> NDArray[np.bool_]:
    if not caps:
        return np.zeros(len(points), dtype=bool)
    axes = np.array([c.axis for c in caps])
    closed = np.array([c.boundary is Topology.CLOSED for c in caps])
    h = np.array([c.half_angle for c in caps])
    thr = np.where(closed, np.cos(np.minimum(h + TOL_GEOM, math.pi)),
                   np.cos(np.maximum(h - TOL_GEOM, 0.0)))
    out = np.empty(len(points), dtype=bool)
    for k in range(0, len(points), chunk):
        dots = points[k:k + chunk] @ axes.T
        hit = np.where(closed, dots >= thr, dots > thr)
        out[k:k + chunk] = hit.any(axis=1)
    return out


def cover_sample(caps: Sequence[SphericalCap], samples: int, seed: int | None = None,
                 random_samples: int = 0, dim: int | None = None) -> CoverageVerdict:
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if dim is None:
        if not caps:
            raise DimensionMismatch("dimension required for an empty cap set")
        dim = caps[0].dim
    pts = direction_samples(dim, samples, seed, random_samples)
    mask = covered_mask(pts, caps)
    miss = np.flatnonzero(~mask)
    frac = float(len(miss)) / len(pts)
    if len(miss) == 0:
        return CoverageVerdict(Status.ESTIMATED, uncovered_fraction=0.0, method="sample",
                               samples=len(pts))
    for idx in miss:
        w = pts[idx]
        if _uncovered(w, caps):
            return CoverageVerdict(Status.UNCOVERED, witness=w, clearance=_clearance(w, caps),
                                   uncovered_fraction=frac, method="sample", samples=len(pts))
    return CoverageVerdict(Status.ESTIMATED, uncovered_fraction=frac, method="sample",
                           samples=len(pts),
                           notes=["sampled misses all sit on cap boundaries"])


# ---------------------------------------------------------------------------
# configurations


def configuration_caps(config: Configuration, viewpoint=None) -> list[SphericalCap]:
    v = np.zeros(config.dimension) if viewpoint is None else np.asarray(viewpoint, float)
    caps = []
    for i, b in enumerate(config.balls):
        try:
            caps.extend(occlusion_caps(b, v, config.mode, config.topology))
        except ViewpointInsideBall as exc:
            raise OriginInsideBall(f"ball {i}: {exc}") from exc
    return caps


def great_circle_intervals(caps: Sequence[SphericalCap], normal) -> list[AngularInterval]:
    """Restrict caps on S^2 to the great circle orthogonal to ``normal``.

    Angles are measured from the first tangent vector of ``_tangent_basis``;
    for ``normal = (0, 0, 1)`` that is the usual longitude in the xOy plane.
    """
    nrm = np.asarray(normal, dtype=float)
    nrm = nrm / np.linalg.norm(nrm)
    if np.allclose(np.abs(nrm), [0, 0, 1]):
        e1, e2 = np.array([1.0, 0, 0]), np.array([0, 1.0, 0]) * np.sign(nrm[2])
    else:
        e1, e2 = _tangent_basis(nrm)
    circle = SphericalCap(nrm, math.pi / 2)
    full, raw = boundary_intervals(circle, caps)
    if full:
        return [AngularInterval(0.0, TWO_PI)]
    # boundary_intervals parametrises with its own basis; rotate to (e1, e2)
    b1, _ = _tangent_basis(nrm)
    shift = math.atan2(float(np.dot(b1, e2)), float(np.dot(b1, e1)))
    return [AngularInterval(iv.lo + shift, iv.hi + shift, iv.boundary) for iv in raw]


def verify_witness(config: Configuration, witness, viewpoint=None) -> bool:
    v = np.zeros(config.dimension) if viewpoint is None else viewpoint
    w = np.asarray(witness, dtype=float)
    w = w / np.linalg.norm(w)
    return not any(hits_ball(w, v, b, config.mode, config.topology) for b in config.balls)


def shadow_verdict(config: Configuration, samples: int = DEFAULT_SAMPLES,
                   seed: int | None = None, random_samples: int = 0) -> CoverageVerdict:
    """Does every line (or ray) through the origin meet some ball?"""
    caps = configuration_caps(config)
    n = config.dimension
    if n == 2:
        verdict = cover_s1(caps_to_intervals(caps))
    elif n == 3:
        verdict = cover_s2(caps)
    else:
        verdict = cover_sample(caps, samples, seed=seed, random_samples=random_samples, dim=n)
    if verdict.status is Status.UNCOVERED and not verify_witness(config, verdict.witness):
        raise WitnessVerificationError(
            f"witness {verdict.witness} hits a ball under the exact per-ball test"
        )
    return verdict
