"""
Closed-form quantities, numeric scans and constructive finders.

The |OB| formula and its scans bound the third radius needed for three
tangent balls on the 2-sphere; the finders construct lines (or rays) that
avoid few convex obstacles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial import ConvexHull, QhullError

from .constructions import TriangleSides, triangle_family
from .coverage import (
    AngularInterval,
    Status,
    _s1_gaps,
    caps_to_intervals,
    configuration_caps,
    cover_s1,
    direction_samples,
    fibonacci_sphere,
    great_circle_intervals,
)
from .errors import (
    DomainError,
    NoRayFound,
    PointInsideBall,
    PointInsideBody,
    PredicateFailed,
    TooManyBalls,
    UnsupportedDimension,
)
from .geom import (
    TOL_ANGLE,
    Ball,
    Configuration,
    ConvexBody,
    Topology,
    hits_ball,
    line_hits_ball,
    ray_hits_polytope,
)

SQRT2_2 = math.sqrt(2.0) / 2.0
PERIMETER_BOUND = 1.5 * math.sqrt(3.0)


# ---------------------------------------------------------------------------
# |OB| and the third-radius scans


def _theta(r1, r2):
    return 2.0 * np.arcsin((r1 + r2) / 2.0)


def _ob(r1, r2):
    t = _theta(r1, r2)
    num = 2 - r1**2 - r2**2 - 2 * np.sqrt(1 - r1**2) * np.sqrt(1 - r2**2) * np.cos(t)
    return np.sqrt(num) / np.sin(t)


def formula_ob(r1: float, r2: float) -> float:
    """Half the diagonal BC of the parallelogram cut by two tangent balls' strips."""
    if not (0 < r2 <= r1 < 1 and r1 + r2 < 2):
        raise DomainError(f"need 0 < r2 <= r1 < 1, got r1={r1}, r2={r2}")
    if math.sin(2 * math.asin((r1 + r2) / 2)) <= 1e-12:
        raise DomainError("angle between the centres is degenerate")
    return float(_ob(r1, r2))


@dataclass
class ScanRecord:
    r1: float
    r2: float
    ob: float
    sum_with_min_r3: float
    theta: float


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-9) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def min_r3_scan(r2: float, r1_grid: int = 1000, r2_min: float = SQRT2_2) -> ScanRecord:
    """Minimise |OB| over r1 in [r2, 1) for fixed r2.

    Uniform grid followed by golden-section refinement around the best grid
    point.  ``r1_grid == 1`` evaluates only r1 = r2.
    """
    if not (r2_min <= r2 < 1):
        raise DomainError(f"r2 must lie in [{r2_min:.6f}, 1), got {r2}")
    if r1_grid < 1:
        raise DomainError("r1_grid must be positive")
    if r1_grid == 1:
        r1 = r2
    else:
        grid = r2 + (1.0 - r2) * np.arange(r1_grid) / r1_grid
        vals = _ob(grid, r2)
        i = int(np.argmin(vals))
        lo = grid[max(i - 1, 0)]
        hi = grid[i + 1] if i + 1 < r1_grid else 1.0 - 1e-12
        r1 = golden_section(lambda x: float(_ob(x, r2)), lo, hi)
        if _ob(r1, r2) > vals[i]:
            r1 = float(grid[i])
    ob = formula_ob(r1, r2)
    return ScanRecord(r1=float(r1), r2=float(r2), ob=ob, sum_with_min_r3=r1 + r2 + ob,
                      theta=float(_theta(r1, r2)))


@dataclass
class Claim:
    name: str
    passed: bool
    threshold: float
    margin: float
    location: float
    checked: int


@dataclass
class ClaimsReport:
    claims: list[Claim]
    perimeter_bound: float = PERIMETER_BOUND
    records: list[ScanRecord] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)


def r2_sweep(r2_min: float = SQRT2_2, r2_max: float = 0.999, step: float = 1e-3) -> NDArray[np.float64]:
    count = int(math.floor((r2_max - r2_min) / step + 1e-9)) + 1
    return r2_min + step * np.arange(count)


def derive_claims(step: float = 1e-3, r2_min: float = SQRT2_2, r2_max: float = 0.999,
                  r1_grid: int = 1000) -> ClaimsReport:
    """Check the two numerical claims about the minimal third radius.

    (i) r2 < 0.77 forces |OB| > 0.77; (ii) r2 > 0.85 forces
    r1 + r2 + |OB| > 2.6, which exceeds the inscribed-triangle bound 1.5*sqrt(3).
    """
    records = [min_r3_scan(float(r2), r1_grid, r2_min) for r2 in r2_sweep(r2_min, r2_max, step)]
    low = [r for r in records if r.r2 < 0.77]
    high = [r for r in records if r.r2 > 0.85]
    claims = []
    worst = min(low, key=lambda r: r.ob - 0.77)
    claims.append(Claim("r2<0.77 => min r3 > 0.77", all(r.ob > 0.77 for r in low), 0.77,
                        worst.ob - 0.77, worst.r2, len(low)))
    worst = min(high, key=lambda r: r.sum_with_min_r3 - 2.6)
    claims.append(Claim("r2>0.85 => r1+r2+r3 > 2.6",
                        all(r.sum_with_min_r3 > 2.6 for r in high) and 2.6 > PERIMETER_BOUND,
                        2.6, worst.sum_with_min_r3 - 2.6, worst.r2, len(high)))
    return ClaimsReport(claims, records=records)


@dataclass
class Fig2Quantities:
    o1k: float
    ko2: float
    ok: float
    nl: float
    sin_half_alpha: float
    alpha: float

    @property
    def half_alpha(self) -> float:
        return self.alpha / 2

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["half_alpha"] = self.half_alpha
        return d


def fig2_quantities(r1: float, r2: float) -> Fig2Quantities:
    """Circle cut from the plane xOy by the second ball, and its view angle."""
    s = r1 + r2
    if not 0 < s < 2:
        raise DomainError(f"need 0 < r1 + r2 < 2, got {s}")
    o1k = s * s / 2
    ko2 = s * math.sqrt(1 - s * s / 4)
    ok = o1k - 1
    rad = r2 * r2 - ok * ok
    if rad < 0:
        raise DomainError(f"ball of radius {r2} misses the plane (|OK| = {ok:.6f})")
    nl = math.sqrt(rad)
    sin_half = nl / ko2
    if sin_half > 1:
        raise DomainError("view angle undefined: |NL| > |OL|")
    return Fig2Quantities(o1k, ko2, ok, nl, sin_half, 2 * math.asin(sin_half))


# evaluation points of the printed chain: (r1, r2)
FIG2_POINTS = {
    "s_min": (0.77, 0.77),
    "s_max": (1.0, 0.85),
    "r2_min_r1_max": (1.0, 0.77),
}


def fig2_chain() -> dict[str, float]:
    """The interval endpoints of the chain, each evaluated at its extremal parameters."""
    lo = fig2_quantities(*FIG2_POINTS["s_min"])
    hi = fig2_quantities(*FIG2_POINTS["s_max"])
    mid = fig2_quantities(*FIG2_POINTS["r2_min_r1_max"])
    return {
        "o1k_min": lo.o1k, "o1k_max": hi.o1k,
        "ko2_max": lo.ko2, "ko2_min": hi.ko2,
        "ok_min": lo.ok, "ok_max": hi.ok,
        "nl_min": hi.nl, "nl_max": mid.nl,
        "sin_half_alpha_max": hi.sin_half_alpha,
        "half_alpha_max": hi.half_alpha,
        "alpha_max": hi.alpha,
        "two_alpha_max": 2 * hi.alpha,
    }


def fig2_sweep(r2_range=(0.77, 0.85), s_range=(1.54, 1.85), r1_max: float = 1.0,
               r1_min: float | None = None, n: int = 201) -> dict[str, float]:
    """Maximise sin(alpha/2) over r2 in ``r2_range`` and admissible r1.

    With ``r1_min == r1_max == 1`` the sweep follows the edge r1 = 1.
    """
    best = (-1.0, None, None)
    for r2 in np.linspace(*r2_range, n):
        lo = r2 if r1_min is None else r1_min
        for r1 in np.linspace(lo, r1_max, n):
            if not (s_range[0] - 1e-12 <= r1 + r2 <= s_range[1] + 1e-12):
                continue
            try:
                q = fig2_quantities(float(r1), float(r2))
            except DomainError:
                continue
            if q.sin_half_alpha > best[0]:
                best = (q.sin_half_alpha, float(r1), float(r2))
    sh, r1, r2 = best
    alpha = 2 * math.asin(sh)
    return {"sin_half_alpha": sh, "alpha": alpha, "two_alpha": 2 * alpha, "r1": r1, "r2": r2}


# ---------------------------------------------------------------------------
# acute triangles with tangent vertex circles


@dataclass
class RegionReport:
    inside: bool
    ordered: bool
    triangle: bool
    acute: bool
    radius_ok: bool
    circumradius: float
    p_minus_c: float
    residual: float

    def __bool__(self) -> bool:
        return self.inside


def _region_arrays(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    q = (x + y + 1) * (-x + y + 1) * (x - y + 1) * (x + y - 1)
    ordered = (x > y) & (y > 1)
    triangle = (x < y + 1) & (q > 0)
    acute = (x * x < y * y + 1) & (y * y < x * x + 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        sq = np.sqrt(np.where(q > 0, q, np.nan))
        R = x * y / sq
        residual = (x + y - 1) - 2 * x * y / sq
    pmc = (x + y - 1) / 2
    radius_ok = np.where(triangle, R > pmc, False)
    inside = ordered & triangle & acute & radius_ok
    return inside, ordered, triangle, acute, radius_ok, R, pmc, residual


def semiconvex_region_predicate(x: float, y: float) -> RegionReport:
    """Sides (x, y, 1) admit a ray-blocking triple of tangent vertex circles.

    Requires x > y > 1, a strict acute triangle and circumradius R > p - c,
    so the circumcentre is inside the triangle and outside all circles.
    The residual is that of ``x + y - 1 = 2xy / sqrt(Q)``, whose zero set is
    the boundary R = p - c.
    """
    vals = _region_arrays(x, y)
    inside, ordered, triangle, acute, radius_ok, R, pmc, residual = (v.item() for v in vals)
    return RegionReport(bool(inside), bool(ordered), bool(triangle), bool(acute),
                        bool(radius_ok), float(R), float(pmc), float(residual))


def region_scan(grid: int = 400, lo: float = 1.0, hi: float = 3.0) -> list[tuple[float, float, bool, float]]:
    xs = np.linspace(lo, hi, grid)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    inside, *_, residual = _region_arrays(X, Y)
    return [(float(X.flat[i]), float(Y.flat[i]), bool(inside.flat[i]), float(residual.flat[i]))
            for i in range(X.size)]


@dataclass
class HullReport:
    sides: tuple[float, float, float]
    identity_residual: float
    circumcenter_interior: bool
    circumcenter_clearance: float
    circumcenter_clearance_unit: float
    samples: int
    in_discs: int
    blocked: int

    @property
    def passed(self) -> bool:
        return self.circumcenter_interior and self.circumcenter_clearance > 0 \
            and self.blocked + self.in_discs == self.samples and self.identity_residual < 1e-12


def _barycentric_points(vertices: NDArray[np.float64], count: int) -> NDArray[np.float64]:
    m = 3
    while (m - 1) * (m - 2) // 2 < count:
        m += 1
    pts = []
    for i in range(1, m):
        for j in range(1, m - i):
            k = m - i - j
            pts.append((i * vertices[0] + j * vertices[1] + k * vertices[2]) / m)
    return np.array(pts[:count])


def verify_triangle_hull(sides: TriangleSides, sample_count: int = 25) -> HullReport:
    """Check that every ray from the triangle interior meets a vertex circle.

    Each side is covered by its two end circles since their radii add up to
    the side length; this identity is checked, then rays from interior
    sample points are tested with the exact circle merge.
    """
    c = sides.c
    region = semiconvex_region_predicate(sides.a / c, sides.b / c)
    if not region.inside:
        raise PredicateFailed(f"sides {sides.a}, {sides.b}, {sides.c} fall outside the admissible region")
    cfg = triangle_family(sides)
    C, r = cfg.centers, cfg.radii
    identity = max(abs(np.linalg.norm(C[i] - C[j]) - r[i] - r[j]) for i, j in ((0, 1), (0, 2), (1, 2)))

    def inside_triangle(p):
        signs = []
        for i in range(3):
            e, w = C[(i + 1) % 3] - C[i], p - C[i]
            signs.append(e[0] * w[1] - e[1] * w[0])
        return all(s > 0 for s in signs) or all(s < 0 for s in signs)

    origin = np.zeros(2)
    clearance = float(min(np.linalg.norm(C, axis=1) - r))
    in_discs = blocked = 0
    pts = _barycentric_points(C, sample_count)
    for p in pts:
        if np.any(np.linalg.norm(C - p, axis=1) <= r):
            in_discs += 1
            continue
        caps = configuration_caps(cfg, viewpoint=p)
        if cover_s1(caps_to_intervals(caps)).status is Status.COVERED:
            blocked += 1
    R = sides.circumradius
    return HullReport(
        sides=(sides.a, sides.b, sides.c),
        identity_residual=float(identity),
        circumcenter_interior=inside_triangle(origin),
        circumcenter_clearance=clearance * R,
        circumcenter_clearance_unit=clearance,
        samples=len(pts),
        in_discs=in_discs,
        blocked=blocked,
    )


# ---------------------------------------------------------------------------
# avoiding lines and rays


def find_avoiding_line(x: ArrayLike, balls: Sequence[Ball]) -> NDArray[np.float64]:
    """A line through ``x`` missing at most n-1 balls in R^n.

    Each ball is separated from ``x`` by the hyperplane through ``x`` normal
    to the centre direction; any direction in the common kernel works.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if len(balls) > n - 1:
        raise TooManyBalls(f"{len(balls)} balls in R^{n}; at most {n - 1} can always be avoided")
    normals = []
    for i, b in enumerate(balls):
        w = b.center - x
        d = float(np.linalg.norm(w))
        if d <= b.radius:
            raise PointInsideBall(f"point lies in ball {i}")
        normals.append(w / d)
    if normals:
        N = np.array(normals)
        u = np.linalg.svd(N)[2][-1]
    else:
        u = np.eye(n)[0]
    u = u / np.linalg.norm(u)
    for b in balls:
        if line_hits_ball(u, x, b, Topology.CLOSED):
            raise AssertionError("kernel direction hits a ball")  # pragma: no cover
    return u


class _ConeScreen:
    """Fast vectorised membership in the cone spanned by a body from a point."""

    def __init__(self, W: NDArray[np.float64]):
        self.normals = None
        if np.linalg.matrix_rank(W, tol=1e-10) < W.shape[1]:
            return
        pts = np.vstack([np.zeros(W.shape[1]), W / np.linalg.norm(W, axis=1, keepdims=True)])
        try:
            hull = ConvexHull(pts)
        except QhullError:
            return
        eq = hull.equations
        through_origin = np.abs(eq[:, -1]) < 1e-10
        self.normals = eq[through_origin, :-1]

    def maybe_hit(self, U: NDArray[np.float64]) -> NDArray[np.bool_]:
        if self.normals is None:
            return np.zeros(len(U), dtype=bool)
        return np.all(U @ self.normals.T <= 1e-9, axis=1)


def _s2_arrangement_candidates(screens: Sequence[_ConeScreen],
                               dirs: Sequence[NDArray[np.float64]]) -> NDArray[np.float64]:
    normals = [n for s in screens if s.normals is not None for n in s.normals]
    cands = []
    for i in range(len(normals)):
        for j in range(i + 1, len(normals)):
            v = np.cross(normals[i], normals[j])
            nv = np.linalg.norm(v)
            if nv > 1e-9:
                cands.extend([v / nv, -v / nv])
    cands.extend(-d for d in dirs)
    if not cands:
        return np.zeros((0, 3))
    out = []
    offsets = [np.array([math.cos(t), math.sin(t)]) for t in np.arange(6) * math.pi / 3]
    for c in cands:
        helper = np.eye(3)[int(np.argmin(np.abs(c)))]
        e1 = np.cross(c, helper)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(c, e1)
        out.append(c)
        for rho in (1e-6, 1e-3):
            for o in offsets:
                p = math.cos(rho) * c + math.sin(rho) * (o[0] * e1 + o[1] * e2)
                out.append(p)
    return np.array(out)


def find_avoiding_ray(x: ArrayLike, bodies: Sequence[ConvexBody], max_samples: int = 2**18,
                      topology: Topology = Topology.CLOSED) -> NDArray[np.float64]:
    """A ray from ``x`` meeting none of the convex bodies.

    Guaranteed to exist for at most n bodies in R^n.  In the plane the
    visible arcs are merged exactly; in space candidates from the cone
    arrangement, antipodes and escalating Fibonacci samples are screened and
    then confirmed with the exact ray/polytope test.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n not in (2, 3):
        raise UnsupportedDimension(f"avoiding rays are searched in 2 or 3 dimensions, not {n}")
    for i, body in enumerate(bodies):
        if body.contains(x):
            raise PointInsideBody(f"point lies in body {i}")

    def verified(u):
        u = u / np.linalg.norm(u)
        return not any(ray_hits_polytope(u, x, b, topology) for b in bodies)

    if not bodies:
        return np.eye(n)[0]
    if n == 2:
        intervals = []
        for body in bodies:
            W = body.vertices - x
            ang = np.arctan2(W[:, 1], W[:, 0])
            ref = ang[0]
            rel = (ang - ref + math.pi) % (2 * math.pi) - math.pi
            lo, hi = ref + rel.min(), ref + rel.max()
            if hi - lo < 1e-12:
                lo, hi = lo - 1e-12, hi + 1e-12
            intervals.append(AngularInterval(lo, hi))
        covered, gaps = _s1_gaps(intervals, 1e-10)
        if covered:
            raise NoRayFound("visible arcs cover the whole circle")
        for lo, hi in sorted(gaps, key=lambda g: g[0] - g[1]):
            mid = 0.5 * (lo + hi)
            u = np.array([math.cos(mid), math.sin(mid)])
            if verified(u):
                return u
        raise NoRayFound("no gap midpoint survived exact verification")

    Ws = [b.vertices - x for b in bodies]
    screens = [_ConeScreen(W) for W in Ws]
    dirs = [w / np.linalg.norm(w) for W in Ws for w in W]

    def search(U):
        hit = np.zeros(len(U), dtype=bool)
        for s in screens:
            hit |= s.maybe_hit(U)
        for idx in np.flatnonzero(~hit):
            if verified(U[idx]):
                return U[idx] / np.linalg.norm(U[idx])
        return None

    found = search(_s2_arrangement_candidates(screens, dirs))
    count = min(1024, max_samples)
    while found is None:
        found = search(direction_samples(3, count))
        if count >= max_samples:
            break
        count = min(8 * count, max_samples)
    if found is None:
        raise NoRayFound(f"no avoiding ray among candidates and up to {max_samples} samples")
    return found


# ---------------------------------------------------------------------------
# equator of the ten-ball family

# gap width obtained if arcsin(3 - 2*sqrt(2)) is taken as 0.172420
QUOTED_TEN_BALL_GAP = 0.185899


@dataclass
class EquatorReport:
    covered: bool
    gaps: list[tuple[float, float]]
    off_equator_blocked: bool
    off_equator_checked: int
    quoted_gap: float = QUOTED_TEN_BALL_GAP

    @property
    def widths(self) -> list[float]:
        return [hi - lo for lo, hi in self.gaps]

    @property
    def discrepancy(self) -> float | None:
        """Largest measured gap minus the quoted value, or None when covered."""
        return max(self.widths) - self.quoted_gap if self.gaps else None

    def to_dict(self) -> dict:
        return {
            "covered": self.covered,
            "gaps": [list(g) for g in self.gaps],
            "widths": self.widths,
            "gap_count": len(self.gaps),
            "quoted_gap": self.quoted_gap,
            "discrepancy": self.discrepancy,
            "off_equator_blocked": self.off_equator_blocked,
            "off_equator_checked": self.off_equator_checked,
        }


def equator_report(config: Configuration, samples: int = 20_000) -> EquatorReport:
    """Union of the caps restricted to the plane z = 0, taken with closed arcs.

    Directions off the equator are checked on a Fibonacci set with |z| > 1e-6.
    """
    if config.dimension != 3:
        raise UnsupportedDimension("equator_report needs a configuration in R^3")
    caps = configuration_caps(config)
    arcs = [AngularInterval(iv.lo, iv.hi, Topology.CLOSED)
            for iv in great_circle_intervals(caps, [0.0, 0.0, 1.0])]
    covered, gaps = _s1_gaps(arcs, TOL_ANGLE)
    pts = fibonacci_sphere(samples)
    pts = pts[np.abs(pts[:, 2]) > 1e-6]
    origin = np.zeros(3)
    blocked = all(
        any(hits_ball(u, origin, b, config.mode, config.topology) for b in config.balls)
        for u in pts
    )
    return EquatorReport(covered, sorted(gaps), blocked, len(pts))
