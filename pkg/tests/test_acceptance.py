"""Acceptance checks 1 to 12.

Each check returns ``(passed, detail)`` and is reported as one line, red or
green, with the measured margins.  Run directly for a plain summary::

    python3 tests/test_acceptance.py
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from oracles import ob_linear_solve  # noqa: E402

from umbra.analysis import (  # noqa: E402
    QUOTED_TEN_BALL_GAP,
    derive_claims,
    equator_report,
    fig2_chain,
    find_avoiding_line,
    find_avoiding_ray,
    formula_ob,
    region_scan,
    semiconvex_region_predicate,
    verify_triangle_hull,
)
from umbra.constructions import (  # noqa: E402
    SimplexParams,
    TriangleSides,
    extremal_two_ball,
    homothety_double,
    place_on_sphere,
    tangent_simplex_family,
    ten_ball_family,
)
from umbra.coverage import (  # noqa: E402
    caps_to_intervals,
    configuration_caps,
    cover_s1,
    cover_s2,
    cover_sample,
    shadow_verdict,
    verify_witness,
)
from umbra.errors import EmbeddingFailed, ImagesOverlap, NoRayFound, TooManyBalls  # noqa: E402
from umbra.geom import (  # noqa: E402
    Ball,
    ConvexBody,
    Mode,
    SphericalCap,
    Topology,
    line_hits_ball,
    ray_hits_polytope,
    validate_configuration,
)

SQRT2_2 = math.sqrt(2) / 2


def c1():
    t0 = time.perf_counter()
    cfg, rep = extremal_two_ball(1e-3)
    e_r2 = abs(rep.r2 - (math.sqrt(5) - 2))
    e_off = abs(rep.max_offset - (3 - math.sqrt(5)) / 2)
    disjoint = validate_configuration(cfg).ok
    covered = cover_s1(caps_to_intervals(configuration_caps(cfg))).covered and cfg.mode is Mode.LINE
    dt = time.perf_counter() - t0
    ok = e_r2 <= 1e-12 and e_off <= 1e-12 and disjoint and covered and dt < 1
    return ok, f"|dr2|={e_r2:.1e} |doffset|={e_off:.1e} disjoint={disjoint} covered={covered} {dt:.2f}s"


def c2():
    t0 = time.perf_counter()
    rs = np.linspace(0.0099, 0.99, 100)
    e_eq = max(abs(formula_ob(r, r) - 1) for r in rs)
    grid = np.linspace(0.01, 0.99, 100)
    e_or = 0.0
    for r1 in grid:
        for r2 in grid:
            a, b = max(r1, r2), min(r1, r2)
            e_or = max(e_or, abs(formula_ob(a, b) - ob_linear_solve(a, b)))
    dt = time.perf_counter() - t0
    ok = e_eq <= 1e-10 and e_or <= 1e-10 and dt < 5
    return ok, f"max|ob(r,r)-1|={e_eq:.1e} max|ob-oracle|={e_or:.1e} {dt:.2f}s"


def c3():
    t0 = time.perf_counter()
    rep = derive_claims()
    dt = time.perf_counter() - t0
    low, high = rep.claims
    ok = rep.passed and dt < 30
    return ok, (f"(i) {'pass' if low.passed else 'fail'} margin {low.margin:+.6f} at r2={low.location:.6f}; "
                f"(ii) {'pass' if high.passed else 'fail'} margin {high.margin:+.6f} at r2={high.location:.6f}; "
                f"{dt:.1f}s")


FIG2_PRINTED = {
    "o1k_min": 1.1858, "o1k_max": 1.7113, "ko2_max": 0.9826, "ko2_min": 0.7029,
    "ok_min": 0.1858, "ok_max": 0.7113, "nl_min": 0.4654, "nl_max": 0.5216,
    "sin_half_alpha_max": 0.6621, "half_alpha_max": 0.7236, "alpha_max": 1.4472,
    "two_alpha_max": 2.8945,
}


def c4():
    got = fig2_chain()
    worst = max(abs(got[k] - v) for k, v in FIG2_PRINTED.items())
    ok = worst <= 2e-4 and got["two_alpha_max"] < math.pi
    return ok, f"max endpoint error {worst:.1e}; 2*alpha_max={got['two_alpha_max']:.4f} < pi"


def c5():
    t0 = time.perf_counter()
    parts, ok = [], True
    for n in (2, 3):
        cfg = tangent_simplex_family(SimplexParams(n, 1e-2, 1e-4, Topology.CLOSED))
        disjoint = validate_configuration(cfg).ok
        v = shadow_verdict(cfg)
        good = disjoint and v.covered and cfg.mode is Mode.LINE
        ok &= good
        extra = "" if v.covered else f" witness clearance {v.clearance:.1e}"
        parts.append(f"n={n} disjoint={disjoint} {v.status.value}{extra}")
    for n in (4, 5):
        cfg = tangent_simplex_family(SimplexParams(n, 1e-2, 1e-4, Topology.CLOSED))
        v = cover_sample(configuration_caps(cfg), 10**6)
        ok &= v.uncovered_fraction == 0
        parts.append(f"n={n} uncovered_fraction={v.uncovered_fraction:.4g}")
    dt = time.perf_counter() - t0
    ok &= dt < 60
    return ok, "; ".join(parts) + f"; {dt:.1f}s"


def admissible_triples(count, seed=0):
    rng = np.random.default_rng(seed)
    out, rejected = [], 0
    while len(out) < count:
        r2 = rng.uniform(SQRT2_2, 1.0)
        r1 = rng.uniform(r2, 1.0)
        r3 = rng.uniform(0.0, r2)
        try:
            cfg = place_on_sphere([r1, r2, r3], dim=3, topology=Topology.CLOSED, mode=Mode.LINE)
        except EmbeddingFailed:
            rejected += 1
            continue
        out.append(cfg)
    return out, rejected


def c6():
    configs, rejected = admissible_triples(50)
    bad, min_clear = 0, math.inf
    for cfg in configs:
        v = shadow_verdict(cfg)
        if v.covered or v.witness is None or not verify_witness(cfg, v.witness):
            bad += 1
        else:
            min_clear = min(min_clear, v.clearance)
    return bad == 0, f"{50 - bad}/50 uncovered with verified witness; min clearance {min_clear:.3f}; {rejected} draws rejected"


def c7():
    rng = np.random.default_rng(7)
    failures, refused = 0, 0
    for n in (2, 3, 4):
        for _ in range(200):
            x = rng.normal(size=n)
            balls = []
            for _ in range(rng.integers(0, n)):
                c = x + rng.normal(size=n) * 2
                balls.append(Ball(c, rng.uniform(0.1, 0.95) * np.linalg.norm(c - x)))
            u = find_avoiding_line(x, balls)
            if any(line_hits_ball(u, x, b, Topology.CLOSED) for b in balls):
                failures += 1
        x = np.zeros(n)
        full = [Ball(np.eye(n)[i] * 2, 0.5) for i in range(n)]
        try:
            find_avoiding_line(x, full)
        except TooManyBalls:
            refused += 1
    return failures == 0 and refused == 3, f"{600 - failures}/600 verified; TooManyBalls raised for {refused}/3 dimensions"


def c8():
    pred = semiconvex_region_predicate(1.1, 1.05).inside
    hull = verify_triangle_hull(TriangleSides(1.1, 1.05, 1.0), 25)
    inside = sum(r[2] for r in region_scan(grid=400, lo=1.0, hi=3.0))
    ok = pred and hull.passed and hull.samples == 25 and inside >= 1
    return ok, f"predicate={pred} hull={hull.passed} ({hull.samples} samples); {inside} interior grid points"


def random_polytopes(rng, n, x):
    bodies, count = [], int(rng.integers(1, n + 1))
    while len(bodies) < count:
        d = rng.normal(size=n)
        c = x + d / np.linalg.norm(d) * rng.uniform(1.0, 3.0)
        V = c + rng.uniform(-0.9, 0.9, size=(rng.integers(n + 1, 9), n))
        body = ConvexBody(V)
        if not body.contains(x):
            bodies.append(body)
    return bodies


def c9():
    rng = np.random.default_rng(9)
    failures = 0
    for n in (2, 3):
        for _ in range(100):
            x = rng.normal(size=n) * 0.5
            bodies = random_polytopes(rng, n, x)
            try:
                u = find_avoiding_ray(x, bodies)
            except NoRayFound:
                failures += 1
                continue
            if any(ray_hits_polytope(u, x, b, Topology.CLOSED) for b in bodies):
                failures += 1
    segs = [ConvexBody([[-1, -1], [2, -1]]), ConvexBody([[2, -1], [-1, 2]]), ConvexBody([[-1, 2], [-1, -1]])]
    try:
        find_avoiding_ray([0, 0], segs, max_samples=2**18)
        enclosed = False
    except NoRayFound:
        enclosed = True
    return failures == 0 and enclosed, f"{200 - failures}/200 verified; enclosure gives NoRayFound={enclosed}"


def c10():
    tangent = equator_report(ten_ball_family("tangent"))
    printed = equator_report(ten_ball_family("printed"))
    widths = printed.widths
    count_ok = len(widths) == 4
    width_ok = bool(widths) and all(abs(w - QUOTED_TEN_BALL_GAP) <= 1e-6 for w in widths)
    ok = tangent.covered and tangent.off_equator_blocked and count_ok and width_ok
    meas = f"{min(widths):.7f}" if widths else "n/a"
    return ok, (f"tangent covered={tangent.covered} off-equator blocked={tangent.off_equator_blocked}; "
                f"printed: {len(widths)} gaps (want 4) of width {meas} (want {QUOTED_TEN_BALL_GAP} +- 1e-6), "
                f"discrepancy {printed.discrepancy:+.2e}")


def c11():
    parts, ok = [], True
    for n in (2, 3):
        base = tangent_simplex_family(SimplexParams(n, 1e-2, 1e-4))
        try:
            doubled = homothety_double(base, -0.4)
        except ImagesOverlap as exc:
            ok = False
            parts.append(f"n={n}: {exc}")
            continue
        v = shadow_verdict(doubled)
        good = v.covered and doubled.mode is Mode.RAY and len(doubled.balls) <= 2 * n + 2
        ok &= good
        parts.append(f"n={n}: {v.status.value} with {len(doubled.balls)} balls")
    return ok, "; ".join(parts)


def random_caps(rng, dim, count, lo, hi):
    caps = []
    for _ in range(count):
        a = rng.normal(size=dim)
        topo = Topology.OPEN if rng.random() < 0.5 else Topology.CLOSED
        caps.append(SphericalCap(a / np.linalg.norm(a), rng.uniform(lo, hi), topo))
    return caps


def agrees(exact, frac):
    if exact.covered == (frac == 0):
        return True
    return not exact.covered and exact.clearance < 1e-3 and frac < 1e-4


def c12(seed=0):
    rng = np.random.default_rng(seed)
    bad1 = bad2 = 0
    notes = []
    for _ in range(200):
        caps = random_caps(rng, 2, int(rng.integers(3, 8)), 0.3, 1.5)
        s = cover_sample(caps, 10**5)
        bad1 += not agrees(cover_s1(caps_to_intervals(caps)), s.uncovered_fraction)
    for _ in range(200):
        caps = random_caps(rng, 3, int(rng.integers(10, 31)), 0.5, 1.3)
        s = cover_sample(caps, 10**5)
        exact = cover_s2(caps)
        if not agrees(exact, s.uncovered_fraction):
            bad2 += 1
            # recheck at ten times the density to tell a sampler miss from a decider error
            dense = cover_sample(caps, 10**6).uncovered_fraction
            notes.append(f"exact {exact.status.value} clearance {exact.clearance:.1e}, "
                         f"sampled {s.uncovered_fraction:g}, 1e6 samples {dense:g}")
    detail = f"S1 {200 - bad1}/200 agree; S2 {200 - bad2}/200 agree (seed {seed})"
    if notes:
        detail += "; disagreements: " + "; ".join(notes)
    return bad1 == 0 and bad2 == 0, detail


CRITERIA = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12]


def run(number):
    passed, detail = CRITERIA[number - 1]()
    return passed, f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"


@pytest.mark.parametrize("number", range(1, 13))
def test_criterion(number, criterion_log):
    passed, line = run(number)
    criterion_log.append(line)
    print(line)
    assert passed, line


if __name__ == "__main__":
    results = [run(i) for i in range(1, 13)]
    for _, line in results:
        print(line)
    print(f"{sum(p for p, _ in results)}/12 criteria pass")
