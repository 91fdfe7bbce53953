"""Command-line front end: ``umbra verify|construct|scan|plot``.

Exit codes: 0 success (Covered, or all claims pass), 1 Uncovered (or a
failed claim), 2 usage, parse, validation or construction error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .analysis import (
    SQRT2_2,
    derive_claims,
    equator_report,
    fig2_chain,
    fig2_quantities,
    min_r3_scan,
    r2_sweep,
    region_scan,
)
from .constructions import (
    EXTREMAL_OFFSET,
    EXTREMAL_R2,
    SimplexParams,
    TenBallVariant,
    TriangleSides,
    extremal_two_ball,
    homothety_double,
    inner_tangent_offsets,
    largest_homothety_ratio,
    ten_ball_family,
    tangent_simplex_family,
    triangle_family,
)
from .coverage import DEFAULT_SAMPLES, Status, shadow_verdict
from .errors import UmbraError
from .geom import Configuration, Topology, validate_configuration
from .io import (
    ConfigError,
    build_report,
    csv_text,
    format_report,
    read_config,
    read_csv,
    tolerances,
    write_config,
    write_text,
)
from .plot import plot_config, plot_region

log = logging.getLogger("umbra")

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _seed(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("UMBRA_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"UMBRA_SEED must be an integer, got {env!r}") from None
    return None


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    config = read_config(args.config)
    tols = tolerances(tol_onsphere=args.tol_onsphere, tol_tangency=args.tol_tangency)
    validation = validate_configuration(config, tols["tol_onsphere"], tols["tol_tangency"])
    if not validation.ok and not args.allow_invalid:
        print(f"error: invalid configuration: {json.dumps(validation.to_dict())}", file=sys.stderr)
        return EXIT_ERROR
    seed = _seed(args)
    verdict = shadow_verdict(config, samples=args.samples, seed=seed,
                             random_samples=args.random_samples)
    report = build_report(config, verdict, validation, seed=seed,
                          samples=args.samples if config.dimension > 3 else None, tols=tols)
    if args.json:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        sys.stdout.write(format_report(config, report))
    return EXIT_FAIL if verdict.status is Status.UNCOVERED else EXIT_OK


# ---------------------------------------------------------------------------
# construct


def _tangency_table(config: Configuration) -> list[str]:
    v = validate_configuration(config)
    lines = ["pair  gap"]
    for i, j, gap in v.pair_gaps:
        mark = "  tangent" if (i, j) in v.tangent_pairs else ""
        lines.append(f"{i},{j}  {gap:+.3e}{mark}")
    lines.append(f"disjoint={v.disjoint} on_sphere={v.centers_on_sphere} radii_ok={v.radii_ok}")
    return lines


def cmd_construct(args) -> int:
    topo = Topology(args.topology)
    notes: list[str] = []
    if args.name == "simplex":
        config = tangent_simplex_family(SimplexParams(args.dim, args.epsilon, args.shrink, topo))
        notes.append(f"radii: {', '.join(f'{r:.9f}' for r in config.radii)}")
    elif args.name == "extremal2":
        config, rep = extremal_two_ball(args.eta, topo)
        notes.append(f"r2 = sqrt(5)-2 = {EXTREMAL_R2:.12f}")
        notes.append(f"max offset = (3-sqrt(5))/2 = {EXTREMAL_OFFSET:.12f}")
        notes.append(f"root residual r2^2+4r2-1 = {rep.root_residual:.3e}")
        notes.append(f"tangent segment 2*sqrt(r1 r2) = {rep.tangent_segment:.12f}")
        notes.append(f"nudge = {rep.nudge:.6e} rad")
        offs = inner_tangent_offsets(*config.balls)
        if offs:
            notes.append("inner tangent offsets: " + ", ".join(f"{d:.6f}" for d in offs))
    elif args.name == "triangle":
        sides = TriangleSides(args.a, args.b, args.c)
        config = triangle_family(sides, topo)
        notes.append(f"circumradius = {sides.circumradius:.9f}, p - c = {sides.p - sides.c:.9f}")
    elif args.name == "tenball":
        config = ten_ball_family(TenBallVariant(args.variant))
        eq = equator_report(config)
        notes.append(f"equator covered (closed arcs): {eq.covered}")
        v = validate_configuration(config)
        loose = [(i, j, g) for i, j, g in v.pair_gaps if i >= 2 and j >= 6 and abs(j - i) in (3, 4)
                 and (i, j) not in v.tangent_pairs and g < 0.5]
        if loose:
            worst = max(g for _, _, g in loose)
            notes.append(f"tangency failure: bisector balls clear their axis neighbours by up to {worst:.6f}")
        if eq.gaps:
            notes.append(f"{len(eq.gaps)} equatorial gaps of width {max(eq.widths):.7f} rad "
                         f"(quoted {eq.quoted_gap}, discrepancy {eq.discrepancy:+.2e})")
    elif args.name == "homothety":
        base = read_config(args.input)
        notes.append(f"largest admissible |k| = {-largest_homothety_ratio(base):.9f}")
        config = homothety_double(base, args.k)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(args.name)
    validation = validate_configuration(config)
    if not validation.ok:
        if validation.overlapping:
            notes.append(f"tangency failure: overlapping pairs {validation.overlapping}")
        if validation.bad_radii:
            notes.append(f"radius check failed for balls {validation.bad_radii}")
    write_config(args.out, config)
    print(f"wrote {args.out}: {config.dimension}-dimensional, {len(config.balls)} balls, "
          f"mode={config.mode.value}, topology={config.topology.value}")
    for line in _tangency_table(config) + notes:
        print(line)
    return EXIT_OK


# ---------------------------------------------------------------------------
# scan


def _emit(args, text: str) -> None:
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)


def cmd_scan(args) -> int:
    kind = args.kind
    if kind == "minr3":
        if not (SQRT2_2 <= args.r2_min <= args.r2_max < 1 and args.step > 0 and args.grid >= 1):
            raise ConfigError("need sqrt(2)/2 <= r2-min <= r2-max < 1, step > 0, grid >= 1")
        rows = []
        for r2 in r2_sweep(args.r2_min, args.r2_max, args.step):
            rec = min_r3_scan(float(r2), args.grid)
            rows.append((rec.r2, rec.r1, rec.ob, rec.sum_with_min_r3))
        _emit(args, csv_text(["r2", "r1_min", "ob", "sum"], rows))
        return EXIT_OK
    if kind == "claims":
        report = derive_claims(step=args.step, r1_grid=args.grid)
        rows = [(c.name, "pass" if c.passed else "fail", c.threshold, c.margin, c.location, c.checked)
                for c in report.claims]
        _emit(args, csv_text(["claim", "result", "threshold", "margin", "worst_r2", "checked"], rows))
        return EXIT_OK if report.passed else EXIT_FAIL
    if kind == "fig2":
        header = ["r1", "r2", "s", "o1k", "ko2", "ok", "nl", "sin_half_alpha", "half_alpha", "alpha"]
        if args.s is not None or args.r2 is not None:
            # o1k, ko2 and ok depend on s = r1 + r2 only; r2 defaults to s/2
            if args.s is not None:
                r2 = args.r2 if args.r2 is not None else args.s / 2
                r1 = args.s - r2
            else:
                r1, r2 = 1.0, args.r2
            q = fig2_quantities(r1, r2)
            rows = [(r1, r2, r1 + r2, q.o1k, q.ko2, q.ok, q.nl, q.sin_half_alpha, q.half_alpha, q.alpha)]
            _emit(args, csv_text(header, rows))
        else:
            chain = fig2_chain()
            _emit(args, csv_text(["quantity", "value"], sorted(chain.items())))
        return EXIT_OK
    if kind == "region":
        if not (args.grid >= 2 and args.hi > args.lo > 0):
            raise ConfigError("need grid >= 2 and hi > lo > 0")
        rows = region_scan(args.grid, args.lo, args.hi)
        _emit(args, csv_text(["x", "y", "inside", "residual"], rows))
        return EXIT_OK
    raise ConfigError(f"unknown scan {kind!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# plot


def cmd_plot(args) -> int:
    path = args.input
    with open(path, encoding="utf-8") as fh:
        head = fh.read(1)
    if head == "{":
        config = read_config(path)
        if config.dimension > 3:
            raise ConfigError(f"cannot plot dimension {config.dimension}")
        verdict = shadow_verdict(config)
        svg = plot_config(config, verdict)
    else:
        header, rows = read_csv(path)
        if header != ["x", "y", "inside", "residual"]:
            raise ConfigError(f"{path}: expected a region scan CSV, got header {header}")
        data = np.array([[float(r[0]), float(r[1]), float(r[2]), float(r[3])] for r in rows])
        svg = plot_region(data[:, 0], data[:, 1], data[:, 2] > 0.5, data[:, 3])
    write_text(args.out, svg)
    print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="umbra", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"umbra {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="decide whether a configuration blocks every line or ray")
    v.add_argument("config")
    v.add_argument("--json", action="store_true", help="machine-readable report")
    v.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="sample count for n > 3")
    v.add_argument("--seed", type=int, default=None, help="seed for the pseudorandom batch (else UMBRA_SEED)")
    v.add_argument("--random-samples", type=int, default=0)
    v.add_argument("--tol-onsphere", type=float, default=None)
    v.add_argument("--tol-tangency", type=float, default=None)
    v.add_argument("--allow-invalid", action="store_true", help="evaluate even if validation fails")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("construct", help="write a named construction to a config file")
    c.add_argument("name", choices=["simplex", "extremal2", "triangle", "tenball", "homothety"])
    c.add_argument("-o", "--out", required=True)
    c.add_argument("--topology", choices=["open", "closed"], default="closed")
    c.add_argument("--dim", type=int, default=3)
    c.add_argument("--epsilon", type=float, default=1e-2)
    c.add_argument("--shrink", type=float, default=1e-4)
    c.add_argument("--eta", type=float, default=1e-2)
    c.add_argument("--a", type=float, default=1.1)
    c.add_argument("--b", type=float, default=1.05)
    c.add_argument("--c", type=float, default=1.0)
    c.add_argument("--variant", choices=[x.value for x in TenBallVariant], default="printed")
    c.add_argument("--input", help="line-mode config to double (homothety)")
    c.add_argument("--k", type=float, default=-0.05, help="negative homothety ratio")
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("scan", help="numeric scans as CSV")
    s.add_argument("kind", choices=["minr3", "claims", "fig2", "region"])
    s.add_argument("-o", "--out")
    s.add_argument("--r2-min", type=float, default=SQRT2_2)
    s.add_argument("--r2-max", type=float, default=0.999)
    s.add_argument("--step", type=float, default=1e-3)
    s.add_argument("--grid", type=int, default=None, help="r1 grid (minr3, claims) or region grid")
    s.add_argument("--s", type=float, default=None, help="fig2: r1 + r2")
    s.add_argument("--r2", type=float, default=None, help="fig2: r2")
    s.add_argument("--lo", type=float, default=1.0)
    s.add_argument("--hi", type=float, default=3.0)
    s.set_defaults(func=cmd_scan)

    g = sub.add_parser("plot", help="render a config or region CSV as SVG")
    g.add_argument("input")
    g.add_argument("out")
    g.set_defaults(func=cmd_plot)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "grid", "unset") is None:
        args.grid = 400 if args.kind == "region" else 1000
    try:
        return args.func(args)
    except (UmbraError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
