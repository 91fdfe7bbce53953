"""Configuration files, reports and CSV output."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__
from .coverage import TOL_PUSH, CoverageVerdict, Status
from .errors import UmbraError
from .geom import (
    TOL_ANGLE,
    TOL_GEOM,
    TOL_ONSPHERE,
    TOL_TANGENCY,
    Ball,
    Configuration,
    Mode,
    Topology,
    ValidationReport,
    miss_distances,
)


class ConfigError(UmbraError, ValueError):
    pass


def config_to_dict(config: Configuration) -> dict:
    return {
        "dimension": config.dimension,
        "sphere_radius": config.sphere_radius,
        "mode": config.mode.value,
        "topology": config.topology.value,
        "centers_free": config.centers_free,
        "balls": [
            {"center": [float(x) for x in b.center], "radius": b.radius}
            for b in config.balls
        ],
    }


def config_from_dict(data: Any) -> Configuration:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    try:
        dim = data["dimension"]
        balls = data["balls"]
    except KeyError as exc:
        raise ConfigError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise ConfigError("dimension must be an integer")
    if not isinstance(balls, list):
        raise ConfigError("balls must be a list")
    unknown = set(data) - {"dimension", "sphere_radius", "mode", "topology", "centers_free", "balls"}
    if unknown:
        raise ConfigError(f"unknown fields: {sorted(unknown)}")
    try:
        parsed = []
        for i, b in enumerate(balls):
            if not isinstance(b, dict) or set(b) != {"center", "radius"}:
                raise ConfigError(f"ball {i} must have exactly 'center' and 'radius'")
            parsed.append(Ball(b["center"], b["radius"]))
        return Configuration(
            dimension=dim,
            balls=parsed,
            sphere_radius=float(data.get("sphere_radius", 1.0)),
            mode=Mode(data.get("mode", "line")),
            topology=Topology(data.get("topology", "closed")),
            centers_free=bool(data.get("centers_free", False)),
        )
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def dumps_config(config: Configuration) -> str:
    return json.dumps(config_to_dict(config), indent=2) + "\n"


def loads_config(text: str) -> Configuration:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return config_from_dict(data)


def read_config(path: str | Path) -> Configuration:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return loads_config(text)


def write_text(path: str | Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_config(path: str | Path, config: Configuration) -> None:
    write_text(path, dumps_config(config))


def tolerances(**overrides) -> dict[str, float]:
    tols = {
        "tol_geom": TOL_GEOM,
        "tol_onsphere": TOL_ONSPHERE,
        "tol_tangency": TOL_TANGENCY,
        "tol_angle": TOL_ANGLE,
        "tol_push": TOL_PUSH,
    }
    tols.update({k: v for k, v in overrides.items() if v is not None})
    return tols


def build_report(config: Configuration, verdict: CoverageVerdict, validation: ValidationReport,
                 seed: int | None = None, samples: int | None = None,
                 tols: dict | None = None) -> dict:
    report = {
        "verdict": verdict.to_dict(),
        "validation": validation.to_dict(),
        "provenance": {
            "tool": "umbra",
            "version": __version__,
            "seed": seed,
            "samples": samples,
            "tolerances": tols or tolerances(),
        },
    }
    if verdict.status is Status.UNCOVERED:
        report["miss_distances"] = miss_distances(config, verdict.witness)
    return report


def format_report(config: Configuration, report: dict) -> str:
    v = report["verdict"]
    val = report["validation"]
    lines = [
        f"configuration: n={config.dimension}, {len(config.balls)} balls, "
        f"mode={config.mode.value}, topology={config.topology.value}",
        f"verdict: {v['status'].upper()} ({v['method']})",
    ]
    if v["witness"] is not None:
        lines.append("witness: [" + ", ".join(f"{x:.12g}" for x in v["witness"]) + "]")
        lines.append(f"clearance: {v['clearance']:.6g} rad")
    if v["uncovered_fraction"] is not None:
        lines.append(f"uncovered fraction: {v['uncovered_fraction']:.6g} over {v['samples']} samples")
    if v["gaps"]:
        widths = ", ".join(f"{hi - lo:.6f}" for lo, hi in v["gaps"])
        lines.append(f"gaps ({len(v['gaps'])}): {widths}")
    for note in v["notes"]:
        lines.append(f"note: {note}")
    if "miss_distances" in report:
        lines.append("miss distances: " + ", ".join(f"{d:.6g}" for d in report["miss_distances"]))
    lines.append(
        f"validation: on_sphere={val['centers_on_sphere']} radii_ok={val['radii_ok']} "
        f"disjoint={val['disjoint']} tangent_pairs={len(val['tangent_pairs'])}"
    )
    if val["off_sphere"]:
        lines.append(f"  off-sphere balls: {val['off_sphere']}")
    if val["bad_radii"]:
        lines.append(f"  radius violations: {val['bad_radii']}")
    if val["overlapping"]:
        lines.append(f"  overlapping pairs: {val['overlapping']}")
    prov = report["provenance"]
    lines.append(f"umbra {prov['version']}, seed={prov['seed']}")
    return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return "nan" if math.isnan(x) else repr(x)
    return str(x)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigError(f"{path} is empty")
    return rows[0], rows[1:]
