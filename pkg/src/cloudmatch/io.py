"""Cloud and result file formats.

Clouds are CSV (``x,y`` header, one point per row) or JSON
(``{"label": ..., "points": [[x, y], ...]}``).  Floats are written with 17
significant digits so that reading back reproduces every bit.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .core import PointCloud, first_duplicate
from .registration import PivotSolution, RegistrationResult


class CloudFormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        where = f"{path}:" if path else ""
        where += f"line {line}: " if line is not None else (" " if path else "")
        super().__init__(f"{where}{message}")


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def dumps_csv(cloud: PointCloud) -> str:
    rows = ["x,y"]
    rows.extend(f"{format_float(x)},{format_float(y)}" for x, y in cloud.points.tolist())
    return "\n".join(rows) + "\n"


def loads_csv(text: str, path: Optional[str] = None, label: Optional[str] = None) -> PointCloud:
    lines = text.splitlines()
    if not lines or lines[0].strip().replace(" ", "") != "x,y":
        raise CloudFormatError("expected header 'x,y'", 1, path)
    pts = []
    seen: dict[tuple[float, float], int] = {}
    for n, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        fields = raw.split(",")
        if len(fields) != 2:
            raise CloudFormatError(f"expected 2 fields, got {len(fields)}", n, path)
        try:
            x, y = float(fields[0]), float(fields[1])
        except ValueError:
            raise CloudFormatError(f"cannot parse {raw.strip()!r} as two numbers", n, path) from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise CloudFormatError("non-finite coordinate", n, path)
        key = (x + 0.0, y + 0.0)
        if key in seen:
            raise CloudFormatError(f"duplicate point at line {n} (first seen at line {seen[key]})", n, path)
        seen[key] = n
        pts.append((x, y))
    if not pts:
        raise CloudFormatError("no points", None, path)
    return PointCloud(np.array(pts), label)


def dumps_json_cloud(cloud: PointCloud) -> str:
    return json.dumps({"label": cloud.label, "points": cloud.points.tolist()}, indent=1) + "\n"


def loads_json_cloud(text: str, path: Optional[str] = None) -> PointCloud:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CloudFormatError(exc.msg, exc.lineno, path) from None
    if not isinstance(obj, dict) or "points" not in obj:
        raise CloudFormatError("expected an object with a 'points' array", None, path)
    pts = obj["points"]
    if not isinstance(pts, list) or not pts:
        raise CloudFormatError("'points' must be a nonempty list", None, path)
    for k, p in enumerate(pts):
        if (not isinstance(p, list) or len(p) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p)):
            raise CloudFormatError(f"point {k} is not an [x, y] pair of numbers", None, path)
    arr = np.array(pts, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise CloudFormatError("non-finite coordinate", None, path)
    dup = first_duplicate(arr)
    if dup is not None:
        raise CloudFormatError(f"duplicate point at index {dup[1]} (same as index {dup[0]})", None, path)
    label = obj.get("label")
    return PointCloud(arr, None if label is None else str(label))


def is_json_path(path: str | Path) -> bool:
    return str(path).lower().endswith(".json")


def read_cloud(path: str | Path) -> PointCloud:
    path = str(path)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CloudFormatError(f"cannot read file: {exc.strerror}", None, path) from None
    if is_json_path(path):
        return loads_json_cloud(text, path)
    return loads_csv(text, path)


def write_cloud(cloud: PointCloud, path: str | Path) -> None:
    text = dumps_json_cloud(cloud) if is_json_path(path) else dumps_csv(cloud)
    Path(path).write_text(text)


def _solution_dict(s: PivotSolution) -> dict:
    return {"pivot_p": s.p, "pivot_q": s.q, "theta": s.theta, "k_total": s.k_total,
            "plateau": list(s.plateau)}


def result_to_dict(res: RegistrationResult, runtime_ms: Optional[float] = None) -> dict[str, Any]:
    out = {
        "pivot_p": res.best.p,
        "pivot_q": res.best.q,
        "theta": res.best.theta,
        "plateau": list(res.best.plateau),
        "k_total": res.best.k_total,
        "energy": res.energy,
        "delta": res.delta,
        "delta_ok": res.delta_ok,
        "min_distance": res.min_distance if math.isfinite(res.min_distance) else None,
        "non_injective": res.non_injective,
        "m": res.m,
        "n": res.n,
        "pairs": [{"i": p.i, "j": p.j, "distance": p.distance} for p in res.pairs],
        "runtime_ms": runtime_ms,
    }
    if res.all_optima is not None:
        out["all_optima"] = [_solution_dict(s) for s in res.all_optima]
    return out


def write_json(obj: Any, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1, allow_nan=False) + "\n")
