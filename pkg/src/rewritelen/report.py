"""JSON and plain-text renderings of a search run."""

from __future__ import annotations

import json
from typing import Any

from .enumeration import LengthReport
from .parallel import ScalingRow


def hms(seconds: float) -> str:
    total = int(round(seconds))
    h, rest = divmod(total, 3600)
    m, s = divmod(rest, 60)
    return f"{h}h {m}m {s}s"


def build_report(
    *,
    group: str,
    fingerprint: str,
    order: int,
    aut_size: int,
    mode: str,
    report: LengthReport,
    wall_time: float,
    parallel: dict[str, Any] | None = None,
    scaling: list[ScalingRow] | None = None,
) -> dict[str, Any]:
    out: dict[str, Any] = {
        "group": group,
        "fingerprint": fingerprint,
        "order": order,
        "aut_size": aut_size,
        "limit": report.limit,
        "mode": mode,
        "counts": {str(r): c for r, c in sorted(report.counts.items())},
        "result": report.result,
        "status": "limit_reached" if report.failed else "found",
        "wall_time_ms": round(wall_time * 1000.0, 3),
    }
    if parallel is not None:
        out["parallel"] = parallel
    if scaling is not None:
        out["scaling"] = [
            {
                "workers": row.workers,
                "wall_time_ms": round(row.wall_time * 1000.0, 3),
                "speedup": round(row.speedup, 4),
                "efficiency": round(row.efficiency, 4),
            }
            for row in scaling
        ]
    return out


def to_json(data: dict[str, Any]) -> str:
    return json.dumps(data, indent=2)


def report_from_json(text: str) -> LengthReport:
    d = json.loads(text)
    return LengthReport({int(k): v for k, v in d["counts"].items()}, d["result"], d["limit"])


def to_table(data: dict[str, Any]) -> str:
    lines = [f"group {data['group']}  order {data['order']}  |Aut| {data['aut_size']}"]
    for r, c in data["counts"].items():
        lines.append(f"Started enumeration of NRW of length {r}")
        lines.append(f"{c} NRW of length {r} constructed")
    if data["result"] is None:
        lines.append(f"result: fail (limit {data['limit']} reached)")
    else:
        lines.append(f"result: {data['result']}")
    lines.append(f"time: {hms(data['wall_time_ms'] / 1000.0)}")
    par = data.get("parallel")
    if par:
        lines.append(
            f"workers: {par['workers']}  start depth: {par['start_depth']}  tasks: {par['tasks']}"
        )
        lines.append("tasks per worker: " + " ".join(str(n) for n in par["worker_tasks"]))
    if data.get("scaling"):
        lines.append("")
        lines.append(f"{'workers':>8}  {'runtime':>12}  {'speedup':>8}  {'efficiency':>10}")
        for row in data["scaling"]:
            lines.append(
                f"{row['workers']:>8}  {hms(row['wall_time_ms'] / 1000.0):>12}  "
                f"{row['speedup']:>8.2f}  {row['efficiency']:>10.2f}"
            )
    return "\n".join(lines)
