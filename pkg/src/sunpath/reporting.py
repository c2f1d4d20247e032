"""Machine-readable output files with embedded run configuration.

Every file starts from the same canonical config serialization so that a
re-run with the embedded config reproduces it byte for byte; wall-clock
timing, when recorded, lives on its own line or key and is the only
non-reproducible field.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence


def canonical_config(config: dict) -> str:
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


def format_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_csv(
    path,
    config: dict,
    columns: Sequence[str],
    rows: Iterable[Sequence],
    wall_time: float | None = None,
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# config={canonical_config(config)}\n")
        if wall_time is not None:
            fh.write(f"# wall_time_s={wall_time:.3f}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def write_json(path, config: dict, payload: dict, wall_time: float | None = None) -> None:
    doc = {"schema": "sunpath-report/1", "config": config}
    doc.update(payload)
    if wall_time is not None:
        doc["wall_time_s"] = round(wall_time, 3)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")
