"""CSV and manifest serialization for scenario outputs.

The CSV format is pinned for bit-stable reruns: header row, comma separator,
12 significant digits via ``%.12g``, ``\n`` line endings.  Manifests are JSON
with sorted keys; they carry resolved parameters and diagnostics and are not
required to be byte-stable (they include wall-clock timing).
"""

from __future__ import annotations

import json
import platform
from pathlib import Path

import numpy as np
import scipy


def format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.12g" % float(value)


def render_csv(columns: list[str], rows: list[list]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(
                f"row width {len(row)} does not match {len(columns)} columns"
            )
        lines.append(",".join(format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def versions() -> dict:
    from . import __version__

    return {
        "gatesim": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def render_manifest(manifest: dict) -> str:
    return json.dumps(manifest, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj)}")


def write_outputs(out_dir: str | Path, scenario: str, csv_text: str, manifest: dict) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{scenario}.csv"
    manifest_path = out / f"{scenario}.manifest.json"
    csv_path.write_text(csv_text)
    manifest_path.write_text(render_manifest(manifest))
    return {"csv": str(csv_path), "manifest": str(manifest_path)}
