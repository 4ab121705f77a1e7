"""
Report emission.

CSV tables start with a ``# schema=<version>`` comment line; JSON documents
are written with sorted keys and ``NaN``/``inf`` mapped to ``null``. Both
writers are deterministic, so identical reports give identical bytes.
"""

import json
import math
import os

import numpy as np
import pandas as pd

from configs import CSV_SCHEMA_VERSION


def to_plain(value):
    """Recursively convert numpy and pandas values to JSON-ready Python objects."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, pd.DataFrame):
        return {column: to_plain(value[column].tolist()) for column in value.columns}
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_csv(frame, path):
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# schema={CSV_SCHEMA_VERSION}\n")
        frame.to_csv(f, index=False, lineterminator="\n")
    return path


def write_json(document, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_plain(document), f, sort_keys=True, indent=2, allow_nan=False)
        f.write("\n")
    return path


def summary_frame(summary):
    """Flatten a nested summary into ``statistic, value`` rows."""
    rows = []

    def walk(prefix, value):
        if isinstance(value, dict):
            for key in sorted(value):
                walk(f"{prefix}.{key}" if prefix else str(key), value[key])
        else:
            rows.append({"statistic": prefix, "value": json.dumps(to_plain(value), sort_keys=True)})

    walk("", summary)
    return pd.DataFrame(rows, columns=["statistic", "value"])


def write_report(report, out_dir, fmt):
    """Write ``report`` under ``out_dir`` and return the written paths.

    ``csv`` writes one file per table plus a summary table; ``json`` writes a
    single document holding everything.
    """
    os.makedirs(out_dir, exist_ok=True)
    stem = report.kind.replace("-", "_")
    if fmt == "json":
        return [write_json(report.to_dict(), os.path.join(out_dir, f"{stem}.json"))]
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")

    paths = []
    for name in sorted(report.tables):
        paths.append(write_csv(report.tables[name], os.path.join(out_dir, f"{stem}_{name}.csv")))
    summary = {"flags": report.flags, "summary": report.summary}
    paths.append(write_csv(summary_frame(summary), os.path.join(out_dir, f"{stem}_summary.csv")))
    return paths
