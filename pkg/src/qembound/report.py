"""Deterministic file emission for experiment results.

Curves go to RFC-4180 CSV (or JSON records on request), matrices to CSV
grids, JSON blobs to UTF-8 files with sorted keys, and every run gets a
config sidecar plus a manifest naming each written file with its size and
SHA-256, alongside the config hash and seed.  Reruns with the same config
and seed reproduce every byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np


def _sanitize(obj):
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _sanitize(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_sanitize(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def config_hash(name: str, params: dict, seed: int) -> str:
    blob = json.dumps(_sanitize({"command": name, "params": params, "seed": seed}),
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def write_json(path: Path, obj) -> Path:
    path.write_text(canonical_json(obj), encoding="utf-8")
    return path


def write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        if header is not None:
            writer.writerow(header)
        writer.writerows(rows)
    return path


def _curve_rows(cols: dict):
    names = list(cols.keys())
    length = len(next(iter(cols.values())))
    rows = [[cols[n][i] for n in names] for i in range(length)]
    return names, rows


def emit_report(result, out_dir, fmt: str = "csv", plot: bool = True) -> list[Path]:
    """Write all files for one experiment run and return their paths.

    The manifest is always written last and is not listed inside itself.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    for name, cols in result.columns.items():
        header, rows = _curve_rows(cols)
        if fmt == "csv":
            written.append(write_csv(out / f"{name}.csv", header, rows))
        else:
            records = [dict(zip(header, row)) for row in rows]
            written.append(write_json(out / f"{name}.json", records))

    for name, table in result.tables.items():
        data = np.asarray(table["data"])
        written.append(write_csv(out / f"{name}.csv", table["header"], data.tolist()))

    for name, obj in result.objects.items():
        written.append(write_json(out / f"{name}.json", obj))

    # wall-clock runtime is deliberately not written: rerunning the same
    # config and seed must reproduce every output byte
    written.append(write_json(out / "config.json", {
        "command": result.name,
        "params": result.params,
        "seed": result.seed,
        "format": fmt,
        "warnings": result.warnings,
    }))

    if plot:
        from . import plots
        written.extend(plots.render(result, out))

    manifest = {
        "command": result.name,
        "seed": result.seed,
        "config_sha256": config_hash(result.name, result.params, result.seed),
        "files": [
            {
                "name": p.name,
                "bytes": p.stat().st_size,
                "sha256": hashlib.sha256(p.read_bytes()).hexdigest(),
            }
            for p in sorted(written, key=lambda q: q.name)
        ],
    }
    written.append(write_json(out / "manifest.json", manifest))
    return written
