"""CSV and JSON manifest writers."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

SIMULATE_COLUMNS = ("t", "x", "y", "z")
SYNC_COLUMNS = ("t", "x_m", "y_m", "z_m", "x_s", "y_s", "z_s", "e1", "e2", "e3", "u", "v3")
CONVERGENCE_COLUMNS = ("stage", "best_cost", "best_k1", "best_k3", "cumulative_evals")
TABLE_COLUMNS = ("experiment", "seed", "k1", "k3", "tss")
SUMMARY_COLUMNS = ("runs", "tss_min", "tss_median", "tss_max", "tss_spread")

MANIFEST_KEYS = ("command", "version", "seed", "config", "outputs", "results", "wall_clock_seconds")


def fmt(v) -> str:
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return format(float(v), ".9g")


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def write_manifest(path: Path, manifest: dict) -> Path:
    missing = [k for k in MANIFEST_KEYS if k not in manifest]
    if missing:
        raise KeyError(f"manifest lacks {missing}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=False)
        fh.write("\n")
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[float]]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    return header, [[float(v) for v in ln.split(",")] for ln in lines[1:]]
