"""File formats: trajectory CSVs and JSON records."""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .dynamics import MapSnapshot, TwoQubitState

MAP_COLUMNS = (
    ["t"]
    + [f"u{n}{j}" for n in range(1, 4) for j in range(1, 4)]
    + [f"v{n}{k}" for n in range(1, 4) for k in range(1, 4)]
    + [f"w{n}{j}{k}" for n in range(1, 4) for j in range(1, 4) for k in range(1, 4)]
)
MEAN_COLUMNS = ["t", "s1", "s2", "s3"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _rows_to_csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_map_csv(path, snapshots: list[MapSnapshot]) -> None:
    rows = [
        np.concatenate([[s.t], s.u.ravel(), s.v.ravel(), s.w.ravel()]) for s in snapshots
    ]
    atomic_write_text(path, _rows_to_csv(MAP_COLUMNS, rows))


def _read_csv(path, columns: list[str]) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [c.strip() for c in header] != columns:
            raise ValueError(f"{path}: unexpected header {header[:5]}...")
        return np.array([[float(x) for x in row] for row in reader if row], dtype=float)


def read_map_csv(path) -> list[MapSnapshot]:
    data = _read_csv(path, MAP_COLUMNS)
    return [
        MapSnapshot(row[0], row[1:10].reshape(3, 3), row[10:19].reshape(3, 3), row[19:].reshape(3, 3, 3))
        for row in data
    ]


def write_mean_csv(path, times, means) -> None:
    rows = np.column_stack([np.asarray(times, dtype=float), np.asarray(means, dtype=float)])
    atomic_write_text(path, _rows_to_csv(MEAN_COLUMNS, rows))


def read_mean_csv(path) -> tuple[np.ndarray, np.ndarray]:
    data = _read_csv(path, MEAN_COLUMNS)
    return data[:, 0], data[:, 1:]


def state_from_dict(d: dict) -> TwoQubitState:
    return TwoQubitState(
        d.get("sigma", [0.0] * 3), d.get("xi", [0.0] * 3), d.get("corr", [[0.0] * 3] * 3)
    )


def state_to_dict(s: TwoQubitState) -> dict:
    return {"sigma": s.sigma.tolist(), "xi": s.xi.tolist(), "corr": s.corr.tolist()}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def write_json(path, payload: dict) -> None:
    atomic_write_text(path, json.dumps(_jsonable(payload), indent=2) + "\n")


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
