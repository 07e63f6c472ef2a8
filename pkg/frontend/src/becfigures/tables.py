"""Readers for the becscatter table contract.

CSV: a `# key=value` metadata block followed by a comma-separated header
and data rows. JSON: {"metadata": {...}, "rows": [{col: value, ...}]}.
Only this file format couples the figure pipeline to the simulator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Table:
    path: str
    metadata: dict
    columns: dict  # name -> float ndarray

    def require(self, names: list[str]):
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise ValueError(
                f"{self.path}: missing column(s) {', '.join(missing)}; "
                f"found {', '.join(self.columns)}"
            )


def read_table(path: str | Path) -> Table:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        doc = json.loads(text)
        rows = doc.get("rows", [])
        names = list(rows[0]) if rows else []
        cols = {n: np.array([float(r[n]) for r in rows]) for n in names}
        return Table(path=str(path), metadata=dict(doc.get("metadata", {})),
                     columns=cols)
    metadata: dict = {}
    header: list[str] | None = None
    data: list[list[float]] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            metadata[key.strip()] = value
            continue
        if header is None:
            header = [h.strip() for h in line.split(",")]
            data = [[] for _ in header]
            continue
        for slot, cell in zip(data, line.split(",")):
            slot.append(float(cell))
    if header is None:
        raise ValueError(f"{path}: no header line found")
    cols = {n: np.array(vals) for n, vals in zip(header, data)}
    return Table(path=str(path), metadata=metadata, columns=cols)


def check_compatible(tables: list[Table], keys=("density", "mu_c", "recoil",
                                                "resonance_ratio")):
    """All inputs must agree on the physical configuration keys they carry."""
    conflicts = []
    for key in keys:
        values = {t.metadata[key] for t in tables if key in t.metadata}
        if len(values) > 1:
            conflicts.append(f"{key}: {sorted(values)}")
    if conflicts:
        raise ValueError("incompatible input tables: " + "; ".join(conflicts))
