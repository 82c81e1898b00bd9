"""Benchmark report assembly and serialisation.

Every numeric cell in a report is tagged with its provenance: ``computed``
cells carry the hash of the configuration that produced them, ``reference``
cells hold values quoted from hardware measurements and are never produced
by this package.  JSON output is canonical (sorted keys, no timestamp
unless explicitly requested) so identical runs serialise byte-identically.
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

from ..errors import InvalidArgumentError

Cellable = Union["Cell", str, int, float, None]


@dataclass(frozen=True)
class Cell:
    """One tagged numeric report entry."""

    value: Optional[float]
    units: str
    source: str                       # "computed" | "reference"
    config_hash: Optional[str] = None
    method: Optional[str] = None
    note: Optional[str] = None

    def __post_init__(self):
        if self.source not in ("computed", "reference"):
            raise InvalidArgumentError(f"unknown cell source {self.source!r}")
        if self.source == "computed" and not self.config_hash:
            raise InvalidArgumentError("computed cells must carry a config hash")
        if self.source == "reference" and self.config_hash is not None:
            raise InvalidArgumentError("reference cells must not carry a config hash")

    def to_json_obj(self) -> dict:
        obj = {"value": self.value, "units": self.units, "source": self.source}
        if self.config_hash is not None:
            obj["config_hash"] = self.config_hash
        if self.method is not None:
            obj["method"] = self.method
        if self.note is not None:
            obj["note"] = self.note
        return obj

    def render(self) -> str:
        if self.value is None:
            return "-"
        text = f"{self.value:.6g}"
        if self.source == "reference":
            text += " (ref)"
        return text


def computed(value, units, config_hash, method=None, note=None) -> Cell:
    return Cell(value=None if value is None else float(value), units=units,
                source="computed", config_hash=config_hash, method=method, note=note)


def reference(value, units, note=None) -> Cell:
    return Cell(value=float(value), units=units, source="reference", note=note)


def config_hash_of(payload: dict) -> str:
    """Short stable hash of a scenario payload (plus seed etc.)."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


@dataclass
class Report:
    """Rows of tagged cells plus run metadata, serialisable to JSON and text."""

    experiment: str
    config_hash: str
    seed: Optional[int] = None
    timestamp: Optional[str] = None
    metadata: Dict[str, Union[str, int, float, None]] = field(default_factory=dict)
    columns: List[str] = field(default_factory=list)
    rows: List[Dict[str, Cellable]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def add_row(self, label: str, **cells: Cellable) -> None:
        row: Dict[str, Cellable] = {"label": label}
        row.update(cells)
        for key in cells:
            if key not in self.columns:
                self.columns.append(key)
        self.rows.append(row)

    def to_json_text(self) -> str:
        obj = {
            "experiment": self.experiment,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "timestamp": self.timestamp,
            "metadata": self.metadata,
            "columns": self.columns,
            "rows": [
                {
                    "label": row["label"],
                    "cells": {
                        k: (v.to_json_obj() if isinstance(v, Cell) else v)
                        for k, v in row.items() if k != "label"
                    },
                }
                for row in self.rows
            ],
            "notes": self.notes,
        }
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        headers = ["label"] + self.columns
        table: List[List[str]] = [headers]
        for row in self.rows:
            cells = []
            for key in headers:
                v = row.get(key)
                if isinstance(v, Cell):
                    cells.append(v.render())
                elif v is None:
                    cells.append("-")
                else:
                    cells.append(str(v))
            table.append(cells)
        widths = [max(len(r[i]) for r in table) for i in range(len(headers))]
        lines = [f"experiment: {self.experiment}",
                 f"config hash: {self.config_hash}"]
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        for key in sorted(self.metadata):
            lines.append(f"{key}: {self.metadata[key]}")
        lines.append("")
        sep = "  "
        lines.append(sep.join(h.ljust(w) for h, w in zip(table[0], widths)))
        lines.append(sep.join("-" * w for w in widths))
        for r in table[1:]:
            lines.append(sep.join(c.ljust(w) for c, w in zip(r, widths)))
        if self.notes:
            lines.append("")
            for note in self.notes:
                lines.append(f"note: {note}")
        lines.append("")
        lines.append("(ref) marks quoted reference values, not outputs of this run")
        return "\n".join(lines) + "\n"

    def write(self, out_dir, stem: str = "report") -> List[str]:
        import os

        os.makedirs(out_dir, exist_ok=True)
        json_path = os.path.join(out_dir, f"{stem}.json")
        text_path = os.path.join(out_dir, f"{stem}.txt")
        with open(json_path, "w") as fh:
            fh.write(self.to_json_text())
        with open(text_path, "w") as fh:
            fh.write(self.to_text())
        return [json_path, text_path]
