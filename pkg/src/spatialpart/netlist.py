"""Placed-netlist data model plus JSON/CSV serialization.

Input format (see ``schema/netlist.schema.json``)::

    {"layout": {"w": 100.0, "h": 80.0},
     "cells": [{"id": "a", "x": 1.0, "y": 2.0}, ...],
     "nets":  [{"id": "n0", "w": 1.0, "cells": ["a", "b"]}, ...]}

Identifiers may be strings or integers; they are stored as strings.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .errors import ConfigError, NetlistSemanticError, NetlistSyntaxError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cell:
    id: str
    x: float
    y: float


@dataclass(frozen=True)
class Net:
    id: str
    weight: float
    cells: tuple[str, ...]


@dataclass(frozen=True)
class PlacedNetlist:
    layout_width: float
    layout_height: float
    cells: tuple[Cell, ...]
    nets: tuple[Net, ...]
    _checked: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if not self._checked:
            _validate(self)

    @cached_property
    def cell_index(self) -> dict[str, int]:
        return {c.id: i for i, c in enumerate(self.cells)}

    @cached_property
    def xy(self) -> np.ndarray:
        """(n_cells, 2) array of coordinates in cell order."""
        return np.array([(c.x, c.y) for c in self.cells], dtype=float).reshape(-1, 2)

    @cached_property
    def net_cell_indices(self) -> tuple[np.ndarray, ...]:
        idx = self.cell_index
        return tuple(np.array([idx[c] for c in n.cells], dtype=np.int64) for n in self.nets)

    @cached_property
    def cell_degree(self) -> np.ndarray:
        """Number of nets each cell belongs to (its pin count)."""
        deg = np.zeros(len(self.cells), dtype=float)
        for members in self.net_cell_indices:
            np.add.at(deg, members, 1.0)
        return deg

    @property
    def diagonal(self) -> float:
        return math.hypot(self.layout_width, self.layout_height)


def _validate(nl: PlacedNetlist) -> None:
    w, h = nl.layout_width, nl.layout_height
    if not (math.isfinite(w) and math.isfinite(h)) or w <= 0 or h <= 0:
        raise NetlistSemanticError(f"layout dimensions must be positive, got {w} x {h}")
    seen = set()
    for c in nl.cells:
        if c.id in seen:
            raise NetlistSemanticError(f"duplicate cell id {c.id!r}")
        seen.add(c.id)
        if not (math.isfinite(c.x) and math.isfinite(c.y)):
            raise NetlistSemanticError(f"cell {c.id!r} has a non-finite coordinate")
        if not (0.0 <= c.x <= w and 0.0 <= c.y <= h):
            raise NetlistSemanticError(
                f"cell {c.id!r} at ({c.x}, {c.y}) lies outside the {w} x {h} layout")
    net_ids = set()
    for n in nl.nets:
        if n.id in net_ids:
            raise NetlistSemanticError(f"duplicate net id {n.id!r}")
        net_ids.add(n.id)
        if not (math.isfinite(n.weight) and n.weight > 0):
            raise NetlistSemanticError(f"net {n.id!r} has non-positive weight {n.weight}")
        for cid in n.cells:
            if cid not in seen:
                raise NetlistSemanticError(f"net {n.id!r} references unknown cell {cid!r}")
        if len(set(n.cells)) < 2:
            raise NetlistSemanticError(f"net {n.id!r} has fewer than 2 distinct cells")


def make_netlist(width, height, cells, nets) -> PlacedNetlist:
    """Build and validate a netlist from plain tuples.

    ``cells`` holds ``(id, x, y)`` triples and ``nets`` holds
    ``(id, weight, [cell ids])`` triples.  Duplicate cell ids inside a
    net are dropped with a warning.
    """
    cell_objs = tuple(Cell(str(cid), float(x), float(y)) for cid, x, y in cells)
    net_objs = []
    for nid, weight, members in nets:
        members = [str(m) for m in members]
        unique = tuple(dict.fromkeys(members))
        if len(unique) != len(members):
            log.warning("net %s lists a cell more than once; duplicates removed", nid)
        net_objs.append(Net(str(nid), float(weight), unique))
    return PlacedNetlist(float(width), float(height), cell_objs, tuple(net_objs))


def _schema(name: str) -> dict:
    text = resources.files("spatialpart.schema").joinpath(name).read_text()
    return json.loads(text)


def netlist_from_dict(doc) -> PlacedNetlist:
    try:
        jsonschema.validate(doc, _schema("netlist.schema.json"))
    except jsonschema.ValidationError as exc:
        fld = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise NetlistSyntaxError(exc.message, field=fld) from None
    return make_netlist(
        doc["layout"]["w"], doc["layout"]["h"],
        [(c["id"], c["x"], c["y"]) for c in doc["cells"]],
        [(n["id"], n["w"], n["cells"]) for n in doc["nets"]],
    )


def parse_netlist(path) -> PlacedNetlist:
    """Read and validate a JSON netlist.

    Raises ``OSError`` when the file cannot be read,
    ``NetlistSyntaxError`` for malformed JSON or schema violations and
    ``NetlistSemanticError`` for invariant violations.
    """
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetlistSyntaxError(exc.msg, line=exc.lineno) from None
    return netlist_from_dict(doc)


def netlist_to_dict(nl: PlacedNetlist) -> dict:
    return {
        "layout": {"w": nl.layout_width, "h": nl.layout_height},
        "cells": [{"id": c.id, "x": c.x, "y": c.y} for c in nl.cells],
        "nets": [{"id": n.id, "w": n.weight, "cells": list(n.cells)} for n in nl.nets],
    }


def write_netlist(nl: PlacedNetlist, path) -> None:
    Path(path).write_text(json.dumps(netlist_to_dict(nl), indent=1) + "\n")


def metrics_path_for(path) -> Path:
    """Sidecar location for the metrics record of an assignment file."""
    p = Path(path)
    return p.with_name(p.stem + ".metrics.json")


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_result(result, path, metrics_path=None) -> None:
    """Write ``cell_id,partition`` rows plus a metrics JSON sidecar.

    Output is byte-stable: rows follow the result's cell order and the
    JSON keys are sorted.
    """
    if not result.cell_label:
        raise ConfigError("result has no cell labels")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["cell_id", "partition"])
    for cid, part in result.cell_label.items():
        writer.writerow([cid, int(part)])
    Path(path).write_text(buf.getvalue())
    mpath = metrics_path if metrics_path is not None else metrics_path_for(path)
    Path(mpath).write_text(dump_json(result.metrics_dict()))


def read_assignment(path) -> dict[str, int]:
    """Parse a ``cell_id,partition`` CSV produced by this package or others."""
    labels = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["cell_id", "partition"]:
            raise NetlistSyntaxError("assignment header must be 'cell_id,partition'", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise NetlistSyntaxError("expected 2 columns", line=lineno)
            try:
                labels[row[0].strip()] = int(row[1])
            except ValueError:
                raise NetlistSyntaxError(f"bad partition label {row[1]!r}", line=lineno) from None
    return labels
