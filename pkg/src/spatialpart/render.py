"""Static SVG views of grids, partition labels, boundaries, trees and meshes.

Layout y points up; SVG y points down, so every y is flipped.  Numbers are
printed with a fixed precision, which keeps the output byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .boundary import Boundary, Corner
from .errors import ConfigError
from .steiner import net_trees

LAYERS = frozenset({"grid", "boundary", "trees", "labels", "mesh"})

DEFAULT_PALETTE = (
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759",
    "#76b7b2", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
)
_PLAIN_FILL = "#ffffff"
_EMPTY_FILL = "#dddddd"


@dataclass(frozen=True)
class RenderSpec:
    layers: frozenset = frozenset({"grid", "labels", "boundary"})
    palette: tuple = DEFAULT_PALETTE
    scale: float = 6.0  # pixels per layout unit

    def __post_init__(self):
        layers = frozenset(self.layers)
        unknown = layers - LAYERS
        if unknown:
            raise ConfigError(f"unknown render layers: {sorted(unknown)}")
        object.__setattr__(self, "layers", layers)
        if not self.scale > 0:
            raise ConfigError("scale must be positive")
        if not self.palette:
            raise ConfigError("palette must not be empty")

    def color(self, label: int) -> str:
        if label < 0:
            return _EMPTY_FILL
        return self.palette[label % len(self.palette)]


@dataclass
class Overlay:
    """Optional geometry drawn on top of the grid."""
    boundaries: list = field(default_factory=list)   # Boundary objects
    trees: list = field(default_factory=list)        # RectTree objects
    mesh: tuple | None = None                        # (points, triangles)


def _f(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def svg_document(g, grid_label, spec: RenderSpec, overlay: Overlay | None = None) -> str:
    overlay = overlay or Overlay()
    sc = spec.scale
    W, H = g.width * sc, g.height * sc
    sx = lambda x: _f(x * sc)
    sy = lambda y: _f((g.height - y) * sc)

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
           f'width="{_f(W)}" height="{_f(H)}" viewBox="0 0 {_f(W)} {_f(H)}">']
    draw_rects = "grid" in spec.layers or "labels" in spec.layers
    if draw_rects:
        lab = None
        if "labels" in spec.layers:
            if grid_label is None:
                raise ConfigError("labels layer requested without grid labels")
            lab = np.asarray(grid_label).ravel()
            if lab.shape[0] != g.n_nodes:
                raise ConfigError("grid label count does not match the grid")
        stroke = ' stroke="#555555" stroke-width="0.5"' if "grid" in spec.layers else ""
        xl, yl = g.x_lines, g.y_lines
        out.append('<g id="grid">')
        for i in range(g.nx):
            for j in range(g.ny):
                fill = _PLAIN_FILL if lab is None else spec.color(int(lab[i * g.ny + j]))
                out.append(f'<rect x="{sx(xl[i])}" y="{sy(yl[j + 1])}" '
                           f'width="{_f((xl[i + 1] - xl[i]) * sc)}" '
                           f'height="{_f((yl[j + 1] - yl[j]) * sc)}" fill="{fill}"{stroke}/>')
        out.append('</g>')

    if "mesh" in spec.layers and overlay.mesh is not None:
        pts, tris = overlay.mesh
        out.append('<g id="mesh" stroke="#333333" stroke-width="0.6" fill="none">')
        for t in np.asarray(tris):
            p = pts[t]
            coords = " ".join(f"{sx(x)},{sy(y)}" for x, y in p[[0, 1, 2, 0]])
            out.append(f'<polyline points="{coords}"/>')
        out.append('</g>')

    if "trees" in spec.layers:
        out.append('<g id="trees" stroke="#222222" stroke-width="1">')
        for t in overlay.trees:
            for x1, y1, x2, y2 in t.segments:
                out.append(f'<line x1="{sx(x1)}" y1="{sy(y1)}" x2="{sx(x2)}" y2="{sy(y2)}"/>')
        out.append('</g>')

    if "boundary" in spec.layers:
        out.append('<g id="boundary" stroke="#000000" stroke-width="2" fill="none">')
        for b in overlay.boundaries:
            pts = np.vstack([b.origin, b.points(), b.origin])
            coords = " ".join(f"{sx(x)},{sy(y)}" for x, y in pts)
            out.append(f'<polyline points="{coords}"/>')
        out.append('</g>')

    out.append(f'<text x="4" y="{_f(H - 4)}" font-size="10">{escape(f"{g.nx} x {g.ny}")}</text>')
    out.append('</svg>')
    return "\n".join(out) + "\n"


def root_boundary(splits, g, m: int) -> Boundary | None:
    """The top-level fan of a run, in layout coordinates."""
    if not splits or not splits[0].radii:
        return None
    s = splits[0]
    return Boundary(Corner[s.corner], m, np.array(s.radii), g.width, g.height)


def render_svg(netlist, g, result, spec: RenderSpec, path, overlay: Overlay | None = None) -> None:
    grid_label = None if result is None else result.grid_label
    if "trees" in spec.layers and netlist is not None and (overlay is None or not overlay.trees):
        overlay = Overlay(overlay.boundaries if overlay else [], net_trees(netlist),
                          overlay.mesh if overlay else None)
    Path(path).write_text(svg_document(g, grid_label, spec, overlay))
