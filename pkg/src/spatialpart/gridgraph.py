"""Grid-based layout formation.

Grids are indexed ``(i, j)`` with ``i`` the column (x) and ``j`` the row
(y); flat index is ``i * ny + j``.  ``h_edge_weight[i, j]`` belongs to the
edge between grids ``(i, j)`` and ``(i + 1, j)``, ``v_edge_weight[i, j]``
to the edge between ``(i, j)`` and ``(i, j + 1)``.

Binning is half-open: a coordinate exactly on an interior grid line goes
to the higher-index grid, the top/right layout edge clamps to the last
grid.  A tree segment crosses the border between two grids when its
endpoints bin to different grids along its direction.  Segments lying
exactly on an interior grid line parallel to themselves contribute no
crossings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError

DEFAULT_NX = 64
DEFAULT_NY = 64


def grid_lines(length: float, n: int) -> np.ndarray:
    return np.arange(n + 1, dtype=float) * (length / n)


def bin_coords(values, lines: np.ndarray) -> np.ndarray:
    """Column (or row) of each coordinate given the ``n + 1`` grid lines."""
    n = len(lines) - 1
    idx = np.searchsorted(lines, np.asarray(values, dtype=float), side="right") - 1
    return np.clip(idx, 0, n - 1)


@dataclass(frozen=True, eq=False)
class GridGraph:
    width: float
    height: float
    nx: int
    ny: int
    node_weight: np.ndarray      # (nx, ny)
    h_edge_weight: np.ndarray    # (nx - 1, ny)
    v_edge_weight: np.ndarray    # (nx, ny - 1)
    cell_of_grid: tuple = field(default=(), repr=False)

    @property
    def n_nodes(self) -> int:
        return self.nx * self.ny

    @cached_property
    def x_lines(self) -> np.ndarray:
        return grid_lines(self.width, self.nx)

    @cached_property
    def y_lines(self) -> np.ndarray:
        return grid_lines(self.height, self.ny)

    @cached_property
    def grid_centers(self) -> np.ndarray:
        """(nx * ny, 2) centers in flat-index order."""
        cx = (np.arange(self.nx) + 0.5) * self.width / self.nx
        cy = (np.arange(self.ny) + 0.5) * self.height / self.ny
        gx, gy = np.meshgrid(cx, cy, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()])

    @property
    def total_node_weight(self) -> float:
        return float(self.node_weight.sum())

    @property
    def total_edge_weight(self) -> float:
        return float(self.h_edge_weight.sum() + self.v_edge_weight.sum())

    def flat(self, i, j):
        return np.asarray(i) * self.ny + np.asarray(j)

    def assign(self, xs, ys) -> np.ndarray:
        """Flat grid index for arrays of in-layout coordinates."""
        return self.flat(bin_coords(xs, self.x_lines), bin_coords(ys, self.y_lines))

    @cached_property
    def edge_list(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(u, v, w) flat endpoints and weights of all grid edges."""
        ii, jj = np.meshgrid(np.arange(self.nx - 1), np.arange(self.ny), indexing="ij")
        hu = self.flat(ii, jj).ravel()
        hv = hu + self.ny
        ii, jj = np.meshgrid(np.arange(self.nx), np.arange(self.ny - 1), indexing="ij")
        vu = self.flat(ii, jj).ravel()
        vv = vu + 1
        return (np.concatenate([hu, vu]), np.concatenate([hv, vv]),
                np.concatenate([self.h_edge_weight.ravel(), self.v_edge_weight.ravel()]))


def assign_cell_to_grid(x: float, y: float, g: GridGraph) -> tuple[int, int]:
    if not (0.0 <= x <= g.width and 0.0 <= y <= g.height):
        raise ConfigError(f"point ({x}, {y}) outside the {g.width} x {g.height} layout")
    return int(bin_coords(x, g.x_lines)), int(bin_coords(y, g.y_lines))


def segment_crossings(segments: np.ndarray, x_lines: np.ndarray, y_lines: np.ndarray):
    """Grid edges crossed by each segment.

    Returns ``(h_ranges, v_ranges)``: for horizontal segments a tuple
    ``(seg_idx, row, col_lo, col_hi)`` meaning the h-edges ``col_lo ..
    col_hi - 1`` of ``row`` are crossed once; likewise vertical segments
    cross the v-edges ``row_lo .. row_hi - 1`` of ``col``.
    """
    seg = np.asarray(segments, dtype=float).reshape(-1, 4)
    x1, y1, x2, y2 = seg.T
    interior_y = y_lines[1:-1]
    interior_x = x_lines[1:-1]
    is_h = (y1 == y2) & (x1 != x2)
    is_v = (x1 == x2) & (y1 != y2)
    if np.any(~(is_h | is_v | ((x1 == x2) & (y1 == y2)))):
        raise ConfigError("tree segments must be axis-aligned")
    is_h &= ~np.isin(y1, interior_y)
    is_v &= ~np.isin(x1, interior_x)

    hs = np.nonzero(is_h)[0]
    row = bin_coords(y1[hs], y_lines)
    lo = bin_coords(np.minimum(x1[hs], x2[hs]), x_lines)
    hi = bin_coords(np.maximum(x1[hs], x2[hs]), x_lines)
    vs = np.nonzero(is_v)[0]
    col = bin_coords(x1[vs], x_lines)
    vlo = bin_coords(np.minimum(y1[vs], y2[vs]), y_lines)
    vhi = bin_coords(np.maximum(y1[vs], y2[vs]), y_lines)
    return (hs, row, lo, hi), (vs, col, vlo, vhi)


def _expand(lo, hi, fixed, w):
    """Enumerate ``lo .. hi - 1`` per range, paired with the fixed index and weight."""
    counts = np.maximum(hi - lo, 0)
    total = int(counts.sum())
    starts = np.repeat(lo, counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    return starts + offsets, np.repeat(fixed, counts), np.repeat(w, counts)


def rasterize_trees(trees, net_weight: dict, nx: int, ny: int, x_lines, y_lines):
    """Accumulate net weight on every grid edge each tree segment crosses."""
    h = np.zeros((nx - 1, ny))
    v = np.zeros((nx, ny - 1))
    segs, wts = [], []
    for t in trees:
        if t.net_id not in net_weight:
            raise ConfigError(f"tree references unknown net {t.net_id!r}")
        segs.extend(t.segments)
        wts.extend([net_weight[t.net_id]] * len(t.segments))
    if not segs:
        return h, v
    segs = np.array(segs, dtype=float)
    wts = np.asarray(wts, dtype=float)
    # canonical order so floating-point accumulation ignores net order
    order = np.lexsort((wts, segs[:, 3], segs[:, 2], segs[:, 1], segs[:, 0]))
    segs, wts = segs[order], wts[order]
    (hs, row, lo, hi), (vs, col, vlo, vhi) = segment_crossings(segs, x_lines, y_lines)
    ci, rj, w = _expand(lo, hi, row, wts[hs])
    np.add.at(h, (ci, rj), w)
    rj, ci, w = _expand(vlo, vhi, col, wts[vs])
    np.add.at(v, (ci, rj), w)
    return h, v


def build_grid_graph(netlist, nx: int, ny: int, trees, node_points=None,
                     positions=None) -> GridGraph:
    """Form the weighted grid graph of a placed netlist.

    Node weight is the pin count per grid (one pin per cell and net
    membership).  ``node_points`` may instead supply ``(xy, weights)``
    arrays whose weights are binned directly; the recursive driver uses
    this to carry root-grid weights into sub-layouts.  ``positions``
    overrides cell coordinates for ``cell_of_grid``.
    """
    if nx < 2 or ny < 2:
        raise ConfigError(f"grid dimensions must be >= 2, got {nx} x {ny}")
    x_lines = grid_lines(netlist.layout_width, nx)
    y_lines = grid_lines(netlist.layout_height, ny)
    xy = netlist.xy if positions is None else np.asarray(positions, dtype=float)

    node = np.zeros(nx * ny)
    if node_points is None:
        flat_cells = bin_coords(xy[:, 0], x_lines) * ny + bin_coords(xy[:, 1], y_lines)
        np.add.at(node, flat_cells, netlist.cell_degree)
    else:
        pxy, pw = node_points
        pxy = np.asarray(pxy, dtype=float).reshape(-1, 2)
        flat_pts = bin_coords(pxy[:, 0], x_lines) * ny + bin_coords(pxy[:, 1], y_lines)
        np.add.at(node, flat_pts, np.asarray(pw, dtype=float))

    flat_cells = bin_coords(xy[:, 0], x_lines) * ny + bin_coords(xy[:, 1], y_lines)
    buckets = [[] for _ in range(nx * ny)]
    for cell, g in zip(netlist.cells, flat_cells.tolist()):
        buckets[g].append(cell.id)

    weights = {n.id: n.weight for n in netlist.nets}
    h, v = rasterize_trees(trees, weights, nx, ny, x_lines, y_lines)
    return GridGraph(netlist.layout_width, netlist.layout_height, nx, ny,
                     node.reshape(nx, ny), h, v, tuple(tuple(b) for b in buckets))


def laplacian(g: GridGraph) -> sp.csr_matrix:
    """Weighted grid Laplacian ``L = D - A`` (sparse, symmetric)."""
    u, v, w = g.edge_list
    n = g.n_nodes
    a = sp.coo_matrix((np.concatenate([w, w]), (np.concatenate([u, v]), np.concatenate([v, u]))),
                      shape=(n, n)).tocsr()
    deg = np.asarray(a.sum(axis=1)).ravel()
    return (sp.diags(deg) - a).tocsr()


def node_weight_vector(g: GridGraph) -> np.ndarray:
    """Diagonal of the node-weight matrix, flat-index order."""
    return g.node_weight.ravel().copy()


def dump_grid_csv(g: GridGraph, path) -> None:
    """Debug dump: one row per grid with its node weight and right/up edge weights."""
    lines = ["i,j,node_weight,right_edge_weight,up_edge_weight"]
    for i in range(g.nx):
        for j in range(g.ny):
            r = g.h_edge_weight[i, j] if i < g.nx - 1 else 0.0
            u = g.v_edge_weight[i, j] if j < g.ny - 1 else 0.0
            lines.append(f"{i},{j},{g.node_weight[i, j]!r},{r!r},{u!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
