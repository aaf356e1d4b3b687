"""Recursive k-way partitioning by repeated 2-way fan splits.

Each recursion node owns a set of cells placed in its own rectangular
sub-layout, plus one "probe" per root grid that landed in it.  A probe
carries the pin weight of its root grid, so balance at every level is
measured on exactly the weights the final labelling uses.  After a split
each side's grid centers are meshed, embedded into a fresh rectangle and
both cells and probes are carried along.  A root grid's final label is its
probe's leaf; every cell takes the label of its root grid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from .annealer import MASK64, SAConfig, best_of_corners, with_alpha_b
from .boundary import CostParams
from .embedding import PointMapper, harmonic_embed, region_mesh
from .errors import ConfigError, DegenerateGridError, EmbeddingError, InfeasibleBalanceError
from .gridgraph import DEFAULT_NX, DEFAULT_NY, build_grid_graph
from .metrics import PartitionResult, assemble_result, is_power_of_two, nearest_source
from .netlist import Cell, Net, PlacedNetlist
from .steiner import net_trees

log = logging.getLogger(__name__)

_FOUR = ndimage.generate_binary_structure(2, 1)

ESCALATIONS = 3
MIN_CHILD_GRID = 8
_PATH_SALT = 0xD6E8FEB86659FD93


@dataclass(frozen=True)
class KWayConfig:
    k: int = 2
    epsilon: float = 0.1
    nx: int = DEFAULT_NX
    ny: int = DEFAULT_NY
    sa: SAConfig = field(default_factory=SAConfig)
    threads: int = 1
    critical_threshold: float | None = None

    def __post_init__(self):
        if self.k < 2 or not is_power_of_two(self.k):
            raise ConfigError(f"k must be a power of two >= 2, got {self.k}")
        if not 0 < self.epsilon <= 1.0 / self.k:
            raise ConfigError(f"epsilon must lie in (0, 1/k], got {self.epsilon}")
        if self.nx < 2 or self.ny < 2:
            raise ConfigError("grid dimensions must be >= 2")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    @property
    def depth(self) -> int:
        return int(math.log2(self.k))


@dataclass
class RecursionNode:
    depth: int
    label_prefix: str
    cell_ids: np.ndarray        # indices into the root netlist's cells
    cell_xy: np.ndarray         # cell coordinates in this node's sub-layout
    probe_ids: np.ndarray       # root grid flat indices
    probe_xy: np.ndarray
    probe_w: np.ndarray
    cell_grid: np.ndarray       # root grid of each cell
    width: float
    height: float
    nx: int
    ny: int

    @property
    def sub_layout(self) -> tuple[float, float]:
        return (self.width, self.height)


@dataclass
class SplitInfo:
    path: str
    corner: str
    cost: float
    cut: float
    imbalance: float
    alpha_b: float
    feasible: bool
    radii: tuple = ()        # winning fan, in this node's sub-layout frame


def node_seed(seed: int, path: str) -> int:
    """Per-node seed: ``seed XOR`` a mix of the path bits (root keeps ``seed``)."""
    if not path:
        return seed & MASK64
    code = int("1" + path, 2)
    return (seed ^ ((code * _PATH_SALT) & MASK64)) & MASK64


def child_dims(nx: int, ny: int) -> tuple[int, int]:
    return (max(MIN_CHILD_GRID, round(nx / math.sqrt(2))),
            max(MIN_CHILD_GRID, round(ny / math.sqrt(2))))


def _sub_netlist(root: PlacedNetlist, node: RecursionNode) -> PlacedNetlist:
    """Cells of ``node`` at their embedded positions, with nets restricted to them."""
    inside = np.full(len(root.cells), -1, dtype=np.int64)
    inside[node.cell_ids] = np.arange(len(node.cell_ids))
    xy = np.clip(node.cell_xy, 0.0, [node.width, node.height])
    cells = tuple(Cell(root.cells[c].id, float(x), float(y))
                  for c, (x, y) in zip(node.cell_ids.tolist(), xy.tolist()))
    nets = []
    for net, members in zip(root.nets, root.net_cell_indices):
        local = inside[members]
        local = local[local >= 0]
        if len(local) >= 2:
            nets.append(Net(net.id, net.weight, tuple(cells[i].id for i in local.tolist())))
    return PlacedNetlist(node.width, node.height, cells, tuple(nets), _checked=True)


def split_level(root: PlacedNetlist, node: RecursionNode, cfg: KWayConfig, log_splits=None,
                traces=None, trees=None):
    """Bisect ``node``; returns ``(labels_of_probes, labels_of_cells, children)``.

    ``children`` is empty at the last level.  ``traces``, when a list,
    collects one record per annealing iteration (this forces serial corners).
    """
    if len(node.cell_ids) < 2:
        raise ConfigError(f"node {node.label_prefix!r} has fewer than 2 cells")
    if node.depth >= cfg.depth:
        raise ConfigError("node is already a leaf")
    sub = _sub_netlist(root, node)
    if trees is None:
        trees = net_trees(sub)
    g = build_grid_graph(sub, node.nx, node.ny, trees, node_points=(node.probe_xy, node.probe_w))
    if g.total_node_weight <= 0:
        raise DegenerateGridError(f"node {node.label_prefix!r} carries no pin weight")

    sa = replace(cfg.sa, seed=node_seed(cfg.sa.seed, node.label_prefix))
    if g.total_edge_weight <= 0:
        # no internal net: only balance matters
        sa = replace(sa, params=CostParams(alpha_c=0.0, alpha_b=sa.params.alpha_b or 1.0))
    alpha_b = sa.params.alpha_b
    wv = g.total_node_weight
    for attempt in range(ESCALATIONS + 1):
        run_traces = None if traces is None else []
        best, _ = best_of_corners(g, with_alpha_b(sa, alpha_b), threads=cfg.threads,
                                  traces=run_traces)
        if traces is not None:
            traces.extend({"path": node.label_prefix, "attempt": attempt, **rec}
                          for rec in run_traces)
        feasible = best.imbalance <= 2 * cfg.epsilon * wv * (1 + 1e-12)
        if log_splits is not None:
            log_splits.append(SplitInfo(node.label_prefix, best.corner.name, best.cost, best.cut,
                                        best.imbalance, alpha_b, feasible,
                                        tuple(float(r) for r in best.radii)))
        if feasible:
            break
        log.info("split %r imbalance %.4g over tolerance; alpha_b %g -> %g",
                 node.label_prefix, best.imbalance / wv, alpha_b, 2 * alpha_b)
        alpha_b *= 2
    else:
        raise InfeasibleBalanceError(
            f"split {node.label_prefix!r}: imbalance {best.imbalance / wv:.4f} W exceeds "
            f"2*eps = {2 * cfg.epsilon:.4f} W after {ESCALATIONS} escalations",
            path=node.label_prefix)

    labels = best.labels.astype(np.int64)
    probe_lab = labels[g.assign(node.probe_xy[:, 0], node.probe_xy[:, 1])]
    stray = absorb_strays(probe_lab, node.probe_ids, (cfg.nx, cfg.ny))
    if stray:
        log.info("split %r: %d stray root grids absorbed", node.label_prefix, stray)
    # cells follow the label of their root grid
    lut = dict(zip(node.probe_ids.tolist(), probe_lab.tolist()))
    cell_lab = np.array([lut[gi] for gi in node.cell_grid.tolist()], dtype=np.int64)
    children = []
    if node.depth + 1 < cfg.depth:
        cnx, cny = child_dims(node.nx, node.ny)
        for side in (0, 1):
            children.append(_embed_side(node, g, labels, side, probe_lab, cell_lab, cnx, cny))
    return probe_lab, cell_lab, children


def absorb_strays(probe_lab, probe_ids, shape) -> int:
    """Flip root grids cut off from their side's main body to the other side.

    Two root grids that are 4-adjacent can land in child grids that are not
    adjacent, so a split made on a child grid may leave a few root grids
    stranded inside the other side.  Per side, every 4-connected component
    except the largest (ties: the one holding the lowest root index) is
    flipped.  Edits ``probe_lab`` in place; returns the number flipped.
    """
    nx, ny = shape
    flipped = 0
    for _ in range(4):
        changed = 0
        for side in (0, 1):
            mask = np.zeros(nx * ny, dtype=bool)
            mask[probe_ids[probe_lab == side]] = True
            comp, n = ndimage.label(mask.reshape(nx, ny), structure=_FOUR)
            if n <= 1:
                continue
            comp = comp.ravel()[probe_ids]
            sizes = np.bincount(comp, minlength=n + 1)
            sizes[0] = -1
            keep = int(np.argmax(sizes))
            stray = (probe_lab == side) & (comp != keep)
            probe_lab[stray] = 1 - side
            changed += int(stray.sum())
        flipped += changed
        if not changed:
            break
    return flipped


def merge_strays(lab, g, rounds: int = 10) -> int:
    """Make each part one 4-connected region of the nearest-filled grid map.

    ``lab`` holds a label for every occupied grid and -1 elsewhere; empty
    grids are filled from the nearest occupied grid exactly as the metrics
    do.  Every component of a label except its largest (ties: the first in
    scan order) is handed to the neighbouring label sharing the longest
    border (ties: the lower label) by relabelling the occupied grids that
    feed it.  Edits ``lab`` in place and returns the number of occupied
    grids relabelled.
    """
    total = 0
    for _ in range(rounds):
        src = nearest_source(lab, g)
        full = lab[src].reshape(g.nx, g.ny)
        moved = 0
        for v in np.unique(full).tolist():
            comp, n = ndimage.label(full == v, structure=_FOUR)
            if n <= 1:
                continue
            sizes = np.bincount(comp.ravel(), minlength=n + 1)
            sizes[0] = -1
            keep = int(np.argmax(sizes))
            for c in range(1, n + 1):
                if c == keep:
                    continue
                mask = comp == c
                border = np.zeros(int(full.max()) + 1, dtype=np.int64)
                for a, b in ((full[1:, :], mask[:-1, :]), (full[:-1, :], mask[1:, :]),
                             (full[:, 1:], mask[:, :-1]), (full[:, :-1], mask[:, 1:])):
                    nb = a[b]
                    np.add.at(border, nb[nb != v], 1)
                if not border.any():
                    continue
                feeders = np.unique(src[mask.ravel()])
                feeders = feeders[lab[feeders] == v]
                lab[feeders] = int(np.argmax(border))
                moved += len(feeders)
        total += moved
        if not moved:
            break
    return total


def _embed_side(node, g, labels, side, probe_lab, cell_lab, cnx, cny) -> RecursionNode:
    path = node.label_prefix + str(side)
    pmask = probe_lab == side
    cmask = cell_lab == side
    share = node.probe_w[pmask].sum() / node.probe_w.sum()
    w = node.width * math.sqrt(share)
    h = node.height * math.sqrt(share)
    if w <= 0 or h <= 0:
        raise EmbeddingError("side carries no weight", path=path)
    centers = g.grid_centers[labels == side]
    pts = np.vstack([node.probe_xy[pmask], node.cell_xy[cmask]])
    try:
        mesh = region_mesh(centers, math.hypot(g.width / g.nx, g.height / g.ny))
    except ConfigError:
        mapped = _box_map(pts, g, labels == side, w, h)
    else:
        try:
            emb = harmonic_embed(mesh, w, h)
        except EmbeddingError as exc:
            raise EmbeddingError(str(exc), path=path) from None
        mapped = PointMapper(emb, mesh).map(pts)
    mapped = np.clip(mapped, 0.0, [w, h])
    npb = int(pmask.sum())
    return RecursionNode(
        depth=node.depth + 1, label_prefix=path,
        cell_ids=node.cell_ids[cmask], cell_xy=mapped[npb:],
        probe_ids=node.probe_ids[pmask], probe_xy=mapped[:npb], probe_w=node.probe_w[pmask],
        cell_grid=node.cell_grid[cmask],
        width=w, height=h, nx=cnx, ny=cny)


def _box_map(pts, g, region, w, h):
    """Affine map of the region's grid bounding box onto the target rectangle.

    Used when the region's grid centers cannot be triangulated (fewer than
    three or all collinear).
    """
    ii, jj = np.divmod(np.nonzero(region)[0], g.ny)
    x0, x1 = g.x_lines[ii.min()], g.x_lines[ii.max() + 1]
    y0, y1 = g.y_lines[jj.min()], g.y_lines[jj.max() + 1]
    out = np.empty_like(pts)
    out[:, 0] = (pts[:, 0] - x0) / (x1 - x0) * w
    out[:, 1] = (pts[:, 1] - y0) / (y1 - y0) * h
    return out


@dataclass
class KWayRun:
    result: PartitionResult
    root_grid: object
    root_trees: list
    splits: list


def kway_partition(netlist: PlacedNetlist, cfg: KWayConfig, traces=None) -> KWayRun:
    """Partition ``netlist`` into ``cfg.k`` spatially contiguous parts."""
    root_trees = net_trees(netlist)
    g0 = build_grid_graph(netlist, cfg.nx, cfg.ny, root_trees)
    probes = g0.grid_centers
    pw = g0.node_weight.ravel()
    cell_grid = g0.assign(netlist.xy[:, 0], netlist.xy[:, 1])
    root = RecursionNode(0, "", np.arange(len(netlist.cells)), netlist.xy.copy(),
                         np.arange(g0.n_nodes), probes.copy(), pw.copy(), cell_grid,
                         netlist.layout_width, netlist.layout_height, cfg.nx, cfg.ny)
    grid_label = np.zeros(g0.n_nodes, dtype=np.int64)
    splits: list[SplitInfo] = []
    stack = [root]
    while stack:
        node = stack.pop(0)
        probe_lab, _, children = split_level(netlist, node, cfg, splits, traces,
                                                 root_trees if node.depth == 0 else None)
        bit = cfg.depth - 1 - node.depth
        grid_label[node.probe_ids] |= probe_lab << bit
        stack.extend(children)

    occupied = np.full(g0.n_nodes, -1, dtype=np.int64)
    occupied[cell_grid] = grid_label[cell_grid]
    merged = merge_strays(occupied, g0)
    if merged:
        log.info("integration: %d occupied grids merged into a neighbouring part", merged)
    result = assemble_result(netlist, g0, root_trees, occupied, cfg.k, cfg.epsilon,
                             cfg.critical_threshold, cell_label=occupied[cell_grid])
    result.extra["splits"] = splits
    result.extra["merged_grids"] = merged
    return KWayRun(result, g0, root_trees, splits)
