"""Evaluation metrics: spatial cut size, fragments, balance, critical crossings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import ConfigError, CoverageError
from .gridgraph import GridGraph, segment_crossings

# 4-connectivity: grid edges join side-adjacent grids only
_FOUR = ndimage.generate_binary_structure(2, 1)
# neighbours fetched per empty grid when filling; covers every lattice tie set
_FILL_K = 16


@dataclass
class PartitionResult:
    cell_label: dict[str, int]
    grid_label: np.ndarray          # (nx * ny,) root-grid labels, flat order
    cut_size: float
    fragments: int
    per_partition_weight: list[float]
    critical_crossings: int
    feasible: bool
    k: int
    epsilon: float
    extra: dict = field(default_factory=dict)

    def metrics_dict(self) -> dict:
        return {
            "cut_size": float(self.cut_size),
            "fragments": int(self.fragments),
            "per_partition_weight": [float(w) for w in self.per_partition_weight],
            "critical_crossings": int(self.critical_crossings),
            "feasible": bool(self.feasible),
            "epsilon": float(self.epsilon),
            "k": int(self.k),
        }


def _check_labels(grid_label, g: GridGraph) -> np.ndarray:
    lab = np.asarray(grid_label).ravel()
    if lab.shape[0] != g.n_nodes:
        raise ConfigError(f"{lab.shape[0]} grid labels for a {g.nx} x {g.ny} grid")
    return lab


def spatial_cut_size(grid_label, g: GridGraph) -> float:
    """Total weight of grid edges whose endpoints carry different labels."""
    lab = _check_labels(grid_label, g).reshape(g.nx, g.ny)
    h = g.h_edge_weight[lab[1:, :] != lab[:-1, :]].sum()
    v = g.v_edge_weight[lab[:, 1:] != lab[:, :-1]].sum()
    return float(h + v)


def nearest_source(grid_label, g: GridGraph) -> np.ndarray:
    """Flat index of the labelled grid each grid copies its label from.

    Labelled grids (``>= 0``) point at themselves; every other grid points
    at the labelled grid with the nearest center, ties to the lower index.
    """
    lab = _check_labels(grid_label, g)
    src = np.arange(g.n_nodes)
    empty = np.nonzero(lab < 0)[0]
    known = np.nonzero(lab >= 0)[0]
    if len(empty) == 0:
        return src
    if len(known) == 0:
        raise ConfigError("no labelled grid to fill from")
    c = g.grid_centers
    kk = min(_FILL_K, len(known))
    _, idx = cKDTree(c[known]).query(c[empty], k=kk)
    idx = idx.reshape(len(empty), kk)
    # exact squared distances so ties are decided by index, not by float noise
    d2 = ((c[empty, None, :] - c[known[idx]]) ** 2).sum(axis=2)
    near = d2 == d2.min(axis=1, keepdims=True)
    pick = np.where(near, known[idx], np.iinfo(np.int64).max).min(axis=1)
    # a full tie set may spill past the kk neighbours queried; recheck those rows
    spill = near[:, -1] & (kk < len(known))
    for r in np.nonzero(spill)[0]:
        full = ((c[known] - c[empty[r]]) ** 2).sum(axis=1)
        pick[r] = known[np.nonzero(full == full.min())[0][0]]
    src[empty] = pick
    return src


def fill_unlabeled(grid_label, g: GridGraph) -> np.ndarray:
    """Give each grid labelled -1 the label of the nearest labelled grid center.

    Distance ties go to the lower flat index.
    """
    lab = _check_labels(grid_label, g).astype(np.int64)
    return lab[nearest_source(lab, g)]


def fragments(grid_label, g: GridGraph) -> int:
    """Number of 4-connected single-label regions over the grid."""
    lab = fill_unlabeled(grid_label, g).reshape(g.nx, g.ny)
    total = 0
    for value in np.unique(lab):
        _, n = ndimage.label(lab == value, structure=_FOUR)
        total += n
    return int(total)


def net_crossing_counts(grid_label, g: GridGraph, trees):
    """Per-tree number of segment crossings of borders between differing labels."""
    lab = _check_labels(grid_label, g).reshape(g.nx, g.ny)
    hdiff = lab[1:, :] != lab[:-1, :]
    vdiff = lab[:, 1:] != lab[:, :-1]
    counts = []
    for t in trees:
        if not t.segments:
            counts.append(0)
            continue
        (hs, row, lo, hi), (vs, col, vlo, vhi) = segment_crossings(
            np.array(t.segments), g.x_lines, g.y_lines)
        c = 0
        for r, a, b in zip(row.tolist(), lo.tolist(), hi.tolist()):
            c += int(hdiff[a:b, r].sum())
        for q, a, b in zip(col.tolist(), vlo.tolist(), vhi.tolist()):
            c += int(vdiff[q, a:b].sum())
        counts.append(c)
    return counts


def critical_crossings(result: PartitionResult, nets, trees, weight_threshold, g: GridGraph) -> int:
    """Crossings of the partition boundary by nets of weight ``>= weight_threshold``."""
    if weight_threshold is None:
        return 0
    if weight_threshold < 0:
        raise ConfigError("threshold must be non-negative")
    weight = {n.id: n.weight for n in nets}
    crit = [t for t in trees if weight[t.net_id] >= weight_threshold]
    return int(sum(net_crossing_counts(result.grid_label, g, crit)))


def partition_weights(grid_label, g: GridGraph, k: int) -> list[float]:
    lab = _check_labels(grid_label, g)
    w = np.bincount(lab, weights=g.node_weight.ravel(), minlength=k)
    return [float(x) for x in w[:k]]


def balance_feasible(weights, epsilon: float) -> bool:
    """Every partition weight within ``[(1/k - eps) W, (1/k + eps) W]``."""
    k = len(weights)
    total = float(sum(weights))
    lo, hi = (1.0 / k - epsilon) * total, (1.0 / k + epsilon) * total
    slack = 1e-9 * max(total, 1.0)
    return all(lo - slack <= w <= hi + slack for w in weights)


def grid_labels_from_cells(cell_labels, g: GridGraph, xy) -> np.ndarray:
    """Majority label by cell count per grid (ties to the lower label); -1 where no cell lies."""
    cell_labels = np.asarray(cell_labels, dtype=np.int64)
    grid = g.assign(xy[:, 0], xy[:, 1])
    k = int(cell_labels.max()) + 1 if len(cell_labels) else 1
    votes = np.zeros((g.n_nodes, k))
    np.add.at(votes, (grid, cell_labels), 1.0)
    cnt = np.zeros(g.n_nodes)
    np.add.at(cnt, grid, 1.0)
    lab = np.argmax(votes, axis=1)
    lab[cnt == 0] = -1
    return lab


def assemble_result(netlist, g: GridGraph, trees, grid_label, k: int, epsilon: float,
                    critical_threshold=None, cell_label=None) -> PartitionResult:
    """Score a labelling of the root grid (cells inherit their grid's label
    unless ``cell_label`` is given)."""
    lab = fill_unlabeled(grid_label, g)
    if cell_label is None:
        cell_grid = g.assign(netlist.xy[:, 0], netlist.xy[:, 1])
        cells = lab[cell_grid]
    else:
        cells = np.asarray(cell_label, dtype=np.int64)
    weights = np.bincount(cells, weights=netlist.cell_degree, minlength=k)[:k].tolist()
    res = PartitionResult(
        cell_label={c.id: int(p) for c, p in zip(netlist.cells, cells.tolist())},
        grid_label=lab,
        cut_size=spatial_cut_size(lab, g),
        fragments=fragments(lab, g),
        per_partition_weight=[float(w) for w in weights],
        critical_crossings=0,
        feasible=balance_feasible(weights, epsilon),
        k=k,
        epsilon=epsilon,
    )
    res.critical_crossings = critical_crossings(res, netlist.nets, trees, critical_threshold, g)
    return res


def evaluate_assignment(netlist, labels: dict, g: GridGraph, trees, epsilon: float,
                        critical_threshold=None, k=None) -> PartitionResult:
    """Metrics for an externally produced ``cell id -> partition`` map."""
    missing = [c.id for c in netlist.cells if c.id not in labels]
    if missing:
        raise CoverageError(f"{len(missing)} cells lack a label, e.g. {missing[0]!r}")
    cells = np.array([labels[c.id] for c in netlist.cells], dtype=np.int64)
    if (cells < 0).any():
        raise ConfigError("partition labels must be non-negative")
    if k is None:
        k = int(cells.max()) + 1
    grid = grid_labels_from_cells(cells, g, netlist.xy)
    return assemble_result(netlist, g, trees, grid, k, epsilon, critical_threshold,
                           cell_label=cells)


def is_power_of_two(k: int) -> bool:
    return k >= 1 and (k & (k - 1)) == 0 and math.log2(k) == int(math.log2(k))
