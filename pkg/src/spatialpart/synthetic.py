"""Synthetic placed netlists for tests, benchmarks and demos."""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .netlist import make_netlist


def uniform_instance(n_cells=2000, n_nets=1000, width=100.0, height=100.0, seed=0,
                     max_pins=4, locality=0.1, weight_range=(1.0, 1.0)):
    """Uniformly placed cells; each net joins nearby cells.

    A net picks a random anchor cell and 1..max_pins-1 further cells within
    ``locality * diagonal`` of it (falling back to random cells).
    """
    rng = np.random.default_rng(seed)
    xy = rng.uniform([0.0, 0.0], [width, height], size=(n_cells, 2))
    radius = locality * float(np.hypot(width, height))
    tree = cKDTree(xy)
    anchors = rng.integers(n_cells, size=n_nets)
    hoods = tree.query_ball_point(xy[anchors], radius, return_sorted=True)
    nets = []
    for k, (a, near) in enumerate(zip(anchors.tolist(), hoods)):
        near = np.asarray(near, dtype=np.int64)
        near = near[near != a]
        extra = int(rng.integers(1, max_pins))
        if len(near) >= extra:
            others = rng.choice(near, size=extra, replace=False)
        else:
            others = rng.choice(np.delete(np.arange(n_cells), a), size=extra, replace=False)
        w = float(rng.uniform(*weight_range)) if weight_range[0] != weight_range[1] else weight_range[0]
        nets.append((f"n{k}", w, [f"c{a}"] + [f"c{int(o)}" for o in others]))
    cells = [(f"c{i}", float(x), float(y)) for i, (x, y) in enumerate(xy)]
    return make_netlist(width, height, cells, nets)


def cluster_instance(n_per_cluster=100, nets_per_cluster=150, width=100.0, height=100.0,
                     spread=0.08, seed=0, centers=None, identical=True):
    """Well-separated clusters of cells; every net stays inside one cluster.

    With ``identical`` every cluster is a translated copy of one template,
    so the clusters carry equal pin weight.
    """
    rng = np.random.default_rng(seed)
    if centers is None:
        centers = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)]

    def draw():
        pts = rng.uniform(-spread, spread, size=(n_per_cluster, 2))
        members = [rng.choice(n_per_cluster, size=int(rng.integers(2, 5)), replace=False)
                   for _ in range(nets_per_cluster)]
        return pts, members

    template = draw() if identical else None
    cells, nets = [], []
    for ci, (fx, fy) in enumerate(centers):
        pts, members = template if identical else draw()
        ids = [f"k{ci}_{i}" for i in range(n_per_cluster)]
        xs = (fx + pts[:, 0]) * width
        ys = (fy + pts[:, 1]) * height
        cells.extend((cid, float(x), float(y)) for cid, x, y in zip(ids, xs, ys))
        for k, mem in enumerate(members):
            nets.append((f"k{ci}_n{k}", 1.0, [ids[int(i)] for i in mem]))
    return make_netlist(width, height, cells, nets)
