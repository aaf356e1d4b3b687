"""Rectilinear Steiner tree estimates for nets.

The heuristic builds a Prim minimum spanning tree under the Manhattan
metric and realizes every tree edge as an L-shape.  Overlapping legs are
merged, so the reported length is the length of the wire union.  Three
pin nets use the exact median-point construction.

``steiner_oracle`` is an exhaustive reference used by the tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

ORACLE_MAX_PINS = 7


@dataclass(frozen=True)
class RectTree:
    net_id: str | None
    segments: tuple[tuple[float, float, float, float], ...]

    @property
    def length(self) -> float:
        return float(sum(abs(x2 - x1) + abs(y2 - y1) for x1, y1, x2, y2 in self.segments))


def canonical_pins(pins) -> list[tuple[float, float]]:
    """Distinct pins sorted by (x, y)."""
    return sorted({(float(x), float(y)) for x, y in pins})


def _prim_edges(pts: np.ndarray) -> list[tuple[int, int]]:
    n = len(pts)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    dist = np.abs(pts - pts[0]).sum(axis=1)
    parent = np.zeros(n, dtype=np.int64)
    edges = []
    for _ in range(n - 1):
        cand = np.where(in_tree, np.inf, dist)
        v = int(np.argmin(cand))  # first minimum keeps ties deterministic
        edges.append((int(parent[v]), v))
        in_tree[v] = True
        d = np.abs(pts - pts[v]).sum(axis=1)
        closer = (d < dist) & ~in_tree
        dist[closer] = d[closer]
        parent[closer] = v
    return edges


def _merge(intervals):
    intervals.sort()
    out = []
    for lo, hi in intervals:
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1][1] = hi
        else:
            out.append([lo, hi])
    return out


class _WireSet:
    """Union of axis-aligned wires kept as merged intervals per track."""

    def __init__(self):
        self.h: dict[float, list] = {}
        self.v: dict[float, list] = {}

    @staticmethod
    def _covered(track, lo, hi):
        if track is None or hi <= lo:
            return 0.0
        return sum(max(0.0, min(hi, b) - max(lo, a)) for a, b in track)

    def added_length(self, segs):
        extra = 0.0
        for x1, y1, x2, y2 in segs:
            if y1 == y2:
                lo, hi = sorted((x1, x2))
                extra += (hi - lo) - self._covered(self.h.get(y1), lo, hi)
            else:
                lo, hi = sorted((y1, y2))
                extra += (hi - lo) - self._covered(self.v.get(x1), lo, hi)
        return extra

    def add(self, segs):
        for x1, y1, x2, y2 in segs:
            if x1 == x2 and y1 == y2:
                continue
            if y1 == y2:
                track = self.h.setdefault(y1, [])
                track.append(list(sorted((x1, x2))))
                self.h[y1] = _merge(track)
            else:
                track = self.v.setdefault(x1, [])
                track.append(list(sorted((y1, y2))))
                self.v[x1] = _merge(track)

    def segments(self):
        segs = []
        for y in sorted(self.h):
            segs.extend((a, y, b, y) for a, b in self.h[y] if b > a)
        for x in sorted(self.v):
            segs.extend((x, a, x, b) for a, b in self.v[x] if b > a)
        return tuple(segs)


def _l_shape(p, q, corner):
    return [(p[0], p[1], corner[0], corner[1]), (corner[0], corner[1], q[0], q[1])]


def steiner_tree(pins, net_id=None) -> RectTree:
    """Rectilinear tree spanning ``pins`` (duplicates are ignored)."""
    pts = canonical_pins(pins)
    if len(pts) < 2:
        raise ConfigError(f"net {net_id!r}: need at least 2 distinct pins, got {len(pts)}")
    wires = _WireSet()
    if len(pts) == 3:
        sx = sorted(p[0] for p in pts)[1]
        sy = sorted(p[1] for p in pts)[1]
        for p in pts:
            wires.add(_l_shape(p, (sx, sy), (sx, p[1])))
        return RectTree(net_id, wires.segments())

    arr = np.array(pts)
    for a, b in _prim_edges(arr):
        p, q = pts[a], pts[b]
        # lower corner first, then left
        c1, c2 = sorted([(q[0], p[1]), (p[0], q[1])], key=lambda c: (c[1], c[0]))
        s1, s2 = _l_shape(p, q, c1), _l_shape(p, q, c2)
        wires.add(s2 if wires.added_length(s2) < wires.added_length(s1) else s1)
    return RectTree(net_id, wires.segments())


def _batched_mst_length(pts: np.ndarray) -> np.ndarray:
    """Manhattan MST length for a batch of point sets, shape (B, n, 2)."""
    b, n, _ = pts.shape
    d = np.abs(pts[:, :, None, :] - pts[:, None, :, :]).sum(axis=3)
    in_tree = np.zeros((b, n), dtype=bool)
    in_tree[:, 0] = True
    best = d[:, 0, :].copy()
    total = np.zeros(b)
    rows = np.arange(b)
    for _ in range(n - 1):
        cand = np.where(in_tree, np.inf, best)
        v = np.argmin(cand, axis=1)
        total += cand[rows, v]
        in_tree[rows, v] = True
        best = np.minimum(best, d[rows, v, :])
    return total


def steiner_oracle(pins) -> float:
    """Exact rectilinear Steiner minimal tree length by exhaustive search.

    Every subset of at most n-2 Hanan-grid points is added to the pins and
    the Manhattan MST of the union is measured; the minimum is the RSMT
    length.  Limited to ``ORACLE_MAX_PINS`` distinct pins.
    """
    pts = canonical_pins(pins)
    n = len(pts)
    if n < 2:
        raise ConfigError("need at least 2 distinct pins")
    if n > ORACLE_MAX_PINS:
        raise ConfigError(f"oracle limited to {ORACLE_MAX_PINS} pins, got {n}")
    base = np.array(pts)
    best = float(_batched_mst_length(base[None])[0])
    pinset = set(pts)
    xs = sorted({p[0] for p in pts})
    ys = sorted({p[1] for p in pts})
    hanan = np.array([(x, y) for x in xs for y in ys if (x, y) not in pinset]).reshape(-1, 2)
    for k in range(1, min(n - 2, len(hanan)) + 1):
        for chunk in _chunks(itertools.combinations(range(len(hanan)), k), 20000):
            idx = np.array(chunk)
            extra = hanan[idx]
            batch = np.concatenate([np.broadcast_to(base, (len(idx), n, 2)), extra], axis=1)
            best = min(best, float(_batched_mst_length(batch).min()))
    return best


def _chunks(it, size):
    it = iter(it)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield block


def net_trees(netlist, positions=None) -> list[RectTree]:
    """Trees for every net whose pins occupy at least 2 distinct locations.

    ``positions`` optionally overrides cell coordinates (same order as
    ``netlist.cells``).
    """
    xy = netlist.xy if positions is None else np.asarray(positions, dtype=float)
    trees = []
    for net, members in zip(netlist.nets, netlist.net_cell_indices):
        pins = [tuple(p) for p in xy[members]]
        if len(set(pins)) >= 2:
            trees.append(steiner_tree(pins, net.id))
    return trees
