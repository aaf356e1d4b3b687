"""Polar boundary fan and its cost.

A boundary is anchored at one layout corner ``o``.  The quarter turn at
that corner is split into ``m`` angles of ``theta = pi / (2m)``; boundary
point ``b_i`` sits at radius ``r_i`` on the ray at angle ``i * theta``.
Grid centers covered by any triangle ``o b_i b_{i+1}`` form partition 1.

All geometry is evaluated in a corner-local frame: layout coordinates
are reflected so the chosen corner becomes the origin and the layout
occupies the positive quadrant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ConfigError, DegenerateGridError
from .gridgraph import GridGraph, laplacian, node_weight_vector

# degenerate-triangle threshold relative to R_max ** 2
AREA_EPS = 1e-12
# slack on the sector index when picking candidate triangles
_SECTOR_SLACK = 1e-9


class Corner(enum.IntEnum):
    BL = 0
    BR = 1
    TL = 2
    TR = 3


def to_local(xy, corner: Corner, width: float, height: float) -> np.ndarray:
    """Reflect layout coordinates into the frame of ``corner`` (an involution)."""
    pts = np.array(xy, dtype=float, copy=True).reshape(-1, 2)
    if corner in (Corner.BR, Corner.TR):
        pts[:, 0] = width - pts[:, 0]
    if corner in (Corner.TL, Corner.TR):
        pts[:, 1] = height - pts[:, 1]
    return pts


from_local = to_local


@dataclass(frozen=True)
class CostParams:
    alpha_c: float = 1.0
    alpha_b: float = 4.0

    def __post_init__(self):
        if self.alpha_c < 0 or self.alpha_b < 0:
            raise ConfigError("cost weights must be non-negative")
        if self.alpha_c == 0 and self.alpha_b == 0:
            raise ConfigError("alpha_c and alpha_b cannot both be zero")


@dataclass(frozen=True, eq=False)
class Boundary:
    corner: Corner
    m: int
    radii: np.ndarray  # r_0 .. r_m
    width: float
    height: float

    def __post_init__(self):
        if self.m < 2:
            raise ConfigError(f"need at least 2 angles, got m={self.m}")
        r = np.asarray(self.radii, dtype=float)
        if r.shape != (self.m + 1,):
            raise ConfigError(f"expected {self.m + 1} radii, got shape {r.shape}")
        object.__setattr__(self, "corner", Corner(self.corner))
        object.__setattr__(self, "radii", np.clip(r, 0.0, self.r_max))

    @property
    def theta(self) -> float:
        return math.pi / (2 * self.m)

    @property
    def r_max(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def origin(self) -> np.ndarray:
        return from_local([[0.0, 0.0]], self.corner, self.width, self.height)[0]

    def local_points(self) -> np.ndarray:
        ang = np.arange(self.m + 1) * self.theta
        return np.column_stack([self.radii * np.cos(ang), self.radii * np.sin(ang)])

    def points(self) -> np.ndarray:
        """Boundary points ``b_0 .. b_m`` in layout coordinates."""
        return from_local(self.local_points(), self.corner, self.width, self.height)


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def cover(v, o, b_i, b_i1, eps_area: float = 0.0) -> int:
    """1 if ``v`` lies in the closed triangle ``o b_i b_i1``, else 0.

    The three edge cross products must share a sign (zero counts as
    either).  Triangles with area ``<= eps_area`` cover nothing.
    """
    vx, vy = v
    ox, oy = o
    ax, ay = b_i
    bx, by = b_i1
    area = 0.5 * abs(_cross(ax - ox, ay - oy, bx - ox, by - oy))
    if area <= eps_area:
        return 0
    c1 = _cross(ax - ox, ay - oy, vx - ox, vy - oy)
    c2 = _cross(bx - ax, by - ay, vx - ax, vy - ay)
    c3 = _cross(ox - bx, oy - by, vx - bx, vy - by)
    inside = (c1 >= 0 and c2 >= 0 and c3 >= 0) or (c1 <= 0 and c2 <= 0 and c3 <= 0)
    return int(inside)


@numba.njit(cache=True, nogil=True)
def _fan_labels(vx, vy, cand_lo, cand_hi, bx, by, eps_area, out):
    for k in range(vx.shape[0]):
        hit = 0
        for pass_ in range(2):
            i = cand_lo[k] if pass_ == 0 else cand_hi[k]
            if pass_ == 1 and i == cand_lo[k]:
                break
            ax, ay, cx, cy = bx[i], by[i], bx[i + 1], by[i + 1]
            if 0.5 * abs(ax * cy - ay * cx) <= eps_area:
                continue
            px, py = vx[k], vy[k]
            c1 = ax * py - ay * px
            c2 = (cx - ax) * (py - ay) - (cy - ay) * (px - ax)
            c3 = (-cx) * (py - cy) - (-cy) * (px - cx)
            if (c1 >= 0 and c2 >= 0 and c3 >= 0) or (c1 <= 0 and c2 <= 0 and c3 <= 0):
                hit = 1
                break
        out[k] = hit


@numba.njit(cache=True, nogil=True)
def _quad_and_weight(p, indptr, indices, data, dw):
    """``(P L P^T, P . dw)`` for a 0/1 vector and CSR Laplacian."""
    quad = 0.0
    pw = 0.0
    for row in range(p.shape[0]):
        if p[row] == 0:
            continue
        pw += dw[row]
        acc = 0.0
        for q in range(indptr[row], indptr[row + 1]):
            if p[indices[q]] != 0:
                acc += data[q]
        quad += acc
    return quad, pw


class FanEvaluator:
    """Partition vector and cost of fan boundaries on one grid and corner.

    Triangle ``o b_i b_{i+1}`` lies inside the wedge between the rays at
    ``i * theta`` and ``(i + 1) * theta``, so each grid center is tested
    only against the (at most two) triangles whose wedge contains it.
    The per-center work is independent, so the result does not depend on
    how the centers are split across workers.
    """

    def __init__(self, g: GridGraph, corner: Corner, m: int, params: CostParams | None = None,
                 points=None):
        self.g = g
        self.corner = Corner(corner)
        self.m = int(m)
        if self.m < 2:
            raise ConfigError(f"need at least 2 angles, got m={m}")
        self.params = params
        self.theta = math.pi / (2 * self.m)
        self.r_max = math.hypot(g.width, g.height)
        self.eps_area = AREA_EPS * self.r_max ** 2
        pts = g.grid_centers if points is None else np.asarray(points, dtype=float)
        loc = to_local(pts, self.corner, g.width, g.height)
        self.vx, self.vy = np.ascontiguousarray(loc[:, 0]), np.ascontiguousarray(loc[:, 1])
        sector = np.arctan2(self.vy, self.vx) / self.theta
        last = self.m - 1
        self.cand = (np.clip(np.floor(sector - _SECTOR_SLACK), 0, last).astype(np.int64),
                     np.clip(np.floor(sector + _SECTOR_SLACK), 0, last).astype(np.int64))
        ang = np.arange(self.m + 1) * self.theta
        self.cos, self.sin = np.cos(ang), np.sin(ang)
        self._lap = None

    def radii_from(self, r0: float, deltas) -> np.ndarray:
        """Cumulative radii ``r_i = r_{i-1} + dr_i`` clamped to ``[0, R_max]``."""
        r = r0 + np.concatenate([[0.0], np.cumsum(deltas)])
        return np.clip(r, 0.0, self.r_max)

    def labels(self, radii) -> np.ndarray:
        r = np.clip(np.asarray(radii, dtype=float), 0.0, self.r_max)
        out = np.empty(len(self.vx), dtype=np.int8)
        _fan_labels(self.vx, self.vy, self.cand[0], self.cand[1], r * self.cos, r * self.sin,
                    self.eps_area, out)
        return out

    @property
    def lap(self):
        if self._lap is None:
            g = self.g
            self._lap = laplacian(g)
            self._dw = node_weight_vector(g)
            self._we = g.total_edge_weight
            self._wv = g.total_node_weight
        return self._lap

    def evaluate(self, radii):
        """``(cost, labels, cut, imbalance)`` for a radius vector."""
        if self.params is None:
            raise ConfigError("evaluator built without cost parameters")
        lap = self.lap
        p = self.labels(radii)
        cut, pw = _quad_and_weight(p, lap.indptr, lap.indices, lap.data, self._dw)
        ub = abs(2.0 * pw - self._wv)
        return _combine(self.params, cut, ub, self._we, self._wv), p, cut, ub


def _combine(params: CostParams, cut, ub, we, wv):
    if wv <= 0:
        raise DegenerateGridError("total node weight is zero")
    total = params.alpha_b * ub / wv
    if params.alpha_c:
        if we <= 0:
            raise DegenerateGridError("total edge weight is zero")
        total += params.alpha_c * cut / we
    return total


def partition_vector(boundary: Boundary, g: GridGraph) -> np.ndarray:
    """0/1 label per grid center (flat order); 1 means inside the fan."""
    if not (math.isclose(boundary.width, g.width) and math.isclose(boundary.height, g.height)):
        raise ConfigError("boundary and grid describe different layouts")
    return FanEvaluator(g, boundary.corner, boundary.m).labels(boundary.radii)


def cut_size(p, lap) -> float:
    """Quadratic form ``P L P^T``: total weight of edges whose ends differ."""
    pf = np.asarray(p, dtype=float).ravel()
    if lap.shape != (len(pf), len(pf)):
        raise ConfigError(f"partition vector of length {len(pf)} vs Laplacian {lap.shape}")
    return float(pf @ (lap @ pf))


def imbalance(p, dw, wv: float) -> float:
    """``|2 P D_w P^T - W_v|`` for a 0/1 vector and node-weight diagonal."""
    pf = np.asarray(p, dtype=float).ravel()
    dw = np.asarray(dw, dtype=float).ravel()
    if pf.shape != dw.shape:
        raise ConfigError(f"partition vector of length {len(pf)} vs {len(dw)} node weights")
    return abs(2.0 * float(pf @ (dw * pf)) - wv)


def cost(boundary: Boundary, g: GridGraph, params: CostParams) -> float:
    """Normalized cut plus imbalance for the partition induced by ``boundary``."""
    we, wv = g.total_edge_weight, g.total_node_weight
    if we <= 0 or wv <= 0:
        raise DegenerateGridError(f"degenerate grid: W_e={we}, W_v={wv}")
    p = partition_vector(boundary, g)
    return _combine(params, cut_size(p, laplacian(g)), imbalance(p, node_weight_vector(g), wv),
                    we, wv)
