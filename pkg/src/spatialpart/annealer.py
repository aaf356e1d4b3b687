"""Regularity-guided simulated annealing over fan boundaries.

State is a base radius ``r0`` plus ``m`` radius differences; the radii are
their clamped cumulative sum.  Perturbation draws the new differences as
``beta * (T / T_init) * sin(dr_i + N(0, sigma^2))`` and shifts the base
by a uniform step inside the same ``+-beta * T / T_init`` envelope.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numba
import numpy as np

from .boundary import Corner, CostParams, FanEvaluator, _fan_labels, _quad_and_weight
from .errors import ConfigError, DegenerateGridError
from .gridgraph import GridGraph

# sub-seed salts for the four corner runs; seed ^ salt selects the stream
CORNER_SALT = {
    Corner.BL: 0x0000000000000000,
    Corner.BR: 0x9E3779B97F4A7C15,
    Corner.TL: 0xBF58476D1CE4E5B9,
    Corner.TR: 0x94D049BB133111EB,
}
MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SAConfig:
    t_init: float = 1.0
    t_limit: float = 1e-3
    gamma: float = 0.995
    sigma: float = 0.5
    beta: float | None = None  # None: 0.1 * layout diagonal
    m: int = 64
    params: CostParams = field(default_factory=CostParams)
    seed: int = 0

    def __post_init__(self):
        if not self.t_init > 0:
            raise ConfigError("t_init must be positive")
        if not 0 < self.t_limit < self.t_init:
            raise ConfigError("t_limit must lie in (0, t_init)")
        if not 0 < self.gamma < 1:
            raise ConfigError("gamma must lie in (0, 1)")
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if self.beta is not None and not self.beta > 0:
            raise ConfigError("beta must be positive")
        if self.m < 2:
            raise ConfigError("m must be at least 2")

    def beta_for(self, g: GridGraph) -> float:
        return self.beta if self.beta is not None else 0.1 * math.hypot(g.width, g.height)

    @property
    def iterations(self) -> int:
        return math.ceil(math.log(self.t_limit / self.t_init) / math.log(self.gamma))


@dataclass
class SAState:
    r0: float
    deltas: np.ndarray
    temperature: float
    best_r0: float
    best_deltas: np.ndarray
    best_cost: float


@dataclass
class TwoWayResult:
    labels: np.ndarray      # 0/1 per grid, flat order
    cost: float
    corner: Corner
    radii: np.ndarray
    cut: float
    imbalance: float
    iterations: int


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))


def corner_seed(seed: int, corner: Corner) -> int:
    return (seed ^ CORNER_SALT[Corner(corner)]) & MASK64


def perturb(r0: float, deltas, t: float, cfg: SAConfig, rng: np.random.Generator,
            beta: float, r_max: float = math.inf):
    """New ``(r0, deltas)``; draws all normals first, then the base step."""
    if not t > 0:
        raise ConfigError("temperature must be positive")
    amp = beta * t / cfg.t_init
    deltas = np.asarray(deltas, dtype=float)
    noise = rng.normal(0.0, cfg.sigma, size=deltas.shape)
    new_deltas = amp * np.sin(deltas + noise)
    new_r0 = min(max(r0 + rng.uniform(-amp, amp), 0.0), r_max)
    return new_r0, new_deltas


@numba.njit(cache=True, nogil=True)
def _anneal(vx, vy, cand_lo, cand_hi, cos, sin, indptr, indices, data, dw, we, wv,
            alpha_c, alpha_b, eps_area, r_max, beta, t_init, t_limit, gamma,
            deltas0, normals, steps, coins, out):
    """Annealing loop over pre-drawn variates; returns ``(best_r0, best_deltas, iterations)``.

    ``out`` (iterations x 7) receives temperature, cost, cost_prev,
    best_cost, accepted, max |new delta| and amplitude per iteration.
    """
    m = deltas0.shape[0]
    lab = np.empty(vx.shape[0], dtype=np.int8)
    bx = np.empty(m + 1)
    by = np.empty(m + 1)

    def cost_of(r0, d):
        r = r0
        for i in range(m + 1):
            if i > 0:
                r += d[i - 1]
            rc = min(max(r, 0.0), r_max)
            bx[i] = rc * cos[i]
            by[i] = rc * sin[i]
        _fan_labels(vx, vy, cand_lo, cand_hi, bx, by, eps_area, lab)
        cut, pw = _quad_and_weight(lab, indptr, indices, data, dw)
        total = alpha_b * abs(2.0 * pw - wv) / wv
        if alpha_c != 0.0:
            total += alpha_c * cut / we
        return total

    r0 = 0.0
    deltas = deltas0.copy()
    best_r0 = r0
    best_d = deltas.copy()
    cost_prev = cost_of(r0, deltas)
    best = cost_prev
    t = t_init
    it = 0
    new_d = np.empty(m)
    while t >= t_limit:
        amp = beta * t / t_init
        mx = 0.0
        for i in range(m):
            new_d[i] = amp * np.sin(deltas[i] + normals[it, i])
            mx = max(mx, abs(new_d[i]))
        new_r0 = min(max(r0 + (2.0 * steps[it] - 1.0) * amp, 0.0), r_max)
        c = cost_of(new_r0, new_d)
        acc = False
        if c < cost_prev:
            acc = True
            if c < best:
                best = c
                best_r0 = new_r0
                best_d[:] = new_d
        elif np.exp((cost_prev - c) / t) > coins[it]:
            acc = True
        if acc:
            r0 = new_r0
            deltas[:] = new_d
        out[it, 0] = t
        out[it, 1] = c
        out[it, 2] = cost_prev
        out[it, 3] = best
        out[it, 4] = 1.0 if acc else 0.0
        out[it, 5] = mx
        out[it, 6] = amp
        cost_prev = c
        t *= gamma
        it += 1
    return best_r0, best_d, it


def schedule_length(cfg: SAConfig) -> int:
    """Iterations the loop ``while t >= t_limit: t *= gamma`` performs."""
    t, n = cfg.t_init, 0
    while t >= cfg.t_limit:
        t *= cfg.gamma
        n += 1
    return n


def two_way_spatial_part(g: GridGraph, cfg: SAConfig, origin=Corner.BL, rng=None,
                         trace=None) -> TwoWayResult:
    """Anneal one fan boundary anchored at ``origin``.

    Variates are drawn up front from ``rng`` in this order: the initial
    differences, then all perturbation normals, base-step uniforms and
    acceptance uniforms (one per iteration, drawn whether or not the
    Metropolis test is reached).  ``trace``, when given, is called once per
    iteration with a dict of ``iteration, temperature, cost, cost_prev,
    best_cost, accepted, max_abs_delta, amplitude``.
    """
    if g.total_node_weight <= 0:
        raise DegenerateGridError("grid has zero total node weight")
    if cfg.params.alpha_c > 0 and g.total_edge_weight <= 0:
        raise DegenerateGridError("grid has zero total edge weight")
    origin = Corner(origin)
    if rng is None:
        rng = rng_for(corner_seed(cfg.seed, origin))
    ev = FanEvaluator(g, origin, cfg.m, cfg.params)
    beta = cfg.beta_for(g)
    lap = ev.lap

    n_it = schedule_length(cfg)
    deltas0 = rng.uniform(0.0, ev.r_max / (2 * cfg.m), size=cfg.m)
    normals = rng.normal(0.0, cfg.sigma, size=(n_it, cfg.m))
    steps = rng.random(n_it)
    coins = rng.random(n_it)
    out = np.zeros((n_it, 7))
    best_r0, best_d, it = _anneal(
        ev.vx, ev.vy, ev.cand[0], ev.cand[1], ev.cos, ev.sin,
        lap.indptr, lap.indices, lap.data, ev._dw, float(ev._we), float(ev._wv),
        float(cfg.params.alpha_c), float(cfg.params.alpha_b), ev.eps_area, ev.r_max, beta,
        cfg.t_init, cfg.t_limit, cfg.gamma, deltas0, normals, steps, coins, out)
    if trace is not None:
        for k in range(it):
            row = out[k]
            trace({"iteration": k, "temperature": float(row[0]), "cost": float(row[1]),
                   "cost_prev": float(row[2]), "best_cost": float(row[3]),
                   "accepted": bool(row[4]), "max_abs_delta": float(row[5]),
                   "amplitude": float(row[6])})

    radii = ev.radii_from(best_r0, best_d)
    best_cost, labels, cut, ub = ev.evaluate(radii)
    return TwoWayResult(labels, best_cost, origin, radii, cut, ub, it)


def _corner_job(args):
    g, cfg, corner = args
    return two_way_spatial_part(g, cfg, corner)


def best_of_corners(g: GridGraph, cfg: SAConfig, threads: int = 1, traces=None):
    """Run the annealer from all four corners and keep the cheapest result.

    Each corner draws from its own stream seeded with ``seed ^ salt``, so
    the outcome does not depend on ``threads``.  Ties go to the earlier
    corner in BL, BR, TL, TR order.  Returns ``(best, per_corner)``.
    """
    corners = list(Corner)
    if threads > 1 and traces is None:
        with ProcessPoolExecutor(max_workers=min(threads, 4)) as pool:
            results = list(pool.map(_corner_job, [(g, cfg, c) for c in corners]))
    else:
        results = []
        for c in corners:
            cb = None if traces is None else (lambda rec, c=c: traces.append({"corner": c.name, **rec}))
            results.append(two_way_spatial_part(g, cfg, c, trace=cb))
    best = min(results, key=lambda r: (r.cost, int(r.corner)))
    return best, results


def with_alpha_b(cfg: SAConfig, alpha_b: float) -> SAConfig:
    return replace(cfg, params=replace(cfg.params, alpha_b=alpha_b))
