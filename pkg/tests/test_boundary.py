import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_grid, random_grid
from oracles import direct_cut
from spatialpart.boundary import (Boundary, Corner, CostParams, FanEvaluator, cost, cover,
                                  cut_size, imbalance, partition_vector, to_local)
from spatialpart.errors import ConfigError, DegenerateGridError
from spatialpart.gridgraph import laplacian, node_weight_vector


def uniform_grid(nx, ny, width=None, height=None):
    return make_grid(np.ones((nx, ny)), np.ones((nx - 1, ny)), np.ones((nx, ny - 1)),
                     width, height)


def dense_cover(boundary, g):
    """Label every grid center by testing it against every triangle (no sector pruning)."""
    o = boundary.origin
    pts = boundary.points()
    eps = 1e-12 * boundary.r_max ** 2
    out = np.zeros(g.n_nodes, dtype=int)
    for k, v in enumerate(g.grid_centers):
        out[k] = int(any(cover(v, o, pts[i], pts[i + 1], eps) for i in range(boundary.m)))
    return out


# cover

def test_cover_centroid_inside():
    assert cover((1 / 3, 1 / 3), (0, 0), (1, 0), (0, 1)) == 1


def test_cover_outside_box():
    assert cover((2, 2), (0, 0), (1, 0), (0, 1)) == 0


def test_cover_on_edge_counts():
    assert cover((0.5, 0.5), (0, 0), (1, 0), (0, 1)) == 1
    assert cover((0.5, 0.0), (0, 0), (1, 0), (0, 1)) == 1


def test_cover_orientation_independent():
    assert cover((0.2, 0.2), (0, 0), (0, 1), (1, 0)) == 1


def test_degenerate_triangle_covers_nothing():
    assert cover((0, 0), (0, 0), (0, 0), (0, 0), eps_area=1e-12) == 0
    # collinear but not a point
    assert cover((0.5, 0), (0, 0), (1, 0), (2, 0), eps_area=1e-12) == 0


# frames

def test_to_local_involution():
    pts = np.array([[0.3, 0.9], [4.0, 1.0]])
    for c in Corner:
        np.testing.assert_allclose(to_local(to_local(pts, c, 5, 2), c, 5, 2), pts)
    np.testing.assert_allclose(to_local([[5, 2]], Corner.TR, 5, 2), [[0, 0]])


def test_boundary_validation_and_clamp():
    with pytest.raises(ConfigError):
        Boundary(Corner.BL, 1, np.zeros(2), 1, 1)
    with pytest.raises(ConfigError):
        Boundary(Corner.BL, 4, np.zeros(4), 1, 1)
    b = Boundary(Corner.BL, 2, [-1.0, 0.5, 99.0], 3, 4)
    assert b.radii.tolist() == [0.0, 0.5, 5.0]
    assert b.theta == math.pi / 4


def test_boundary_points_in_layout_frame():
    b = Boundary(Corner.TR, 2, [1.0, 1.0, 1.0], 4, 3)
    np.testing.assert_allclose(b.origin, [4, 3])
    np.testing.assert_allclose(b.points()[0], [3, 3], atol=1e-12)
    np.testing.assert_allclose(b.points()[2], [4, 2], atol=1e-12)


# partition_vector

def test_zero_radii_give_empty_partition():
    g = uniform_grid(4, 4)
    for c in Corner:
        assert partition_vector(Boundary(c, 8, np.zeros(9), 4, 4), g).sum() == 0


def test_max_radii_cover_everything():
    g = uniform_grid(5, 3, 10, 6)
    r = np.full(17, math.hypot(10, 6))
    for c in Corner:
        assert partition_vector(Boundary(c, 16, r, 10, 6), g).sum() == 15


def test_single_corner_center():
    # centers at 0.5, 1.5, ...: radius 1 reaches (0.5, 0.5) only
    g = uniform_grid(4, 4)
    p = partition_vector(Boundary(Corner.BL, 32, np.ones(33), 4, 4), g)
    assert p.tolist() == [1] + [0] * 15
    p = partition_vector(Boundary(Corner.TR, 32, np.ones(33), 4, 4), g)
    assert np.flatnonzero(p).tolist() == [15]


def test_layout_mismatch():
    with pytest.raises(ConfigError):
        partition_vector(Boundary(Corner.BL, 2, np.ones(3), 5, 4), uniform_grid(4, 4))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(2, 9), st.integers(2, 12), st.sampled_from(list(Corner)),
       st.integers(0, 2**32 - 1))
def test_pruned_evaluator_matches_dense_cover(nx, ny, m, corner, seed):
    rng = np.random.default_rng(seed)
    w, h = float(rng.integers(1, 8)), float(rng.integers(1, 8))
    g = uniform_grid(nx, ny, w, h)
    r = rng.uniform(0, math.hypot(w, h), size=m + 1)
    b = Boundary(corner, m, r, w, h)
    np.testing.assert_array_equal(partition_vector(b, g), dense_cover(b, g))


def test_pruned_evaluator_on_exact_rays():
    # m = 4 puts rays at 0, 22.5, 45, ... degrees; diagonal centers lie on the 45 degree ray
    g = uniform_grid(6, 6)
    for seed in range(20):
        r = np.random.default_rng(seed).uniform(0, 9, size=5)
        b = Boundary(Corner.BL, 4, r, 6, 6)
        np.testing.assert_array_equal(partition_vector(b, g), dense_cover(b, g))


def test_monotone_coverage():
    rng = np.random.default_rng(3)
    g = uniform_grid(12, 9, 12, 9)
    for _ in range(50):
        r = rng.uniform(0, 15, size=17)
        grow = r + rng.uniform(0, 3, size=17)
        for c in Corner:
            p0 = partition_vector(Boundary(c, 16, r, 12, 9), g)
            p1 = partition_vector(Boundary(c, 16, grow, 12, 9), g)
            assert not np.any((p0 == 1) & (p1 == 0))


def test_br_is_mirrored_bl():
    rng = np.random.default_rng(5)
    nx, ny = 7, 5
    g = uniform_grid(nx, ny, 7, 5)
    for _ in range(20):
        r = rng.uniform(0, 9, size=11)
        br = partition_vector(Boundary(Corner.BR, 10, r, 7, 5), g).reshape(nx, ny)
        bl = partition_vector(Boundary(Corner.BL, 10, r, 7, 5), g).reshape(nx, ny)
        np.testing.assert_array_equal(br, bl[::-1, :])


def test_evaluator_points_split_is_order_free():
    g = uniform_grid(10, 10)
    r = np.random.default_rng(0).uniform(0, 14, size=17)
    ev = FanEvaluator(g, Corner.TL, 16)
    full = ev.labels(r)
    halves = np.concatenate([FanEvaluator(g, Corner.TL, 16, points=g.grid_centers[:37]).labels(r),
                             FanEvaluator(g, Corner.TL, 16, points=g.grid_centers[37:]).labels(r)])
    np.testing.assert_array_equal(full, halves)


# cut / imbalance / cost

def test_cut_examples():
    g = make_grid(np.ones((2, 1)), np.array([[3.0]]), np.zeros((2, 0)))
    lap = laplacian(g)
    assert cut_size([0, 0], lap) == 0
    assert cut_size([0, 1], lap) == 3
    g = uniform_grid(2, 2)
    # flat order i*ny+j: [1,1,0,0] is the left column
    assert cut_size([1, 1, 0, 0], laplacian(g)) == 2
    with pytest.raises(ConfigError):
        cut_size([1, 0], laplacian(g))


@settings(max_examples=500, deadline=None)
@given(st.integers(2, 20), st.integers(2, 20), st.integers(0, 2**32 - 1))
def test_cut_matches_direct_sum(nx, ny, seed):
    rng = np.random.default_rng(seed)
    g = random_grid(rng, nx, ny)
    p = rng.integers(0, 2, size=nx * ny)
    assert abs(cut_size(p, laplacian(g)) - direct_cut(g.h_edge_weight, g.v_edge_weight, p)) <= 1e-9


def test_imbalance_examples():
    assert imbalance([1, 0], [1, 3], 4) == 2
    assert imbalance([1, 0], [2, 2], 4) == 0
    assert imbalance([1, 1], [2, 5], 7) == 7
    with pytest.raises(ConfigError):
        imbalance([1, 0, 1], [1, 3], 4)


def test_cost_examples():
    g = uniform_grid(4, 4)
    params = CostParams(1.0, 4.0)
    assert cost(Boundary(Corner.BL, 8, np.zeros(9), 4, 4), g, params) == pytest.approx(4.0)
    # radius covering the two left columns only: a straight vertical cut
    half = Boundary(Corner.BL, 64, np.full(65, 100.0), 4, 4)
    assert cost(half, g, CostParams(1.0, 0.0)) == 0  # everything covered: no cut
    assert cost(half, g, CostParams(0.0, 1.0)) == pytest.approx(1.0)


def test_cost_matches_direct_evaluation():
    g = uniform_grid(4, 4)
    params = CostParams(1.0, 4.0)
    b = Boundary(Corner.BL, 16, np.full(17, 2.9), 4, 4)
    p = partition_vector(b, g)
    lab = p.reshape(4, 4)
    # centers within 2.9 of the corner: (0.5,0.5) .. (2.5,0.5), (0.5,2.5), (1.5,1.5), ...
    expect = [[1 if math.hypot(i + .5, j + .5) <= 2.9 else 0 for j in range(4)] for i in range(4)]
    assert lab.tolist() == expect
    cut = direct_cut(g.h_edge_weight, g.v_edge_weight, p)
    ub = abs(2 * p.sum() - 16)
    assert cost(b, g, params) == pytest.approx(cut / g.total_edge_weight + 4 * ub / 16)


def test_balanced_cost_zero_without_cut_term():
    g = uniform_grid(4, 4)
    ev = FanEvaluator(g, Corner.BL, 16, CostParams(0.0, 1.0))
    # quarter circle through 8 of 16 centers
    c, p, _, ub = ev.evaluate(np.full(17, 2.95))
    assert p.sum() == 8 and ub == 0 and c == 0


def test_cost_params_validation():
    with pytest.raises(ConfigError):
        CostParams(0, 0)
    with pytest.raises(ConfigError):
        CostParams(-1, 1)


def test_degenerate_grid():
    g = make_grid(np.ones((2, 2)), np.zeros((1, 2)), np.zeros((2, 1)))
    with pytest.raises(DegenerateGridError):
        cost(Boundary(Corner.BL, 2, np.ones(3), 2, 2), g, CostParams())


def test_cost_is_bit_stable():
    g = random_grid(np.random.default_rng(1), 16, 16)
    b = Boundary(Corner.TL, 32, np.random.default_rng(2).uniform(0, 20, 33), 16, 16)
    vals = {cost(b, g, CostParams(1.0, 4.0)).hex() for _ in range(5)}
    assert len(vals) == 1
    assert node_weight_vector(g).shape == (256,)
