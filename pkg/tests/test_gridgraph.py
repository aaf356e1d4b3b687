import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import direct_cut, walk_crossings
from spatialpart.boundary import cut_size
from spatialpart.errors import ConfigError
from spatialpart.gridgraph import (assign_cell_to_grid, build_grid_graph, dump_grid_csv,
                                   laplacian, node_weight_vector, rasterize_trees)
from spatialpart.netlist import make_netlist
from spatialpart.steiner import RectTree, net_trees
from spatialpart.synthetic import uniform_instance


def small_netlist():
    # 4 x 4 grid of unit squares on a 4 x 4 layout
    return make_netlist(4, 4, [("a", 0.5, 0.5), ("b", 1.5, 0.5), ("c", 3.5, 3.5)],
                        [("n0", 1, ["a", "b"]), ("n1", 2, ["a", "b", "c"])])


def test_two_pin_adjacent_grids():
    nl = make_netlist(4, 4, [("a", 0.5, 0.5), ("b", 1.5, 0.5)], [("n", 1, ["a", "b"])])
    g = build_grid_graph(nl, 4, 4, net_trees(nl))
    assert g.h_edge_weight[0, 0] == 1
    assert g.h_edge_weight.sum() == 1 and g.v_edge_weight.sum() == 0
    assert g.node_weight[0, 0] == 1 and g.node_weight[1, 0] == 1


def test_shared_border_accumulates_net_weights():
    # two nets of weights 2 and 5 cross the same border once each
    nl = make_netlist(4, 4, [("a", 0.5, 0.2), ("b", 1.5, 0.2), ("c", 0.5, 0.7), ("d", 1.5, 0.7)],
                      [("net0", 2, ["a", "b"]), ("net2", 5, ["c", "d"])])
    g = build_grid_graph(nl, 4, 4, net_trees(nl))
    assert g.h_edge_weight[0, 0] == 7
    assert g.total_edge_weight == 7


def test_tree_inside_one_grid():
    nl = make_netlist(4, 4, [("a", 0.2, 0.2), ("b", 0.8, 0.9)], [("n", 3, ["a", "b"])])
    g = build_grid_graph(nl, 4, 4, net_trees(nl))
    assert g.total_edge_weight == 0
    assert g.total_node_weight == 2


def test_invariants_on_synthetic():
    nl = uniform_instance(n_cells=300, n_nets=200, seed=2)
    g = build_grid_graph(nl, 16, 12, net_trees(nl))
    assert g.total_node_weight == sum(len(n.cells) for n in nl.nets)
    assert (g.h_edge_weight >= 0).all() and (g.v_edge_weight >= 0).all()
    c = g.grid_centers.reshape(16, 12, 2)
    assert c[3, 5, 0] == pytest.approx(3.5 * 100 / 16)
    assert c[3, 5, 1] == pytest.approx(5.5 * 100 / 12)
    assert sum(len(b) for b in g.cell_of_grid) == 300


def test_crossings_match_segment_walk():
    rng = np.random.default_rng(8)
    for trial in range(30):
        nx, ny = int(rng.integers(2, 9)), int(rng.integers(2, 9))
        w, h = float(rng.integers(1, 6)), float(rng.integers(1, 6))
        xl = np.arange(nx + 1) * (w / nx)
        yl = np.arange(ny + 1) * (h / ny)
        segs = []
        for _ in range(12):
            if rng.random() < 0.3:  # snap some coordinates onto grid lines
                x = float(xl[rng.integers(0, nx + 1)])
                y = float(yl[rng.integers(0, ny + 1)])
            else:
                x, y = float(rng.uniform(0, w)), float(rng.uniform(0, h))
            if rng.random() < 0.5:
                segs.append((x, y, float(rng.uniform(0, w)), y))
            else:
                segs.append((x, y, x, float(rng.uniform(0, h))))
        segs = [s for s in segs if (s[0], s[1]) != (s[2], s[3])]
        tree = RectTree("n", tuple(segs))
        hh, vv = rasterize_trees([tree], {"n": 1.0}, nx, ny, xl, yl)
        oh, ov = walk_crossings(segs, xl, yl)
        np.testing.assert_array_equal(hh, oh)
        np.testing.assert_array_equal(vv, ov)


def test_segment_on_grid_line_crosses_nothing():
    xl = np.arange(5.0)
    yl = np.arange(5.0)
    tree = RectTree("n", ((0.5, 2.0, 3.5, 2.0), (1.0, 0.5, 1.0, 3.5)))
    h, v = rasterize_trees([tree], {"n": 1.0}, 4, 4, xl, yl)
    assert h.sum() == 0 and v.sum() == 0


def test_endpoint_on_border_bins_upward():
    xl = np.arange(5.0)
    tree = RectTree("n", ((0.5, 0.5, 2.0, 0.5),))
    h, _ = rasterize_trees([tree], {"n": 1.0}, 4, 4, xl, xl)
    assert h[:, 0].tolist() == [1, 1, 0]


def test_unknown_net():
    with pytest.raises(ConfigError):
        rasterize_trees([RectTree("zz", ((0, 0, 1, 0),))], {"n": 1.0}, 2, 2,
                        np.arange(3.0), np.arange(3.0))


def test_grid_dims():
    with pytest.raises(ConfigError):
        build_grid_graph(small_netlist(), 1, 4, [])


def test_laplacian_examples():
    nl = make_netlist(2, 1, [("a", 0.5, 0.2), ("b", 1.5, 0.2)], [("n", 3, ["a", "b"])])
    g = build_grid_graph(nl, 2, 2, net_trees(nl))
    # 2 x 2 grid: only the bottom h-edge carries weight 3
    lap = laplacian(g).toarray()
    assert lap[0, 2] == -3 and lap[0, 0] == 3 and lap[2, 2] == 3
    np.testing.assert_allclose(lap.sum(axis=1), 0, atol=1e-9)
    np.testing.assert_array_equal(lap, lap.T)


def test_laplacian_unit_2x2():
    from conftest import make_grid
    g = make_grid(np.ones((2, 2)), np.ones((1, 2)), np.ones((2, 1)))
    assert np.diag(laplacian(g).toarray()).tolist() == [2, 2, 2, 2]


def test_laplacian_1x2_closed_form():
    from conftest import make_grid
    g = make_grid(np.ones((2, 2)), np.array([[3.0, 0.0]]), np.zeros((2, 1)))
    lap = laplacian(g).toarray()
    assert lap[np.ix_([0, 2], [0, 2])].tolist() == [[3, -3], [-3, 3]]


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_quadratic_form_identity(nx, ny, seed):
    from conftest import random_grid
    rng = np.random.default_rng(seed)
    g = random_grid(rng, nx, ny)
    p = rng.integers(0, 2, size=nx * ny)
    assert cut_size(p, laplacian(g)) == pytest.approx(direct_cut(g.h_edge_weight, g.v_edge_weight, p),
                                                      abs=1e-9)
    assert node_weight_vector(g).sum() == pytest.approx(g.total_node_weight)


def test_assign_cell_to_grid():
    nl = small_netlist()
    g = build_grid_graph(nl, 4, 4, net_trees(nl))
    assert assign_cell_to_grid(0, 0, g) == (0, 0)
    assert assign_cell_to_grid(4, 4, g) == (3, 3)
    assert assign_cell_to_grid(2.0, 0.5, g) == (2, 0)
    with pytest.raises(ConfigError):
        assign_cell_to_grid(4.01, 1, g)


def test_build_is_order_independent():
    nl = uniform_instance(n_cells=200, n_nets=150, seed=4, weight_range=(0.1, 3.7))
    trees = net_trees(nl)
    g1 = build_grid_graph(nl, 20, 20, trees)
    g2 = build_grid_graph(nl, 20, 20, trees[::-1])
    assert g1.h_edge_weight.tobytes() == g2.h_edge_weight.tobytes()
    assert g1.v_edge_weight.tobytes() == g2.v_edge_weight.tobytes()


def test_dump_grid_csv(tmp_path):
    nl = small_netlist()
    g = build_grid_graph(nl, 4, 4, net_trees(nl))
    dump_grid_csv(g, tmp_path / "g.csv")
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert len(lines) == 17
    assert lines[0].startswith("i,j,node_weight")
