import xml.etree.ElementTree as ET

import numpy as np
import pytest

from conftest import make_grid
from spatialpart.boundary import Boundary, Corner
from spatialpart.embedding import delaunay
from spatialpart.errors import ConfigError
from spatialpart.metrics import PartitionResult
from spatialpart.render import (DEFAULT_PALETTE, Overlay, RenderSpec, render_svg, root_boundary,
                                svg_document)
from spatialpart.kway import SplitInfo
from spatialpart.steiner import RectTree

NS = "{http://www.w3.org/2000/svg}"


def grid2():
    return make_grid(np.ones((2, 2)), np.ones((1, 2)), np.ones((2, 1)))


def rects(svg):
    return ET.fromstring(svg.encode()).iter(f"{NS}rect")


def test_two_by_two_two_labels():
    svg = svg_document(grid2(), [0, 0, 1, 1], RenderSpec(layers={"grid", "labels"}))
    fills = [r.get("fill") for r in rects(svg)]
    assert len(fills) == 4
    assert set(fills) == {DEFAULT_PALETTE[0], DEFAULT_PALETTE[1]}


def test_labels_off_uniform_fill():
    svg = svg_document(grid2(), [0, 1, 2, 3], RenderSpec(layers={"grid"}))
    assert len({r.get("fill") for r in rects(svg)}) == 1


def test_y_is_flipped():
    svg = svg_document(grid2(), [0, 1, 0, 1], RenderSpec(layers={"labels"}, scale=10))
    r = list(rects(svg))
    # flat index 1 is (i=0, j=1): the top-left square in SVG space
    assert (r[1].get("x"), r[1].get("y")) == ("0", "0")
    assert (r[0].get("x"), r[0].get("y")) == ("0", "10")


def test_overlays_and_determinism(tmp_path):
    g = make_grid(np.ones((4, 4)), np.ones((3, 4)), np.ones((4, 3)))
    b = Boundary(Corner.BL, 8, np.full(9, 2.0), 4, 4)
    mesh = delaunay(g.grid_centers)
    ov = Overlay([b], [RectTree("n", ((0.5, 0.5, 3.5, 0.5),))], (mesh.vertices, mesh.triangles))
    spec = RenderSpec(layers={"grid", "labels", "boundary", "trees", "mesh"})
    res = PartitionResult({}, np.arange(16) % 2, 0.0, 0, [], 0, True, 2, 0.1)
    render_svg(None, g, res, spec, tmp_path / "a.svg", ov)
    render_svg(None, g, res, spec, tmp_path / "b.svg", ov)
    data = (tmp_path / "a.svg").read_bytes()
    assert data == (tmp_path / "b.svg").read_bytes()
    root = ET.fromstring(data)
    assert len(list(root.iter(f"{NS}rect"))) == 16
    assert len(list(root.iter(f"{NS}line"))) == 1
    assert len(list(root.iter(f"{NS}polyline"))) == 1 + len(mesh.triangles)


def test_spec_validation():
    with pytest.raises(ConfigError):
        RenderSpec(layers={"grid", "bogus"})
    with pytest.raises(ConfigError):
        RenderSpec(scale=0)
    with pytest.raises(ConfigError):
        svg_document(grid2(), None, RenderSpec(layers={"labels"}))
    with pytest.raises(ConfigError):
        svg_document(grid2(), [0, 1, 0], RenderSpec(layers={"labels"}))


def test_color_cycles_and_empty():
    spec = RenderSpec()
    assert spec.color(len(DEFAULT_PALETTE)) == spec.color(0)
    assert spec.color(-1) not in DEFAULT_PALETTE


def test_root_boundary():
    g = grid2()
    assert root_boundary([], g, 4) is None
    s = SplitInfo("", "TR", 0.0, 0.0, 0.0, 4.0, True, tuple([1.0] * 5))
    b = root_boundary([s], g, 4)
    assert b.corner == Corner.TR and b.m == 4
