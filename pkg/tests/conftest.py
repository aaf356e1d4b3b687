import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spatialpart.gridgraph import GridGraph  # noqa: E402


def make_grid(node_w, h, v, width=None, height=None):
    node_w = np.asarray(node_w, dtype=float)
    nx, ny = node_w.shape
    return GridGraph(float(width or nx), float(height or ny), nx, ny, node_w,
                     np.asarray(h, dtype=float), np.asarray(v, dtype=float),
                     tuple(() for _ in range(nx * ny)))


def random_grid(rng, nx, ny, lo=0.0, hi=10.0, integer=False):
    draw = (lambda s: rng.integers(int(lo), int(hi) + 1, size=s).astype(float)) if integer \
        else (lambda s: rng.uniform(lo, hi, size=s))
    return make_grid(draw((nx, ny)), draw((nx - 1, ny)), draw((nx, ny - 1)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
