"""Delaunay meshing and harmonic rectangle embedding of partition regions.

``delaunay`` is an incremental Bowyer-Watson triangulator.  Instead of a
finite super-triangle it keeps "ghost" triangles that join each hull edge
to a vertex at infinity, which keeps collinear hull points (common on grid
lattices) exact.  Orientation and in-circle tests use an epsilon of
``1e-12`` relative to the point-set extent.  Cocircular ties resolve so the
diagonal of the quad passes through its lowest-index vertex.

``harmonic_embed`` pins the hull onto a rectangle perimeter and solves the
uniform-weight graph Laplacian for the interior (Tutte embedding).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from .errors import ConfigError, EmbeddingError

log = logging.getLogger(__name__)

GHOST = -1
PREDICATE_EPS = 1e-12
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class TriMesh:
    vertices: np.ndarray                 # (n, 2)
    triangles: np.ndarray                # (t, 3), counter-clockwise
    boundary_loop: tuple[int, ...]       # counter-clockwise hull order

    def edges(self) -> np.ndarray:
        """Unique undirected edges, each as a sorted pair."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)


@dataclass(frozen=True, eq=False)
class Embedding:
    positions: np.ndarray    # (n, 2) embedded coordinates per mesh vertex
    target_w: float
    target_h: float
    triangles: np.ndarray    # triangles kept for the embedding (see peel_flat_ears)
    interior: np.ndarray     # bool mask of solved (non-boundary) vertices


def _hilbert_key(ix, iy, order=16):
    """Hilbert-curve index of integer coordinates in ``[0, 2**order)``."""
    d = 0
    s = 1 << (order - 1)
    x, y = ix, iy
    while s > 0:
        rx = 1 if (x & s) else 0
        ry = 1 if (y & s) else 0
        d += s * s * ((3 * rx) ^ ry)
        if ry == 0:
            if rx == 1:
                x = s - 1 - x
                y = s - 1 - y
            x, y = y, x
        s >>= 1
    return d


class _Triangulator:
    def __init__(self, pts):
        self.p = pts
        xs = [q[0] for q in pts]
        ys = [q[1] for q in pts]
        scale = max(max(xs) - min(xs), max(ys) - min(ys), 1e-300)
        self.eps_o = PREDICATE_EPS * scale * scale
        self.eps_c = PREDICATE_EPS * scale ** 4
        self.tris: dict[int, tuple[int, int, int]] = {}
        self.edge: dict[tuple[int, int], int] = {}
        self.next_id = 0
        self.last = None

    def orient(self, a, b, c):
        pa, pb, pc = self.p[a], self.p[b], self.p[c]
        return (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0])

    def incircle(self, a, b, c, d):
        px, py = self.p[d]
        ax, ay = self.p[a][0] - px, self.p[a][1] - py
        bx, by = self.p[b][0] - px, self.p[b][1] - py
        cx, cy = self.p[c][0] - px, self.p[c][1] - py
        return ((ax * ax + ay * ay) * (bx * cy - cx * by)
                - (bx * bx + by * by) * (ax * cy - cx * ay)
                + (cx * cx + cy * cy) * (ax * by - bx * ay))

    def add(self, a, b, c):
        if a == GHOST:
            a, b, c = b, c, a
        elif b == GHOST:
            a, b, c = c, a, b
        tid = self.next_id
        self.next_id += 1
        self.tris[tid] = (a, b, c)
        self.edge[(a, b)] = tid
        self.edge[(b, c)] = tid
        self.edge[(c, a)] = tid
        return tid

    def remove(self, tid):
        a, b, c = self.tris.pop(tid)
        for e in ((a, b), (b, c), (c, a)):
            if self.edge.get(e) == tid:
                del self.edge[e]

    def bad(self, tid, d):
        a, b, c = self.tris[tid]
        if c == GHOST:
            o = self.orient(a, b, d)
            if o > self.eps_o:
                return True
            if o < -self.eps_o:
                return False
            pa, pb, pd = self.p[a], self.p[b], self.p[d]
            t1 = (pd[0] - pa[0]) * (pb[0] - pa[0]) + (pd[1] - pa[1]) * (pb[1] - pa[1])
            t2 = (pd[0] - pb[0]) * (pa[0] - pb[0]) + (pd[1] - pb[1]) * (pa[1] - pb[1])
            return t1 > 0 and t2 > 0
        ic = self.incircle(a, b, c, d)
        if ic > self.eps_c:
            return True
        if ic < -self.eps_c:
            return False
        # cocircular: keep the quad diagonal through its lowest-index vertex
        for u, v, w in ((a, b, c), (b, c, a), (c, a, b)):
            if self.orient(u, v, d) < 0:
                return min(d, w) < min(u, v)
        return False

    def locate(self, d):
        tid = self.last
        if tid is None or tid not in self.tris:
            tid = next(iter(self.tris))
        for step in range(4 * len(self.tris) + 8):
            a, b, c = self.tris[tid]
            if c == GHOST:
                if self.bad(tid, d):
                    return tid
                tid = self.edge[(b, a)]
                continue
            edges = ((a, b), (b, c), (c, a))
            moved = False
            for k in range(3):
                u, v = edges[(k + step) % 3]
                if self.orient(u, v, d) < -self.eps_o:
                    tid = self.edge[(v, u)]
                    moved = True
                    break
            if not moved:
                if self.bad(tid, d):
                    return tid
                break
        for tid in self.tris:
            if self.bad(tid, d):
                return tid
        raise EmbeddingError(f"could not locate point {self.p[d]} in triangulation")

    def insert(self, d):
        start = self.locate(d)
        cavity = {start}
        stack = [start]
        while stack:
            tid = stack.pop()
            a, b, c = self.tris[tid]
            for u, v in ((a, b), (b, c), (c, a)):
                nb = self.edge.get((v, u))
                if nb is not None and nb not in cavity and self.bad(nb, d):
                    cavity.add(nb)
                    stack.append(nb)
        rim = []
        for tid in sorted(cavity):
            a, b, c = self.tris[tid]
            for u, v in ((a, b), (b, c), (c, a)):
                if self.edge.get((v, u)) not in cavity:
                    rim.append((u, v))
        for tid in cavity:
            self.remove(tid)
        last = None
        for u, v in rim:
            tid = self.add(u, v, d)
            if GHOST not in (u, v):
                last = tid
        self.last = last if last is not None else tid


def delaunay(points) -> TriMesh:
    """Delaunay triangulation of distinct 2-D points.

    Exact duplicates are dropped (first occurrence kept).  Raises
    ``ConfigError`` for fewer than 3 distinct points or a collinear set.
    """
    raw = np.asarray(points, dtype=float).reshape(-1, 2)
    seen = {}
    for q in map(tuple, raw.tolist()):
        seen.setdefault(q, len(seen))
    pts = list(seen.keys())
    n = len(pts)
    if n < 3:
        raise ConfigError(f"need at least 3 distinct points, got {n}")

    tr = _Triangulator(pts)
    xs = np.array([q[0] for q in pts])
    ys = np.array([q[1] for q in pts])
    span = max(xs.max() - xs.min(), ys.max() - ys.min(), 1e-300)
    qx = ((xs - xs.min()) / span * 65535).astype(np.int64)
    qy = ((ys - ys.min()) / span * 65535).astype(np.int64)
    order = sorted(range(n), key=lambda i: (_hilbert_key(int(qx[i]), int(qy[i])), i))

    a, b = order[0], order[1]
    third = None
    for k in range(2, n):
        if abs(tr.orient(a, b, order[k])) > tr.eps_o:
            third = k
            break
    if third is None:
        raise ConfigError("all points are collinear")
    c = order[third]
    if tr.orient(a, b, c) < 0:
        a, b = b, a
    tr.add(a, b, c)
    tr.add(b, a, GHOST)
    tr.add(c, b, GHOST)
    tr.add(a, c, GHOST)
    tr.last = 0
    for k in order[2:third] + order[third + 1:]:
        tr.insert(k)

    real = sorted(t for t in tr.tris.values() if GHOST not in t)
    nxt = {}
    for a, b, c in tr.tris.values():
        if c == GHOST:
            nxt[b] = a
    start = min(nxt)
    loop = [start]
    while nxt[loop[-1]] != start:
        loop.append(nxt[loop[-1]])
        if len(loop) > len(nxt):
            raise EmbeddingError("hull traversal did not close")
    return TriMesh(np.array(pts), np.array(real, dtype=np.int64).reshape(-1, 3), tuple(loop))


def carve(mesh: TriMesh, max_edge: float) -> TriMesh | None:
    """Restrict ``mesh`` to triangles whose edges are all ``<= max_edge``.

    A Delaunay mesh covers the convex hull of its points; for a concave
    point set (a partition region sampled on a grid) the long hull-bridging
    triangles are dropped so the mesh follows the region itself.  The
    largest edge-connected piece is kept and its vertices renumbered in
    their original order.  Returns ``None`` when the piece is not a
    topological disk (a hole or a vertex pinch), which callers treat as
    "use the hull mesh".
    """
    v, t = mesh.vertices, mesh.triangles
    if len(t) == 0:
        return None
    d = lambda a, b: np.hypot(*(v[t[:, a]] - v[t[:, b]]).T)
    keep = np.nonzero(np.maximum(np.maximum(d(0, 1), d(1, 2)), d(2, 0)) <= max_edge)[0]
    if len(keep) == 0:
        return None
    tk = t[keep]
    # triangle adjacency through shared edges
    owner = {}
    rows, cols = [], []
    for k, (a, b, c) in enumerate(tk.tolist()):
        for e in ((a, b), (b, c), (c, a)):
            key = (min(e), max(e))
            if key in owner:
                rows.append(owner[key])
                cols.append(k)
            else:
                owner[key] = k
    adj = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(tk), len(tk)))
    _, comp = connected_components(adj, directed=False)
    sizes = np.bincount(comp)
    tk = tk[comp == int(np.argmax(sizes))]

    directed = {(a, b) for a, b, c in tk.tolist()} | {(b, c) for a, b, c in tk.tolist()} \
        | {(c, a) for a, b, c in tk.tolist()}
    nxt = {}
    for a, b in directed:
        if (b, a) not in directed:
            if a in nxt:
                return None          # pinch: two boundary chains leave one vertex
            nxt[a] = b
    start = min(nxt)
    loop = [start]
    while nxt[loop[-1]] != start:
        loop.append(nxt[loop[-1]])
        if len(loop) > len(nxt):
            return None
    if len(loop) != len(nxt):
        return None                  # more than one boundary loop: a hole
    used = np.unique(tk.ravel())
    remap = np.full(len(v), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return TriMesh(v[used], remap[tk], tuple(int(remap[i]) for i in loop))


def region_mesh(points, spacing: float) -> TriMesh:
    """Mesh of a region sampled on a lattice of pitch ``spacing`` (its cell diagonal).

    The Delaunay mesh is carved to triangles no longer than one lattice
    diagonal; if the carved piece is not a disk the full hull mesh is used.
    """
    mesh = delaunay(points)
    region = carve(mesh, 1.000001 * spacing)
    if region is None or len(region.vertices) < 3:
        log.info("region is not a disk on its lattice; meshing its hull")
        return mesh
    return region


def _signed_area(p, tris):
    a, b, c = p[tris[:, 0]], p[tris[:, 1]], p[tris[:, 2]]
    return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def perimeter_positions(mesh: TriMesh, w: float, h: float) -> np.ndarray:
    """Rectangle-perimeter targets for the boundary loop (in loop order).

    The loop vertex nearest each bounding-box corner is pinned to the
    matching rectangle corner and the chains between those anchors are
    spread over the sides by normalized arc length.  If the anchors are
    not four distinct vertices in counter-clockwise order, the whole loop
    is spread by arc length starting at the anchor of the lower-left
    corner.
    """
    loop = np.array(mesh.boundary_loop)
    pts = mesh.vertices[loop]
    nb = len(loop)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    box = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
    rect = np.array([[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]])
    anchors = [int(np.argmin(np.hypot(*(pts - c).T))) for c in box]
    rel = [(a - anchors[0]) % nb for a in anchors]
    seg = np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)  # seg[k]: loop k -> k+1
    out = np.zeros((nb, 2))
    if len(set(anchors)) == 4 and rel == sorted(rel):
        for side in range(4):
            s, e = anchors[side], anchors[(side + 1) % 4]
            idx = [(s + t) % nb for t in range((e - s) % nb + 1)]
            lens = np.concatenate([[0.0], np.cumsum(seg[idx[:-1]])])
            frac = lens / lens[-1] if lens[-1] > 0 else np.linspace(0, 1, len(idx))
            p0, p1 = rect[side], rect[(side + 1) % 4]
            out[idx[:-1]] = p0 + frac[:-1, None] * (p1 - p0)
        return out
    start = anchors[0]
    idx = [(start + t) % nb for t in range(nb)]
    lens = np.concatenate([[0.0], np.cumsum(seg[idx[:-1]])])
    total = lens[-1] + seg[idx[-1]]
    per = 2 * (w + h)
    for k, d in zip(idx, lens / total * per):
        out[k] = _walk_perimeter(d, w, h)
    return out


def _walk_perimeter(d, w, h):
    if d <= w:
        return (d, 0.0)
    d -= w
    if d <= h:
        return (w, d)
    d -= h
    if d <= w:
        return (w - d, h)
    return (0.0, h - (d - w))


def peel_flat_ears(triangles, on_boundary, pos) -> np.ndarray:
    """Drop triangles whose three vertices are pinned onto one straight side.

    Such triangles would collapse to zero area; they are removed from the
    outside in (only triangles with an exposed edge are eligible).
    """
    tris = [tuple(t) for t in triangles]
    alive = np.ones(len(tris), dtype=bool)
    flat = np.zeros(len(tris), dtype=bool)
    arr = np.asarray(triangles)
    if len(arr):
        scale = max(np.ptp(pos[:, 0]), np.ptp(pos[:, 1]), 1e-300)
        area = np.abs(_signed_area(pos, arr))
        flat = on_boundary[arr].all(axis=1) & (area <= 1e-12 * scale * scale)
    changed = True
    while changed and flat.any():
        changed = False
        count = {}
        for k, (a, b, c) in enumerate(tris):
            if alive[k]:
                for e in ((a, b), (b, c), (c, a)):
                    key = (min(e), max(e))
                    count[key] = count.get(key, 0) + 1
        for k, (a, b, c) in enumerate(tris):
            if alive[k] and flat[k]:
                if any(count[(min(e), max(e))] == 1 for e in ((a, b), (b, c), (c, a))):
                    alive[k] = False
                    changed = True
    return np.asarray(triangles)[alive].reshape(-1, 3)


def harmonic_embed(mesh: TriMesh, target_w: float, target_h: float) -> Embedding:
    """Embed ``mesh`` into ``[0, w] x [0, h]`` with Dirichlet hull positions."""
    if target_w <= 0 or target_h <= 0:
        raise ConfigError("target rectangle must have positive size")
    n = len(mesh.vertices)
    loop = np.array(mesh.boundary_loop)
    pos = np.zeros((n, 2))
    pos[loop] = perimeter_positions(mesh, target_w, target_h)
    on_boundary = np.zeros(n, dtype=bool)
    on_boundary[loop] = True
    tris = peel_flat_ears(mesh.triangles, on_boundary, pos)
    interior = ~on_boundary
    if not interior.any():
        return Embedding(pos, target_w, target_h, tris, interior)

    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.unique(np.sort(e, axis=1), axis=0)
    adj = sp.coo_matrix((np.ones(2 * len(e)), (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])),
                        shape=(n, n)).tocsr()
    adj.data[:] = 1.0
    used = np.zeros(n, dtype=bool)
    used[tris.ravel()] = True
    if (interior & ~used).any():
        raise EmbeddingError("interior vertex not in any triangle")
    ncomp, comp = connected_components(adj, directed=False)
    for cid in np.unique(comp[interior]):
        if not on_boundary[comp == cid].any():
            raise EmbeddingError("mesh component without boundary vertices")

    deg = np.asarray(adj.sum(axis=1)).ravel()
    lap = (sp.diags(deg) - adj).tocsr()
    ii = np.nonzero(interior)[0]
    bb = np.nonzero(on_boundary)[0]
    a_ii = lap[ii][:, ii].tocsc()
    rhs = -(lap[ii][:, bb] @ pos[bb])
    sol = np.asarray(spla.spsolve(a_ii, rhs)).reshape(len(ii), 2)
    tol = RESIDUAL_TOL * math.hypot(target_w, target_h)
    for _ in range(3):
        pos[ii] = sol
        resid = harmonic_residual(pos, tris, interior)
        if resid <= tol:
            break
        # one step of iterative refinement
        sol = sol + np.asarray(spla.spsolve(a_ii, rhs - a_ii @ sol)).reshape(len(ii), 2)
    else:
        raise EmbeddingError(f"harmonic solve residual {resid:.3g} exceeds tolerance")
    return Embedding(pos, target_w, target_h, tris, interior)


def harmonic_residual(pos, tris, interior) -> float:
    """Max distance of an interior vertex from the mean of its neighbors."""
    n = len(pos)
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.unique(np.sort(e, axis=1), axis=0)
    adj = sp.coo_matrix((np.ones(2 * len(e)), (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])),
                        shape=(n, n)).tocsr()
    deg = np.asarray(adj.sum(axis=1)).ravel()
    ii = np.nonzero(interior)[0]
    if len(ii) == 0:
        return 0.0
    mean = (adj @ pos)[ii] / deg[ii, None]
    return float(np.abs(pos[ii] - mean).max())


def _barycentric(p, a, b, c):
    """Barycentric coordinates of points ``p`` w.r.t. triangles (a, b, c), row-wise."""
    v0, v1, v2 = b - a, c - a, p - a
    d = v0[:, 0] * v1[:, 1] - v0[:, 1] * v1[:, 0]
    l1 = (v2[:, 0] * v1[:, 1] - v2[:, 1] * v1[:, 0]) / d
    l2 = (v0[:, 0] * v2[:, 1] - v0[:, 1] * v2[:, 0]) / d
    return np.column_stack([1.0 - l1 - l2, l1, l2])


class PointMapper:
    """Carries points from a mesh's original space into its embedding."""

    def __init__(self, emb: Embedding, mesh: TriMesh):
        if len(mesh.vertices) == 0 or len(emb.triangles) == 0:
            raise EmbeddingError("empty mesh")
        self.emb = emb
        self.verts = mesh.vertices
        self.tris = np.asarray(emb.triangles)
        self.vertex_of = {tuple(v): k for k, v in enumerate(mesh.vertices.tolist())}
        lo = self.verts.min(axis=0)
        hi = self.verts.max(axis=0)
        nb = max(1, int(math.sqrt(len(self.tris))))
        self.lo, self.nb = lo, nb
        self.cell = np.maximum((hi - lo) / nb, 1e-300)
        tv = self.verts[self.tris]
        blo = self._bucket(tv.min(axis=1))
        bhi = self._bucket(tv.max(axis=1))
        pairs_b, pairs_t = [], []
        for t in range(len(self.tris)):
            for bx in range(blo[t, 0], bhi[t, 0] + 1):
                for by in range(blo[t, 1], bhi[t, 1] + 1):
                    pairs_b.append(bx * nb + by)
                    pairs_t.append(t)
        order = np.lexsort((pairs_t, pairs_b))
        self.pair_b = np.asarray(pairs_b)[order]
        self.pair_t = np.asarray(pairs_t)[order]
        self.start = np.searchsorted(self.pair_b, np.arange(nb * nb + 1))
        e = np.concatenate([self.tris[:, [0, 1]], self.tris[:, [1, 2]], self.tris[:, [2, 0]]])
        owner = np.tile(np.arange(len(self.tris)), 3)
        key = np.sort(e, axis=1)
        _, inv, cnt = np.unique(key, axis=0, return_inverse=True, return_counts=True)
        rim = cnt[inv.ravel()] == 1
        self.rim_edges = e[rim]
        self.rim_owner = owner[rim]

    def _bucket(self, p):
        b = np.floor((p - self.lo) / self.cell).astype(np.int64)
        return np.clip(b, 0, self.nb - 1)

    def locate(self, pts, tol=1e-12):
        """Containing triangle per point, -1 when outside every triangle."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        found = np.full(len(pts), -1, dtype=np.int64)
        if not len(pts):
            return found
        b = self._bucket(pts)
        bid = b[:, 0] * self.nb + b[:, 1]
        inside_box = np.all((pts >= self.lo - 1e-9) & (pts <= self.lo + self.cell * self.nb + 1e-9), axis=1)
        counts = self.start[bid + 1] - self.start[bid]
        counts[~inside_box] = 0
        pid = np.repeat(np.arange(len(pts)), counts)
        off = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        tid = self.pair_t[np.repeat(self.start[bid], counts) + off]
        v = self.verts[self.tris[tid]]
        lam = _barycentric(pts[pid], v[:, 0], v[:, 1], v[:, 2])
        ok = (lam >= -tol).all(axis=1)
        pid, tid = pid[ok], tid[ok]
        if not len(pid):
            return found
        # first (lowest-index) containing triangle wins
        order = np.lexsort((tid, pid))
        pid, tid = pid[order], tid[order]
        first = np.r_[True, pid[1:] != pid[:-1]]
        found[pid[first]] = tid[first]
        return found

    def snap(self, pts):
        """Closest point on the mesh outline and the triangle owning it."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        a = self.verts[self.rim_edges[:, 0]]
        b = self.verts[self.rim_edges[:, 1]]
        ab = b - a
        L2 = np.maximum((ab * ab).sum(axis=1), 1e-300)
        out = np.empty_like(pts)
        owner = np.empty(len(pts), dtype=np.int64)
        for k, p in enumerate(pts):
            t = np.clip(((p - a) * ab).sum(axis=1) / L2, 0.0, 1.0)
            q = a + t[:, None] * ab
            j = int(np.argmin(((q - p) ** 2).sum(axis=1)))
            out[k] = q[j]
            owner[k] = self.rim_owner[j]
        return out, owner

    def map_with(self, pts, tids):
        v = self.verts[self.tris[tids]]
        lam = _barycentric(pts, v[:, 0], v[:, 1], v[:, 2])
        lam = np.clip(lam, 0.0, None)
        lam /= lam.sum(axis=1, keepdims=True)
        e = self.emb.positions[self.tris[tids]]
        return np.einsum("nk,nkd->nd", lam, e)

    def map(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        out = np.empty_like(pts)
        exact = np.array([self.vertex_of.get((float(x), float(y)), -1) for x, y in pts.tolist()],
                         dtype=np.int64)
        hit = exact >= 0
        out[hit] = self.emb.positions[exact[hit]]
        rest = np.nonzero(~hit)[0]
        if len(rest):
            tids = self.locate(pts[rest])
            miss = tids < 0
            q = pts[rest].copy()
            if miss.any():
                q[miss], tids[miss] = self.snap(q[miss])
            out[rest] = self.map_with(q, tids)
        return out


def map_point(emb: Embedding, mesh: TriMesh, p, triangle: int | None = None) -> np.ndarray:
    """Embedded image of ``p`` via barycentric coordinates.

    ``triangle`` forces evaluation in one triangle of ``emb.triangles``
    (used to check continuity across shared edges).
    """
    mapper = PointMapper(emb, mesh)
    p = np.asarray(p, dtype=float).reshape(1, 2)
    if triangle is not None:
        return mapper.map_with(p, np.array([triangle]))[0]
    return mapper.map(p)[0]
