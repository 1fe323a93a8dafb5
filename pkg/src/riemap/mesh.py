"""Triangulations of simply connected polygonal domains.

A :class:`Mesh` is an immutable indexed triangle mesh whose faces are all
positively oriented and whose face complex is a combinatorial disk.  This
module also holds the operations that build and transform such meshes:
ear-clipping of simple polygons, 1->4 midpoint refinement, Lawson edge flips,
the Koch snowflake generator and point location.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    ClockwiseInput,
    DegenerateFace,
    DepthTooLarge,
    DuplicateVertex,
    FlipNonConvergence,
    MeshError,
    NonDiskTopology,
    SelfIntersectingPolygon,
)

AREA_TOL = 1e-14  # relative to bounding-box area
DUPLICATE_TOL = 1e-12  # relative to bounding-box diagonal
DELAUNAY_TOL = 1e-9  # slack on the opposite-angle sum
KOCH_MAX_DEPTH = 8


def _readonly(a):
    a.flags.writeable = False
    return a


def signed_areas(vertices, faces):
    """Signed area of every face (positive for counter-clockwise faces)."""
    a = vertices[faces[:, 0]]
    b = vertices[faces[:, 1]]
    c = vertices[faces[:, 2]]
    return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                  - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def polygon_area(points):
    """Shoelace signed area of a closed polygon given as an (n, 2) array."""
    p = np.asarray(points, dtype=float)
    q = np.roll(p, -1, axis=0)
    return 0.5 * float(np.sum(p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]))


def face_angles(vertices, faces):
    """Interior angle at each corner, shape (m, 3); column j is the angle at faces[:, j]."""
    out = np.empty(faces.shape, dtype=float)
    for j in range(3):
        p = vertices[faces[:, j]]
        u = vertices[faces[:, (j + 1) % 3]] - p
        v = vertices[faces[:, (j + 2) % 3]] - p
        cross = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
        dot = np.einsum("ij,ij->i", u, v)
        out[:, j] = np.arctan2(np.abs(cross), dot)
    return out


@dataclass(frozen=True, eq=False)
class Mesh:
    """Indexed triangle mesh of a disk-like planar domain.

    ``vertices`` is (n, 2) float, ``faces`` is (m, 3) int with every face
    counter-clockwise, and ``boundary_loop`` lists the boundary vertices in
    counter-clockwise order starting at the smallest boundary index.  Build
    instances with :func:`build_mesh`, which validates all of this.
    """

    vertices: np.ndarray
    faces: np.ndarray
    boundary_loop: np.ndarray

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    @cached_property
    def _edge_data(self):
        f = self.faces
        m = len(f)
        # edge j of a face is opposite its local vertex j
        a = np.concatenate([f[:, 1], f[:, 2], f[:, 0]])
        b = np.concatenate([f[:, 2], f[:, 0], f[:, 1]])
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        keys = lo.astype(np.int64) * self.n_vertices + hi
        ukeys, inverse = np.unique(keys, return_inverse=True)
        edges = np.stack([ukeys // self.n_vertices, ukeys % self.n_vertices], axis=1)
        face_edges = inverse.reshape(3, m).T.copy()
        face_idx = np.tile(np.arange(m), 3)
        local = np.repeat(np.arange(3), m)
        order = np.argsort(inverse, kind="stable")
        counts = np.bincount(inverse, minlength=len(ukeys))
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        edge_faces = np.full((len(ukeys), 2), -1, dtype=np.int64)
        edge_local = np.full((len(ukeys), 2), -1, dtype=np.int64)
        edge_faces[:, 0] = face_idx[order[starts]]
        edge_local[:, 0] = local[order[starts]]
        two = counts == 2
        edge_faces[two, 1] = face_idx[order[starts[two] + 1]]
        edge_local[two, 1] = local[order[starts[two] + 1]]
        return edges, face_edges, edge_faces, edge_local, ukeys

    @property
    def edges(self):
        """Unique undirected edges (E, 2), lexicographically sorted, lo < hi."""
        return self._edge_data[0]

    @property
    def face_edges(self):
        """(m, 3) edge index of the edge opposite each local vertex."""
        return self._edge_data[1]

    @property
    def edge_faces(self):
        """(E, 2) incident faces per edge; second column is -1 on the boundary."""
        return self._edge_data[2]

    @property
    def edge_local(self):
        """(E, 2) local index (in the incident face) of the vertex opposite the edge."""
        return self._edge_data[3]

    def edge_index(self, u, v):
        """Indices of the undirected edges (u, v); arrays broadcast."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        keys = np.minimum(u, v) * self.n_vertices + np.maximum(u, v)
        ukeys = self._edge_data[4]
        idx = np.searchsorted(ukeys, keys)
        if np.any(idx >= len(ukeys)) or np.any(ukeys[np.minimum(idx, len(ukeys) - 1)] != keys):
            raise KeyError("edge not in mesh")
        return idx

    @property
    def n_edges(self):
        return len(self.edges)

    @cached_property
    def face_neighbors(self):
        """(m, 3) face across the edge opposite each local vertex, -1 on the boundary."""
        ef = self.edge_faces
        fe = self.face_edges
        own = np.arange(self.n_faces)[:, None]
        nb = np.where(ef[fe, 0] == own, ef[fe, 1], ef[fe, 0])
        return _readonly(nb)

    @cached_property
    def is_boundary_vertex(self):
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.boundary_loop] = True
        return _readonly(mask)

    @cached_property
    def interior_vertices(self):
        return _readonly(np.flatnonzero(~self.is_boundary_vertex))

    @cached_property
    def face_areas(self):
        return _readonly(signed_areas(self.vertices, self.faces))

    @property
    def area(self):
        return float(self.face_areas.sum())

    @cached_property
    def angles(self):
        return _readonly(face_angles(self.vertices, self.faces))

    @cached_property
    def vertex_faces(self):
        """CSR-style incidence: (indptr, face indices) sorted by face index."""
        flat = self.faces.ravel()
        order = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=self.n_vertices)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        return _readonly(indptr), _readonly(order // 3)

    @cached_property
    def neighbors(self):
        """CSR-style vertex adjacency: (indptr, neighbor indices)."""
        e = self.edges
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        counts = np.bincount(src, minlength=self.n_vertices)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        return _readonly(indptr), _readonly(dst[order])

    @cached_property
    def locator(self):
        return PointLocator(self.vertices, self.faces, self.face_neighbors)

    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_faces

    def boundary_points(self):
        return self.vertices[self.boundary_loop]


def build_mesh(points, faces, strict=False):
    """Validate raw arrays and return a :class:`Mesh`.

    Negatively oriented faces are flipped unless ``strict`` is set, in which
    case :class:`ClockwiseInput` is raised.
    """
    vertices = np.array(points, dtype=float).reshape(-1, 2)
    faces = np.array(faces, dtype=np.int64).reshape(-1, 3)
    n = len(vertices)
    if len(faces) == 0:
        raise MeshError("mesh needs at least one face")
    if faces.min() < 0 or faces.max() >= n:
        raise MeshError("face index out of range")
    if not np.all(np.isfinite(vertices)):
        raise MeshError("non-finite vertex coordinates")
    if np.any((faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])):
        raise DegenerateFace("face repeats a vertex")

    span = vertices.max(axis=0) - vertices.min(axis=0)
    box_area = float(span[0] * span[1])
    diag = float(np.hypot(*span))
    areas = signed_areas(vertices, faces)
    small = np.abs(areas) < AREA_TOL * box_area if box_area > 0 else np.ones(len(faces), bool)
    if np.any(small):
        raise DegenerateFace(f"face {int(np.flatnonzero(small)[0])} has (near) zero area")
    neg = areas < 0
    if np.any(neg):
        if strict:
            raise ClockwiseInput(f"{int(neg.sum())} faces are clockwise")
        faces = faces.copy()
        faces[neg] = faces[neg][:, [0, 2, 1]]

    pairs = cKDTree(vertices).query_pairs(DUPLICATE_TOL * diag)
    if pairs:
        i, j = min(pairs)
        raise DuplicateVertex(f"vertices {i} and {j} coincide")

    used = np.zeros(n, dtype=bool)
    used[faces.ravel()] = True
    if not used.all():
        raise NonDiskTopology(f"vertex {int(np.flatnonzero(~used)[0])} belongs to no face")

    # directed half-edges; each must be unique for a consistently oriented manifold
    a = np.concatenate([faces[:, 0], faces[:, 1], faces[:, 2]])
    b = np.concatenate([faces[:, 1], faces[:, 2], faces[:, 0]])
    directed = a * n + b
    udir = np.unique(directed)
    if len(udir) != len(directed):
        raise NonDiskTopology("an edge is used twice with the same orientation")
    reverse = b * n + a
    has_twin = np.isin(reverse, udir)
    undirected = np.unique(np.minimum(a, b) * n + np.maximum(a, b))
    n_edges = len(undirected)
    if n - n_edges + len(faces) != 1:
        raise NonDiskTopology(f"Euler characteristic {n - n_edges + len(faces)} != 1")

    ba, bb = a[~has_twin], b[~has_twin]
    if len(ba) == 0:
        raise NonDiskTopology("mesh has no boundary")
    if len(np.unique(ba)) != len(ba):
        raise NonDiskTopology("boundary is pinched at a vertex")
    nxt = dict(zip(ba.tolist(), bb.tolist()))
    start = int(ba.min())
    loop = [start]
    cur = nxt[start]
    while cur != start:
        loop.append(cur)
        if len(loop) > len(ba):
            raise NonDiskTopology("boundary does not close")
        cur = nxt[cur]
    if len(loop) != len(ba):
        raise NonDiskTopology("boundary has more than one cycle")

    return Mesh(_readonly(vertices), _readonly(faces), _readonly(np.array(loop, dtype=np.int64)))


# --------------------------------------------------------------------------
# polygon triangulation


def triangulate_polygon(boundary, strict=False):
    """Ear-clip a simple polygon; mesh vertex i is polygon vertex i."""
    from shapely.geometry import LinearRing

    pts = np.array(boundary, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n < 3:
        raise MeshError("polygon needs at least 3 vertices")
    area = polygon_area(pts)
    if area == 0.0 or not LinearRing(pts).is_simple:
        raise SelfIntersectingPolygon("polygon is not simple")
    order = list(range(n))
    if area < 0:
        if strict:
            raise ClockwiseInput("polygon is clockwise")
        order.reverse()

    scale = float(np.max(np.ptp(pts, axis=0)))
    eps = 1e-14 * scale * scale
    prev = {order[k]: order[k - 1] for k in range(n)}
    nxt = {order[k]: order[(k + 1) % n] for k in range(n)}

    def cross(i, j, k):
        (ax, ay), (bx, by), (cx, cy) = pts[i], pts[j], pts[k]
        return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)

    reflex = {v for v in order if cross(prev[v], v, nxt[v]) <= eps}
    reflex_arr = None

    def is_ear(v):
        nonlocal reflex_arr
        p, q = prev[v], nxt[v]
        if cross(p, v, q) <= eps:
            return False
        if not reflex:
            return True
        if reflex_arr is None:
            reflex_arr = np.fromiter(reflex, dtype=np.int64)
        cand = reflex_arr[(reflex_arr != p) & (reflex_arr != q) & (reflex_arr != v)]
        if len(cand) == 0:
            return True
        c = pts[cand]
        tri = pts[[p, v, q]]
        inside = np.ones(len(cand), dtype=bool)
        for s in range(3):
            o, d = tri[s], tri[(s + 1) % 3]
            inside &= ((d[0] - o[0]) * (c[:, 1] - o[1]) - (d[1] - o[1]) * (c[:, 0] - o[0])) >= -eps
        return not inside.any()

    tris = []
    remaining = n
    v = order[0]
    misses = 0
    while remaining > 3:
        if is_ear(v):
            p, q = prev[v], nxt[v]
            tris.append((p, v, q))
            nxt[p], prev[q] = q, p
            remaining -= 1
            for w in (p, q):
                if w in reflex and cross(prev[w], w, nxt[w]) > eps:
                    reflex.discard(w)
                    reflex_arr = None
            v = p
            misses = 0
        else:
            v = nxt[v]
            misses += 1
            if misses > remaining:
                raise SelfIntersectingPolygon("ear clipping stalled; polygon is degenerate")
    tris.append((prev[v], v, nxt[v]))
    return build_mesh(pts, tris, strict=strict)


# --------------------------------------------------------------------------
# refinement


def refine_1to4(mesh):
    """Split every face into four similar children through its edge midpoints.

    New vertex ``n_vertices + e`` is the midpoint of ``mesh.edges[e]``.
    """
    V = mesh.n_vertices
    e = mesh.edges
    mids = 0.5 * (mesh.vertices[e[:, 0]] + mesh.vertices[e[:, 1]])
    verts = np.vstack([mesh.vertices, mids])
    f = mesh.faces
    fe = mesh.face_edges + V
    a, b, c = f[:, 0], f[:, 1], f[:, 2]
    m_bc, m_ca, m_ab = fe[:, 0], fe[:, 1], fe[:, 2]
    faces = np.concatenate([
        np.stack([a, m_ab, m_ca], axis=1),
        np.stack([m_ab, b, m_bc], axis=1),
        np.stack([m_ca, m_bc, c], axis=1),
        np.stack([m_ab, m_bc, m_ca], axis=1),
    ])
    return build_mesh(verts, faces, strict=True)


def prolong(mesh, values):
    """Re-express per-vertex values of a PL function on ``refine_1to4(mesh)``."""
    values = np.asarray(values, dtype=float)
    e = mesh.edges
    return np.concatenate([values, 0.5 * (values[e[:, 0]] + values[e[:, 1]])])


# --------------------------------------------------------------------------
# Delaunay


def opposite_angle_sums(mesh):
    """Opposite-angle sum for each interior edge: (edge indices, sums)."""
    ef, el = mesh.edge_faces, mesh.edge_local
    interior = np.flatnonzero(ef[:, 1] >= 0)
    ang = mesh.angles
    s = ang[ef[interior, 0], el[interior, 0]] + ang[ef[interior, 1], el[interior, 1]]
    return interior, s


def is_delaunay(mesh, tol=DELAUNAY_TOL):
    """Return ``(ok, violating_edges)``; ``violating_edges`` is an (k, 2) vertex-pair array."""
    interior, s = opposite_angle_sums(mesh)
    bad = interior[s > math.pi + tol]
    return len(bad) == 0, mesh.edges[bad]


def _angle(p, a, b):
    ux, uy = a[0] - p[0], a[1] - p[1]
    vx, vy = b[0] - p[0], b[1] - p[1]
    return math.atan2(abs(ux * vy - uy * vx), ux * vx + uy * vy)


def delaunayize(mesh, tol=DELAUNAY_TOL, max_flips=None):
    """Lawson edge flips on interior edges until every opposite-angle sum is <= pi + tol."""
    interior, s = opposite_angle_sums(mesh)
    seed = interior[s > math.pi + tol]
    if len(seed) == 0:
        return mesh
    if max_flips is None:
        max_flips = 50 * mesh.n_edges + 1000

    pos = mesh.vertices.tolist()
    faces = mesh.faces.tolist()
    edge_map = {}
    for (u, v), (f0, f1) in zip(mesh.edges.tolist(), mesh.edge_faces.tolist()):
        edge_map[(u, v)] = [f0, f1]

    def key(u, v):
        return (u, v) if u < v else (v, u)

    def apex(face, u, v):
        for w in face:
            if w != u and w != v:
                return w

    stack = [tuple(e) for e in mesh.edges[seed].tolist()]
    flips = 0
    limit = math.pi + tol
    while stack:
        k = stack.pop()
        fs = edge_map.get(k)
        if fs is None or fs[1] < 0:
            continue
        f1, f2 = fs
        u, v = k
        F1, F2 = faces[f1], faces[f2]
        # orient so that F1 traverses a -> b
        i = F1.index(u)
        if F1[(i + 1) % 3] == v:
            a, b = u, v
        else:
            a, b = v, u
        c = apex(F1, a, b)
        d = apex(F2, a, b)
        if _angle(pos[c], pos[a], pos[b]) + _angle(pos[d], pos[a], pos[b]) <= limit:
            continue
        flips += 1
        if flips > max_flips:
            raise FlipNonConvergence(f"more than {max_flips} flips")
        faces[f1] = [c, a, d]
        faces[f2] = [d, b, c]
        del edge_map[k]
        edge_map[key(c, d)] = [f1, f2]
        ad = edge_map[key(a, d)]
        ad[ad.index(f2)] = f1
        bc = edge_map[key(b, c)]
        bc[bc.index(f1)] = f2
        stack.extend([key(a, d), key(d, b), key(b, c), key(c, a)])
    return build_mesh(mesh.vertices, faces, strict=True)


# --------------------------------------------------------------------------
# edge splitting


def split_edges(mesh, pairs):
    """Bisect the given interior or boundary edges (vertex pairs) at their midpoints.

    Existing vertex indices are kept and midpoints are appended in the order
    given.  Edges sharing a face are split in successive passes.
    """
    todo = [tuple(sorted(map(int, p))) for p in pairs]
    while todo:
        verts = mesh.vertices.tolist()
        faces = mesh.faces.tolist()
        ef = mesh.edge_faces
        idx = mesh.edge_index([u for u, _ in todo], [v for _, v in todo])
        used, later, dead, new_faces = set(), [], set(), []
        for (u, v), e in zip(todo, idx.tolist()):
            fs = [f for f in ef[e].tolist() if f >= 0]
            if used.intersection(fs):
                later.append((u, v))
                continue
            used.update(fs)
            m = len(verts)
            verts.append([0.5 * (verts[u][0] + verts[v][0]), 0.5 * (verts[u][1] + verts[v][1])])
            for f in fs:
                A, B, C = faces[f]
                while {A, B} != {u, v}:
                    A, B, C = B, C, A
                new_faces += [[A, m, C], [m, B, C]]
                dead.add(f)
        kept = [fc for i, fc in enumerate(faces) if i not in dead]
        mesh = build_mesh(verts, kept + new_faces, strict=True)
        todo = later
    return mesh


# --------------------------------------------------------------------------
# generators


def koch_snowflake(depth, max_depth=KOCH_MAX_DEPTH):
    """Counter-clockwise Koch snowflake boundary with 3 * 4**depth vertices.

    Starts from the unit equilateral triangle (0,0), (1,0), (1/2, sqrt(3)/2);
    every edge bumps outward.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth > max_depth:
        raise DepthTooLarge(f"depth {depth} exceeds cap {max_depth}")
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    c, s = math.cos(-math.pi / 3), math.sin(-math.pi / 3)
    rot = np.array([[c, -s], [s, c]])
    for _ in range(depth):
        p = pts
        q = np.roll(pts, -1, axis=0)
        d = (q - p) / 3.0
        a = p + d
        b = p + 2 * d
        peak = a + d @ rot.T
        pts = np.stack([p, a, peak, b], axis=1).reshape(-1, 2)
    return pts


# --------------------------------------------------------------------------
# statistics


@dataclass(frozen=True)
class RegularityStats:
    min_angle: float
    max_angle: float
    max_edge_length: float
    face_count: int
    vertex_count: int


def edge_lengths(mesh):
    e = mesh.edges
    return np.linalg.norm(mesh.vertices[e[:, 0]] - mesh.vertices[e[:, 1]], axis=1)


def regularity_stats(mesh):
    ang = mesh.angles
    return RegularityStats(
        min_angle=float(ang.min()),
        max_angle=float(ang.max()),
        max_edge_length=float(edge_lengths(mesh).max()),
        face_count=mesh.n_faces,
        vertex_count=mesh.n_vertices,
    )


# --------------------------------------------------------------------------
# point location


@dataclass(frozen=True)
class Location:
    face: int
    bary: np.ndarray


class PointLocator:
    """Walk-based point location over a triangle soup with known adjacency.

    ``tol`` is a distance: a point within ``tol`` of a face counts as inside
    it, and the returned barycentric coordinates are clamped onto that face.
    """

    def __init__(self, vertices, faces, face_neighbors):
        self.vertices = np.asarray(vertices, dtype=float)
        self.faces = np.asarray(faces)
        self.neighbors = np.asarray(face_neighbors)
        a = self.vertices[self.faces[:, 0]]
        b = self.vertices[self.faces[:, 1]]
        c = self.vertices[self.faces[:, 2]]
        self._a, self._b, self._c = a, b, c
        self._twice_area = ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                            - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
        lengths = np.stack([np.linalg.norm(c - b, axis=1),
                            np.linalg.norm(a - c, axis=1),
                            np.linalg.norm(b - a, axis=1)], axis=1)
        # barycentric slack equivalent to unit distance from each edge
        self._inv_height = lengths / np.abs(self._twice_area)[:, None]
        self._tree = None
        flat = self.faces.ravel()
        order = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=len(self.vertices))
        self._vf_ptr = np.concatenate([[0], np.cumsum(counts)])
        self._vf = order // 3

    def _bary(self, f, q):
        a, b, c = self._a[f], self._b[f], self._c[f]
        d = self._twice_area[f]
        la = ((b[0] - q[0]) * (c[1] - q[1]) - (b[1] - q[1]) * (c[0] - q[0])) / d
        lb = ((c[0] - q[0]) * (a[1] - q[1]) - (c[1] - q[1]) * (a[0] - q[0])) / d
        return np.array([la, lb, 1.0 - la - lb])

    def _inside(self, f, lam, tol):
        return bool(np.all(lam >= -tol * self._inv_height[f]))

    def _start(self, q):
        if self._tree is None:
            self._tree = cKDTree((self._a + self._b + self._c) / 3.0)
        return int(self._tree.query(q)[1])

    def _brute(self, q, tol):
        d = self._twice_area
        la = ((self._b[:, 0] - q[0]) * (self._c[:, 1] - q[1])
              - (self._b[:, 1] - q[1]) * (self._c[:, 0] - q[0])) / d
        lb = ((self._c[:, 0] - q[0]) * (self._a[:, 1] - q[1])
              - (self._c[:, 1] - q[1]) * (self._a[:, 0] - q[0])) / d
        lam = np.stack([la, lb, 1.0 - la - lb], axis=1)
        ok = np.all(lam >= -tol * self._inv_height, axis=1)
        hits = np.flatnonzero(ok)
        if len(hits) == 0:
            return None
        return int(hits[0])

    def locate(self, q, start=None, tol=1e-12):
        """Return a :class:`Location` or ``None`` when ``q`` lies outside."""
        q = np.asarray(q, dtype=float)
        f = self._start(q) if start is None else int(start)
        found = None
        max_steps = 4 * math.isqrt(len(self.faces)) + 64
        for _ in range(max_steps):
            lam = self._bary(f, q)
            if self._inside(f, lam, tol):
                found = f
                break
            j = int(np.argmin(lam / self._inv_height[f]))
            nb = int(self.neighbors[f, j])
            if nb < 0:
                break
            f = nb
        if found is None:
            found = self._brute(q, tol)
            if found is None:
                return None
        lam = self._bary(found, q)
        if np.any(lam / self._inv_height[found] <= tol):
            # on an edge or vertex: lowest-index face sharing a vertex that contains q
            cand = np.unique(np.concatenate(
                [self._vf[self._vf_ptr[v]:self._vf_ptr[v + 1]] for v in self.faces[found]]))
            for g in cand.tolist():
                lg = self._bary(g, q)
                if self._inside(g, lg, tol):
                    found, lam = g, lg
                    break
        lam = np.clip(lam, 0.0, None)
        lam /= lam.sum()
        return Location(found, lam)

    def locate_many(self, qs, tol=1e-12):
        """Locate each row of ``qs``; walks start from the previous hit."""
        out = []
        hint = None
        for q in np.asarray(qs, dtype=float):
            loc = self.locate(q, start=hint, tol=tol)
            out.append(loc)
            if loc is not None:
                hint = loc.face
        return out


def locate_point(mesh, q, start=None, tol=1e-12):
    """Face containing ``q`` and its barycentric coordinates, or ``None`` if outside."""
    return mesh.locator.locate(q, start=start, tol=tol)
