"""Target triangles, marked boundary arcs and the line-constraint system.

Boundary vertex images are confined to the three infinite lines supporting
the target's edges: the arc from marked vertex i to marked vertex i+1 maps
onto line i.  Rather than carrying Lagrange multipliers, the constraints are
eliminated by an affine embedding ``x = P y + r`` from free coordinates ``y``
to stacked vertex images ``x = [x0, y0, x1, y1, ...]``.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import (
    ClockwiseCorners,
    CollinearCorners,
    MeshError,
    NotDistinct,
    NotOnBoundary,
    WrongOrder,
)
from .mesh import delaunayize, split_edges

GENERIC = "generic"
EQUILATERAL = "equilateral"
RIGHT_ISOSCELES = "right-isosceles"
ORBIFOLD_KINDS = (EQUILATERAL, RIGHT_ISOSCELES)

KIND_TOL = 1e-9

INTERIOR, ARC, CORNER = 0, 1, 2


@dataclass(frozen=True, eq=False)
class TargetTriangle:
    """Triangle c1 c2 c3 (counter-clockwise) with outward unit normals.

    Line i passes through corners i and i+1 and is ``{Z : normals[i] @ Z + offsets[i] == 0}``;
    the open triangle is where all three expressions are negative.
    """

    corners: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    kind: str

    @property
    def area(self):
        c = self.corners
        return 0.5 * float((c[1, 0] - c[0, 0]) * (c[2, 1] - c[0, 1])
                           - (c[1, 1] - c[0, 1]) * (c[2, 0] - c[0, 0]))

    @property
    def centroid(self):
        return self.corners.mean(axis=0)

    @property
    def tangents(self):
        """Unit direction of line i, pointing from corner i to corner i+1."""
        d = np.roll(self.corners, -1, axis=0) - self.corners
        return d / np.linalg.norm(d, axis=1)[:, None]

    @property
    def feet(self):
        """Foot of the perpendicular from the origin onto each line."""
        return -self.offsets[:, None] * self.normals

    @property
    def is_orbifold(self):
        return self.kind in ORBIFOLD_KINDS

    def line_residuals(self, points, line):
        return np.asarray(points) @ self.normals[line] + self.offsets[line]


def _classify(c):
    sides = np.linalg.norm(np.roll(c, -1, axis=0) - c, axis=1)
    scale = sides.max()
    if np.ptp(sides) <= KIND_TOL * scale:
        return EQUILATERAL
    for i in range(3):
        u = c[(i + 1) % 3] - c[i]
        v = c[(i - 1) % 3] - c[i]
        lu, lv = np.linalg.norm(u), np.linalg.norm(v)
        if abs(u @ v) <= KIND_TOL * lu * lv and abs(lu - lv) <= KIND_TOL * scale:
            return RIGHT_ISOSCELES
    return GENERIC


def make_target(c1, c2, c3, strict=True):
    """Build a :class:`TargetTriangle`; clockwise corners raise unless ``strict`` is off.

    In lenient mode clockwise corners are reordered to (c1, c3, c2).
    """
    c = np.array([c1, c2, c3], dtype=float).reshape(3, 2)
    twice_area = (c[1, 0] - c[0, 0]) * (c[2, 1] - c[0, 1]) - (c[1, 1] - c[0, 1]) * (c[2, 0] - c[0, 0])
    scale = np.max(np.ptp(c, axis=0))
    if abs(twice_area) <= 1e-12 * scale * scale:
        raise CollinearCorners("target corners are collinear")
    if twice_area < 0:
        if strict:
            raise ClockwiseCorners("target corners are clockwise")
        c = c[[0, 2, 1]]
    d = np.roll(c, -1, axis=0) - c
    d /= np.linalg.norm(d, axis=1)[:, None]
    normals = np.stack([d[:, 1], -d[:, 0]], axis=1)
    offsets = -np.einsum("ij,ij->i", normals, c)
    for arr in (c, normals, offsets):
        arr.flags.writeable = False
    return TargetTriangle(c, normals, offsets, _classify(c))


def equilateral_target(side=1.0):
    return make_target((0.0, 0.0), (side, 0.0), (0.5 * side, 0.5 * np.sqrt(3.0) * side))


def right_isosceles_target(leg=1.0):
    return make_target((0.0, 0.0), (leg, 0.0), (0.0, leg))


def named_target(kind, size=1.0):
    if kind == EQUILATERAL:
        return equilateral_target(size)
    if kind == RIGHT_ISOSCELES:
        return right_isosceles_target(size)
    raise ValueError(f"unknown target kind {kind!r}")


@dataclass(frozen=True, eq=False)
class BoundarySpec:
    """Marked boundary vertices and the three closed arcs between them."""

    mesh: object
    marks: tuple
    arcs: tuple


def make_boundary_spec(mesh, p1, p2, p3):
    marks = (int(p1), int(p2), int(p3))
    loop = mesh.boundary_loop
    pos = {int(v): k for k, v in enumerate(loop.tolist())}
    for p in marks:
        if p not in pos:
            raise NotOnBoundary(f"vertex {p} is not on the boundary")
    if len(set(marks)) != 3:
        raise NotDistinct("marked vertices must be distinct")
    n = len(loop)
    k1, k2, k3 = (pos[p] for p in marks)
    if (k2 - k1) % n >= (k3 - k1) % n:
        raise WrongOrder("marked vertices are not in counter-clockwise order")
    arcs = []
    for a, b in ((k1, k2), (k2, k3), (k3, k1)):
        length = (b - a) % n
        arcs.append(loop[(a + np.arange(length + 1)) % n].copy())
    return BoundarySpec(mesh, marks, tuple(arcs))


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """Affine parametrization x = P y + r of the line-constrained maps.

    ``vertex_class`` holds INTERIOR, ARC or CORNER per vertex; ``vertex_line``
    the line index of an arc vertex (the corner index for corners, -1 inside).
    """

    spec: BoundarySpec
    target: TargetTriangle
    vertex_class: np.ndarray
    vertex_line: np.ndarray
    dof_start: np.ndarray
    dimension: int
    P: sp.csr_matrix
    r: np.ndarray

    def embed(self, y):
        """Vertex images (n, 2) for reduced coordinates ``y``."""
        y = np.asarray(y, dtype=float)
        return (self.P @ y + self.r).reshape(-1, 2)

    def reduce(self, images):
        """Reduced coordinates of an admissible map (least-squares inverse of the embedding)."""
        x = np.asarray(images, dtype=float).ravel() - self.r
        # columns of P are orthonormal with disjoint supports
        return self.P.T @ x

    @property
    def counts(self):
        return {name: int(np.sum(self.vertex_class == k))
                for name, k in (("interior", INTERIOR), ("arc", ARC), ("corner", CORNER))}


def build_constraints(spec, target):
    mesh = spec.mesh
    n = mesh.n_vertices
    cls = np.full(n, INTERIOR, dtype=np.int64)
    line = np.full(n, -1, dtype=np.int64)
    for i, arc in enumerate(spec.arcs):
        inner = arc[1:-1]
        cls[inner] = ARC
        line[inner] = i
    for i, p in enumerate(spec.marks):
        cls[p] = CORNER
        line[p] = i
    ndof = np.where(cls == INTERIOR, 2, np.where(cls == ARC, 1, 0))
    dof_start = np.concatenate([[0], np.cumsum(ndof)[:-1]])
    dim = int(ndof.sum())

    r = np.zeros((n, 2))
    corner = cls == CORNER
    r[corner] = target.corners[line[corner]]
    arc = cls == ARC
    r[arc] = target.feet[line[arc]]

    rows, cols, vals = [], [], []
    inner = np.flatnonzero(cls == INTERIOR)
    for k in range(2):
        rows.append(2 * inner + k)
        cols.append(dof_start[inner] + k)
        vals.append(np.ones(len(inner)))
    arcv = np.flatnonzero(arc)
    d = target.tangents[line[arcv]]
    for k in range(2):
        rows.append(2 * arcv + k)
        cols.append(dof_start[arcv])
        vals.append(d[:, k])
    P = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(2 * n, dim))
    for arr in (cls, line, dof_start, r):
        arr.flags.writeable = False
    return ConstraintSystem(spec, target, cls, line, dof_start, dim, P, r.ravel())


def constraint_rows(spec, target):
    """Explicit rows C x + d = 0 of the line constraints (corners get two rows).

    Returns a dense (k, 2n) ``C``, the offsets ``d`` and the (vertex, line)
    pair of each row.
    """
    n = spec.mesh.n_vertices
    pairs = []
    for i, arc in enumerate(spec.arcs):
        pairs += [(int(v), i) for v in arc]
    C = np.zeros((len(pairs), 2 * n))
    d = np.zeros(len(pairs))
    for k, (v, i) in enumerate(pairs):
        C[k, 2 * v:2 * v + 2] = target.normals[i]
        d[k] = target.offsets[i]
    return C, d, pairs


def constraint_residual(spec, target, images):
    """Largest |a_i . x_k + b_i| over all constrained vertices."""
    worst = 0.0
    for i, arc in enumerate(spec.arcs):
        res = target.line_residuals(np.asarray(images)[arc], i)
        worst = max(worst, float(np.abs(res).max()))
    return worst


def arc_membership(spec):
    """Bitmask per vertex: bit i set when the vertex lies on closed arc i."""
    mask = np.zeros(spec.mesh.n_vertices, dtype=np.int64)
    for i, arc in enumerate(spec.arcs):
        mask[arc] |= 1 << i
    return mask


def dividing_edges(spec):
    """Interior edges whose endpoints lie on a common arc, as (k, 2) vertex pairs.

    Both endpoints of such an edge are pinned to one line, so the edge and
    every face on it collapse; an interior vertex surrounded only by such
    vertices collapses too.
    """
    mesh = spec.mesh
    mask = arc_membership(spec)
    e = mesh.edges
    interior = mesh.edge_faces[:, 1] >= 0
    shared = (mask[e[:, 0]] & mask[e[:, 1]]) != 0
    return e[interior & shared]


def split_dividing_edges(mesh, marks, delaunay=False, max_passes=20):
    """Bisect dividing edges until none remain (re-flipping to Delaunay if asked).

    Vertex indices of ``mesh`` are preserved, so ``marks`` stay valid.
    1->4 refinement never creates new dividing edges; Lawson flips can.
    """
    for _ in range(max_passes):
        bad = dividing_edges(make_boundary_spec(mesh, *marks))
        if len(bad) == 0:
            return mesh
        mesh = split_edges(mesh, bad)
        if delaunay:
            mesh = delaunayize(mesh)
    raise MeshError("dividing edges persist after splitting")
