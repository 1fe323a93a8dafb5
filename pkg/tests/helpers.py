"""Mesh factories and small utilities shared by the test modules."""
import numpy as np
from scipy.spatial import Delaunay

from riemap.boundary import equilateral_target, make_boundary_spec, right_isosceles_target
from riemap.mesh import build_mesh, is_delaunay, signed_areas, triangulate_polygon

SQRT3 = np.sqrt(3.0)
UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
EQ_CORNERS = [(0.0, 0.0), (1.0, 0.0), (0.5, SQRT3 / 2)]


def unit_square():
    return triangulate_polygon(UNIT_SQUARE)


def single_triangle(corners=((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))):
    return build_mesh(corners, [[0, 1, 2]])


def grid_square(k):
    """k x k grid of the unit square, each cell cut by its main diagonal."""
    xs = np.linspace(0.0, 1.0, k + 1)
    pts = np.array([(x, y) for y in xs for x in xs])
    faces = []
    for j in range(k):
        for i in range(k):
            a = j * (k + 1) + i
            b, c, d = a + 1, a + k + 2, a + k + 1
            faces += [[a, b, c], [a, c, d]]
    return build_mesh(pts, faces)


def random_disk_mesh(rng, n_points, delaunay=True, flips=3):
    """Random triangulation of the unit square (corners 0..3 on its boundary).

    With ``delaunay`` off, a few convex interior edges are flipped, which
    leaves a positively oriented mesh that is not Delaunay.
    """
    inner = rng.uniform(0.05, 0.95, size=(max(n_points - 4, 0), 2))
    pts = np.vstack([np.array(UNIT_SQUARE), inner])
    mesh = build_mesh(pts, Delaunay(pts).simplices)
    if delaunay:
        return mesh
    for e in rng.permutation(mesh.n_edges):
        f, g = mesh.edge_faces[e]
        if g < 0:
            continue
        u, v = mesh.edges[e]
        a = [w for w in mesh.faces[f] if w not in (u, v)][0]
        b = [w for w in mesh.faces[g] if w not in (u, v)][0]
        faces = mesh.faces.tolist()
        cand = [[a, u, b], [b, v, a]]
        if signed_areas(mesh.vertices, np.array(cand)).min() <= 0:
            cand = [[a, v, b], [b, u, a]]
        if signed_areas(mesh.vertices, np.array(cand)).min() <= 1e-9:
            continue
        faces[f], faces[g] = cand
        flipped = build_mesh(mesh.vertices, faces, strict=True)
        if not is_delaunay(flipped)[0]:
            mesh = flipped
            flips -= 1
            if flips == 0:
                break
    if is_delaunay(mesh)[0]:
        raise RuntimeError("could not produce a non-Delaunay mesh")
    return mesh


def random_regular_mesh(rng, n_points, min_angle_deg=1.0):
    """Random Delaunay mesh of the unit square whose smallest angle is at least ``min_angle_deg``."""
    from riemap.mesh import regularity_stats

    while True:
        mesh = random_disk_mesh(rng, n_points)
        if np.degrees(regularity_stats(mesh).min_angle) >= min_angle_deg:
            return mesh


def corner_marks():
    """Marks at square corners 0, 1, 2 (ids fixed by random_disk_mesh and unit_square)."""
    return (0, 1, 2)


def square_spec(mesh):
    return make_boundary_spec(mesh, 0, 1, 2)


def spread_marks(mesh):
    """Three boundary vertices roughly a third of the loop apart."""
    loop = mesh.boundary_loop
    n = len(loop)
    return tuple(int(loop[k]) for k in (0, n // 3, (2 * n) // 3))


TARGETS = {"equilateral": equilateral_target, "right-isosceles": right_isosceles_target}
