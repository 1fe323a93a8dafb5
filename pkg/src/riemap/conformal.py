"""Discrete Riemann maps onto a triangle, their verification and composition."""
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .boundary import build_constraints, constraint_residual
from .errors import (
    NotBijective,
    OutsideDomain,
    OutsideImage,
    PointOnCurve,
    TargetMismatch,
)
from .fem import (
    PLMap,
    area_functional,
    assemble_stiffness,
    dirichlet_energy,
    signed_image_areas,
)
from .mesh import PointLocator, is_delaunay, regularity_stats
from .solve import DEFAULT_TOL, build_reduced_system, solve_spd

INVERT_TOL = 1e-9
EVAL_TOL = 1e-12
MAX_PRINCIPLE_TOL = 1e-9
FLAT_TOL = 1e-12  # 2 * area / longest_edge**2 below this counts as collapsed
MIN_ANGLE_WARN = math.radians(1.0)


def winding_number(polyline, q, tol=1e-12):
    """Signed number of turns of the closed polyline around ``q``."""
    p = np.asarray(polyline, dtype=float) - np.asarray(q, dtype=float)
    nxt = np.roll(p, -1, axis=0)
    seg = nxt - p
    seg_len2 = np.einsum("ij,ij->i", seg, seg)
    t = np.clip(-np.einsum("ij,ij->i", p, seg) / np.where(seg_len2 > 0, seg_len2, 1.0), 0.0, 1.0)
    dist = np.linalg.norm(p + t[:, None] * seg, axis=1)
    if dist.min() <= tol:
        raise PointOnCurve("query point lies on the curve")
    cross = p[:, 0] * nxt[:, 1] - p[:, 1] * nxt[:, 0]
    dot = np.einsum("ij,ij->i", p, nxt)
    return int(round(np.arctan2(cross, dot).sum() / (2 * math.pi)))


def _boundary_monotone(spec, target, images):
    """Each arc image advances strictly from corner i towards corner i+1."""
    d = target.tangents
    for i, arc in enumerate(spec.arcs):
        t = images[arc] @ d[i]
        if np.any(np.diff(t) <= 0):
            return False
    return True


def _hull_violations(mesh, images, tol):
    """Interior vertices whose image lies outside the hull of its neighbours' images."""
    from shapely.geometry import MultiPoint, Point

    indptr, nbrs = mesh.neighbors
    inner = mesh.interior_vertices
    if len(inner) == 0:
        return np.zeros(0, dtype=np.int64)
    counts = np.diff(indptr)
    owner = np.repeat(np.arange(mesh.n_vertices), counts)
    vec = images[nbrs] - images[owner]
    ang = np.arctan2(vec[:, 1], vec[:, 0])
    order = np.lexsort((ang, owner))
    ang_sorted = ang[order]
    owner_sorted = owner[order]
    gaps = np.diff(ang_sorted)
    same = owner_sorted[1:] == owner_sorted[:-1]
    biggest = np.zeros(mesh.n_vertices)
    np.maximum.at(biggest, owner_sorted[1:][same], gaps[same])
    first = indptr[:-1]
    last = indptr[1:] - 1
    has = counts > 0
    wrap = np.zeros(mesh.n_vertices)
    wrap[has] = ang_sorted[first[has]] + 2 * math.pi - ang_sorted[last[has]]
    biggest = np.maximum(biggest, wrap)
    suspects = inner[biggest[inner] > math.pi - 1e-12]
    bad = []
    for v in suspects.tolist():
        ring = images[nbrs[indptr[v]:indptr[v + 1]]]
        if MultiPoint([tuple(p) for p in ring]).convex_hull.distance(Point(*images[v])) > tol:
            bad.append(v)
    return np.array(bad, dtype=np.int64)


@dataclass(frozen=True)
class VerificationReport:
    n_faces: int
    inverted_faces: int
    min_image_area: float
    boundary_monotone: bool
    bijective: bool
    bijectivity_expected: bool
    winding: int
    delaunay: bool
    max_principle: object  # bool, or None when the domain is not Delaunay
    max_principle_violations: int
    constraint_residual: float
    corner_error: float
    energy: float
    area_functional: float
    target_area: float
    energy_gap: float
    energy_bound_ok: bool
    ed_ge_ea_ok: bool

    @property
    def passed(self):
        """All properties the theory guarantees for this instance hold."""
        ok = (self.constraint_residual <= 1e-9 and self.corner_error <= 1e-12
              and self.energy_bound_ok and self.ed_ge_ea_ok and self.winding == 1)
        if self.bijectivity_expected:
            ok = ok and self.bijective
        if self.delaunay:
            ok = ok and bool(self.max_principle)
        return ok

    def as_dict(self):
        d = dict(self.__dict__)
        d["passed"] = self.passed
        return d


@dataclass(frozen=True, eq=False)
class DiscreteConformalMap:
    """Solved discrete Riemann map of a triangulated domain onto a triangle."""

    mesh: object
    spec: object
    target: object
    solution: PLMap
    W: object = field(repr=False)
    energy: float
    area_functional: float
    delaunay: bool

    @property
    def images(self):
        return self.solution.images

    @property
    def conformal_defect(self):
        return self.energy - self.area_functional

    @property
    def energy_gap(self):
        return self.energy - self.target.area

    @cached_property
    def image_areas(self):
        return signed_image_areas(self.solution)

    @cached_property
    def face_shape(self):
        """Signed 2 * area / (longest edge)**2 of every face image; scale-free flatness."""
        x = self.images[self.mesh.faces]
        longest = np.max([np.einsum("ij,ij->i", d, d)
                          for d in (x[:, 1] - x[:, 0], x[:, 2] - x[:, 1], x[:, 0] - x[:, 2])], axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = 2.0 * self.image_areas / longest
        return np.where(longest > 0, q, 0.0)

    @cached_property
    def inverted(self):
        """Mask of faces whose image is reversed or collapsed to a segment or point."""
        return self.face_shape <= FLAT_TOL

    @cached_property
    def winding(self):
        return winding_number(self.images[self.mesh.boundary_loop], self.target.centroid)

    @cached_property
    def bijective(self):
        """Certificate: all face images positively oriented (not flat) and boundary traversed monotonically."""
        return bool(not np.any(self.inverted)
                    and _boundary_monotone(self.spec, self.target, self.images))

    @cached_property
    def _image_locator(self):
        return PointLocator(self.images, self.mesh.faces, self.mesh.face_neighbors)

    def evaluate(self, q, start=None):
        loc = self.mesh.locator.locate(q, start=start, tol=EVAL_TOL)
        if loc is None:
            raise OutsideDomain(f"point {tuple(q)} is outside the domain")
        return loc.bary @ self.images[self.mesh.faces[loc.face]]

    def invert(self, z, start=None):
        if not self.bijective:
            raise NotBijective("map is not certified bijective")
        loc = self._image_locator.locate(z, start=start, tol=INVERT_TOL)
        if loc is None:
            raise OutsideImage(f"point {tuple(z)} is outside the image")
        return loc.bary @ self.mesh.vertices[self.mesh.faces[loc.face]]

    def evaluate_many(self, qs):
        return _apply_many(self.mesh.locator, self.images, self.mesh.faces, qs, EVAL_TOL, OutsideDomain)

    def invert_many(self, zs):
        if not self.bijective:
            raise NotBijective("map is not certified bijective")
        return _apply_many(self._image_locator, self.mesh.vertices, self.mesh.faces, zs,
                           INVERT_TOL, OutsideImage)


def _apply_many(locator, values, faces, pts, tol, err):
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    out = np.empty_like(pts)
    hint = None
    for k, q in enumerate(pts):
        loc = locator.locate(q, start=hint, tol=tol)
        if loc is None:
            raise err(f"point {tuple(q)} could not be located")
        out[k] = loc.bary @ values[faces[loc.face]]
        hint = loc.face
    return out


def riemann_map(mesh, spec, target, method="auto", tol=DEFAULT_TOL):
    """Minimize the Dirichlet energy over PL maps sending arc i onto line i."""
    if spec.mesh is not mesh:
        raise ValueError("boundary spec was built for a different mesh")
    stats = regularity_stats(mesh)
    if stats.min_angle < MIN_ANGLE_WARN:
        warnings.warn(f"mesh has a {math.degrees(stats.min_angle):.3g} degree angle; "
                      "accuracy may suffer", RuntimeWarning, stacklevel=2)
    W = assemble_stiffness(mesh)
    cs = build_constraints(spec, target)
    y = solve_spd(build_reduced_system(W, cs), method=method, tol=tol)
    sol = PLMap(mesh, cs.embed(y))
    return DiscreteConformalMap(
        mesh=mesh, spec=spec, target=target, solution=sol, W=W,
        energy=dirichlet_energy(sol, W), area_functional=area_functional(sol),
        delaunay=is_delaunay(mesh)[0],
    )


def max_principle_violations(mesh, images, tol=MAX_PRINCIPLE_TOL):
    return _hull_violations(mesh, np.asarray(images, dtype=float), tol)


def verify(cmap):
    images = cmap.images
    areas = cmap.image_areas
    corner_err = max(float(np.linalg.norm(images[p] - cmap.target.corners[i]))
                     for i, p in enumerate(cmap.spec.marks))
    if cmap.delaunay:
        viol = max_principle_violations(cmap.mesh, images)
        mp, nviol = len(viol) == 0, len(viol)
    else:
        mp, nviol = None, 0
    return VerificationReport(
        n_faces=cmap.mesh.n_faces,
        inverted_faces=int(np.sum(cmap.inverted)),
        min_image_area=float(areas.min()),
        boundary_monotone=_boundary_monotone(cmap.spec, cmap.target, images),
        bijective=cmap.bijective,
        bijectivity_expected=bool(cmap.delaunay and cmap.target.is_orbifold),
        winding=cmap.winding,
        delaunay=cmap.delaunay,
        max_principle=mp,
        max_principle_violations=nviol,
        constraint_residual=constraint_residual(cmap.spec, cmap.target, images),
        corner_error=corner_err,
        energy=cmap.energy,
        area_functional=cmap.area_functional,
        target_area=cmap.target.area,
        energy_gap=cmap.energy_gap,
        energy_bound_ok=cmap.energy >= cmap.target.area - 1e-9,
        ed_ge_ea_ok=cmap.energy >= cmap.area_functional - 1e-10,
    )


@dataclass(frozen=True, eq=False)
class ComposedMap:
    """q -> bwd^{-1}(fwd(q)): an approximation of the Riemann map between two domains."""

    forward: DiscreteConformalMap
    backward: DiscreteConformalMap

    def evaluate(self, q):
        return self.backward.invert(self.forward.evaluate(q))

    def evaluate_many(self, qs):
        return self.backward.invert_many(self.forward.evaluate_many(qs))


def compose(fwd, bwd):
    if not np.allclose(fwd.target.corners, bwd.target.corners, rtol=0.0, atol=1e-12):
        raise TargetMismatch("maps use different target triangles")
    if not bwd.bijective:
        raise NotBijective("backward map is not certified bijective")
    return ComposedMap(fwd, bwd)
