"""Refinement-ladder convergence studies."""
import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .boundary import make_boundary_spec, split_dividing_edges
from .conformal import compose, riemann_map, verify
from .fem import PLMap, assemble_mass, assemble_stiffness, h1_norm_diff, sup_norm_diff
from .mesh import delaunayize, prolong, refine_1to4, regularity_stats


@dataclass(frozen=True, eq=False)
class Problem:
    """A domain mesh, three marked boundary vertices and a target triangle."""

    mesh: object
    marks: tuple
    target: object

    def spec(self, mesh=None):
        return make_boundary_spec(mesh if mesh is not None else self.mesh, *self.marks)

    def solve(self, mesh=None, method="auto", tol=1e-10):
        mesh = mesh if mesh is not None else self.mesh
        return riemann_map(mesh, self.spec(mesh), self.target, method=method, tol=tol)


@dataclass
class LevelRecord:
    level: int
    h: float
    vertices: int
    faces: int
    energy: float
    energy_gap: float
    conformal_defect: float
    h1_diff: float = None  # to the previous level, coarse solution prolonged
    sup_diff: float = None
    h1_error: float = None  # against a known exact map
    sup_error: float = None
    min_angle: float = None
    bijective: bool = None
    delaunay: bool = None
    winding: int = None
    max_principle: bool = None
    verified: bool = None
    solve_time: float = None


@dataclass
class ConvergenceReport:
    kind: str
    target_area: float
    levels: list = field(default_factory=list)
    gap_rate: float = None
    gap_rate_residual: float = None
    error_rate: float = None

    def column(self, name):
        return [getattr(r, name) for r in self.levels]

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        rec = CompositionRecord if d.get("kind") == "composition" else LevelRecord
        d["levels"] = [rec(**r) for r in d.get("levels", [])]
        return cls(**d)

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def read_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def write_csv(self, path):
        rec = type(self.levels[0]) if self.levels else LevelRecord
        names = [f.name for f in fields(rec)]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(names)
            for r in self.levels:
                w.writerow(["" if v is None else (format(v, ".17g") if isinstance(v, float) else v)
                            for v in (getattr(r, n) for n in names)])


@dataclass
class CompositionRecord:
    level: int
    h: float
    forward_vertices: int
    backward_vertices: int
    sup_error: float
    mark_error: float
    forward_bijective: bool
    backward_bijective: bool
    solve_time: float


def fit_rate(h, values):
    """Least-squares slope of log(values) against log(h), with the RMS residual."""
    h = np.asarray(h, dtype=float)
    v = np.asarray([np.nan if x is None else x for x in values], dtype=float)
    ok = np.isfinite(v) & (v > 1e-14)
    if ok.sum() < 2:
        return None, None
    X, Y = np.log(h[ok]), np.log(v[ok])
    slope, icept = np.polyfit(X, Y, 1)
    resid = float(np.sqrt(np.mean((Y - (slope * X + icept)) ** 2)))
    return float(slope), resid


def ladder_meshes(mesh, levels, delaunay=False, marks=None):
    """Base mesh followed by ``levels - 1`` successive refinements.

    With ``delaunay`` every level is flipped to Delaunay; given ``marks``,
    dividing edges reintroduced by the flips are split again.
    """

    def flip(m):
        m = delaunayize(m)
        return m if marks is None else split_dividing_edges(m, marks, delaunay=True)

    if delaunay:
        mesh = flip(mesh)
    out = [mesh]
    for _ in range(levels - 1):
        m = refine_1to4(out[-1])
        out.append(flip(m) if delaunay else m)
    return out


def run_ladder(problem, levels, delaunay=False, method="auto", tol=1e-10, exact=None):
    """Solve the problem on a 1->4 ladder and collect per-level diagnostics.

    ``exact``, when given, maps an (n, 2) array of domain points to their
    exact images and enables the ``h1_error``/``sup_error`` columns.  With
    ``delaunay`` the ladder is no longer nested, so consecutive-level
    differences are left empty.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    report = ConvergenceReport(kind="ladder", target_area=problem.target.area)
    prev = None
    for lvl, mesh in enumerate(ladder_meshes(problem.mesh, levels, delaunay, problem.marks)):
        t0 = time.perf_counter()
        cmap = problem.solve(mesh, method=method, tol=tol)
        elapsed = time.perf_counter() - t0
        rep = verify(cmap)
        stats = regularity_stats(mesh)
        rec = LevelRecord(
            level=lvl, h=stats.max_edge_length, vertices=mesh.n_vertices, faces=mesh.n_faces,
            energy=cmap.energy, energy_gap=cmap.energy_gap, conformal_defect=cmap.conformal_defect,
            min_angle=stats.min_angle, bijective=rep.bijective, delaunay=rep.delaunay,
            winding=rep.winding, max_principle=rep.max_principle, verified=rep.passed,
            solve_time=elapsed,
        )
        need_fem = (prev is not None and not delaunay) or exact is not None
        if need_fem:
            W = cmap.W
            M = assemble_mass(mesh)
        if prev is not None and not delaunay:
            coarse = PLMap(mesh, prolong(prev.mesh, prev.images))
            rec.h1_diff = h1_norm_diff(cmap.solution, coarse, W, M)
            rec.sup_diff = sup_norm_diff(cmap.solution, coarse)
        if exact is not None:
            ref = PLMap(mesh, exact(mesh.vertices))
            rec.h1_error = h1_norm_diff(cmap.solution, ref, W, M)
            rec.sup_error = sup_norm_diff(cmap.solution, ref)
        report.levels.append(rec)
        prev = cmap
    report.gap_rate, report.gap_rate_residual = fit_rate(report.column("h"), report.column("energy_gap"))
    if exact is not None:
        report.error_rate = fit_rate(report.column("h"), report.column("h1_error"))[0]
    return report


def default_samples(mesh, n=33):
    """n x n grid strictly inside the bounding box, kept where it falls in the domain."""
    lo, hi = mesh.vertices.min(axis=0), mesh.vertices.max(axis=0)
    gx = np.linspace(lo[0], hi[0], n + 2)[1:-1]
    gy = np.linspace(lo[1], hi[1], n + 2)[1:-1]
    pts = np.array([(x, y) for y in gy for x in gx])
    keep = [mesh.locator.locate(p, tol=0.0) is not None for p in pts]
    return pts[np.array(keep)]


def composition_study(problem_a, problem_b, levels, samples=None, reference=None,
                      delaunay=True, method="auto", tol=1e-10):
    """Sup error of bwd^{-1} o fwd on sample points across a refinement ladder.

    ``reference`` maps sample points to their exact images; when omitted the
    finest-level composed map serves as reference (self-convergence).
    """
    if not np.allclose(problem_a.target.corners, problem_b.target.corners, atol=1e-12, rtol=0):
        from .errors import TargetMismatch

        raise TargetMismatch("problems use different targets")
    meshes_a = ladder_meshes(problem_a.mesh, levels, delaunay, problem_a.marks)
    meshes_b = ladder_meshes(problem_b.mesh, levels, delaunay, problem_b.marks)
    if samples is None:
        samples = default_samples(meshes_a[0])
    samples = np.asarray(samples, dtype=float)
    marks_a = problem_a.mesh.vertices[list(problem_a.marks)]
    marks_b = problem_b.mesh.vertices[list(problem_b.marks)]
    values, rows = [], []
    for lvl, (ma, mb) in enumerate(zip(meshes_a, meshes_b)):
        t0 = time.perf_counter()
        fwd = problem_a.solve(ma, method=method, tol=tol)
        bwd = problem_b.solve(mb, method=method, tol=tol)
        comp = compose(fwd, bwd)
        vals = comp.evaluate_many(samples)
        mark_err = float(np.linalg.norm(comp.evaluate_many(marks_a) - marks_b, axis=1).max())
        elapsed = time.perf_counter() - t0
        values.append(vals)
        h = max(regularity_stats(ma).max_edge_length, regularity_stats(mb).max_edge_length)
        rows.append(CompositionRecord(
            level=lvl, h=h, forward_vertices=ma.n_vertices, backward_vertices=mb.n_vertices,
            sup_error=math.nan, mark_error=mark_err, forward_bijective=fwd.bijective,
            backward_bijective=bwd.bijective, solve_time=elapsed))
    ref = reference(samples) if reference is not None else values[-1]
    for rec, vals in zip(rows, values):
        rec.sup_error = float(np.linalg.norm(vals - ref, axis=1).max())
    report = ConvergenceReport(kind="composition", target_area=problem_a.target.area, levels=rows)
    pts = rows if reference is not None else rows[:-1]
    report.error_rate = fit_rate([r.h for r in pts], [r.sup_error for r in pts])[0]
    return report
