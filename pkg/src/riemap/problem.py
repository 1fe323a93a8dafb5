"""JSON problem files: domain source, marked points, target and solver options."""
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .boundary import make_target, named_target, split_dividing_edges
from .errors import RiemapError
from .mesh import delaunayize, koch_snowflake, refine_1to4, triangulate_polygon
from .meshio import read_mesh
from .study import Problem


class ProblemFileError(RiemapError):
    """Unreadable or invalid problem file."""


def load_schema(name):
    text = resources.files("riemap").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc, name):
    try:
        jsonschema.validate(doc, load_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ProblemFileError(f"{name} schema violation at {where}: {exc.message}") from None


@dataclass(frozen=True, eq=False)
class PreparedProblem:
    problem: Problem
    base_mesh: object
    snap_distances: tuple
    refine: int
    delaunay: bool
    method: str
    tol: float

    @property
    def mesh(self):
        return self.problem.mesh


def parse_problem(text, source="<string>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    validate(doc, "problem")
    return doc


def read_problem(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from None
    return parse_problem(text, str(path)), path.parent


def snap_to_boundary(mesh, points):
    """Nearest boundary vertex for each point, with the snap distance."""
    loop = mesh.boundary_loop
    bp = mesh.vertices[loop]
    idx, dist = [], []
    for p in np.asarray(points, dtype=float):
        d = np.linalg.norm(bp - p, axis=1)
        k = int(np.argmin(d))
        idx.append(int(loop[k]))
        dist.append(float(d[k]))
    return tuple(idx), tuple(dist)


def build_domain(doc, base_dir="."):
    dom = doc["domain"]
    if "polygon" in dom:
        return triangulate_polygon(dom["polygon"])
    if "koch" in dom:
        return triangulate_polygon(koch_snowflake(dom["koch"]["depth"]))
    return read_mesh(Path(base_dir) / dom["mesh"])


def build_target(doc):
    t = doc["target"]
    if "corners" in t:
        return make_target(*t["corners"])
    return named_target(t["kind"], t.get("size", 1.0))


def prepare(doc, base_dir=".", refine=None, delaunay=None):
    """Turn a validated problem document into a solvable :class:`Problem`.

    Dividing edges of the base mesh are split (unless disabled), the mesh is
    delaunayized when requested, then refined ``refine`` times.  Refinement
    keeps the mesh free of dividing edges; after Delaunay flips they are
    split again.
    """
    base = build_domain(doc, base_dir)
    marks = doc["marks"]
    if "indices" in marks:
        idx = tuple(int(i) for i in marks["indices"])
        snaps = (0.0, 0.0, 0.0)
    else:
        idx, snaps = snap_to_boundary(base, marks["points"])
    target = build_target(doc)
    refine = doc.get("refine", 0) if refine is None else refine
    delaunay = doc.get("delaunayize", False) if delaunay is None else delaunay
    mesh = base
    split = doc.get("split_dividing_edges", True)

    def tidy(m):
        if delaunay:
            m = delaunayize(m)
        return split_dividing_edges(m, idx, delaunay=delaunay) if split else m

    mesh = tidy(base)
    for _ in range(refine):
        mesh = refine_1to4(mesh)
        if delaunay:
            mesh = tidy(mesh)
    solver = doc.get("solver", {})
    problem = Problem(mesh, idx, target)
    problem.spec()  # validates the marks early
    return PreparedProblem(problem, base, snaps, refine, delaunay,
                           solver.get("method", "auto"), solver.get("tol", 1e-10))
