"""Command-line entry point: ``riemap {map,render,study,compose,snowflake}``.

Exit codes: 0 success, 1 verification failure under --strict, 2 input
error, 3 solver error.
"""
import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .conformal import verify
from .errors import RiemapError, SolverError
from .mesh import (
    build_mesh,
    delaunayize,
    koch_snowflake,
    refine_1to4,
    regularity_stats,
    triangulate_polygon,
)
from .meshio import read_arrays, write_arrays, write_mesh
from .problem import ProblemFileError, prepare, read_problem, validate
from .render import render_checkerboard
from .study import composition_study, run_ladder

log = logging.getLogger("riemap")

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3


class InputError(RiemapError):
    pass


def _write_json(path, doc, schema):
    validate(doc, schema)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def _load(args, path):
    doc, base = read_problem(path)
    if getattr(args, "solver", None):
        doc.setdefault("solver", {})["method"] = args.solver
    if getattr(args, "tol", None):
        doc.setdefault("solver", {})["tol"] = args.tol
    return doc, base


def diagnostics(prepared, cmap, report, elapsed):
    t = cmap.target
    return {
        "vertices": cmap.mesh.n_vertices,
        "faces": cmap.mesh.n_faces,
        "energy": cmap.energy,
        "area_functional": cmap.area_functional,
        "conformal_defect": cmap.conformal_defect,
        "target_area": t.area,
        "energy_gap": cmap.energy_gap,
        "winding": report.winding,
        "bijective": report.bijective,
        "bijectivity_expected": report.bijectivity_expected,
        "delaunay": report.delaunay,
        "max_principle": report.max_principle,
        "inverted_faces": report.inverted_faces,
        "constraint_residual": report.constraint_residual,
        "corner_error": report.corner_error,
        "passed": report.passed,
        "marks": list(prepared.problem.marks),
        "snap_distances": list(prepared.snap_distances),
        "target": {"corners": t.corners.tolist(), "kind": t.kind},
        "min_angle": regularity_stats(cmap.mesh).min_angle,
        "solve_time": elapsed,
    }


def cmd_map(args):
    doc, base = _load(args, args.problem)
    prepared = prepare(doc, base, refine=args.refine, delaunay=args.delaunayize or None)
    t0 = time.perf_counter()
    cmap = prepared.problem.solve(method=prepared.method, tol=prepared.tol)
    elapsed = time.perf_counter() - t0
    report = verify(cmap)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    ext = args.format
    write_mesh(out / f"domain.{ext}", cmap.mesh)
    write_arrays(out / f"image.{ext}", cmap.images, cmap.mesh.faces)
    diag = diagnostics(prepared, cmap, report, elapsed)
    _write_json(out / "diagnostics.json", diag, "diagnostics")
    log.info("solved %d vertices in %.2fs; gap %.3e, winding %d, bijective %s",
             cmap.mesh.n_vertices, elapsed, cmap.energy_gap, report.winding, report.bijective)
    if args.strict and not report.passed:
        return EXIT_VERIFY
    return EXIT_OK


def _find_artifact(directory, stem):
    for ext in ("off", "obj"):
        p = Path(directory) / f"{stem}.{ext}"
        if p.exists():
            return p
    raise InputError(f"missing {stem}.off/.obj in {directory}")


def cmd_render(args):
    d = Path(args.artifacts)
    mesh_path = _find_artifact(d, "domain")
    image_path = _find_artifact(d, "image")
    verts, faces = read_arrays(mesh_path)
    mesh = build_mesh(verts, faces)
    images, image_faces = read_arrays(image_path)
    if len(images) != mesh.n_vertices or not np.array_equal(image_faces, mesh.faces):
        raise InputError("image mesh does not match the domain mesh")
    corners = None
    diag_path = d / "diagnostics.json"
    if diag_path.exists():
        corners = json.loads(diag_path.read_text())["target"]["corners"]
    svg = render_checkerboard(mesh, images, corners, density=args.grid_density,
                              subdivide=args.subdivide, width=args.width)
    Path(args.output).write_text(svg)
    return EXIT_OK


def cmd_study(args):
    doc, base = _load(args, args.problem)
    prepared = prepare(doc, base, delaunay=args.delaunayize or None)
    report = run_ladder(prepared.problem, args.levels, delaunay=prepared.delaunay,
                        method=prepared.method, tol=prepared.tol)
    _write_json(args.output, report.to_dict(), "report")
    if args.csv:
        report.write_csv(args.csv)
    for r in report.levels:
        log.info("level %d  h=%.4g  V=%d  gap=%.6e  h1_diff=%s", r.level, r.h, r.vertices,
                 r.energy_gap, "-" if r.h1_diff is None else f"{r.h1_diff:.6e}")
    if args.strict and not all(r.verified for r in report.levels):
        return EXIT_VERIFY
    return EXIT_OK


def cmd_compose(args):
    doc_a, base_a = _load(args, args.forward)
    doc_b, base_b = _load(args, args.backward)
    pa = prepare(doc_a, base_a)
    pb = prepare(doc_b, base_b)
    reference = (lambda p: p) if args.reference == "identity" else None
    report = composition_study(pa.problem, pb.problem, args.levels, reference=reference,
                               method=pa.method, tol=pa.tol)
    _write_json(args.output, report.to_dict(), "report")
    if args.csv:
        report.write_csv(args.csv)
    for r in report.levels:
        log.info("level %d  h=%.4g  sup_error=%.6e", r.level, r.h, r.sup_error)
    return EXIT_OK


def cmd_snowflake(args):
    pts = koch_snowflake(args.depth)
    mesh = triangulate_polygon(pts)
    log.info("depth %d snowflake: %d boundary edges", args.depth, len(mesh.boundary_loop))
    if args.delaunayize:
        mesh = delaunayize(mesh)
    for _ in range(args.refine):
        mesh = refine_1to4(mesh)
        if args.delaunayize:
            mesh = delaunayize(mesh)
    write_mesh(args.output, mesh)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="riemap", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=None,
                   help="seed for randomized utilities (the solver itself is deterministic)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def solver_opts(sp):
        sp.add_argument("--solver", choices=["auto", "direct", "cg"])
        sp.add_argument("--tol", type=float)

    m = sub.add_parser("map", help="solve one problem file")
    m.add_argument("problem")
    m.add_argument("-o", "--output", required=True, help="output directory")
    m.add_argument("--strict", action="store_true")
    m.add_argument("--refine", type=int, default=None)
    m.add_argument("--delaunayize", action="store_true")
    m.add_argument("--format", choices=["off", "obj"], default="off")
    solver_opts(m)
    m.set_defaults(func=cmd_map)

    r = sub.add_parser("render", help="checkerboard pullback SVG of a solved map")
    r.add_argument("artifacts", help="directory written by 'riemap map'")
    r.add_argument("-o", "--output", required=True)
    r.add_argument("--grid-density", type=int, default=8)
    r.add_argument("--subdivide", type=int, default=0)
    r.add_argument("--width", type=float, default=800.0)
    r.set_defaults(func=cmd_render)

    s = sub.add_parser("study", help="refinement-ladder convergence study")
    s.add_argument("problem")
    s.add_argument("--levels", type=int, default=4)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--csv")
    s.add_argument("--delaunayize", action="store_true")
    s.add_argument("--strict", action="store_true")
    solver_opts(s)
    s.set_defaults(func=cmd_study)

    c = sub.add_parser("compose", help="composition study of two problems sharing a target")
    c.add_argument("forward")
    c.add_argument("backward")
    c.add_argument("--levels", type=int, default=4)
    c.add_argument("-o", "--output", required=True)
    c.add_argument("--csv")
    c.add_argument("--reference", choices=["self", "identity"], default="self")
    solver_opts(c)
    c.set_defaults(func=cmd_compose)

    k = sub.add_parser("snowflake", help="write a triangulated Koch snowflake mesh")
    k.add_argument("--depth", type=int, required=True)
    k.add_argument("--refine", type=int, default=0)
    k.add_argument("--delaunayize", action="store_true")
    k.add_argument("-o", "--output", required=True)
    k.set_defaults(func=cmd_snowflake)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if args.seed is not None:
        np.random.seed(args.seed)
    try:
        return args.func(args)
    except SolverError as exc:
        log.error("solver error: %s", exc)
        return EXIT_SOLVER
    except (ProblemFileError, InputError, RiemapError, OSError, ValueError) as exc:
        log.error("input error: %s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
