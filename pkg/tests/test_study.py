import json
import math

import numpy as np
import pytest

from helpers import EQ_CORNERS, SQRT3, random_disk_mesh, unit_square
from riemap.boundary import equilateral_target, right_isosceles_target, split_dividing_edges
from riemap.fem import PLMap, assemble_stiffness, dirichlet_energy
from riemap.mesh import build_mesh, prolong, refine_1to4, triangulate_polygon
from riemap.study import (
    ConvergenceReport,
    Problem,
    composition_study,
    default_samples,
    fit_rate,
    ladder_meshes,
    run_ladder,
)


@pytest.fixture(scope="module")
def square_ladder():
    return run_ladder(Problem(unit_square(), (0, 1, 2), equilateral_target()), 5)


def test_triangle_exact():
    t = equilateral_target()
    rep = run_ladder(Problem(build_mesh(EQ_CORNERS, [[0, 1, 2]]), (0, 1, 2), t), 4,
                     exact=lambda p: p)
    assert len(rep.levels) == 4
    for r in rep.levels:
        assert abs(r.energy_gap) <= 1e-10
        assert r.sup_error <= 1e-10


def test_square_ladder(square_ladder):
    gaps = square_ladder.column("energy_gap")
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert all(g >= -1e-9 for g in gaps)
    h1 = square_ladder.column("h1_diff")
    assert h1[0] is None
    assert all(b < a for a, b in zip(h1[1:], h1[2:]))
    h = square_ladder.column("h")
    assert np.allclose(np.array(h[1:]) / np.array(h[:-1]), 0.5)
    assert square_ladder.target_area == pytest.approx(SQRT3 / 4)
    assert all(r.winding == 1 and r.verified for r in square_ladder.levels)
    # the gap shrinks at a positive power of h
    assert square_ladder.gap_rate > 0.5


def test_delaunay_ladder_bijective():
    rep = run_ladder(Problem(unit_square(), (0, 1, 2), right_isosceles_target()), 4, delaunay=True)
    assert all(r.bijective and r.delaunay and r.max_principle for r in rep.levels)
    assert all(r.h1_diff is None for r in rep.levels)


def test_ladder_meshes_nested():
    ms = ladder_meshes(unit_square(), 3)
    assert [m.n_vertices for m in ms] == [4, 9, 25]
    assert np.array_equal(ms[2].vertices[:9], ms[1].vertices)


def test_prolongation_energy():
    rng = np.random.default_rng(0)
    m = random_disk_mesh(rng, 30)
    x = rng.normal(size=(m.n_vertices, 2))
    r = refine_1to4(m)
    e0 = dirichlet_energy(PLMap(m, x), assemble_stiffness(m))
    e1 = dirichlet_energy(PLMap(r, prolong(m, x)), assemble_stiffness(r))
    assert e1 == pytest.approx(e0, rel=1e-12, abs=1e-12)


def test_fit_rate():
    h = np.array([1, 0.5, 0.25, 0.125])
    rate, resid = fit_rate(h, 3 * h**2)
    assert rate == pytest.approx(2.0)
    assert resid == pytest.approx(0.0, abs=1e-12)


def test_report_roundtrip(square_ladder, tmp_path):
    path = tmp_path / "r.json"
    square_ladder.write_json(path)
    back = ConvergenceReport.read_json(path)
    assert back.to_dict() == square_ladder.to_dict()
    assert json.loads(path.read_text())["kind"] == "ladder"
    square_ladder.write_csv(tmp_path / "r.csv")
    rows = (tmp_path / "r.csv").read_text().splitlines()
    assert len(rows) == 1 + len(square_ladder.levels)
    gap = float(rows[1].split(",")[rows[0].split(",").index("energy_gap")])
    assert gap == square_ladder.levels[0].energy_gap


class TestComposition:
    def test_identical(self):
        m = split_dividing_edges(unit_square(), (0, 1, 2))
        p = Problem(m, (0, 1, 2), equilateral_target())
        rep = composition_study(p, p, 3, reference=lambda q: q)
        assert max(rep.column("sup_error")) <= 1e-9

    def test_square_to_square(self):
        a = Problem(unit_square(), (0, 1, 2), equilateral_target())
        b_mesh = triangulate_polygon([(0, 0), (0.4, 0), (1, 0), (1, 0.55), (1, 1), (0, 1), (0, 0.3)])
        b = Problem(split_dividing_edges(b_mesh, (0, 2, 4), delaunay=True), (0, 2, 4), equilateral_target())
        rep = composition_study(a, b, 4, reference=lambda q: q)
        err = rep.column("sup_error")
        assert all(y < x for x, y in zip(err, err[1:]))
        assert all(r.mark_error <= 1e-9 for r in rep.levels)

    def test_rectangle_self_convergence(self):
        rect = triangulate_polygon([(0, 0), (2, 0), (2, 1), (0, 1)])
        a = Problem(split_dividing_edges(rect, (0, 1, 2), delaunay=True), (0, 1, 2), equilateral_target())
        b = Problem(unit_square(), (0, 1, 2), equilateral_target())
        rep = composition_study(a, b, 4)
        err = rep.column("sup_error")
        assert err[-1] == 0
        assert all(y < x for x, y in zip(err[:-1], err[1:-1]))

    def test_samples_inside(self):
        m = triangulate_polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
        s = default_samples(m, n=9)
        assert len(s) < 81
        assert not np.any((s[:, 0] > 1) & (s[:, 1] > 1))


def test_levels_validation():
    with pytest.raises(ValueError):
        run_ladder(Problem(unit_square(), (0, 1, 2), equilateral_target()), 0)


def test_gap_matches_energy(square_ladder):
    for r in square_ladder.levels:
        assert r.energy_gap == pytest.approx(r.energy - math.sqrt(3) / 4, abs=1e-15)
