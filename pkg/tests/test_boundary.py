import math

import numpy as np
import pytest

from helpers import EQ_CORNERS, grid_square, random_disk_mesh, single_triangle, unit_square
from riemap.boundary import (
    ARC,
    CORNER,
    INTERIOR,
    build_constraints,
    constraint_residual,
    constraint_rows,
    dividing_edges,
    equilateral_target,
    make_boundary_spec,
    make_target,
    named_target,
    right_isosceles_target,
    split_dividing_edges,
)
from riemap.errors import ClockwiseCorners, CollinearCorners, NotDistinct, NotOnBoundary, WrongOrder
from riemap.mesh import build_mesh, refine_1to4


class TestTarget:
    def test_equilateral(self):
        t = make_target(*EQ_CORNERS)
        assert t.kind == "equilateral"
        assert np.allclose(t.normals[0], (0, -1))
        assert t.offsets[0] == pytest.approx(0.0, abs=1e-15)
        assert t.area == pytest.approx(math.sqrt(3) / 4)

    def test_normals_outward(self):
        t = make_target((0.2, 0.1), (3.0, 0.5), (1.0, 2.0))
        assert t.kind == "generic"
        for i in range(3):
            assert t.line_residuals(t.corners[[i, (i + 1) % 3]], i) == pytest.approx([0, 0], abs=1e-14)
            assert t.line_residuals(t.centroid[None], i)[0] < 0
            assert np.linalg.norm(t.normals[i]) == pytest.approx(1.0)

    def test_right_isosceles(self):
        assert make_target((0, 0), (1, 0), (0, 1)).kind == "right-isosceles"
        # right angle at a corner other than the first
        assert make_target((1, 0), (1, 1), (0, 0)).kind == "right-isosceles"
        assert right_isosceles_target().is_orbifold

    def test_collinear(self):
        with pytest.raises(CollinearCorners):
            make_target((0, 0), (1, 0), (2, 0))

    def test_clockwise(self):
        with pytest.raises(ClockwiseCorners):
            make_target((0, 0), (0, 1), (1, 0))
        t = make_target((0, 0), (0, 1), (1, 0), strict=False)
        assert t.area > 0
        assert np.allclose(t.corners, [(0, 0), (1, 0), (0, 1)])

    def test_named(self):
        assert named_target("equilateral", 2.0).area == pytest.approx(math.sqrt(3))
        with pytest.raises(ValueError):
            named_target("square")


class TestSpec:
    def test_square_arcs(self):
        spec = make_boundary_spec(build_mesh([(0, 0), (1, 0), (1, 1), (0, 1)], [[0, 1, 2], [0, 2, 3]]), 0, 1, 2)
        assert [a.tolist() for a in spec.arcs] == [[0, 1], [1, 2], [2, 3, 0]]

    def test_wrong_order(self):
        with pytest.raises(WrongOrder):
            make_boundary_spec(unit_square(), 0, 2, 1)

    def test_not_on_boundary(self):
        m = grid_square(2)
        with pytest.raises(NotOnBoundary):
            make_boundary_spec(m, 0, 4, 8)

    def test_not_distinct(self):
        with pytest.raises(NotDistinct):
            make_boundary_spec(unit_square(), 0, 0, 2)

    def test_refined_arcs(self):
        m = refine_1to4(unit_square())
        spec = make_boundary_spec(m, 0, 1, 2)
        first = spec.arcs[0].tolist()
        assert first[0] == 0 and first[-1] == 1 and len(first) == 3
        assert np.allclose(m.vertices[first[1]], (0.5, 0))
        assert len(spec.arcs[2]) == 5


class TestConstraints:
    def test_square_dofs(self):
        cs = build_constraints(make_boundary_spec(unit_square(), 0, 1, 2), equilateral_target())
        assert cs.dimension == 1
        assert cs.vertex_class.tolist() == [CORNER, CORNER, CORNER, ARC]
        assert cs.counts == {"interior": 0, "arc": 1, "corner": 3}

    def test_fully_pinned(self):
        t = equilateral_target()
        cs = build_constraints(make_boundary_spec(single_triangle(), 0, 1, 2), t)
        assert cs.dimension == 0
        assert np.array_equal(cs.embed(np.zeros(0)), t.corners)

    @pytest.mark.parametrize("seed", range(4))
    def test_dof_accounting(self, seed):
        rng = np.random.default_rng(seed)
        m = random_disk_mesh(rng, 50)
        m = refine_1to4(m) if seed % 2 else m
        t = make_target((0, 0), (2, 0.3), (0.4, 1.5))
        spec = make_boundary_spec(m, 0, 1, 2)
        cs = build_constraints(spec, t)
        _, _, pairs = constraint_rows(spec, t)
        c = cs.counts
        assert 2 * m.n_vertices == 2 * c["interior"] + c["arc"] + len(pairs)
        assert len(pairs) == c["arc"] + 2 * c["corner"]
        assert cs.dimension == 2 * c["interior"] + c["arc"]
        assert np.all(cs.vertex_class[m.interior_vertices] == INTERIOR)

    def test_embedding_feasible(self):
        rng = np.random.default_rng(5)
        m = random_disk_mesh(rng, 40)
        t = make_target((0, 0), (2, 0.3), (0.4, 1.5))
        spec = make_boundary_spec(m, 0, 1, 2)
        cs = build_constraints(spec, t)
        y = rng.normal(size=cs.dimension) * 100
        x = cs.embed(y)
        assert constraint_residual(spec, t, x) <= 1e-12
        for i, p in enumerate(spec.marks):
            assert np.array_equal(x[p], t.corners[i])
            assert abs(t.line_residuals(x[p][None], i)[0]) <= 1e-12
            assert abs(t.line_residuals(x[p][None], (i - 1) % 3)[0]) <= 1e-12
        assert np.allclose(cs.reduce(x), y)
        C, d, _ = constraint_rows(spec, t)
        assert np.abs(C @ x.ravel() + d).max() <= 1e-10

    def test_relaxed_lines(self):
        # arc vertices can travel the whole infinite line, past the triangle's edge
        t = equilateral_target()
        spec = make_boundary_spec(unit_square(), 0, 1, 2)
        cs = build_constraints(spec, t)
        x = cs.embed(np.array([50.0]))
        assert abs(t.line_residuals(x[3][None], 2)[0]) <= 1e-12
        assert np.linalg.norm(x[3]) > 10


class TestDividingEdges:
    def test_square_diagonal(self):
        m = build_mesh([(0, 0), (1, 0), (1, 1), (0, 1)], [[0, 1, 2], [0, 2, 3]])
        spec = make_boundary_spec(m, 0, 1, 2)
        assert dividing_edges(spec).tolist() == [[0, 2]]
        s = split_dividing_edges(m, (0, 1, 2))
        assert s.n_vertices == 5
        assert len(dividing_edges(make_boundary_spec(s, 0, 1, 2))) == 0
        assert np.array_equal(s.vertices[:4], m.vertices)

    def test_other_diagonal_is_fine(self):
        m = unit_square()
        assert len(dividing_edges(make_boundary_spec(m, 0, 1, 2))) == 0
        assert split_dividing_edges(m, (0, 1, 2)) is m

    def test_refinement_keeps_property(self):
        m = split_dividing_edges(random_disk_mesh(np.random.default_rng(3), 30), (0, 1, 2))
        r = refine_1to4(refine_1to4(m))
        assert len(dividing_edges(make_boundary_spec(r, 0, 1, 2))) == 0

    def test_with_flips(self):
        m = split_dividing_edges(random_disk_mesh(np.random.default_rng(4), 30), (0, 1, 2), delaunay=True)
        assert len(dividing_edges(make_boundary_spec(m, 0, 1, 2))) == 0
