import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import EQ_CORNERS, grid_square, random_disk_mesh, random_regular_mesh, single_triangle, unit_square
from riemap.errors import DimensionMismatch
from riemap.fem import (
    PLMap,
    area_functional,
    assemble_mass,
    assemble_stiffness,
    conformal_defect,
    dirichlet_energy,
    dirichlet_gradient,
    face_jacobians,
    h1_norm_diff,
    sup_norm_diff,
)
from riemap.mesh import build_mesh, delaunayize, is_delaunay


def gradient_oracle(mesh):
    """Stiffness from explicit hat-function gradients (no cotangents involved)."""
    n = mesh.n_vertices
    W = np.zeros((n, n))
    for f in mesh.faces:
        p = mesh.vertices[f]
        # phi_i(x) = c_i + g_i . x; solve [1 x y] coefficients for the three hats
        coef = np.linalg.inv(np.c_[np.ones(3), p])
        grads = coef[1:].T
        area = 0.5 * abs(np.linalg.det(np.c_[np.ones(3), p]))
        W[np.ix_(f, f)] += area * grads @ grads.T
    return W


def mass_oracle(mesh):
    """Mass matrix by edge-midpoint quadrature (exact for quadratics)."""
    n = mesh.n_vertices
    M = np.zeros((n, n))
    mids = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
    for f, area in zip(mesh.faces, mesh.face_areas):
        M[np.ix_(f, f)] += area / 3 * mids.T @ mids
    return M


class TestStiffness:
    def test_reference_triangle(self):
        W = assemble_stiffness(single_triangle()).toarray()
        expected = np.array([[1, -0.5, -0.5], [-0.5, 0.5, 0], [-0.5, 0, 0.5]])
        assert np.allclose(W, expected, atol=1e-15)
        assert np.allclose(gradient_oracle(single_triangle()), expected, atol=1e-15)

    def test_equilateral(self):
        W = assemble_stiffness(build_mesh(EQ_CORNERS, [[0, 1, 2]])).toarray()
        off = W[~np.eye(3, dtype=bool)]
        assert np.allclose(off, -1 / (2 * math.sqrt(3)), atol=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_oracle(self, seed):
        m = random_disk_mesh(np.random.default_rng(seed), 40, delaunay=seed % 2 == 0)
        W = assemble_stiffness(m)
        assert np.allclose(W.toarray(), gradient_oracle(m), atol=1e-12)

    def test_symmetric_zero_rows(self):
        m = random_disk_mesh(np.random.default_rng(7), 80, delaunay=False)
        W = assemble_stiffness(m)
        assert abs(W - W.T).max() == 0
        assert np.abs(np.asarray(W.sum(axis=1))).max() <= 1e-12

    def test_delaunay_nonpositive_offdiagonal(self):
        m = delaunayize(random_disk_mesh(np.random.default_rng(8), 80, delaunay=False))
        assert is_delaunay(m)[0]
        W = assemble_stiffness(m)
        # boundary edges see a single angle, which may be obtuse; only interior edges are covered
        inner = m.edges[m.edge_faces[:, 1] >= 0]
        assert np.asarray(W[inner[:, 0], inner[:, 1]]).max() <= 1e-9


class TestMass:
    @pytest.mark.parametrize("seed", range(3))
    def test_matches_oracle(self, seed):
        m = random_disk_mesh(np.random.default_rng(seed), 30)
        assert np.allclose(assemble_mass(m).toarray(), mass_oracle(m), atol=1e-15)

    def test_total(self):
        m = grid_square(4)
        assert assemble_mass(m).sum() == pytest.approx(1.0)
        assert assemble_mass(m, lumped=True).sum() == pytest.approx(1.0)


class TestEnergy:
    def test_identity(self):
        m = random_disk_mesh(np.random.default_rng(1), 30)
        W = assemble_stiffness(m)
        assert dirichlet_energy(PLMap(m, m.vertices), W) == pytest.approx(m.area, rel=1e-12)
        assert area_functional(PLMap(m, m.vertices)) == pytest.approx(m.area, rel=1e-12)

    def test_constant(self):
        m = grid_square(3)
        assert dirichlet_energy(PLMap(m, np.tile([3.0, -1.0], (m.n_vertices, 1))),
                                assemble_stiffness(m)) == pytest.approx(0.0, abs=1e-14)

    def test_similarity_scale(self):
        m = grid_square(3)
        s = 2.5
        assert dirichlet_energy(PLMap(m, s * m.vertices), assemble_stiffness(m)) == pytest.approx(s * s)

    def test_swap_area(self):
        m = grid_square(3)
        flipped = PLMap(m, m.vertices[:, ::-1])
        assert area_functional(flipped) == pytest.approx(1.0)

    def test_invariance(self):
        m = random_disk_mesh(np.random.default_rng(2), 25)
        W = assemble_stiffness(m)
        x = np.random.default_rng(3).normal(size=(m.n_vertices, 2))
        t = 0.7
        R = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
        e = dirichlet_energy(PLMap(m, x), W)
        assert dirichlet_energy(PLMap(m, x @ R.T + [4, -2]), W) == pytest.approx(e, rel=1e-12)
        assert dirichlet_energy(PLMap(m, 3 * x), W) == pytest.approx(9 * e, rel=1e-12)

    def test_wrong_size(self):
        m = grid_square(2)
        with pytest.raises(DimensionMismatch):
            PLMap(m, np.zeros((3, 2)))
        with pytest.raises(DimensionMismatch):
            dirichlet_energy(PLMap(m, m.vertices), assemble_stiffness(unit_square()))


class TestJacobians:
    def test_identity(self):
        m = grid_square(2)
        J, det = face_jacobians(PLMap(m, m.vertices))
        assert np.allclose(J, np.eye(2))
        assert np.allclose(det, 1)

    def test_scale(self):
        m = grid_square(2)
        J, det = face_jacobians(PLMap(m, 2 * m.vertices))
        assert np.allclose(J, 2 * np.eye(2))
        assert np.allclose(det, 4)

    def test_reflection(self):
        m = grid_square(2)
        _, det = face_jacobians(PLMap(m, m.vertices * [1, -1]))
        assert np.allclose(det, -1)


class TestDefect:
    def test_identity(self):
        m = grid_square(3)
        assert conformal_defect(PLMap(m, m.vertices)) == pytest.approx(0, abs=1e-14)

    def test_stretch(self):
        # J = diag(2, 1) on a unit-area domain: 1/2 (4 + 1) - 2 = 0.5
        m = grid_square(3)
        assert conformal_defect(PLMap(m, m.vertices * [2, 1])) == pytest.approx(0.5, abs=1e-13)


class TestNorms:
    def test_zero(self):
        m = grid_square(2)
        a = PLMap(m, m.vertices)
        W, M = assemble_stiffness(m), assemble_mass(m)
        assert h1_norm_diff(a, a, W, M) == 0
        assert sup_norm_diff(a, a) == 0

    def test_constant_shift(self):
        m = random_disk_mesh(np.random.default_rng(4), 20)
        c = np.array([0.3, -0.4])
        a, b = PLMap(m, m.vertices), PLMap(m, m.vertices + c)
        W, M = assemble_stiffness(m), assemble_mass(m)
        assert h1_norm_diff(a, b, W, M) == pytest.approx(math.sqrt(0.5 * 0.25 * m.area), rel=1e-12)
        assert sup_norm_diff(a, b) == pytest.approx(0.5, rel=1e-12)


def central_differences(mesh, x, W, step=1e-6):
    g = np.zeros_like(x)
    for k in range(x.shape[0]):
        for d in range(2):
            xp, xm = x.copy(), x.copy()
            xp[k, d] += step
            xm[k, d] -= step
            g[k, d] = (dirichlet_energy(PLMap(mesh, xp), W) - dirichlet_energy(PLMap(mesh, xm), W)) / (2 * step)
    return g


@pytest.mark.parametrize("seed", range(3))
def test_gradient_finite_differences(seed):
    rng = np.random.default_rng(100 + seed)
    m = random_disk_mesh(rng, int(rng.integers(6, 30)))
    W = assemble_stiffness(m)
    x = rng.normal(size=(m.n_vertices, 2))
    fd = central_differences(m, x, W)
    g = dirichlet_gradient(PLMap(m, x), W)
    assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(5, 40), st.booleans())
def test_ed_ge_ea(seed, n, delaunay):
    rng = np.random.default_rng(seed)
    m = random_disk_mesh(rng, n, delaunay=delaunay) if delaunay else random_disk_mesh(rng, max(n, 8), False)
    x = rng.normal(size=(m.n_vertices, 2)) * rng.uniform(0.1, 10)
    pl = PLMap(m, x)
    assert dirichlet_energy(pl, assemble_stiffness(m)) - area_functional(pl) >= -1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.1, 10), st.floats(-math.pi, math.pi), st.booleans())
def test_similarity_equality(seed, s, t, reflect):
    rng = np.random.default_rng(seed)
    m = random_regular_mesh(rng, 20)
    R = s * np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    if reflect:
        R = R @ np.diag([1.0, -1.0])
    pl = PLMap(m, m.vertices @ R.T + rng.normal(size=2))
    assert abs(conformal_defect(pl)) <= 1e-12 * max(1.0, s * s)
