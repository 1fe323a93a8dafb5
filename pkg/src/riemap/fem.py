"""Piecewise-linear finite elements on a :class:`~riemap.mesh.Mesh`.

Stiffness (cotangent) and mass matrices, the Dirichlet and area functionals
of piecewise-linear maps into the plane, per-face Jacobians and discrete
norms of map differences.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch


@dataclass(frozen=True, eq=False)
class PLMap:
    """Piecewise-linear map given by one image point per mesh vertex."""

    mesh: object
    images: np.ndarray

    def __post_init__(self):
        images = np.array(self.images, dtype=float).reshape(-1, 2)
        if len(images) != self.mesh.n_vertices:
            raise DimensionMismatch(
                f"{len(images)} images for {self.mesh.n_vertices} vertices")
        if not np.all(np.isfinite(images)):
            raise ValueError("map images must be finite")
        images.flags.writeable = False
        object.__setattr__(self, "images", images)

    def __sub__(self, other):
        _same_mesh(self, other)
        return PLMap(self.mesh, self.images - other.images)


def _same_mesh(a, b):
    if a.mesh is not b.mesh and (a.mesh.n_vertices != b.mesh.n_vertices
                                 or not np.array_equal(a.mesh.faces, b.mesh.faces)):
        raise DimensionMismatch("maps live on different meshes")


def _cotangents(mesh):
    """cot of the angle at each local corner, shape (m, 3)."""
    v, f = mesh.vertices, mesh.faces
    cots = np.empty(f.shape)
    for j in range(3):
        p = v[f[:, j]]
        u = v[f[:, (j + 1) % 3]] - p
        w = v[f[:, (j + 2) % 3]] - p
        dot = np.einsum("ij,ij->i", u, w)
        cross = u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]
        cots[:, j] = dot / cross
    return cots


def assemble_stiffness(mesh):
    """Galerkin matrix W_kl = integral of <grad phi_k, grad phi_l> (cotangent formula).

    Each face adds cot(theta)/2 to the off-diagonal entry of the edge opposite
    the angle theta, with the diagonal balancing every row to zero.
    """
    f = mesh.faces
    half = 0.5 * _cotangents(mesh)
    rows, cols, vals = [], [], []
    for j in range(3):
        a, b = f[:, (j + 1) % 3], f[:, (j + 2) % 3]
        w = half[:, j]
        rows += [a, b, a, b]
        cols += [b, a, a, b]
        vals += [-w, -w, w, w]
    n = mesh.n_vertices
    W = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n, n))
    W.sum_duplicates()
    # exact symmetry regardless of summation order
    W = ((W + W.T) * 0.5).tocsr()
    return W


def assemble_mass(mesh, lumped=False):
    """Consistent P1 mass matrix (area/12 * [2 1 1; 1 2 1; 1 1 2]); lumped puts area/3 on the diagonal."""
    f = mesh.faces
    area = mesh.face_areas
    n = mesh.n_vertices
    if lumped:
        d = np.bincount(f.ravel(), weights=np.repeat(area / 3.0, 3), minlength=n)
        return sp.diags(d).tocsr()
    rows, cols, vals = [], [], []
    for i in range(3):
        for j in range(3):
            rows.append(f[:, i])
            cols.append(f[:, j])
            vals.append(area / (6.0 if i == j else 12.0))
    M = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n, n))
    M.sum_duplicates()
    return M


def _check(W, images):
    if W.shape[0] != len(images):
        raise DimensionMismatch(f"matrix of size {W.shape[0]} for {len(images)} vertices")


def dirichlet_energy(pl_map, W):
    """E_D = 1/2 sum_kl <x_k, x_l> W_kl, the exact Dirichlet energy of a PL map.

    W has zero row sums, so this equals -1/2 sum over edges W_kl |x_k - x_l|^2,
    which is the form evaluated: it is translation invariant and avoids the
    cancellation of the quadratic form when the images are far from the origin.
    """
    x = pl_map.images
    _check(W, x)
    U = sp.triu(W, k=1).tocoo()
    d = x[U.row] - x[U.col]
    return -0.5 * float(U.data @ np.einsum("ij,ij->i", d, d))


def dirichlet_gradient(pl_map, W):
    """Gradient of :func:`dirichlet_energy` w.r.t. the images, shape (n, 2): W x."""
    _check(W, pl_map.images)
    return W @ pl_map.images


def face_jacobians(pl_map):
    """Constant Jacobian of every face, (m, 2, 2), and its signed determinant."""
    v, f, x = pl_map.mesh.vertices, pl_map.mesh.faces, pl_map.images
    D = np.stack([v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]]], axis=2)
    X = np.stack([x[f[:, 1]] - x[f[:, 0]], x[f[:, 2]] - x[f[:, 0]]], axis=2)
    J = X @ np.linalg.inv(D)
    det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    return J, det


def signed_image_areas(pl_map):
    """Signed area of every face image; positive means orientation preserved."""
    x, f = pl_map.images, pl_map.mesh.faces
    a, b, c = x[f[:, 0]], x[f[:, 1]], x[f[:, 2]]
    return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                  - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def area_functional(pl_map):
    """E_A = integral of |det J| = total unsigned area of the face images."""
    return float(np.abs(signed_image_areas(pl_map)).sum())


def conformal_defect(pl_map, W=None):
    """E_D - E_A; zero exactly when every face Jacobian is a similarity."""
    if W is None:
        W = assemble_stiffness(pl_map.mesh)
    return dirichlet_energy(pl_map, W) - area_functional(pl_map)


def h1_norm_diff(a, b, W, M):
    """sqrt(1/2 (a-b)^T M (a-b) + E_D(a-b)) for two maps on the same mesh."""
    _same_mesh(a, b)
    _check(W, a.images)
    _check(M, a.images)
    d = a.images - b.images
    l2 = float(np.einsum("ij,ij->", d, M @ d))
    ed = 0.5 * float(np.einsum("ij,ij->", d, W @ d))
    return float(np.sqrt(max(0.5 * l2 + ed, 0.0)))


def sup_norm_diff(a, b):
    """Largest vertex distance between two PL maps (their sup over the domain)."""
    _same_mesh(a, b)
    return float(np.linalg.norm(a.images - b.images, axis=1).max())
