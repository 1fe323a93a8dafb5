"""Solvers for the line-constrained Dirichlet minimization.

The constrained quadratic program is reduced through the affine embedding of
:mod:`riemap.boundary` to an SPD system ``A y = g``; that system is solved by
a sparse LDL-style factorization (SuperLU with symmetric ordering and no
pivoting, whose positive pivots certify definiteness) or by Jacobi
preconditioned conjugate gradients.  A dense KKT solve serves as an
independent oracle on small problems.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .boundary import constraint_rows
from .errors import (
    DimensionMismatch,
    IterativeNonConvergence,
    NotPositiveDefinite,
    SingularKKT,
    TooLarge,
)
from .fem import PLMap

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DIRECT_MAX_DIM = 3_000_000
ORACLE_MAX_VERTICES = 500


@dataclass(frozen=True, eq=False)
class ReducedSystem:
    """A y = g with A = P^T (W (x) I2) P and g = -P^T (W (x) I2) r."""

    A: sp.csr_matrix
    g: np.ndarray
    constraints: object
    W: sp.csr_matrix

    @property
    def dimension(self):
        return self.A.shape[0]

    def objective(self, y):
        """1/2 y^T A y - g^T y (the energy up to the constant term)."""
        y = np.asarray(y, dtype=float)
        return 0.5 * float(y @ (self.A @ y)) - float(self.g @ y)


def stacked_stiffness(W):
    """W (x) I2 acting on interleaved images [x0, y0, x1, y1, ...]."""
    return sp.kron(W, sp.identity(2), format="csr")


def build_reduced_system(W, cs):
    n = cs.spec.mesh.n_vertices
    if W.shape != (n, n):
        raise DimensionMismatch(f"stiffness is {W.shape}, mesh has {n} vertices")
    K = stacked_stiffness(W)
    P = cs.P
    A = (P.T @ K @ P).tocsr()
    A = ((A + A.T) * 0.5).tocsr()
    g = -(P.T @ (K @ cs.r))
    return ReducedSystem(A, np.asarray(g).ravel(), cs, W)


def _relres(A, y, g):
    gn = np.linalg.norm(g)
    r = np.linalg.norm(A @ y - g)
    return r / gn if gn > 0 else r


def _solve_direct(A, g, tol):
    lu = spla.splu(A.tocsc(), permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                   options={"SymmetricMode": True})
    pivots = lu.U.diagonal()
    if not np.array_equal(lu.perm_r, lu.perm_c) or np.any(pivots <= 0):
        raise NotPositiveDefinite("reduced system is not positive definite")
    y = lu.solve(g)
    for _ in range(3):
        if _relres(A, y, g) <= tol:
            break
        y = y + lu.solve(g - A @ y)
    return y


def _solve_cg(A, g, tol, maxiter):
    d = A.diagonal()
    if np.any(d <= 0):
        raise NotPositiveDefinite("nonpositive diagonal entry")
    M = sp.diags(1.0 / d)
    if maxiter is None:
        maxiter = 20 * A.shape[0] + 100
    y, info = spla.cg(A, g, rtol=tol, atol=0.0, maxiter=maxiter, M=M)
    if info != 0 or _relres(A, y, g) > tol:
        raise IterativeNonConvergence(f"CG stopped with info={info}")
    return y


def solve_spd(system, method="auto", tol=DEFAULT_TOL, maxiter=None, direct_max_dim=DIRECT_MAX_DIM):
    """Solve ``A y = g`` to relative residual ``tol``.

    ``method`` is ``"direct"``, ``"cg"`` or ``"auto"`` (direct below
    ``direct_max_dim`` unknowns, CG above).
    """
    A, g = system.A, system.g
    if A.shape[0] == 0:
        return np.zeros(0)
    if method == "auto":
        method = "direct" if A.shape[0] <= direct_max_dim else "cg"
    if method == "direct":
        y = _solve_direct(A, g, tol)
    elif method == "cg":
        y = _solve_cg(A, g, tol, maxiter)
    else:
        raise ValueError(f"unknown solver {method!r}")
    res = _relres(A, y, g)
    log.debug("solved %d unknowns with %s, relative residual %.3e", A.shape[0], method, res)
    if res > tol:
        raise IterativeNonConvergence(f"relative residual {res:.3e} above {tol:.1e}")
    return y


def solve_reduced(W, cs, method="auto", tol=DEFAULT_TOL):
    """Minimizer of the Dirichlet energy over the constraint set, as a :class:`PLMap`."""
    system = build_reduced_system(W, cs)
    y = solve_spd(system, method=method, tol=tol)
    return PLMap(cs.spec.mesh, cs.embed(y))


def dense_oracle_solve(W, cs):
    """Solve the full KKT system [[K, C^T], [C, 0]] densely (testing oracle)."""
    spec, target = cs.spec, cs.target
    n = spec.mesh.n_vertices
    if n > ORACLE_MAX_VERTICES:
        raise TooLarge(f"{n} vertices exceeds oracle limit {ORACLE_MAX_VERTICES}")
    K = np.kron(W.toarray(), np.eye(2))
    C, d, _ = constraint_rows(spec, target)
    k = len(d)
    kkt = np.zeros((2 * n + k, 2 * n + k))
    kkt[:2 * n, :2 * n] = K
    kkt[:2 * n, 2 * n:] = C.T
    kkt[2 * n:, :2 * n] = C
    rhs = np.concatenate([np.zeros(2 * n), -d])
    try:
        lu, piv = scipy.linalg.lu_factor(kkt, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularKKT(str(exc)) from exc
    u = np.abs(np.diag(lu))
    if u.min() <= 1e-13 * u.max():
        raise SingularKKT("KKT matrix is numerically singular")
    sol = scipy.linalg.lu_solve((lu, piv), rhs)
    return PLMap(spec.mesh, sol[:2 * n].reshape(n, 2))
