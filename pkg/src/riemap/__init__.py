"""Discrete Riemann maps from triangulated polygons onto triangles.

The map is the minimizer of the piecewise-linear Dirichlet energy over maps
that send three boundary arcs onto the lines supporting the target's edges,
which costs one sparse SPD solve.
"""
from .boundary import (
    BoundarySpec,
    ConstraintSystem,
    TargetTriangle,
    build_constraints,
    dividing_edges,
    equilateral_target,
    make_boundary_spec,
    make_target,
    right_isosceles_target,
    split_dividing_edges,
)
from .conformal import (
    ComposedMap,
    DiscreteConformalMap,
    VerificationReport,
    compose,
    riemann_map,
    verify,
    winding_number,
)
from .fem import (
    PLMap,
    area_functional,
    assemble_mass,
    assemble_stiffness,
    conformal_defect,
    dirichlet_energy,
    face_jacobians,
    h1_norm_diff,
    sup_norm_diff,
)
from .mesh import (
    Mesh,
    RegularityStats,
    build_mesh,
    delaunayize,
    is_delaunay,
    koch_snowflake,
    locate_point,
    refine_1to4,
    regularity_stats,
    split_edges,
    triangulate_polygon,
)
from .solve import build_reduced_system, dense_oracle_solve, solve_spd
from .study import ConvergenceReport, Problem, composition_study, run_ladder

__version__ = "0.1.0"
