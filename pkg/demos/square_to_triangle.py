# Map the unit square onto the equilateral triangle, corners (0,0),(1,0),(1,1) -> triangle corners.
from pathlib import Path

import numpy as np

from riemap import equilateral_target, make_boundary_spec, refine_1to4, riemann_map, triangulate_polygon, verify
from riemap.mesh import delaunayize
from riemap.render import render_checkerboard

mesh = triangulate_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
for _ in range(5):
    mesh = delaunayize(refine_1to4(mesh))

T = equilateral_target()
cmap = riemann_map(mesh, make_boundary_spec(mesh, 0, 1, 2), T)
rep = verify(cmap)
print(f"{mesh.n_vertices} vertices")
print(f"E_D = {cmap.energy:.6f}   |T| = {T.area:.6f}   gap = {cmap.energy_gap:.2e}")
print(f"bijective {rep.bijective}, winding {rep.winding}, max principle {rep.max_principle}")

# the fourth square corner lands somewhere on the left edge of the triangle
print("image of (0,1):", np.round(cmap.evaluate((0.0, 1.0)), 6))
# and the centroid of T pulls back to
print("preimage of the centroid:", np.round(cmap.invert(T.centroid), 6))

Path("square_to_triangle.svg").write_text(render_checkerboard(mesh, cmap.images, T.corners, density=10))
