# Two different triangulations of the unit square, each mapped to the same triangle.
# Composing one map with the inverse of the other should approach the identity.
import numpy as np

from riemap import Problem, composition_study, equilateral_target, refine_1to4, split_dividing_edges, triangulate_polygon

T = equilateral_target()
a = split_dividing_edges(triangulate_polygon([(0, 0), (1, 0), (1, 1), (0, 1)]), (0, 1, 2), delaunay=True)
b = triangulate_polygon([(0, 0), (0.4, 0), (1, 0), (1, 0.55), (1, 1), (0, 1), (0, 0.3)])
b = split_dividing_edges(b, (0, 2, 4), delaunay=True)   # marks sit on the square corners

xs = np.linspace(0, 1, 35)[1:-1]
grid = np.array([(x, y) for y in xs for x in xs])

rep = composition_study(Problem(refine_1to4(a), (0, 1, 2), T), Problem(refine_1to4(b), (0, 2, 4), T),
                        5, samples=grid, reference=lambda p: p)
for r in rep.levels:
    print(f"level {r.level}  V={r.forward_vertices:6d}/{r.backward_vertices:6d}  sup error {r.sup_error:.4f}")
print(f"error ~ h^{rep.error_rate:.2f}")
