# Energy gap and H1 self-differences along a nested 1->4 ladder (square -> equilateral triangle).
from riemap import Problem, equilateral_target, run_ladder, triangulate_polygon

square = triangulate_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
report = run_ladder(Problem(square, (0, 1, 2), equilateral_target()), 6)

print(" lvl        h       V        gap     h1_diff")
for r in report.levels:
    h1 = "" if r.h1_diff is None else f"{r.h1_diff:.4e}"
    print(f"{r.level:4d} {r.h:8.4f} {r.vertices:7d} {r.energy_gap:.4e}  {h1}")
print(f"gap ~ h^{report.gap_rate:.2f}")

report.write_json("ladder.json")
report.write_csv("ladder.csv")
