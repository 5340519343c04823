"""The two lower-bound layouts.

The quadratic layout pins a square robot at 4 m^2 placements using 3m
segments.  The fig1 layout pairs each of the B(m) envelope crossings of m
horizontal segments with each of m rails, pinning a triangle robot twice
per pair.
"""
from freespace import brute_force_triples, make_robot
from freespace.cli import fit_slope
from freespace.constructions import fig1_crossings, fig1_pairings, fig1_scene, quadratic_scene

square = make_robot("square")
rows = []
for m in range(1, 6):
    count = len(brute_force_triples(square, quadratic_scene(m)))
    rows.append((m, count))
    print(f"quadratic m={m}: {count} free triple contacts (4m^2 = {4 * m * m})")
print("log-log slope:", round(fit_slope(rows).slope, 3))

triangle = make_robot("triangle")
for m in range(3, 6):
    found = brute_force_triples(triangle, fig1_scene(m))
    b = fig1_crossings(m)
    print(f"fig1 m={m}: B={b}, paired {len(fig1_pairings(found, m))} (2Bm = {2 * b * m}), "
          f"total {len(found)}")
