"""Count free-space vertices of a square robot two ways and compare.

A random scene of sticks, slivers and small tetrahedra is generated with a
few planted triple contacts.  The brute-force oracle tries every triple of
contact surfaces; the structured counter only looks where envelope
breakpoints and lines of motion point.  Both must agree exactly.
"""
import sys
import time
from collections import Counter

from freespace import GenConfig, brute_force_triples, make_robot, random_scene, structured_triples

m = int(sys.argv[1]) if len(sys.argv) > 1 else 10
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0

robot = make_robot("square")
scene = random_scene(m, seed, GenConfig(plant_robot="square"))
print(f"scene: {scene.k} obstacles, n = {scene.n} obstacle vertices")

t0 = time.perf_counter()
slow = brute_force_triples(robot, scene)
t1 = time.perf_counter()
fast = structured_triples(robot, scene)
t2 = time.perf_counter()

print(f"brute force: {len(slow)} triples in {t1 - t0:.1f}s")
print(f"structured:  {len(fast)} triples in {t2 - t1:.1f}s")
print("same set:", {t.key for t in slow} == {t.key for t in fast})
for tag, k in sorted(Counter(t.tag for t in fast).items()):
    print(f"  {tag:10s} {k}")
if fast:
    t = fast[0]
    print("first vertex:", " ".join(s.label for s in t.specs), "at", tuple(str(c) for c in t.v))
