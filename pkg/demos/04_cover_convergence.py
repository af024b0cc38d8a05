#!/usr/bin/env python3
# Normalized determinants over covers of K4 approach the closed form as girth grows.
from fractions import Fraction

from graphzeta.covers import compose_covers, homology_cover, homology_tower, random_cover, trivial_cover
from graphzeta.graph import cycle_graph, k4
from graphzeta.l2det import convergence_experiment, zeta_tends_to_one

g = k4()
covers = [trivial_cover(g), homology_cover(g, 2)] + [random_cover(g, d, seed=7) for d in (2, 4, 8, 16)]
report = convergence_experiment(g, covers, Fraction(1, 10))
print(report.to_csv())
print("note:", report.note)

# cycles are the clean case: Z_j(u)^(1/index) = (1 - u^(4 index))^(2/index)
c4 = cycle_graph(4)
tower = homology_tower(c4, 2, 3, 64)
seq = [trivial_cover(c4)] + [compose_covers(tower[:j]) for j in (1, 2, 3)]
for row in zeta_tends_to_one(seq, Fraction(1, 10)):
    print(f"C{4 * row.index:<3d} |Z^(1/N) - 1| = {float(row.deviation):.3e}  bound {float(row.certified_bound):.3e}")
