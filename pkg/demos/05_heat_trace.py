#!/usr/bin/env python3
# Heat traces: finite covers against the regular tree.
from fractions import Fraction

import numpy as np

from graphzeta.covers import homology_cover, trivial_cover
from graphzeta.graph import k4
from graphzeta.l2det import gamma_heat_trace, heat_diff_bound, tree_return_counts

table = tree_return_counts(2, 40)
print("<x|Delta^k|x> on the 3-regular tree:", table.deltas[:8])

ts = [Fraction(k, 10) for k in range(0, 11, 2)]
tree = [gamma_heat_trace(2, 4, 1, t, 40, table)[0] for t in ts]
print("tree heat trace, n=4:", np.round(tree, 6))

for name, cover in [("K4", trivial_cover(k4())), ("homology cover", homology_cover(k4(), 2))]:
    for t in (Fraction(1, 10), Fraction(1, 2), Fraction(1)):
        d = heat_diff_bound(cover, t, table=table)
        print(f"{name:15s} t={str(t):5s} |diff| + tail = {d.lhs:.3e} <= {d.rhs:.3e}  (girth {d.girth})")
