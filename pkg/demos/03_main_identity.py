#!/usr/bin/env python3
# Z(u) times the L2-determinant of the tree equals det(Delta + lambda_u), exactly.
from fractions import Fraction

from graphzeta import fields
from graphzeta.graph import complete_bipartite_graph, k4
from graphzeta.l2det import l2det_closed, lambda_of_u
from graphzeta.local_system import trivial_local_system, twisted_laplacian
from graphzeta.zeta import bass_zeta, verify_main_theorem

for name, g in [("K4", k4()), ("K33", complete_bipartite_graph(3, 3))]:
    report = verify_main_theorem(trivial_local_system(g))
    print(name, "polynomial identity holds:", report.passed, report.checks)

# the same thing at a single rational point, no polynomials involved
ls = trivial_local_system(k4())
u = Fraction(1, 4)
lam = lambda_of_u(2, u)
lhs = fields.det(twisted_laplacian(ls).matrix + fields.identity(4, fields.RATIONAL) * lam)
rhs = bass_zeta(ls)(u) * l2det_closed(2, 4, 1, u)
print(f"u = {u}, lambda = {lam}: det = {lhs}, Z * det_Gamma = {rhs}")
