#!/usr/bin/env python3
# Four ways to the same zeta polynomial on K4, then again with a sign twist.
from graphzeta.graph import k4, petersen_graph
from graphzeta.local_system import random_sign_local_system, trivial_local_system
from graphzeta.zeta import bass_zeta, edge_zeta, laplacian_zeta, t0t1_zeta

g = k4()
ls = trivial_local_system(g)

z = bass_zeta(ls)
print("K4 Bass polynomial:", z.to_json())

# darts, half-edges of the subdivision, Laplacian: all exact, all equal
for name, fn in [("dart", edge_zeta), ("half-edge", t0t1_zeta), ("laplacian", laplacian_zeta)]:
    print(f"  {name:10s} agrees:", fn(ls) == z)

# a random +-1 character on the Petersen graph changes the polynomial but not the agreement
pet = random_sign_local_system(petersen_graph(), seed=3)
zp = bass_zeta(pet)
print("Petersen, signed: degree", zp.degree, "| dart form agrees:", edge_zeta(pet) == zp)
print("differs from untwisted:", zp != bass_zeta(trivial_local_system(petersen_graph())))
