#!/usr/bin/env python3
# The zeta polynomial as a product over primitive closed geodesics.
from graphzeta.geodesics import enumerate_primitive, euler_product_log_series, geodesic_lines
from graphzeta.graph import k4
from graphzeta.local_system import sign_local_system, trivial_local_system
from graphzeta.poly import series_log
from graphzeta.zeta import bass_zeta

g = k4()
geos = enumerate_primitive(g, 4)
print("primitive classes of length <= 4:", len(geos))
print("the 8 triangles (both orientations):", [geo.darts for geo in geos if geo.length == 3])

ls = trivial_local_system(g)
L = 12
print("log Z from geodesics:", euler_product_log_series(ls, L).to_json())
print("equals log of determinant:", euler_product_log_series(ls, L) == series_log(bass_zeta(ls), L))

# twist by -1 on every non-tree edge: triangles pick up a sign
sign = sign_local_system(g, {1: -1, 4: -1, 5: -1})
for line in geodesic_lines(sign, 3):
    print("  ", line)
