"""How the Virasoro field shifts under a lifted coordinate change.

Run: python3 demos/anomaly.py
"""

from chiralgerbe.anomaly import anomaly_field, check_anomaly_formula, transform_virasoro
from chiralgerbe.coordgroup import CoordChange, LiftedAut, h_particular
from chiralgerbe.diffring import RatFnRing
from chiralgerbe.vertexengine import virasoro_field

R = RatFnRing(1)
(b,) = R.gens
for g in (CoordChange([b + b * b]), CoordChange([1 / b]), CoordChange([3 * b + 1])):
    x = LiftedAut(g, h_particular(g))
    shift = transform_virasoro(x) - virasoro_field(R)
    print("g =", g)
    print("  L~ - L =", shift)
    print("  matches -1/2 (tr log dg)'':", shift == anomaly_field(g), check_anomaly_formula(x))
