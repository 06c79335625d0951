"""Lifted coordinate changes: composition, the canonical lift, and its cocycle.

Run: python3 demos/group_law.py
"""

import random

from chiralgerbe.coordgroup import (
    CoordChange,
    LiftedAut,
    beta,
    check_46a,
    check_46b,
    cocycle_c,
    compose_g,
    compose_gprime,
    h_particular,
)
from chiralgerbe.diffring import RatFnRing, SeriesRing
from chiralgerbe.randinst import random_coord_change

R = RatFnRing(1)
(b,) = R.gens

# On a curve the canonical lift of the inversion b -> 1/b is a constant.
inv = CoordChange([1 / b])
print("h(1/b) =", h_particular(inv)[0, 0])

g = CoordChange([b + b * b])
x = LiftedAut(g, h_particular(g))
print("h(b + b^2) =", x.h[0, 0])
print("natural:", check_46a(x) and check_46b(x))

# Composition of lifts agrees with composition of the underlying maps.
y = compose_gprime(x, LiftedAut(inv, h_particular(inv)))
print("g part of product == compose_g:", y.g == compose_g(g, inv))

# In two variables the canonical lifts fail to compose exactly; the defect is beta.
R2 = RatFnRing(2)
b1, b2 = R2.gens
g1 = CoordChange([b1, b2 + b1 * b1])
g2 = CoordChange([b1 + b2 * b2, b2])
print("beta(g1, g2) =", beta(g1, g2))

# Random truncated series: the canonical section gives a closed skew cocycle c.
S = SeriesRing(2, 6)
rng = random.Random(1)
h1, h2 = random_coord_change(S, rng), random_coord_change(S, rng)
c = cocycle_c(h1, h2)
print("c(g1, g2) skew:", (c.mat + c.mat.T).is_zero())
