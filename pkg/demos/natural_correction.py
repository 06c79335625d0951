"""Three coordinates: the canonical lift can miss the first-order condition.

For N = 3 the particular solution of the double-pole equation need not solve
the first-order one. A skew correction k, found by linear algebra over a
rational ansatz, repairs it.

Run: python3 demos/natural_correction.py
"""

from chiralgerbe.coordgroup import (
    CoordChange,
    LiftedAut,
    check_46a,
    check_46b,
    from_tilde,
    h_particular,
    natural_correction,
    section_s,
)
from chiralgerbe.diffring import RatFnRing

R = RatFnRing(3)
b1, b2, b3 = R.gens
g = CoordChange([b1 + b2 * b2, b2 + b3 * b3, b3 + b1 * b1])
x = LiftedAut(g, h_particular(g))
print("canonical lift: double pole", check_46a(x), " first order", check_46b(x))

den = g.jacobian.det()
print("det dg =", den)
k = natural_correction(g, degree=1, den=den)
if k is None:
    print("no correction inside the ansatz")
else:
    print("k =", k)
    # k lives in tilde coordinates, on top of the canonical section
    y = from_tilde(g, section_s(g) + k)
    print("corrected lift: double pole", check_46a(y), " first order", check_46b(y))
