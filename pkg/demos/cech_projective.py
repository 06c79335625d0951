"""Cech discrepancies on projective space, with and without a fermionic bundle.

Run: python3 demos/cech_projective.py
"""

from chiralgerbe.cechglue import closed_skew, cocycle_consistency, discrepancies, projective_atlas, super_discrepancies

for n in (1, 2, 3):
    data = projective_atlas(n)
    cs = discrepancies(data)
    nonzero = {k: c for k, c in cs.items() if not c.is_zero()}
    print(f"P{n}: {len(nonzero)}/{len(cs)} triples with nonzero discrepancy")
    if nonzero:
        key = min(nonzero)
        print("  c", key, "=", nonzero[key])
        print("  closed and skew:", all(closed_skew(c) for c in cs.values()))
        print("  cocycle:", cocycle_consistency(data))

# The tangent bundle cancels the bosonic obstruction; O(1) only shifts it.
for bundle in ("tangent", "O(1)", "trivial"):
    cs = super_discrepancies(projective_atlas(2, bundle))
    print(f"P2 with {bundle}: c_super(0,1,2) =", cs[(0, 1, 2)])
