import json

import pytest

import oracle
from chiralgerbe.cdoaut import is_natural
from chiralgerbe.cechglue import (
    IncompatibleGluing,
    closed_skew,
    cocycle_consistency,
    discrepancies,
    discrepancy,
    lift_transitions,
    parse_atlas,
    projective_atlas,
    super_discrepancies,
    swap_relation,
)
from conftest import mat_to_sympy, sympy_equal

P1_JSON = {
    "nvars": 1,
    "charts": ["U", "V"],
    "transitions": {"U>V": ["1/b1"], "V>U": ["1/b1"]},
    "name": "P1-file",
}


def _p2_oracle():
    b1, b2 = oracle.symbols(2)
    # chart 0: (x1/x0, x2/x0); chart 1: (x0/x1, x2/x1); chart 2: (x0/x2, x1/x2)
    return oracle.discrepancy([1 / b1, b2 / b1], [b1 / b2, 1 / b2], [b1, b2])


def test_p1_lifts_are_natural_and_glue():
    data = projective_atlas(1)
    lifts = lift_transitions(data)
    assert all(is_natural(x) for x in lifts.values())
    assert lifts[(0, 1)].h[0, 0] == data.ring.const(-2)
    assert discrepancy(data, 0, 1, 0, lifts).is_zero()


def test_p2_frozen_discrepancy():
    data = projective_atlas(2)
    b1, b2 = data.ring.gens
    c = discrepancies(data)[(0, 1, 2)]
    assert c[0, 1] == 3 / (2 * b1 * b2)
    assert closed_skew(c) and not c.is_zero()
    assert sympy_equal(mat_to_sympy(c.mat), _p2_oracle())


def test_p2_swap_relation():
    data = projective_atlas(2)
    assert swap_relation(data, 0, 1, 2)
    assert swap_relation(data, 1, 0, 2)


def test_p3_cocycle():
    data = projective_atlas(3)
    cs = discrepancies(data)
    assert all(closed_skew(c) and not c.is_zero() for c in cs.values())
    b1, b2, _ = data.ring.gens
    assert cs[(0, 1, 2)][0, 1] == 2 / (b1 * b2)
    assert cocycle_consistency(data)


def test_super_discrepancies():
    tangent = projective_atlas(2, "tangent")
    assert all(c.is_zero() for c in super_discrepancies(tangent).values())
    o1 = projective_atlas(2, "O(1)")
    b1, b2 = o1.ring.gens
    c = super_discrepancies(o1)[(0, 1, 2)]
    assert c[0, 1] == 1 / (b1 * b2) and closed_skew(c)
    trivial = projective_atlas(2, "trivial")
    assert super_discrepancies(trivial) == discrepancies(trivial)


def test_parse_atlas():
    data = parse_atlas(json.dumps(P1_JSON))
    assert data.name == "P1-file" and data.charts == ("U", "V")
    assert discrepancy(data, "U", "V", "U").is_zero()


def test_incompatible_transitions():
    bad = dict(P1_JSON, transitions={"U>V": ["1/b1"], "V>U": ["2/b1"]})
    with pytest.raises(IncompatibleGluing):
        parse_atlas(json.dumps(bad))


def test_unknown_chart():
    bad = dict(P1_JSON, transitions={"U>W": ["1/b1"]})
    with pytest.raises(IncompatibleGluing):
        parse_atlas(json.dumps(bad))


def test_incompatible_bundle():
    doc = {
        "nvars": 1,
        "charts": ["U", "V", "W"],
        "transitions": {"U>V": ["1/b1"], "V>W": ["1/b1"], "U>W": ["b1"], "V>U": ["1/b1"], "W>V": ["1/b1"], "W>U": ["b1"]},
        "bundle": {"U>V": [["b1"]], "V>W": [["b1"]], "U>W": [["2"]], "V>U": [["b1"]], "W>V": [["b1"]], "W>U": [["1/2"]]},
    }
    with pytest.raises(IncompatibleGluing):
        parse_atlas(json.dumps(doc))
