"""Exact symbolic checks for chiral differential operators and their gluing."""

from .coordgroup import CoordChange, LiftedAut, compose_g, compose_gprime, h_particular
from .diffring import RatFnRing, RingError, SeriesRing
from .ringmat import RingMatrix, TensorForm
from .superext import SuperAut
from .vertexengine import FieldExpr, StateVec, nth_product, ope

__all__ = [
    "CoordChange",
    "FieldExpr",
    "LiftedAut",
    "RatFnRing",
    "RingError",
    "RingMatrix",
    "SeriesRing",
    "StateVec",
    "SuperAut",
    "TensorForm",
    "compose_g",
    "compose_gprime",
    "h_particular",
    "nth_product",
    "ope",
]
