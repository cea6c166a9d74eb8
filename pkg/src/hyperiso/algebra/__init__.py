from .fields import (
    Field,
    PrimeField,
    ExtensionField,
    FieldTower,
    NonResidue,
    NotASubfield,
    trace_to_base,
    norm_to_base,
    conjugates_over,
)
from .poly import Poly
from .series import PowerSeries, SeriesRing, Laurent, ZeroConstantTerm, hensel_root
from .recon import (
    PolyFraction,
    NoConvergence,
    reconstruct_fraction,
    expand_fraction,
    pade_via_xgcd,
)
from . import linalg

__all__ = [
    "Field", "PrimeField", "ExtensionField", "FieldTower",
    "NonResidue", "NotASubfield",
    "trace_to_base", "norm_to_base", "conjugates_over",
    "Poly", "PowerSeries", "SeriesRing", "Laurent", "ZeroConstantTerm",
    "hensel_root",
    "PolyFraction", "NoConvergence", "reconstruct_fraction",
    "expand_fraction", "pade_via_xgcd",
    "linalg",
]
