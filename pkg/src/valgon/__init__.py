"""valgon: generalized polygons with non-discrete valuation.

Exact arithmetic for valued fields and quasifields, incidence-geometry
backends, valuation axiom checks, translation operators generating points
of a two-dimensional R-building, R-trees from pencils, and the ultrametric
sine-rule plane correspondence.
"""
from .scalar import (
    INF,
    QuadraticNumber,
    SQRT2,
    SQRT3,
    Rationals,
    PrimeField,
    GaloisField,
    SeriesField,
    RationalExponentSeries,
    QuasifieldSpec,
    valuation_of,
    apply_automorphism,
    norm_map,
    andre_multiply,
    check_valued_quasifield,
    parse_series,
    format_series,
)
from .weights import WeightSequence, canonical_weights, verify_weight_recurrence
from .report import CheckReport

__version__ = "0.1.0"
