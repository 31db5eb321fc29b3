"""
Exact rational-function arithmetic and matrices over Q(z)
"""

from netident.ratfun.cycle_families import (
    CycleFamily,
    WeightedDigraph,
    cycle_family_sum,
    det_via_cycle_families,
    spanning_cycle_families,
)
from netident.ratfun.matrix import (
    RatMatrix,
    adjugate,
    cofactor,
    determinant,
    evaluate,
    kernel_basis,
    limit_at_infinity,
    mat_inverse,
    normal_rank,
    probabilistic_rank,
    sampled_rank,
)
from netident.ratfun.rational import ONE, ZERO, Z, RationalFunction, first_order, parse_rational, product

__all__ = [
    "CycleFamily",
    "ONE",
    "RatMatrix",
    "RationalFunction",
    "WeightedDigraph",
    "Z",
    "ZERO",
    "adjugate",
    "cofactor",
    "cycle_family_sum",
    "det_via_cycle_families",
    "determinant",
    "evaluate",
    "first_order",
    "kernel_basis",
    "limit_at_infinity",
    "mat_inverse",
    "normal_rank",
    "parse_rational",
    "probabilistic_rank",
    "product",
    "sampled_rank",
    "spanning_cycle_families",
]
