"""Exact polynomial toolkit: integer polynomials, real/complex roots, Q(delta)."""

from .intpoly import (
    IntPoly,
    T,
    cyclotomic,
    euler_phi,
    gcd,
    reciprocal_twist,
    reverse,
    squarefree_part,
)
from .numfield import FieldElem, NumberContext, nf_is_zero
from .roots import (
    CyclotomicSplit,
    RootBracket,
    RootSeparationError,
    all_complex_roots,
    cyclotomic_split,
    isolate_real_roots,
    largest_real_root,
    power_sum,
    power_sums,
    sturm_count,
)

__all__ = [
    "IntPoly", "T", "cyclotomic", "euler_phi", "gcd", "reciprocal_twist", "reverse",
    "squarefree_part", "FieldElem", "NumberContext", "nf_is_zero", "CyclotomicSplit",
    "RootBracket", "RootSeparationError", "all_complex_roots", "cyclotomic_split",
    "isolate_real_roots", "largest_real_root", "power_sum", "power_sums", "sturm_count",
]
