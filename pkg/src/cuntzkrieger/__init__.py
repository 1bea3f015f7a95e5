"""Exact computation in Cuntz-Krieger algebras O_A.

Submodules:

- matrix_graph: 0-1 matrices, admissible words, aperiodicity, finite graphs
- ck_algebra: symbolic elements, canonical forms, exact core norms
- quasifree: quasi-free endomorphisms, unitaries in B cap {q}', finite group actions
- shift_dilation: the shift phi, corner formulas, fullness, dilation
- cocycle_rokhlin: cocycle chains, Rokhlin averaging models, witness search
- ktheory: Smith normal form and K_0, K_1
- numeric_oracle: truncated path-space representation for cross-checks
"""

from .ck_algebra import CKElement, core_norm, equals, p, q, s, s_star, unit, word, zero
from .cyclotomic import RootScalar
from .errors import CKError
from .literals import format_element, parse_element, parse_matrix
from .matrix_graph import ZeroOneMatrix, admissible_words, is_aperiodic, validate

__version__ = "0.1.0"

__all__ = [
    "CKElement",
    "CKError",
    "RootScalar",
    "ZeroOneMatrix",
    "admissible_words",
    "core_norm",
    "equals",
    "format_element",
    "is_aperiodic",
    "p",
    "parse_element",
    "parse_matrix",
    "q",
    "s",
    "s_star",
    "unit",
    "validate",
    "word",
    "zero",
]
