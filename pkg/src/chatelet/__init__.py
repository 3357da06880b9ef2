"""Local solubility, Brauer-Manin verdicts and counts for Chatelet surfaces

    Y^2 + Z^2 = (a T^2 + b)(c T^2 + d),   |ad - bc| = 1.
"""

from chatelet.arith import ExactRational, Prime, RealPlace, hilbert_minus_one, valuation
from chatelet.brauer import Classification, Verdict, classify, ctcs_family_check
from chatelet.local import EngineFault, InvariantSet, Undecided, real_invariant_set, two_adic_invariant_set
from chatelet.surface import InvalidTuple, Stratum, SurfaceTuple, orbit, stratify, validate

__all__ = [
    "Classification", "EngineFault", "ExactRational", "InvalidTuple", "InvariantSet", "Prime",
    "RealPlace", "Stratum", "SurfaceTuple", "Undecided", "Verdict", "classify", "ctcs_family_check",
    "hilbert_minus_one", "orbit", "real_invariant_set", "stratify", "two_adic_invariant_set",
    "validate", "valuation",
]
