"""Brauer-Manin verdicts from the local invariant sets.

Odd primes always contribute +1, so a surface with points everywhere
locally is obstructed exactly when the real and 2-adic invariant sets are
singletons with product -1.  Brauer-Manin being the only obstruction for
Chatelet surfaces, every other locally soluble surface has a rational point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from chatelet.arith import Place, Prime, RealPlace, is_sum_of_two_squares, odd_prime_factors
from chatelet.local import InvariantSet, odd_place_soluble, real_invariant_set, two_adic_invariant_set
from chatelet.surface import SurfaceTuple, validate


class Verdict(enum.Enum):
    INSOLUBLE = "InsolubleAt"
    SOLUBLE = "SolubleNoObstruction"
    HASSE_FAILURE = "HasseFailure"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    real_set: InvariantSet
    two_adic_set: InvariantSet | None
    checked_odd_primes: tuple[int, ...] = ()
    witness: Place | None = field(default=None)

    @property
    def locally_soluble(self) -> bool:
        return self.verdict is not Verdict.INSOLUBLE

    @property
    def label(self) -> str:
        if self.verdict is Verdict.INSOLUBLE:
            return f"InsolubleAt({self.witness})"
        return self.verdict.value


def classify(u: SurfaceTuple, depth_cap: int | None = None) -> Classification:
    real = real_invariant_set(u)
    if not real:
        return Classification(Verdict.INSOLUBLE, real, None, (), RealPlace)
    two = two_adic_invariant_set(u, depth_cap)
    if not two:
        return Classification(Verdict.INSOLUBLE, real, two, (), Prime(2))
    primes = tuple(sorted({p for x in u for p in odd_prime_factors(x)}))
    for p in primes:
        if not odd_place_soluble(u, p, depth_cap):
            return Classification(Verdict.INSOLUBLE, real, two, primes, Prime(p))
    if len(real) == 1 and len(two) == 1 and real.values != two.values:
        return Classification(Verdict.HASSE_FAILURE, real, two, primes)
    return Classification(Verdict.SOLUBLE, real, two, primes)


def ctcs_family_check(k_max: int) -> dict[int, bool]:
    """Classify X_{1, 1-k, -1, k} for k = 3 mod 4 up to k_max; True means HasseFailure."""
    if k_max < 3:
        raise ValueError("k_max must be at least 3")
    return {
        k: classify(validate(1, 1 - k, -1, k)).verdict is Verdict.HASSE_FAILURE
        for k in range(3, k_max + 1, 4)
    }


def rational_point_search(u: SurfaceTuple, bound: int) -> tuple[int, int] | None:
    """Look for T = x/y with |x|, y <= bound over which the fibre has a rational point.

    y = 0 stands for the point at infinity.  A hit is an explicit certificate
    of solubility over Q; a miss proves nothing.
    """
    a, b, c, d = u
    for y in range(bound + 1):
        for x in range(-bound, bound + 1):
            if math.gcd(x, y) != 1:
                continue
            g1 = a * x * x + b * y * y
            g2 = c * x * x + d * y * y
            if is_sum_of_two_squares(g1, g2):
                return x, y
    return None
