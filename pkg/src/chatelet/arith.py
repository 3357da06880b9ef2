"""Exact integer arithmetic and the local symbols (-1, n)_v over Q.

Exact rationals are plain :class:`fractions.Fraction` values; Python
integers never overflow, so no separate overflow checking is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

ExactRational = Fraction


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Place:
    """A place of Q: the real place or a finite prime."""

    is_real: bool = False


@dataclass(frozen=True)
class _RealPlace(Place):
    is_real = True

    def __str__(self) -> str:
        return "inf"


RealPlace = _RealPlace()


@dataclass(frozen=True)
class Prime(Place):
    p: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def __str__(self) -> str:
        return str(self.p)


def valuation(n: int, p: int) -> int:
    """Largest e with p**e dividing n."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    if p == 2:
        return (n & -n).bit_length() - 1
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def odd_part(n: int) -> int:
    if n == 0:
        raise ValueError("odd part of 0 is undefined")
    return n >> valuation(n, 2)


def hilbert_minus_one(n: int, v: Place) -> int:
    """The Hilbert symbol (-1, n)_v: +1 iff n is a sum of two squares in Q_v."""
    if n == 0:
        raise ValueError("(-1, 0) is undefined")
    if v.is_real:
        return 1 if n > 0 else -1
    p = v.p
    if p == 2:
        return 1 if odd_part(n) % 4 == 1 else -1
    if p % 4 == 1:
        return 1
    return -1 if valuation(n, p) % 2 else 1


@lru_cache(maxsize=64)
def _two_square_sums(p: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Residues mod p**k hit by x^2 + y^2 over all pairs, and over pairs not both divisible by p."""
    q = p**k
    x = np.arange(q, dtype=np.int64)
    sq = x * x % q
    all_sq = np.bincount(sq, minlength=q).astype(float)
    unit_sq = np.bincount(sq[x % p != 0], minlength=q).astype(float)

    def cyclic_hits(f: np.ndarray, g: np.ndarray) -> np.ndarray:
        n = 1 << (2 * q - 1).bit_length()
        lin = np.fft.irfft(np.fft.rfft(f, n) * np.fft.rfft(g, n), n)[: 2 * q - 1]
        folded = lin[:q].copy()
        folded[: q - 1] += lin[q:]
        return folded > 0.5

    return cyclic_hits(all_sq, all_sq), cyclic_hits(unit_sq, all_sq)


def conic_oracle(n: int, p: int, k: int) -> bool:
    """Decide whether x^2 + y^2 = n z^2 has a primitive solution mod p**k.

    Exhaustive over all residues (the sumset of squares is formed by
    convolution); only used as an independent check of :func:`hilbert_minus_one`.
    """
    if k < 1 or (p == 2 and k < 3):
        raise ValueError("need k >= 3 for p = 2 and k >= 1 otherwise")
    q = p**k
    any_pair, prim_pair = _two_square_sums(p, k)
    z = np.arange(q, dtype=np.int64)
    targets = (n % q) * (z * z % q) % q
    unit_z = z % p != 0
    return bool(any_pair[targets[unit_z]].any() or prim_pair[targets[~unit_z]].any())


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with g = gcd(a, b) > 0 and s*a + t*b = g."""
    if a == 0 and b == 0:
        raise ValueError("xgcd(0, 0) is undefined")
    r0, r1, s0, s1, t0, t1 = a, b, 1, 0, 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0 < 0:
        r0, s0, t0 = -r0, -s0, -t0
    return r0, s0, t0


def odd_prime_factors(n: int) -> list[int]:
    """Distinct odd primes dividing n, ascending (trial division)."""
    if n == 0:
        raise ValueError("0 has no finite factorization")
    n = abs(n)
    while n % 2 == 0:
        n //= 2
    out = []
    f = 3
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 2
    if n > 1:
        out.append(n)
    return out


def is_sum_of_two_squares(*factors: int) -> bool:
    """Whether the product of ``factors`` is a sum of two integer squares."""
    if any(f == 0 for f in factors):
        return True
    sign = 1
    parity: dict[int, int] = {}
    for f in factors:
        sign *= 1 if f > 0 else -1
        for p in odd_prime_factors(f):
            if p % 4 == 3:
                parity[p] = parity.get(p, 0) + valuation(f, p)
    return sign > 0 and all(e % 2 == 0 for e in parity.values())
