"""Coefficient tuples (a, b, c, d) of the surfaces Y^2 + Z^2 = (aT^2 + b)(cT^2 + d).

A valid tuple has a > 0, abcd != 0 and ad - bc = +-1.  Each surface is
represented by exactly four such tuples: the images under
(a,b,c,d) -> (c,d,a,b) and (a,b,c,d) -> (b,a,d,c), renormalized to a > 0.

The 2-adic coordinates of a tuple with odd a are

    a = a',  b = e2 2^beta b',  c = e3 2^gamma c',  d = e4 2^delta d'

with a', b', c', d' positive and odd; a :class:`Stratum` records the signs,
the three exponents, the determinant and (a', b', c', d') mod 16.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from chatelet.arith import valuation, xgcd

SIGNATURES = ((1, 1, 1), (-1, 1, -1), (-1, -1, 1), (1, -1, -1))
UNITS_MOD_16 = (1, 3, 5, 7, 9, 11, 13, 15)


class InvalidTuple(ValueError):
    pass


@dataclass(frozen=True, order=True)
class SurfaceTuple:
    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __iter__(self):
        return iter((self.a, self.b, self.c, self.d))

    @property
    def height(self) -> int:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))


def _normalized(a: int, b: int, c: int, d: int) -> SurfaceTuple:
    if a < 0:
        a, b, c, d = -a, -b, -c, -d
    return SurfaceTuple(a, b, c, d)


def validate(a: int, b: int, c: int, d: int) -> SurfaceTuple:
    """Check the family conditions, negating all entries when a < 0."""
    if a * b * c * d == 0:
        zeros = [n for n, x in zip("abcd", (a, b, c, d)) if x == 0]
        raise InvalidTuple(f"coefficient {', '.join(zeros)} is 0")
    det = a * d - b * c
    if abs(det) != 1:
        raise InvalidTuple(f"determinant is {det}, expected +1 or -1")
    return _normalized(a, b, c, d)


def rho1(u: SurfaceTuple) -> SurfaceTuple:
    return _normalized(u.c, u.d, u.a, u.b)


def rho2(u: SurfaceTuple) -> SurfaceTuple:
    return _normalized(u.b, u.a, u.d, u.c)


def orbit(u: SurfaceTuple) -> frozenset[SurfaceTuple]:
    return frozenset({u, rho1(u), rho2(u), rho1(rho2(u))})


def sign_signature(u: SurfaceTuple) -> tuple[int, int, int]:
    return tuple(1 if x > 0 else -1 for x in (u.b, u.c, u.d))


def signature_str(eps: tuple[int, int, int]) -> str:
    return "(" + ",".join("+" if e > 0 else "-" for e in eps) + ")"


@dataclass(frozen=True, order=True)
class Stratum:
    """2-adic cell of a tuple: signs of (b, c, d), exponents, det and odd parts mod 16."""

    epsilon: tuple[int, int, int]
    beta: int
    gamma: int
    delta: int
    det_sign: int
    xi: tuple[int, int, int, int]

    @property
    def b_even(self) -> bool:
        return self.beta >= 1

    def t_congruence(self) -> bool:
        e2, e3, e4 = self.epsilon
        x1, x2, x3, x4 = self.xi
        lhs = e4 * 2**self.delta * x1 * x4 - e2 * e3 * 2 ** (self.beta + self.gamma) * x2 * x3
        return (lhs - self.det_sign) % 16 == 0

    def shape_ok(self) -> bool:
        s = self.beta + self.gamma
        return min(s, self.delta) == 0 < max(s, self.delta)

    def is_valid(self) -> bool:
        return (
            self.epsilon in SIGNATURES
            and self.det_sign in (1, -1)
            and all(x in UNITS_MOD_16 for x in self.xi)
            and self.shape_ok()
            and self.t_congruence()
        )


def odd_a_representative(u: SurfaceTuple) -> SurfaceTuple:
    """Apply rho2 when a is even; |det| = 1 forces b odd in that case."""
    return u if u.a % 2 else rho2(u)


def stratify(u: SurfaceTuple) -> Stratum:
    v = odd_a_representative(u)
    beta, gamma, delta = (valuation(x, 2) for x in (v.b, v.c, v.d))
    xi = (
        v.a % 16,
        (abs(v.b) >> beta) % 16,
        (abs(v.c) >> gamma) % 16,
        (abs(v.d) >> delta) % 16,
    )
    return Stratum(sign_signature(v), beta, gamma, delta, v.det, xi)


def build_representatives(cell: Stratum, count: int, search_bound: int = 2**16) -> list[SurfaceTuple]:
    """Distinct valid tuples whose stratum is ``cell``.

    For each coprime pair (a', b') in the prescribed classes the equation
    e4 2^delta a' d' - e2 e3 2^(beta+gamma) b' c' = det is a linear
    Diophantine equation in (d', c'); the mod-16 classes of d' and c' pin
    the solution to one progression, from which the least positive member
    is taken.
    """
    if not cell.is_valid():
        raise InvalidTuple(f"{cell} is not an admissible cell")
    e2, e3, e4 = cell.epsilon
    x1, x2, x3, x4 = cell.xi
    found: list[SurfaceTuple] = []
    for n in range(2 * search_bound):
        for i in range(n + 1):
            a1, b1 = x1 + 16 * i, x2 + 16 * (n - i)
            if a1 > search_bound or b1 > search_bound:
                continue
            A = e4 * 2**cell.delta * a1
            B = e2 * e3 * 2 ** (cell.beta + cell.gamma) * b1
            g, s, t = xgcd(A, B)
            if g != 1:
                continue
            d0, c0 = s * cell.det_sign, -t * cell.det_sign
            # d' = d0 + B k, c' = c0 + A k
            k0 = next(
                (k for k in range(16) if (d0 + B * k) % 16 == x4 and (c0 + A * k) % 16 == x3),
                None,
            )
            if k0 is None:
                raise InvalidTuple(f"no residue solution for {cell}")
            step = 1 if A > 0 else -1
            k = k0
            # both d', c' move in the direction of sign(A) = sign(B)
            while d0 + B * k <= 0 or c0 + A * k <= 0:
                k += 16 * step
            while d0 + B * (k - 16 * step) > 0 and c0 + A * (k - 16 * step) > 0:
                k -= 16 * step
            d1, c1 = d0 + B * k, c0 + A * k
            u = validate(a1, e2 * 2**cell.beta * b1, e3 * 2**cell.gamma * c1, e4 * 2**cell.delta * d1)
            found.append(u)
            if len(found) == count:
                return found
        if n > search_bound // 16:
            break
    raise LookupError(f"only {len(found)} representatives of {cell} within search bound")


def all_cells(beta: int, gamma: int, delta: int, epsilon, det_sign: int):
    """Every admissible cell with the given exponents, signs and determinant."""
    for xi in itertools.product(UNITS_MOD_16, repeat=4):
        cell = Stratum(tuple(epsilon), beta, gamma, delta, det_sign, xi)
        if cell.t_congruence():
            yield cell
