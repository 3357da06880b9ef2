"""Local solubility and achievable Brauer invariants at one place.

A point of the surface over Q_v lies over a parameter value t in P^1(Q_v).
Two affine charts cover P^1:

* chart 1, t in Z_p:    m(t) = (a t^2 + b)(c t^2 + d),  invariant (-1, a t^2 + b)_v
* chart 2, s = 1/t in pZ_p:  m(s) = (b s^2 + a)(d s^2 + c),  invariant (-1, b s^2 + a)_v

t gives a point iff m(t) is a sum of two squares in Q_v, i.e. (-1, m(t))_v = +1,
or m(t) = 0.  At a zero of one factor the invariant is the symbol of the other
factor there, which equals (-1, det * lead) by the resultant identity.

The p-adic search walks balls t0 + p^k Z_p.  A ball is *decided* once the
valuation and unit class of both factors are constant on it, and is closed
by a *root certificate* once Hensel's lemma places a root of one factor in it
while the other factor is decided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from chatelet.arith import Prime, hilbert_minus_one, valuation
from chatelet.surface import SurfaceTuple, sign_signature

INF = math.inf


class Undecided(RuntimeError):
    """The ball subdivision hit its depth cap."""


class EngineFault(AssertionError):
    """An internal consistency check of the subdivision engine failed."""


@dataclass(frozen=True)
class InvariantSet:
    contains_plus: bool = False
    contains_minus: bool = False

    @classmethod
    def of(cls, values) -> InvariantSet:
        values = set(values)
        return cls(1 in values, -1 in values)

    @property
    def values(self) -> frozenset[int]:
        return frozenset(v for v, f in ((1, self.contains_plus), (-1, self.contains_minus)) if f)

    def __bool__(self) -> bool:
        return self.contains_plus or self.contains_minus

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, w: int) -> bool:
        return w in self.values

    def __str__(self) -> str:
        return "{" + ",".join(f"{v:+d}" for v in sorted(self.values, reverse=True)) + "}"


EMPTY = InvariantSet()


def real_invariant_set(u: SurfaceTuple) -> InvariantSet:
    sig = sign_signature(u)
    if sig == (1, 1, 1):
        return InvariantSet.of({1})
    if sig == (1, -1, -1):
        return EMPTY
    if sig == (-1, 1, -1):
        return InvariantSet.of({1, -1})
    return InvariantSet.of({u.det})


def _v(n: int, p: int) -> float:
    return INF if n == 0 else valuation(n, p)


# chart -> (first factor, second factor, lower bound on the valuation of the
# starting ball's centre), factors given as (lead, const) indices into (a, b, c, d)
_CHARTS = (((0, 1), (2, 3), 0), ((1, 0), (3, 2), 1))


def _explore(coeffs, det, p, depth_cap, want_all=True, track=False):
    """Run the ball subdivision; returns (set of invariants, precision needs).

    ``needs[i]`` is the p-adic precision of coefficient i that the decisions
    actually consulted: any tuple congruent to ``coeffs`` modulo
    p**needs[i] in each coordinate (with the same det) gets the same answer.
    """
    margin = 2 if p == 2 else 1
    place = Prime(p)
    needs = [0, 0, 0, 0]
    vals = [_v(x, p) for x in coeffs]
    found: set[int] = set()

    def note(i: int, r: float) -> None:
        if r > needs[i]:
            needs[i] = r

    for (i_lead, i_const), (j_lead, j_const), k_start in _CHARTS:
        factors = ((i_lead, i_const), (j_lead, j_const))
        stack = [(0, k_start)]
        while stack:
            t0, k = stack.pop()
            vt = _v(t0, p)
            info = []
            for lead, const in factors:
                A, B = coeffs[lead], coeffs[const]
                g = A * t0 * t0 + B
                val = _v(g, p)
                vA = vals[lead]
                # lower bound on v(g(t) - g(t0)) for t in the ball
                if t0 == 0:
                    w = k
                else:
                    e = vt + (1 if p == 2 else 0)
                    w = min(e, k) if e != k else k + (1 if p == 2 else 0)
                var = vA + k + w
                decided = val <= var - margin
                if t0 == 0:
                    hensel = INF
                else:
                    vgp = vA + vt + (1 if p == 2 else 0)
                    hensel = max(2 * vgp + 1, k + vgp)
                rooted = not decided and val >= hensel
                if track:
                    if decided:
                        r = val + margin
                    elif val < hensel:
                        r = val + 1
                    else:
                        r = max(hensel, var - margin + 1)
                    note(const, r)
                    if t0 != 0:
                        note(lead, r - 2 * vt)
                    note(lead, vA + 1)
                info.append((g, decided, rooted))
            (g1, dec1, root1), (g2, dec2, root2) = info
            if root1 and root2:
                raise EngineFault(f"both factors rooted in ball {t0} + {p}^{k} for {coeffs}")
            if dec1 and dec2:
                if hilbert_minus_one(g1 * g2, place) == 1:
                    found.add(hilbert_minus_one(g1, place))
            elif (root1 and dec2) or (root2 and dec1):
                other = g2 if root1 else g1
                lead, const = factors[0] if root1 else factors[1]
                olead, oconst = factors[1] if root1 else factors[0]
                resultant = coeffs[lead] * coeffs[oconst] - coeffs[const] * coeffs[olead]
                closed = hilbert_minus_one(resultant * coeffs[lead], place)
                if hilbert_minus_one(other, place) != closed:
                    raise EngineFault(f"root invariant mismatch in ball {t0} + {p}^{k} for {coeffs}")
                found.add(closed)
            else:
                if k >= depth_cap:
                    raise Undecided(f"depth cap {depth_cap} reached at p={p} for {coeffs}")
                step = p**k
                stack.extend((t0 + j * step, k + 1) for j in range(p - 1, -1, -1))
            if not want_all and found:
                return found, needs
            if len(found) == 2:
                return found, needs
    return found, needs


def default_depth_cap(u: SurfaceTuple, p: int) -> int:
    return sum(valuation(x, p) for x in u) + 32


def two_adic_search(u: SurfaceTuple, depth_cap: int | None = None, track: bool = False):
    cap = default_depth_cap(u, 2) if depth_cap is None else depth_cap
    found, needs = _explore(tuple(u), u.det, 2, cap, track=track)
    return InvariantSet.of(found), needs


def two_adic_invariant_set(u: SurfaceTuple, depth_cap: int | None = None) -> InvariantSet:
    return two_adic_search(u, depth_cap)[0]


def _explicit_point(u: SurfaceTuple, p: int) -> bool:
    """Cheap witnesses t in {0, 1, infinity} for a Q_p-point."""
    a, b, c, d = u
    place = Prime(p)
    for m in (b * d, a * c, (a + b) * (c + d)):
        if m == 0 or hilbert_minus_one(m, place) == 1:
            return True
    return False


def odd_place_soluble(u: SurfaceTuple, p: int, depth_cap: int | None = None) -> bool:
    if p == 2 or p < 2:
        raise ValueError("odd_place_soluble needs an odd prime")
    if p % 4 == 1 or _explicit_point(u, p):
        return True
    cap = default_depth_cap(u, p) if depth_cap is None else depth_cap
    found, _ = _explore(tuple(u), u.det, p, cap, want_all=False)
    return bool(found)


def odd_invariant_set(u: SurfaceTuple, p: int, depth_cap: int | None = None) -> InvariantSet:
    """All invariants achieved by Q_p-points (full search, no shortcuts)."""
    cap = default_depth_cap(u, p) if depth_cap is None else depth_cap
    found, _ = _explore(tuple(u), u.det, p, cap)
    return InvariantSet.of(found)


def odd_invariant_value(u: SurfaceTuple, p: int, verify: bool = False) -> int:
    """The invariant at an odd prime, which is always +1 on this family.

    With ``verify`` the subdivision engine confirms that no Q_p-point
    gives -1.
    """
    if verify:
        found = odd_invariant_set(u, p)
        if -1 in found:
            raise EngineFault(f"Q_{p}-point with invariant -1 on {u}")
    return 1
