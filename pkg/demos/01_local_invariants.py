"""Where the Brauer-Manin obstruction comes from, one place at a time.

Take Iskovskikh's surface Y^2 + Z^2 = (t^2 - 2)(3 - t^2).  Every point
carries a local invariant (-1, t^2 - 2)_v at each place v.  We print the
achievable invariants at each place and read off the verdict.
"""

from chatelet.arith import Prime, RealPlace, hilbert_minus_one
from chatelet.brauer import classify, ctcs_family_check, rational_point_search
from chatelet.local import odd_invariant_set, real_invariant_set, two_adic_invariant_set
from chatelet.surface import orbit, stratify, validate

u = validate(1, -2, -1, 3)
print("surface", tuple(u), "det", u.det)
print("orbit  ", sorted(tuple(v) for v in orbit(u)))
print("stratum", stratify(u))

# The real points sit over 2 <= t^2 <= 3, where t^2 - 2 >= 0.
print("\nreal invariants    ", real_invariant_set(u))
# Over Q_2 only the value -1 occurs.
print("2-adic invariants  ", two_adic_invariant_set(u))
# 3 divides the coefficients, but the invariant there is always +1.
print("3-adic invariants  ", odd_invariant_set(u, 3))

cl = classify(u)
print("\nverdict:", cl.label)
print("no rational point with small height:", rational_point_search(u, 30) is None)

# The symbol itself, at a few places.
for n in (-1, 2, 3, 6, 21):
    row = [hilbert_minus_one(n, v) for v in (RealPlace, Prime(2), Prime(3), Prime(7))]
    print(f"(-1, {n:>3})  inf, 2, 3, 7 ->", row)

# A whole family with the same behaviour.
fam = ctcs_family_check(99)
print(f"\n(1, 1-k, -1, k), k = 3 mod 4 up to 99: {sum(fam.values())}/{len(fam)} fail the Hasse principle")

# Compare a soluble neighbour.
v = validate(1, 1, 1, 2)
print("\n", tuple(v), classify(v).label, "point at T = x/y:", rational_point_search(v, 3))
