import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chatelet.arith import Prime, hilbert_minus_one, odd_prime_factors
from chatelet.local import (
    EMPTY, InvariantSet, Undecided, odd_invariant_set, odd_invariant_value, odd_place_soluble,
    real_invariant_set, two_adic_invariant_set,
)
from chatelet.surface import validate
from conftest import random_tuple


def sample_parameters(p, size=64, depth=6):
    """Rational parameters x / p^j and x * p^j with small x."""
    out = {Fraction(0)}
    for j in range(depth):
        for x in range(1, size):
            for s in (1, -1):
                out.add(Fraction(s * x, p**j))
                out.add(Fraction(s * x * p**j))
    return out


def point_invariants(u, p, params):
    """Invariants of the points found over the sampled parameters (including t = infinity)."""
    a, b, c, d = u
    place = Prime(p)
    found = set()
    for t in params:
        x, y = t.numerator, t.denominator
        g1, g2 = a * x * x + b * y * y, c * x * x + d * y * y
        if g1 and g2 and hilbert_minus_one(g1 * g2, place) == 1:
            found.add(hilbert_minus_one(g1, place))
    if hilbert_minus_one(a * c, place) == 1:
        found.add(hilbert_minus_one(a, place))
    return found


def test_invariant_set_basics():
    s = InvariantSet.of({1, -1})
    assert len(s) == 2 and 1 in s and -1 in s and str(s) == "{+1,-1}"
    assert not EMPTY and str(EMPTY) == "{}"
    assert InvariantSet.of([-1]).values == {-1}


@pytest.mark.parametrize("u, expected", [
    ((1, 1, 1, 2), {1}),
    ((1, 1, -1, -2), set()),
    ((1, -1, 2, -1), {1, -1}),
    ((1, -2, -1, 3), {1}),
    ((2, -1, -1, 1), {1}),
    ((1, -1, -2, 1), {-1}),
])
def test_real_set_closed_form(u, expected):
    assert real_invariant_set(validate(*u)).values == expected


@given(st.integers(0, 2**32))
def test_real_set_matches_sign_scan(seed):
    u = random_tuple(random.Random(seed), 300)
    a, b, c, d = u
    # scan s = t^2 >= 0 exactly; the roots of the two factors can be 1/(ac) apart
    roots = [r for r in (Fraction(-b, a), Fraction(-d, c)) if r > 0]
    grid = {Fraction(k, 4) for k in range(1024)} | {Fraction(k) ** 2 for k in range(512)} | set(roots)
    if len(roots) == 2:
        grid.add(sum(roots) / 2)
    grid |= {r * Fraction(1001, 1000) for r in roots}
    found = set()
    for s in grid:
        g1, g2 = a * s + b, c * s + d
        if g1 * g2 >= 0 and g1 != 0:
            found.add(1 if g1 > 0 else -1)
    if a * c > 0:  # t = infinity
        found.add(1)
    assert found == set(real_invariant_set(u).values)


def test_iskovskikh_two_adic():
    assert two_adic_invariant_set(validate(1, -2, -1, 3)).values == {-1}


@pytest.mark.parametrize("u", [(1, 1, 11, 12), (1, -7, 3, -20), (1, -7, 12, -85)])
def test_two_adically_insoluble(u):
    u = validate(*u)
    assert not two_adic_invariant_set(u)
    assert point_invariants(u, 2, sample_parameters(2)) == set()


@given(st.integers(0, 2**32))
def test_sampled_two_adic_points_are_covered(seed):
    u = random_tuple(random.Random(seed), 200)
    assert point_invariants(u, 2, sample_parameters(2, 24, 5)) <= set(two_adic_invariant_set(u).values)


@given(st.integers(0, 2**32))
def test_odd_invariant_is_plus_one(seed):
    u = random_tuple(random.Random(seed), 200)
    for p in odd_prime_factors(u.a * u.b * u.c * u.d):
        if p % 4 == 3 and p < 50:
            found = odd_invariant_set(u, p)
            assert found.values <= {1}
            assert bool(found) == odd_place_soluble(u, p)
            assert odd_invariant_value(u, p, verify=True) == 1


def test_depth_cap_raises_undecided():
    with pytest.raises(Undecided):
        two_adic_invariant_set(validate(1, -2, -1, 3), depth_cap=1)


def test_odd_place_needs_odd_prime():
    with pytest.raises(ValueError):
        odd_place_soluble(validate(1, 1, 1, 2), 2)
