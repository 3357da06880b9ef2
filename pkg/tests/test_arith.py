from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chatelet.arith import (
    ExactRational, Prime, RealPlace, conic_oracle, hilbert_minus_one, is_prime, is_sum_of_two_squares,
    odd_part, odd_prime_factors, valuation, xgcd,
)

nonzero = st.integers(-10**12, 10**12).filter(bool)


@pytest.mark.parametrize("n, p, e", [(48, 2, 4), (-12, 3, 1), (7**5 * 11, 7, 5), (1, 5, 0), (-1024, 2, 10)])
def test_valuation(n, p, e):
    assert valuation(n, p) == e


def test_valuation_of_zero_is_an_error():
    with pytest.raises(ValueError):
        valuation(0, 2)


@given(nonzero, st.sampled_from([2, 3, 5, 7, 11]))
def test_valuation_divides_exactly(n, p):
    e = valuation(n, p)
    assert n % p**e == 0 and (n // p**e) % p != 0


@given(nonzero)
def test_odd_part(n):
    assert odd_part(n) % 2 and odd_part(n) * 2 ** valuation(n, 2) == n


@pytest.mark.parametrize(
    "n, place, expected",
    [
        (-1, RealPlace, -1),
        (3, RealPlace, 1),
        (3, Prime(2), -1),
        (5, Prime(2), 1),
        (-3, Prime(2), 1),
        (12, Prime(2), -1),
        (3, Prime(3), -1),
        (9, Prime(3), 1),
        (7, Prime(5), 1),
        (-7, Prime(7), -1),
        (21, Prime(7), -1),
    ],
)
def test_hilbert_symbol_values(n, place, expected):
    assert hilbert_minus_one(n, place) == expected


@given(nonzero)
def test_product_formula(n):
    prod = hilbert_minus_one(n, RealPlace) * hilbert_minus_one(n, Prime(2))
    for p in odd_prime_factors(n):
        prod *= hilbert_minus_one(n, Prime(p))
    assert prod == 1


@given(nonzero, nonzero)
def test_symbol_is_multiplicative(m, n):
    for place in (RealPlace, Prime(2), Prime(3), Prime(7)):
        assert hilbert_minus_one(m * n, place) == hilbert_minus_one(m, place) * hilbert_minus_one(n, place)


@pytest.mark.parametrize("n, p, k", [(5, 2, 6), (3, 2, 6), (2, 3, 2), (3, 3, 3), (-1, 7, 2), (-6, 2, 5)])
def test_conic_oracle_agrees(n, p, k):
    assert conic_oracle(n, p, k) == (hilbert_minus_one(n, Prime(p)) == 1)


def test_conic_oracle_needs_enough_precision():
    with pytest.raises(ValueError):
        conic_oracle(5, 2, 2)


def test_prime_place_rejects_composites():
    with pytest.raises(ValueError):
        Prime(9)
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("a, b", [(240, 46), (46, 240), (-7, 3), (0, -5)])
def test_xgcd(a, b):
    g, s, t = xgcd(a, b)
    assert g > 0 and s * a + t * b == g
    assert a % g == 0 and b % g == 0


def test_xgcd_example():
    assert xgcd(240, 46)[0] == 2


def test_exact_rationals_are_fractions():
    assert 3 * ExactRational(17856, 3) / 2**10 == Fraction(279, 16)


@given(st.integers(1, 5000))
def test_sum_of_two_squares_matches_brute_force(n):
    brute = any(int((n - x * x) ** 0.5 + 0.5) ** 2 == n - x * x for x in range(int(n**0.5) + 1))
    assert is_sum_of_two_squares(n) == brute
