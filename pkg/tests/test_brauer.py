import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chatelet.arith import Prime, RealPlace
from chatelet.brauer import Verdict, classify, ctcs_family_check, rational_point_search
from chatelet.surface import orbit, validate
from conftest import random_tuple


@pytest.mark.parametrize("u, label", [
    ((1, -2, -1, 3), "HasseFailure"),
    ((1, 1, 1, 2), "SolubleNoObstruction"),
    ((1, 1, -1, -2), "InsolubleAt(inf)"),
    ((1, 1, 11, 12), "InsolubleAt(2)"),
])
def test_classify_examples(u, label):
    assert classify(validate(*u)).label == label


def test_iskovskikh_sets():
    cl = classify(validate(1, -2, -1, 3))
    assert cl.real_set.values == {1} and cl.two_adic_set.values == {-1}
    assert cl.checked_odd_primes == (3,)
    assert classify(validate(1, 1, -1, -2)).witness == RealPlace
    assert classify(validate(1, 1, 11, 12)).witness == Prime(2)


def test_ctcs_family_small():
    fam = ctcs_family_check(39)
    assert sorted(fam) == list(range(3, 40, 4)) and all(fam.values())


def test_ctcs_needs_k_at_least_three():
    with pytest.raises(ValueError):
        ctcs_family_check(2)


@given(st.integers(0, 2**32))
def test_verdict_is_orbit_invariant(seed):
    u = random_tuple(random.Random(seed), 2000)
    assert len({classify(v).label for v in orbit(u)}) == 1


@given(st.integers(0, 2**32))
def test_rational_points_only_on_unobstructed_surfaces(seed):
    u = random_tuple(random.Random(seed), 60)
    if rational_point_search(u, 6) is not None:
        assert classify(u).verdict is Verdict.SOLUBLE


def test_explicit_point_on_trivial_surface():
    assert rational_point_search(validate(1, 1, 1, 2), 2) is not None
    assert rational_point_search(validate(1, -2, -1, 3), 20) is None
