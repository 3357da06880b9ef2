import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chatelet.surface import (
    SIGNATURES, InvalidTuple, Stratum, all_cells, build_representatives, odd_a_representative, orbit, rho1,
    rho2, sign_signature, stratify, validate,
)
from conftest import random_tuple


def test_validate_normalizes_sign():
    assert tuple(validate(-1, 2, 1, -3)) == (1, -2, -1, 3)


@pytest.mark.parametrize("u, msg", [((1, 1, 1, 1), "determinant is 0"), ((1, 0, 1, 1), "coefficient b is 0"),
                                    ((2, 1, 1, 2), "determinant is 3")])
def test_validate_rejects(u, msg):
    with pytest.raises(InvalidTuple, match=msg):
        validate(*u)


def test_iskovskikh_orbit():
    u = validate(1, -2, -1, 3)
    assert orbit(u) == {validate(1, -2, -1, 3), validate(1, -3, -1, 2), validate(2, -1, -3, 1), validate(3, -1, -2, 1)}


@given(st.integers(0, 2**32))
def test_orbit_has_four_valid_members(seed):
    u = random_tuple(random.Random(seed), 500)
    orb = orbit(u)
    assert len(orb) == 4
    for v in orb:
        assert v.a > 0 and abs(v.det) == 1 and orbit(v) == orb
    assert rho1(rho1(u)) == u and rho2(rho2(u)) == u


@given(st.integers(0, 2**32))
def test_stratum_of_random_tuple_is_admissible(seed):
    u = random_tuple(random.Random(seed), 10**4)
    cell = stratify(u)
    assert cell.is_valid()
    assert cell.epsilon in SIGNATURES
    assert odd_a_representative(u).a % 2 == 1


def test_iskovskikh_stratum():
    cell = stratify(validate(1, -2, -1, 3))
    assert (cell.epsilon, cell.beta, cell.gamma, cell.delta, cell.det_sign) == ((-1, -1, 1), 1, 0, 0, 1)
    assert cell.xi == (1, 1, 1, 3)


def test_sign_signature_covers_four_patterns():
    assert sign_signature(validate(1, 1, 1, 2)) == (1, 1, 1)
    assert sign_signature(validate(1, -2, -1, 3)) == (-1, -1, 1)


@pytest.mark.parametrize("shape", [(0, 0, 1), (1, 0, 0), (2, 3, 0), (0, 0, 6)])
def test_representatives_land_in_their_cell(shape):
    rng = random.Random(hash(shape))
    for eps in SIGNATURES:
        for det in (1, -1):
            cells = list(all_cells(*shape, eps, det))
            assert len(cells) == 512
            for cell in rng.sample(cells, 4):
                reps = build_representatives(cell, 3)
                assert len(set(reps)) == 3
                assert all(stratify(u) == cell for u in reps)


def test_inadmissible_cell_is_rejected():
    bad = Stratum((1, 1, 1), 0, 0, 1, 1, (1, 1, 1, 3))
    assert not bad.t_congruence()
    with pytest.raises(InvalidTuple):
        build_representatives(bad, 3)
    with pytest.raises(InvalidTuple):
        build_representatives(Stratum((1, 1, 1), 1, 0, 1, 1, (1, 1, 1, 1)), 1)
