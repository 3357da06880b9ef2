import math
import random

import pytest
from hypothesis import settings

from chatelet.arith import xgcd
from chatelet.surface import validate

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def table():
    from chatelet.density import compute_table

    return compute_table()


def random_tuple(rng: random.Random, height: int):
    """A valid tuple with |a|, |c| <= height; b and d may be somewhat larger."""
    while True:
        a = rng.randint(1, height)
        c = rng.choice((-1, 1)) * rng.randint(1, height)
        if math.gcd(a, c) != 1:
            continue
        det = rng.choice((-1, 1))
        _, s, t = xgcd(a, c)
        k = rng.randint(-height, height)
        b, d = -det * t + k * a, det * s + k * c
        if b and d:
            return validate(a, b, c, d)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
