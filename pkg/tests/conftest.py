import random

import pytest

from heiscf import HPoint
from heiscf.scalars import mp_context

from oracles import random_digit


@pytest.fixture
def rng():
    return random.Random(20240611)


def irrational_seed(rng: random.Random, precision: int = 256) -> HPoint:
    """A generic point of the unit cube built from square roots of random primes-ish integers."""
    ctx = mp_context(precision)

    def coord(lo, hi):
        a = rng.randint(2, 10 ** 6)
        while int(a ** 0.5) ** 2 == a:
            a += 1
        frac = ctx.sqrt(a) % 1
        return lo + (hi - lo) * frac

    return HPoint(coord(-0.49, 0.49), coord(-0.49, 0.49), coord(-0.49, 0.49))


def random_digits(rng: random.Random, n: int):
    return [HPoint(*random_digit(rng)) for _ in range(n)]
