import random

import pytest

from fockbench.monoid import (LatticeCone, FreeMonoid, NumericalSemigroup,
                              AffineMonoid, enumerate_ball)
from fockbench.ideals import Word


FAMILY_SPECS = {
    "n": lambda: NumericalSemigroup([1]),
    "n2": lambda: LatticeCone(2),
    "f2": lambda: FreeMonoid(2),
    "s23": lambda: NumericalSemigroup([2, 3]),
    "affine": lambda: AffineMonoid(),
}


@pytest.fixture(params=sorted(FAMILY_SPECS))
def family(request):
    spec = FAMILY_SPECS[request.param]()
    return request.param, spec


def ball_of(spec, radius=8, cap=5000):
    return enumerate_ball(spec, radius, cap)


def small_pool(spec, ball, max_level=2, limit=12):
    """Short ball elements (plus the identity) for random word letters."""
    pool = [r for r in ball.elements if ball.level[r] <= max_level]
    return pool[:limit] or [spec.identity]


def random_word(rng, pool, max_pairs=4):
    n = rng.randint(1, max_pairs)
    pairs = tuple((rng.choice(pool), rng.choice(pool)) for _ in range(n))
    return Word(pairs, eps_left=rng.randint(0, 1),
                eps_right=rng.randint(0, 1))
