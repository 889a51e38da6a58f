import random

import pytest

from fockbench.monoid import (LatticeCone, FreeMonoid, NumericalSemigroup,
                              AffineMonoid, enumerate_ball,
                              ResourceCapError, spec_from_config)

from conftest import ball_of


def test_monoid_laws_random(family):
    """Associativity, identity, inverse consistency on ball triples."""
    name, spec = family
    ball = ball_of(spec, 4)
    rng = random.Random(11)
    elems = ball.elements
    e = spec.identity
    for _ in range(200):
        a, b, c = (rng.choice(elems) for _ in range(3))
        assert spec.mul(spec.mul(a, b), c) == spec.mul(a, spec.mul(b, c))
        assert spec.mul(a, e) == a and spec.mul(e, a) == a
        assert spec.mul(spec.inv(a), a) == e
        assert spec.in_monoid(a)


def test_ball_deterministic_and_graded():
    spec = LatticeCone(2)
    b1 = enumerate_ball(spec, 5)
    b2 = enumerate_ball(spec, 5)
    assert b1.elements == b2.elements
    levels = [b1.level[r] for r in b1.elements]
    assert levels == sorted(levels)
    # ball of N^2 at radius L has (L+1)(L+2)/2 points
    assert len(b1.elements) == 21


def test_ball_cap():
    with pytest.raises(ResourceCapError):
        enumerate_ball(FreeMonoid(3), 10, cap=100)


def test_free_monoid_reduced_words():
    spec = FreeMonoid(2)
    a, b = (1,), (2,)
    ab = spec.mul(a, b)
    assert ab == (1, 2)
    assert spec.mul(spec.inv(a), ab) == b
    assert not spec.in_monoid(spec.inv(a))
    assert spec.in_monoid(ab)


def test_numerical_membership_matches_bruteforce():
    for gens in ([2, 3], [3, 5], [4, 7, 9]):
        spec = NumericalSemigroup(gens)
        horizon = max(gens) * min(gens) + max(gens) + 5
        reachable = {0}
        for _ in range(horizon):
            reachable |= {r + g for r in reachable for g in gens
                          if r + g <= horizon}
        for n in range(-3, horizon + 1):
            assert spec.in_monoid(n) == (n in reachable)


def test_numerical_frobenius():
    spec = NumericalSemigroup([2, 3])
    assert spec.frobenius == 1
    assert spec.conductor == 2
    spec = NumericalSemigroup([3, 5])
    assert spec.frobenius == 7


def test_affine_law_and_membership():
    spec = AffineMonoid()
    x, y = (1, 1), (0, 2)
    # (b,a)(d,c) = (b + a d, a c)
    assert spec.mul((1, 2), (3, 5)) == (7, 10)
    assert spec.mul(x, y) == (1, 2)
    assert spec.in_monoid((0, 1)) and spec.in_monoid((5, 6))
    assert not spec.in_monoid((-1, 1))
    inv = spec.inv((1, 2))
    assert spec.mul(inv, (1, 2)) == spec.identity


def test_spec_from_config_roundtrip():
    for cfg in ({"family": "lattice_cone", "k": 2},
                {"family": "free_monoid", "n": 2},
                {"family": "numerical", "generators": [2, 3]},
                {"family": "affine"}):
        spec = spec_from_config(cfg)
        for g in spec.generators:
            assert spec.in_monoid(g)
            assert spec.payload_from_json(spec.payload_to_json(g)) == g
