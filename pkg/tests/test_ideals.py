import random

from fockbench.ideals import (Word, member_chain, K_of_word, full_ideal,
                              principal_ideal, ideal_lattice, union_equals,
                              neutral_words, is_right_lcm_up_to)
from fockbench.monoid import LatticeCone, FreeMonoid, NumericalSemigroup

from conftest import ball_of, small_pool, random_word


def apply_word(word, ideal):
    """Fold the word's operations into an existing ideal, innermost first."""
    spec = ideal.spec
    out = ideal
    for p, q in word.normalized(spec).pairs:
        out = out.leftmul(p).preimage(q)
    return out


def test_backend_matches_chain(family):
    """The exact/ball backends agree with brute-force chain membership."""
    name, spec = family
    ball = ball_of(spec, 8)
    pool = small_pool(spec, ball)
    rng = random.Random(41)
    for _ in range(60):
        w = random_word(rng, pool, max_pairs=4)
        x = K_of_word(spec, w, ball)
        for r in ball.elements:
            assert x.member(r) == member_chain(spec, r, w), \
                (w.format(spec), spec.format(r))


def test_reduced_form_law(family):
    """mirror(w) then w applied to Z equals K(w) intersect Z on the ball."""
    name, spec = family
    ball = ball_of(spec, 8)
    pool = small_pool(spec, ball)
    rng = random.Random(42)
    for _ in range(30):
        w = random_word(rng, pool, max_pairs=3)
        z = K_of_word(spec, random_word(rng, pool, max_pairs=2), ball)
        lhs = apply_word(w.mirror(spec).concat(w, spec), z)
        rhs = K_of_word(spec, w, ball).intersect(z)
        for r in ball.elements:
            assert lhs.member(r) == rhs.member(r)


def test_intersection_word_is_neutral_concat():
    spec = LatticeCone(2)
    ball = ball_of(spec, 6)
    x = principal_ideal(spec, (2, 0), ball)
    y = principal_ideal(spec, (0, 3), ball)
    z = x.intersect(y)
    for r in ball.elements:
        assert z.member(r) == (x.member(r) and y.member(r))
    # intersections of ideals with neutral defining words stay neutral
    wa = Word((((2, 0), (2, 0)),))
    wb = Word((((0, 3), (0, 3)),))
    za = K_of_word(spec, wa, ball).intersect(K_of_word(spec, wb, ball))
    assert spec.is_identity(za.word.degree(spec))


def test_cone_ideal_never_empty():
    spec = LatticeCone(2)
    ball = ball_of(spec, 6)
    rng = random.Random(5)
    pool = small_pool(spec, ball)
    for _ in range(40):
        w = random_word(rng, pool, max_pairs=4)
        st, _ = K_of_word(spec, w, ball).emptiness()
        assert st == "nonempty"


def test_free_ideal_empty_detection():
    spec = FreeMonoid(2)
    ball = ball_of(spec, 5)
    a, b = (1,), (2,)
    # aP and bP are disjoint
    x = principal_ideal(spec, a, ball).intersect(
        principal_ideal(spec, b, ball))
    assert x.emptiness()[0] == "empty"
    w = Word(((a, b),))   # b^{-1} a P is empty
    assert K_of_word(spec, w, ball).emptiness()[0] == "empty"


def test_numerical_threshold_form():
    spec = NumericalSemigroup([2, 3])
    ball = ball_of(spec, 12)
    # 2P and 3P intersect in a non-principal ideal
    x = principal_ideal(spec, 2, ball).intersect(
        principal_ideal(spec, 3, ball))
    members = [r for r in range(0, 20) if x.member(r)]
    assert members == list(range(5, 20))


def test_union_equals_exact():
    spec = LatticeCone(2)
    ball = ball_of(spec, 6)
    x1 = principal_ideal(spec, (1, 0), ball)
    x2 = principal_ideal(spec, (0, 1), ball)
    both = x1.intersect(x2)
    full = full_ideal(spec, ball)
    same, exact = union_equals(full, [x1, x2], ball)
    assert not same and exact
    same, exact = union_equals(x1, [x1, both], ball)
    assert same and exact


def test_lattice_closed_under_intersection(family):
    name, spec = family
    radius = 12 if name == "s23" else 6
    ball = ball_of(spec, radius)
    letters = [spec.identity] + spec.generators
    lattice = ideal_lattice(spec, letters, 2, ball)
    keys = set(lattice)
    for a in lattice.values():
        for b in lattice.values():
            both = a.ideal.intersect(b.ideal)
            assert both.dedupe_key() in keys


def test_right_lcm_verdicts():
    assert is_right_lcm_up_to(LatticeCone(2), 6).status == "yes"
    assert is_right_lcm_up_to(FreeMonoid(2), 4).status == "yes"
    v = is_right_lcm_up_to(NumericalSemigroup([2, 3]), 12)
    assert v.status == "no"
    p, q, x = v.witness
    assert {p, q} == {2, 3}
    assert [r for r in range(0, 13) if x.member(r)] == list(range(2, 13))


def test_neutral_words_have_identity_degree():
    spec = LatticeCone(2)
    letters = [spec.identity] + spec.generators
    for w in neutral_words(spec, letters, 2):
        assert spec.is_identity(w.degree(spec))
