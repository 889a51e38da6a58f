import pytest

from fockbench.scalars import EXACT, FLOAT
from fockbench.monoid import LatticeCone, NumericalSemigroup
from fockbench.fock import ProductSystemSpec, TruncatedFock
from fockbench.ideals import ideal_lattice
from fockbench.covariance import check_fock_covariance
from fockbench.crossed import (FiniteGroup, GaugeAction, CrossedRep,
                               check_crossed_axioms, check_expectation,
                               check_core_identity, _root_of_unity)

from conftest import ball_of


def build(spec, chars, order=2, radius=6):
    ball = ball_of(spec, radius)
    fock = TruncatedFock(ProductSystemSpec.scalar_case(spec, EXACT),
                         radius, ball=ball)
    group = FiniteGroup.cyclic(order)
    action = GaugeAction(group, spec, ball, chars, EXACT)
    return CrossedRep(fock, action), ball


def test_finite_group_cyclic():
    g = FiniteGroup.cyclic(4)
    assert len(g) == 4 and g.identity == 0
    assert g.mul(3, 2) == 1 and g.inv(3) == 1


def test_roots_of_unity_exact_orders():
    i = _root_of_unity(1, 4, EXACT)
    assert i * i == EXACT.scalar(-1)
    assert _root_of_unity(1, 2, EXACT) == EXACT.scalar(-1)
    assert _root_of_unity(0, 1, EXACT) == EXACT.one
    with pytest.raises(ValueError):
        _root_of_unity(1, 3, EXACT)
    z = _root_of_unity(1, 3, FLOAT)
    assert abs(z ** 3 - 1) < 1e-9


def test_character_multiplicativity():
    spec = LatticeCone(2)
    cr, ball = build(spec, {(1, 0): 1, (0, 1): 0})
    act = cr.action
    for h in cr.group:
        for p in ball.elements[:8]:
            for q in ball.elements[:8]:
                pq = spec.mul(p, q)
                if pq in ball.index:
                    assert act.chi(h, pq) == act.chi(h, p) * act.chi(h, q)


def test_unitaries_and_covariance_n():
    spec = NumericalSemigroup([1])
    cr, ball = build(spec, {1: 1}, radius=6)
    assert check_crossed_axioms(cr, ball).passed


def test_expectation_n2():
    spec = LatticeCone(2)
    cr, ball = build(spec, {(1, 0): 1, (0, 1): 0})
    v = check_expectation(cr, ball, samples=60, seed=3)
    assert v.passed
    assert v.details["samples"] > 0


def test_core_identity_rank_doubles():
    spec = LatticeCone(2)
    cr, ball = build(spec, {(1, 0): 1, (0, 1): 0})
    letters = [spec.identity] + spec.generators
    lattice = ideal_lattice(spec, letters, 2, ball)
    v = check_core_identity(cr, spec, ball, lattice)
    assert v.passed
    for d in v.details["classes"]:
        assert d["crossed_rank"] == 2 * d["base_rank"]


def test_crossed_identity_rep_is_covariant():
    spec = NumericalSemigroup([1])

    def rep_at(T):
        return build(spec, {1: 1}, radius=T)

    v = check_fock_covariance(rep_at, spec, radius=6, step=1)
    assert v.passed


def test_order_four_action():
    spec = NumericalSemigroup([1])
    cr, ball = build(spec, {1: 1}, order=4, radius=4)
    assert check_crossed_axioms(cr, ball, sample_limit=30).passed
    assert check_expectation(cr, ball, samples=20).passed
