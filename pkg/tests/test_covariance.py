import random
from itertools import product as iproduct

from fockbench.scalars import EXACT
from fockbench.monoid import LatticeCone, FreeMonoid, NumericalSemigroup
from fockbench.fock import ProductSystemSpec, TruncatedFock, OpWord
from fockbench.reps import FockRep, ShiftPowerRep
from fockbench.covariance import (PASS, VIOLATION, INCONCLUSIVE,
                                  check_rep_axioms, check_T_conditions,
                                  check_nica, check_compact_alignment,
                                  wick_normal_form, check_fock_covariance,
                                  check_kernel_inclusion)

from conftest import ball_of


def make_fock(spec, radius):
    ball = ball_of(spec, radius)
    return TruncatedFock(ProductSystemSpec.scalar_case(spec, EXACT),
                         radius, ball=ball), ball


def leftreg_at(spec):
    def rep_at(T):
        fock, ball = make_fock(spec, T)
        return FockRep(fock), ball
    return rep_at


def shift_at(spec, powers, size=24):
    def rep_at(T):
        ball = ball_of(spec, T)
        return ShiftPowerRep(spec, ball, powers, size, EXACT), ball
    return rep_at


def test_left_regular_passes_everything_n2():
    spec = LatticeCone(2)
    fock, ball = make_fock(spec, 6)
    lam = FockRep(fock)
    assert check_rep_axioms(lam, spec, ball, fock).passed
    assert check_T_conditions(lam, spec, ball).passed
    assert check_nica(lam, spec, ball, fock).passed
    assert check_compact_alignment(fock, spec, ball).passed
    v = check_fock_covariance(leftreg_at(spec), spec, radius=6, step=1)
    assert v.passed


def test_collapsed_shift_fails_nica_and_covariance_n2():
    spec = LatticeCone(2)
    fock, ball = make_fock(spec, 6)
    powers = {(1, 0): 1, (0, 1): 1}
    rep = ShiftPowerRep(spec, ball, powers, 16, EXACT)
    assert check_rep_axioms(rep, spec, ball, fock).passed
    assert check_nica(rep, spec, ball, fock).status == VIOLATION
    v = check_fock_covariance(shift_at(spec, powers, 16), spec,
                              radius=6, step=1)
    assert v.status == VIOLATION


def test_collapsed_shift_fails_f2():
    spec = FreeMonoid(2)
    fock, ball = make_fock(spec, 4)
    powers = {(1,): 1, (2,): 1}
    rep = ShiftPowerRep(spec, ball, powers, 16, EXACT)
    assert check_nica(rep, spec, ball, fock).status == VIOLATION
    v = check_fock_covariance(shift_at(spec, powers, 16), spec,
                              radius=4, step=1)
    assert v.status == VIOLATION
    # the failure is an empty-core word surviving
    assert any(w["kind"] == "empty-core" for w in v.witnesses)


def test_s23_shift_T4_witness():
    spec = NumericalSemigroup([2, 3])
    ball = ball_of(spec, 12)
    rep = ShiftPowerRep(spec, ball, {2: 2, 3: 3}, 24, EXACT)
    v = check_T_conditions(rep, spec, ball)
    assert v.status == VIOLATION
    t4 = [w for w in v.witnesses if w["kind"] == "T4"]
    assert t4
    target = {"pairs": [[3, 2], [2, 3]], "eps_left": 1, "eps_right": 1}
    fam_target = sorted([[[0, 2], [2, 0]], [[0, 3], [3, 0]]])
    hits = [w for w in t4
            if w["alpha"] == target
            and sorted(f["pairs"] for f in w["family"]) == fam_target]
    assert hits and hits[0]["residual_rank"] == 2


def test_s23_left_regular_passes_T_conditions():
    spec = NumericalSemigroup([2, 3])
    fock, ball = make_fock(spec, 12)
    lam = FockRep(fock)
    assert check_T_conditions(lam, spec, ball).passed


def test_s23_shift_fails_covariance_and_kernel_inclusion():
    spec = NumericalSemigroup([2, 3])
    rep_at = shift_at(spec, {2: 2, 3: 3}, 24)
    v = check_fock_covariance(rep_at, spec, radius=12, step=2)
    assert v.status == VIOLATION
    v = check_kernel_inclusion(rep_at, leftreg_at(spec), spec,
                               radius=12, step=2)
    assert v.status == VIOLATION


def test_wick_agrees_with_evaluation():
    for spec, radius in ((LatticeCone(2), 6), (FreeMonoid(2), 5)):
        fock, ball = make_fock(spec, radius)
        lam = FockRep(fock)
        letters = [(g, s) for g in spec.generators for s in (+1, -1)]
        words = [()]
        checked = 0
        for _ in range(4):
            words = [w + (l,) for w in words for l in letters]
            for factors in words:
                nf = wick_normal_form(factors, spec)
                assert nf[0] in ("zero", "monomial")
                lhs = OpWord([(x, s, 0) for x, s in factors])
                cols = lam.interior_cols(lhs)
                if nf[0] == "zero":
                    diff = lam.eval(lhs)
                else:
                    r, s = nf[1], nf[2]
                    if r not in ball.index or s not in ball.index:
                        continue
                    rhs = OpWord([(r, +1, 0), (s, -1, 0)])
                    cols &= lam.interior_cols(rhs)
                    diff = lam.eval(lhs) - lam.eval(rhs)
                assert diff.restrict(cols=cols).is_zero()
                checked += 1
        assert checked > 200


def test_wick_specific_commutation():
    spec = LatticeCone(2)
    a, b = (1, 0), (0, 1)
    nf = wick_normal_form([(a, -1), (b, +1)], spec)
    assert nf == ("monomial", b, a)


def test_nica_matches_covariance_verdicts():
    """The two oracles agree rep by rep on right-LCM monoids."""
    cases = []
    n2 = LatticeCone(2)
    f2 = FreeMonoid(2)
    cases.append((n2, 6, None))
    cases.append((n2, 6, {(1, 0): 1, (0, 1): 1}))
    cases.append((f2, 4, None))
    cases.append((f2, 4, {(1,): 1, (2,): 1}))
    for spec, radius, powers in cases:
        fock, ball = make_fock(spec, radius)
        if powers is None:
            rep = FockRep(fock)
            rep_at = leftreg_at(spec)
        else:
            rep = ShiftPowerRep(spec, ball, powers, 16, EXACT)
            rep_at = shift_at(spec, powers, 16)
        nica = check_nica(rep, spec, ball, fock)
        cov = check_fock_covariance(rep_at, spec, radius=radius, step=1)
        assert nica.status == cov.status, (spec.name, powers)
