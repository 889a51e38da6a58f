"""Concrete matrix representations with truncation-aware interiors.

A representation exposes factor matrices for creation/annihilation letters
and a symbolic "state" per column so that, for any operator word, the set
of columns whose evaluation is truncation-free (the interior) can be
computed exactly.  Identities are only ever asserted on interiors.

Kinds:

* FockRep        -- the truncated Fock matrices themselves (lambda)
* ShiftPowerRep  -- generators mapped to powers of the unilateral shift on
                    C^M (index states are plain naturals)
* ExplicitRep    -- explicit dense generator matrices on a genuine
                    finite-dimensional space (no truncation: every column
                    is interior)
"""

from __future__ import annotations

from .linalg import SparseMatrix
from .fock import OpWord, eval_op_word


class StepResult:
    OK = "ok"
    ZERO = "zero"   # annihilated: truncated and true agree (both zero)
    LOST = "lost"   # left the retained space: truncated value unreliable


class MatrixRep:
    """Base class; subclasses fill in the factor matrices and state logic."""

    name = "rep"

    @property
    def dim(self):
        raise NotImplementedError

    def coeff_count(self, payload):
        return 1

    def factor_matrix(self, payload, sign, coeff=0):
        raise NotImplementedError

    def column_state(self, col):
        raise NotImplementedError

    def state_cols(self, state):
        raise NotImplementedError

    def step(self, state, payload, sign):
        """(StepResult, new_state or None)."""
        raise NotImplementedError

    # shared machinery --------------------------------------------------

    def eval(self, opword):
        out = SparseMatrix.identity(self.dim, self.backend)
        for x, s, c in reversed(opword.factors):
            out = self.factor_matrix(x, s, c) @ out
        return out

    def chain_ok(self, state, factors):
        """Is evaluation from this start state truncation-free?"""
        for x, s, _ in reversed(factors):
            res, state = self.step(state, x, s)
            if res == StepResult.ZERO:
                return True
            if res == StepResult.LOST:
                return False
        return True

    def interior_states(self, opword):
        seen = {}
        for col in range(self.dim):
            st = self.column_state(col)
            if st not in seen:
                seen[st] = self.chain_ok(st, opword.factors)
        return {st for st, ok in seen.items() if ok}

    def interior_cols(self, opword):
        cols = set()
        for st in self.interior_states(opword):
            cols.update(self.state_cols(st))
        return cols

    def cols_of_states(self, states):
        cols = set()
        for st in states:
            cols.update(self.state_cols(st))
        return cols

    def eval_on_interior(self, opword):
        return self.eval(opword).restrict(cols=self.interior_cols(opword))


class FockRep(MatrixRep):
    """The truncated Fock representation itself."""

    name = "fock"

    def __init__(self, fock):
        self.fock = fock
        self.backend = fock.backend
        self.spec = fock.monoid
        self._cache = {}
        self._state_of_col = {}
        for r in fock.ball.elements:
            for j in range(fock.fibers[r].rank):
                self._state_of_col[fock.offset[r] + j] = r

    @property
    def dim(self):
        return self.fock.total_dim

    def coeff_count(self, payload):
        return self.fock.fibers[payload].rank

    def factor_matrix(self, payload, sign, coeff=0):
        key = (payload, sign, coeff)
        if key not in self._cache:
            xi = self.fock.fiber_basis(payload)[coeff]
            if sign > 0:
                m = self.fock.creation_matrix(payload, xi)
            else:
                m = self.fock.annihilation_matrix(payload, xi)
            self._cache[key] = m
        return self._cache[key]

    def column_state(self, col):
        return self._state_of_col[col]

    def state_cols(self, state):
        off = self.fock.offset[state]
        return range(off, off + self.fock.fibers[state].rank)

    def step(self, state, payload, sign):
        spec = self.spec
        if sign > 0:
            nxt = spec.mul(payload, state)
            if nxt in self.fock.ball.index:
                return StepResult.OK, nxt
            return StepResult.LOST, None
        nxt = spec.mul(spec.inv(payload), state)
        if not spec.in_monoid(nxt):
            return StepResult.ZERO, None
        if nxt in self.fock.ball.index:
            return StepResult.OK, nxt
        return StepResult.LOST, None


class ShiftPowerRep(MatrixRep):
    """g -> S^{power(g)} on C^M with S the unilateral shift.

    ``powers`` maps generator payloads to nonnegative ints; arbitrary
    ball elements factor through the ball's canonical generator words.
    Whether this extension is a homomorphism is the axiom checker's
    problem, not an assumption made here.
    """

    name = "shift-power"

    def __init__(self, spec, ball, powers, size, backend):
        self.spec = spec
        self.ball = ball
        self.powers = dict(powers)
        self.size = size
        self.backend = backend
        self._cache = {}

    @property
    def dim(self):
        return self.size

    def power(self, payload):
        if payload in self.powers:
            return self.powers[payload]
        word = self.ball.word.get(payload)
        if word is None:
            raise KeyError(f"{payload!r} outside the reference ball")
        k = sum(self.powers[g] for g in word)
        self.powers[payload] = k
        return k

    def factor_matrix(self, payload, sign, coeff=0):
        k = self.power(payload)
        key = (k, sign)
        if key not in self._cache:
            be = self.backend
            m = SparseMatrix(self.size, self.size, be)
            for j in range(self.size):
                i = j + k if sign > 0 else j - k
                if 0 <= i < self.size:
                    m.set(i, j, be.one)
            self._cache[key] = m
        return self._cache[key]

    def column_state(self, col):
        return col

    def state_cols(self, state):
        return (state,)

    def step(self, state, payload, sign):
        k = self.power(payload)
        if sign > 0:
            nxt = state + k
            if nxt < self.size:
                return StepResult.OK, nxt
            return StepResult.LOST, None
        nxt = state - k
        if nxt < 0:
            return StepResult.ZERO, None
        return StepResult.OK, nxt


class ExplicitRep(MatrixRep):
    """Dense generator matrices on a genuine (untruncated) space."""

    name = "explicit"

    def __init__(self, spec, ball, gen_matrices, backend):
        self.spec = spec
        self.ball = ball
        self.backend = backend
        self._gen = {g: (m if isinstance(m, SparseMatrix)
                         else SparseMatrix.from_dense(m, backend))
                     for g, m in gen_matrices.items()}
        sizes = {m.nrows for m in self._gen.values()}
        if len(sizes) != 1:
            raise ValueError("generator matrices must share a size")
        self._dim = sizes.pop()
        self._cache = {}

    @property
    def dim(self):
        return self._dim

    def matrix_of(self, payload):
        if payload in self._cache:
            return self._cache[payload]
        if payload in self._gen:
            m = self._gen[payload]
        else:
            word = self.ball.word.get(payload)
            if word is None:
                raise KeyError(f"{payload!r} outside the reference ball")
            m = SparseMatrix.identity(self._dim, self.backend)
            for g in word:
                m = m @ self._gen[g]
        self._cache[payload] = m
        return m

    def factor_matrix(self, payload, sign, coeff=0):
        m = self.matrix_of(payload)
        return m if sign > 0 else m.adjoint()

    def column_state(self, col):
        return 0

    def state_cols(self, state):
        return range(self._dim)

    def step(self, state, payload, sign):
        return StepResult.OK, 0
