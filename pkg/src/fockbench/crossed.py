"""Finite-group crossed products of scalar Fock systems by character actions.

A gauge action of a finite group H on the scalar system over P is given
by characters: a scalar chi(h, p) of modulus one, multiplicative in p and
in h.  The crossed construction doubles up the truncated Fock space to
ball x H:

    pi(x)   = blockdiag_h alpha_{h^{-1}}(x)
    (U_g z)_h = z_{g^{-1} h}

and the crossed fibers are spanned by the elements pi(lambda_p) U_h.
The conditional expectation onto the base extracts the (e, e) block.

Character values are exact Gaussian rationals when every character order
divides 4; otherwise the float backend is required.
"""

from __future__ import annotations

from itertools import product as iproduct

from .fock import OpWord
from .linalg import SparseMatrix, span_of_matrices
from .reps import FockRep, MatrixRep, StepResult
from .covariance import (PASS, VIOLATION, INCONCLUSIVE, Verdict,
                         _zero_on_cols)


class FiniteGroup:
    """Small group by multiplication table over element labels."""

    def __init__(self, elements, mul, identity, name="H"):
        self.elements = list(elements)
        self._mul = mul
        self.identity = identity
        self.name = name
        self.index = {h: i for i, h in enumerate(self.elements)}
        self._inv = {}
        for h in self.elements:
            for g in self.elements:
                if mul(h, g) == identity:
                    self._inv[h] = g
        if len(self._inv) != len(self.elements):
            raise ValueError("not a group: missing inverses")

    @classmethod
    def cyclic(cls, n):
        return cls(list(range(n)), lambda a, b: (a + b) % n, 0,
                   name=f"Z/{n}")

    def mul(self, a, b):
        return self._mul(a, b)

    def inv(self, a):
        return self._inv[a]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


class GaugeAction:
    """Character action: chi(h, p), multiplicative in both arguments.

    ``gen_chars``: generator payload -> map from group element to scalar
    (or, for cyclic groups, an integer exponent k meaning
    chi(h, g) = zeta^{h k}).  Values for non-generators factor through
    the ball's canonical words.
    """

    def __init__(self, group, monoid, ball, gen_chars, backend):
        self.group = group
        self.monoid = monoid
        self.ball = ball
        self.backend = backend
        self._char = {}
        n = len(group)
        for g, data in gen_chars.items():
            if isinstance(data, int):
                if group.name != f"Z/{n}":
                    raise ValueError("exponent characters need cyclic H")
                for h in group:
                    self._char[(h, g)] = _root_of_unity(
                        (h * data) % n, n, backend)
            else:
                for h in group:
                    self._char[(h, g)] = data[h]
        self._cache = {}

    def chi(self, h, p):
        key = (h, p)
        if key in self._cache:
            return self._cache[key]
        if key in self._char:
            return self._char[key]
        if self.monoid.is_identity(p):
            v = self.backend.one
        else:
            word = self.ball.word.get(p)
            if word is None:
                raise KeyError(f"{p!r} outside the reference ball")
            v = self.backend.one
            for g in word:
                v = v * self._char[(h, g)]
        self._cache[key] = v
        return v


def _root_of_unity(k, n, backend):
    """zeta_n^k; exact when n divides 4, float otherwise."""
    k = k % n
    if n in (1, 2, 4) or (4 % n == 0):
        table = {0: (1, 0), 1: (0, 1), 2: (-1, 0), 3: (0, -1)}
        step = 4 // n
        return backend.scalar(*table[(k * step) % 4])
    if backend.name == "exact":
        raise ValueError(
            f"character order {n} is not exactly representable; "
            "use the float backend")
    import cmath
    return cmath.exp(2j * cmath.pi * k / n)


class CrossedRep(MatrixRep):
    """The identity representation of the crossed system on ball x H.

    Coefficients of a letter p enumerate (h, base fiber slot); for the
    scalar base the slot is always 0, so coefficient c picks U_{h_c}.
    """

    name = "crossed"

    def __init__(self, fock, action):
        if not fock.system.is_scalar:
            raise ValueError("crossed construction implemented for the "
                             "scalar system")
        self.fock = fock
        self.action = action
        self.group = action.group
        self.backend = fock.backend
        self.base = FockRep(fock)
        self.N = fock.total_dim
        self._dim = len(self.group) * self.N
        self._cache = {}

    @property
    def dim(self):
        return self._dim

    def coeff_count(self, payload):
        return len(self.group) * self.fock.fibers[payload].rank

    def split_coeff(self, payload, c):
        rank = self.fock.fibers[payload].rank
        return self.group.elements[c // rank], c % rank

    def _blk(self, hidx):
        return hidx * self.N

    def u_matrix(self, g):
        """Left translation unitary on the H blocks."""
        be = self.backend
        m = SparseMatrix(self._dim, self._dim, be)
        for h in self.group:
            src = self._blk(self.group.index[h])
            dst = self._blk(self.group.index[self.group.mul(g, h)])
            for i in range(self.N):
                m.set(dst + i, src + i, be.one)
        return m

    def pi_bar(self, base_mat, degree=None):
        """blockdiag_h alpha_{h^{-1}}(x) for x homogeneous of the given
        degree (None means gauge invariant)."""
        be = self.backend
        m = SparseMatrix(self._dim, self._dim, be)
        for h in self.group:
            off = self._blk(self.group.index[h])
            scale = be.one if degree is None else \
                self.action.chi(self.group.inv(h), degree)
            for (i, j), v in base_mat.data.items():
                m.set(off + i, off + j, scale * v)
        return m

    def generator_element(self, payload, c):
        """pi(lambda_p(xi)) U_h for coefficient c = (h, slot)."""
        h, slot = self.split_coeff(payload, c)
        xi = self.fock.fiber_basis(payload)[slot]
        base = self.fock.creation_matrix(payload, xi)
        return self.pi_bar(base, degree=payload) @ self.u_matrix(h)

    def factor_matrix(self, payload, sign, coeff=0):
        key = (payload, sign, coeff)
        if key not in self._cache:
            m = self.generator_element(payload, coeff)
            # base coordinates are orthonormal, so the matrix adjoint is
            # the module adjoint
            self._cache[key] = m if sign > 0 else m.adjoint()
        return self._cache[key]

    def column_state(self, col):
        return self.base.column_state(col % self.N)

    def state_cols(self, state):
        cols = []
        for hidx in range(len(self.group)):
            for c in self.base.state_cols(state):
                cols.append(self._blk(hidx) + c)
        return cols

    def step(self, state, payload, sign):
        return self.base.step(state, payload, sign)

    def conditional_expectation(self, big):
        """(e, e) block, as a base-sized matrix."""
        be = self.backend
        off = self._blk(self.group.index[self.group.identity])
        out = SparseMatrix(self.N, self.N, be)
        for (i, j), v in big.data.items():
            if off <= i < off + self.N and off <= j < off + self.N:
                out.set(i - off, j - off, v)
        return out


def check_crossed_axioms(crossed, ball, sample_limit=None):
    """Unitarity of U, the covariance relation, and fiber stability of
    the doubled system, all on interiors."""
    spec = crossed.fock.monoid
    G = crossed.group
    be = crossed.backend
    act = crossed.action
    witnesses = []

    ident = SparseMatrix.identity(crossed.dim, be)
    for g in G:
        Ug = crossed.u_matrix(g)
        if not (Ug @ Ug.adjoint()).equals(ident):
            witnesses.append({"kind": "U-unitary", "g": str(g)})
        for h in G:
            if not (Ug @ crossed.u_matrix(h)).equals(
                    crossed.u_matrix(G.mul(g, h))):
                witnesses.append({"kind": "U-homomorphism",
                                  "g": str(g), "h": str(h)})

    # covariance U_h pi(x) U_h* = pi(alpha_h(x)) on homogeneous generators
    for h in G:
        Uh = crossed.u_matrix(h)
        for p in ball.elements:
            base = crossed.fock.creation_matrix(
                p, crossed.fock.fiber_basis(p)[0])
            lhs = Uh @ crossed.pi_bar(base, degree=p) @ Uh.adjoint()
            rhs = crossed.pi_bar(base, degree=p).scale(act.chi(h, p))
            if not lhs.equals(rhs):
                witnesses.append({"kind": "covariance", "h": str(h),
                                  "p": spec.format(p)})

    # crossed fiber relations: products of spanning elements
    pairs = 0
    for p in ball.elements:
        for q in ball.elements:
            pq = spec.mul(p, q)
            if pq not in ball.index:
                continue
            pairs += 1
            if sample_limit and pairs > sample_limit:
                break
            for h in G:
                for h2 in G:
                    cp = G.index[h] * 1
                    cq = G.index[h2] * 1
                    lhs = OpWord([(p, +1, cp), (q, +1, cq)])
                    chh = G.index[G.mul(h, h2)]
                    rhs = OpWord([(pq, +1, chh)])
                    m = crossed.eval(lhs) - \
                        crossed.eval(rhs).scale(act.chi(h, q))
                    cols = crossed.interior_cols(lhs) & \
                        crossed.interior_cols(rhs)
                    if not _zero_on_cols(m, cols):
                        witnesses.append({"kind": "fiber-product",
                                          "p": spec.format(p),
                                          "q": spec.format(q)})
                    lhs2 = OpWord([(p, -1, cp), (pq, +1, chh)])
                    hinv_h2 = G.mul(G.inv(h), G.mul(h, h2))
                    rhs2 = OpWord([(q, +1, G.index[hinv_h2])])
                    m2 = crossed.eval(lhs2) - \
                        crossed.eval(rhs2).scale(act.chi(G.inv(h), q))
                    cols2 = crossed.interior_cols(lhs2) & \
                        crossed.interior_cols(rhs2)
                    if not _zero_on_cols(m2, cols2):
                        witnesses.append({"kind": "fiber-star-product",
                                          "p": spec.format(p),
                                          "q": spec.format(q)})
            if len(witnesses) >= 5:
                break
        if len(witnesses) >= 5:
            break
    return Verdict("crossed-axioms",
                   VIOLATION if witnesses else PASS,
                   {"group": G.name, "ball_radius": ball.radius},
                   witnesses)


def check_expectation(crossed, ball, samples=100, seed=7):
    """E_H: identity-component extraction is a faithful expectation.

    * E(pi(x) U_h) vanishes for h != e and returns x for h = e;
    * on seeded random elements c of the spanned algebra, E(c* c) = 0
      only when c = 0.
    """
    import random
    rng = random.Random(seed)
    G = crossed.group
    be = crossed.backend
    spec = crossed.fock.monoid
    witnesses = []
    for p in ball.elements[:6]:
        base = crossed.fock.creation_matrix(
            p, crossed.fock.fiber_basis(p)[0])
        for h in G:
            big = crossed.pi_bar(base, degree=p) @ crossed.u_matrix(h)
            eh = crossed.conditional_expectation(big)
            if h == G.identity:
                if not eh.equals(base):
                    witnesses.append({"kind": "expectation-identity",
                                      "p": spec.format(p)})
            elif not eh.is_zero():
                witnesses.append({"kind": "expectation-offdiag",
                                  "p": spec.format(p), "h": str(h)})
    # faithfulness on random samples
    pool = []
    for p in ball.elements[:8]:
        for c in range(crossed.coeff_count(p)):
            pool.append(crossed.generator_element(p, c))
    checked = 0
    for _ in range(samples):
        k = rng.randint(1, 3)
        c = None
        for _ in range(k):
            coef = be.scalar(rng.randint(-3, 3), rng.randint(-3, 3))
            term = pool[rng.randrange(len(pool))].scale(coef)
            c = term if c is None else c + term
        if c is None or c.is_zero():
            continue
        checked += 1
        val = crossed.conditional_expectation(c.adjoint() @ c)
        if val.is_zero():
            witnesses.append({"kind": "expectation-not-faithful"})
    return Verdict("expectation-faithful",
                   VIOLATION if witnesses else PASS,
                   {"samples": checked, "seed": seed}, witnesses)


def check_core_identity(crossed, spec, ball, lattice, coeff_cap=64):
    """Crossed cores against lifted base cores, class by class.

    For each nonempty ideal class x: the span of crossed evaluations of
    its neutral words (all coefficient slots) must equal
    span{pi(m) U_h : m in base core span, h in H}, with dimension
    |H| times the base core dimension.
    """
    G = crossed.group
    be = crossed.backend
    base = crossed.base
    witnesses = []
    details = []
    for key, cl in sorted(lattice.items(), key=lambda kv: str(kv[0])):
        st, _ = cl.ideal.emptiness()
        if st != "nonempty":
            continue
        words = sorted(cl.words, key=lambda w: (len(w), w.format(spec)))
        base_words = [OpWord.from_word(w, spec) for w in words]
        # common interior across both sides
        states = None
        for ow in base_words:
            ist = base.interior_states(ow)
            states = set(ist) if states is None else states & ist
        base_cols = base.cols_of_states(states or set())
        cross_cols = crossed.cols_of_states(states or set())
        base_mats = [base.eval(ow).restrict(cols=base_cols)
                     for ow in base_words]
        bspan, bsupp = span_of_matrices(base_mats, be)
        # lifted side: pi(m) U_h for span basis m (neutral => invariant)
        lifted = []
        for m in bspan.basis:
            mm = SparseMatrix(base.dim, base.dim, be,
                              {k: v for k, v in zip(bsupp, m)
                               if not be.is_null(v)})
            for h in G:
                lifted.append((crossed.pi_bar(mm) @ crossed.u_matrix(h))
                              .restrict(cols=cross_cols))
        # crossed side: every coefficient instantiation of every word
        cross_mats = []
        for ow in base_words:
            slots = [crossed.coeff_count(x) for (x, s, _) in ow.factors]
            count = 0
            for coeffs in iproduct(*[range(n) for n in slots]):
                count += 1
                if count > coeff_cap:
                    break
                cw = OpWord([(x, s, c) for (x, s, _), c
                             in zip(ow.factors, coeffs)])
                cross_mats.append(crossed.eval(cw).restrict(cols=cross_cols))
        joint = set()
        for m in lifted + cross_mats:
            joint |= m.support()
        joint = sorted(joint)
        lspan, _ = span_of_matrices(lifted, be, joint)
        cspan, _ = span_of_matrices(cross_mats, be, joint)
        ok = cspan.same_span(lspan)
        expected = len(G) * bspan.rank
        details.append({"class": str(key), "base_rank": bspan.rank,
                        "crossed_rank": cspan.rank,
                        "expected": expected, "match": ok})
        if not ok or cspan.rank != expected:
            witnesses.append({"kind": "core-identity", "class": str(key),
                              "base_rank": bspan.rank,
                              "crossed_rank": cspan.rank,
                              "expected": expected})
    return Verdict("core-identity",
                   VIOLATION if witnesses else PASS,
                   {"classes": details}, witnesses)
