"""Truncated Fock matrices for product systems over submonoids.

A product system assigns to each monoid element r a linear space X_r of
D x D matrices, with X_p X_q inside X_{pq} and X_p^* X_{pq} inside X_q.
The scalar case ("X_P": D = 1, every fiber the scalars) recovers the
left-regular picture on l2 of the ball.

The truncated Fock space is the direct sum of the fibers over a ball; its
standard coordinates are, per ball element r, a chosen independent basis
of X_r (built along factorisations of r).  Creation by xi in X_p sends
the X_r block to the X_{pr} block via left multiplication; annihilation
sends X_r to X_{p^{-1} r} via left multiplication by xi^*.  With the
Hilbert-Schmidt pairing on matrix fibers the annihilation blocks are
the true adjoints of the creation blocks, so both are always built from
the multiplication formula, never by transposing coordinates.

Truncation bookkeeping is per word and per column: a column r of an
operator word is "interior" when the chain of partial positions never
leaves the ball while staying in the monoid.  Identities are asserted on
interior columns only; everything outside is reported, never asserted.
"""

from __future__ import annotations

from .linalg import SparseMatrix, Span, span_of_matrices
from .monoid import enumerate_ball
from .scalars import EXACT
from .ideals import Word, member_chain


class FiberStabilityError(RuntimeError):
    """A product left its prescribed fiber; the axioms do not hold."""


class ProductSystemSpec:
    """Fiber data over a monoid: coefficient algebra + generator fibers.

    ``coeff_gens``: list of D x D matrices spanning the coefficient
    algebra A = X_e.  ``fiber_gens``: generator payload -> list of D x D
    matrices spanning that generator fiber.  Matrices are nested lists of
    backend scalars.
    """

    def __init__(self, monoid, dim, coeff_gens, fiber_gens, backend=EXACT,
                 name="X_P"):
        self.monoid = monoid
        self.dim = dim
        self.coeff_gens = coeff_gens
        self.fiber_gens = fiber_gens
        self.backend = backend
        self.name = name

    @classmethod
    def scalar_case(cls, monoid, backend=EXACT):
        one = [[backend.one]]
        fibers = {g: [one] for g in monoid.generators}
        return cls(monoid, 1, [one], fibers, backend, name="X_P")

    @property
    def is_scalar(self):
        return self.dim == 1 and len(self.coeff_gens) == 1


def _mat_mul(a, b, backend):
    d = len(a)
    z = backend.zero
    out = [[z] * len(b[0]) for _ in range(d)]
    for i in range(d):
        for k in range(len(b)):
            if backend.is_null(a[i][k]):
                continue
            aik = a[i][k]
            for j in range(len(b[0])):
                out[i][j] = out[i][j] + aik * b[k][j]
    return out


def _mat_adj(a, backend):
    return [[backend.conj(a[i][j]) for i in range(len(a))]
            for j in range(len(a[0]))]


def _vec(a):
    return [x for row in a for x in row]


class Fiber:
    """Chosen independent basis of one fiber, with coordinate solving."""

    def __init__(self, dim, backend):
        self.backend = backend
        self.matdim = dim
        self.span = Span(dim * dim, backend)
        self.basis = []  # matrices, in insertion order of independents

    def add(self, mat):
        if self.span.add(_vec(mat)):
            self.basis.append(mat)
            return True
        return False

    def coords(self, mat):
        return self.span.coords(_vec(mat))

    def contains(self, mat):
        return self.span.contains(_vec(mat))

    @property
    def rank(self):
        return self.span.rank


class TruncatedFock:
    """Fibers over a ball plus flat coordinates and block offsets."""

    def __init__(self, system, radius, cap=5000, ball=None):
        self.system = system
        self.monoid = system.monoid
        self.backend = system.backend
        self.ball = ball or enumerate_ball(self.monoid, radius, cap)
        self.radius = self.ball.radius
        self._build_fibers()

    def _build_fibers(self):
        be = self.backend
        spec = self.monoid
        sysm = self.system
        self.fibers = {}
        e = spec.identity
        f0 = Fiber(sysm.dim, be)
        for a in sysm.coeff_gens:
            f0.add(a)
        self.fibers[e] = f0
        for r in self.ball.elements:
            if not spec.is_identity(r):
                self.fibers[r] = Fiber(sysm.dim, be)
        gen_items = sorted(sysm.fiber_gens.items(),
                           key=lambda kv: spec.key(kv[0]))
        # grow fibers along all factorisations until stable (factorisations
        # need not follow the ball grading in every family)
        changed = True
        while changed:
            changed = False
            for r in self.ball.elements:
                if spec.is_identity(r):
                    continue
                fib = self.fibers[r]
                for g, gen_mats in gen_items:
                    s = spec.mul(spec.inv(g), r)
                    if not spec.in_monoid(s) or s not in self.ball.index:
                        continue
                    for xi in gen_mats:
                        for eta in self.fibers[s].basis:
                            if fib.add(_mat_mul(xi, eta, be)):
                                changed = True
        # flat coordinates: blocks in ball order
        self.offset = {}
        off = 0
        for r in self.ball.elements:
            self.offset[r] = off
            off += self.fibers[r].rank
        self.total_dim = off

    def fiber_basis(self, r):
        return self.fibers[r].basis

    def creation_block(self, p, xi, r):
        """Coordinates of xi . (basis of X_r) inside X_{pr}; None if the
        target leaves the ball or a product leaves the target fiber."""
        spec = self.monoid
        pr = spec.mul(p, r)
        if pr not in self.ball.index:
            return None
        out = []
        for eta in self.fibers[r].basis:
            prod = _mat_mul(xi, eta, self.backend)
            c = self.fibers[pr].coords(prod)
            if c is None:
                return None
            out.append(c)
        return pr, out  # out[j][i]: coefficient of target basis i for source j

    def creation_matrix(self, p, xi):
        """Creation operator by xi in X_p on the truncated Fock space."""
        be = self.backend
        m = SparseMatrix(self.total_dim, self.total_dim, be)
        for r in self.ball.elements:
            blk = self.creation_block(p, xi, r)
            if blk is None:
                continue
            pr, coords = blk
            for j, col in enumerate(coords):
                for i, c in enumerate(col):
                    if not be.is_null(c):
                        m.set(self.offset[pr] + i, self.offset[r] + j, c)
        return m

    def annihilation_matrix(self, p, xi):
        """Annihilation by xi in X_p: left multiplication by xi^* from
        X_r to X_{p^{-1} r}.  This is the Hilbert-Schmidt adjoint of the
        creation operator on the retained blocks."""
        be = self.backend
        spec = self.monoid
        xistar = _mat_adj(xi, be)
        m = SparseMatrix(self.total_dim, self.total_dim, be)
        for r in self.ball.elements:
            s = spec.mul(spec.inv(p), r)
            if not spec.in_monoid(s) or s not in self.ball.index:
                continue
            for j, eta in enumerate(self.fibers[r].basis):
                prod = _mat_mul(xistar, eta, be)
                c = self.fibers[s].coords(prod)
                if c is None:
                    raise FiberStabilityError(
                        f"xi* eta leaves the fiber at {spec.format(s)}; "
                        "the system fails the star-product axiom")
                for i, cc in enumerate(c):
                    if not be.is_null(cc):
                        m.set(self.offset[s] + i, self.offset[r] + j, cc)
        return m

    def projection(self, ideal):
        """Diagonal 0/1 projection onto the blocks of ball members of an
        ideal (scalar systems: this is the span projection of the ideal)."""
        be = self.backend
        m = SparseMatrix(self.total_dim, self.total_dim, be)
        for r in self.ball.elements:
            if ideal.member(r):
                for i in range(self.fibers[r].rank):
                    m.set(self.offset[r] + i, self.offset[r] + i, be.one)
        return m

    def identity_matrix(self):
        return SparseMatrix.identity(self.total_dim, self.backend)

    def block_of_index(self, i):
        """Ball element whose block contains flat index i."""
        for r in reversed(self.ball.elements):
            if self.offset[r] <= i:
                return r
        raise IndexError(i)


def check_product_system_axioms(fock, report_limit=5):
    """Certify fiber stability over the ball: A-closure, products, stars.

    Returns (ok, failures).  Checks, over ball-composable pairs:
      * X_e closed under products and adjoints,
      * X_p X_q inside X_{pq},
      * X_p^* X_{pq} inside X_q.
    """
    be = fock.backend
    spec = fock.monoid
    failures = []

    def note(kind, **data):
        if len(failures) < report_limit:
            failures.append({"kind": kind, **data})

    e = spec.identity
    A = fock.fibers[e]
    for a in A.basis:
        if not A.contains(_mat_adj(a, be)):
            note("coefficient-adjoint")
        for b in A.basis:
            if not A.contains(_mat_mul(a, b, be)):
                note("coefficient-product")
    for p in fock.ball.elements:
        for q in fock.ball.elements:
            pq = spec.mul(p, q)
            if pq not in fock.ball.index:
                continue
            for xi in fock.fibers[p].basis:
                for eta in fock.fibers[q].basis:
                    if not fock.fibers[pq].contains(_mat_mul(xi, eta, be)):
                        note("product-fiber", p=spec.format(p),
                             q=spec.format(q))
            for zeta in fock.fibers[pq].basis:
                for xi in fock.fibers[p].basis:
                    prod = _mat_mul(_mat_adj(xi, be), zeta, be)
                    if not fock.fibers[q].contains(prod):
                        note("star-product-fiber", p=spec.format(p),
                             q=spec.format(q))
    return not failures, failures


# ---------------------------------------------------------------------------
# operator words over a fock space


class OpWord:
    """Concrete operator word: factors (payload, sign, coeff_index).

    sign +1 means creation by the coeff_index-th basis element of the
    letter's fiber; sign -1 the corresponding annihilation.  Words coming
    from the abstract ideal calculus (scalar systems) use coeff 0.
    """

    def __init__(self, factors):
        self.factors = tuple(factors)

    @classmethod
    def from_word(cls, word, spec, coeffs=None):
        fs = word.factors(spec)
        if coeffs is None:
            coeffs = [0] * len(fs)
        return cls([(x, s, c) for (x, s), c in zip(fs, coeffs)])

    def adjoint(self):
        return OpWord([(x, -s, c) for (x, s, c) in reversed(self.factors)])

    def append_creation(self, payload, coeff=0):
        return OpWord(self.factors + ((payload, +1, coeff),))

    def degree(self, spec):
        d = spec.identity
        for x, s, _ in self.factors:
            d = spec.mul(d, x if s > 0 else spec.inv(x))
        return d

    def chain(self, spec, r):
        """Partial positions when applied to block r (rightmost first).

        Yields each successive position; stops with None (annihilated).
        """
        g = r
        yield g
        for x, s, _ in reversed(self.factors):
            g = spec.mul(x, g) if s > 0 else spec.mul(spec.inv(x), g)
            if not spec.in_monoid(g):
                yield None
                return
            yield g

    def lands_on(self, spec, r):
        """Final position on block r, or None if annihilated."""
        last = None
        for g in self.chain(spec, r):
            last = g
        return last

    def interior_blocks(self, fock):
        """Ball elements r whose column evaluation is truncation-free."""
        spec = fock.monoid
        out = []
        for r in fock.ball.elements:
            ok = True
            for g in self.chain(spec, r):
                if g is None:
                    break
                if g not in fock.ball.index:
                    ok = False
                    break
            if ok:
                out.append(r)
        return out

    def skeleton_word(self, spec):
        """The abstract alternating Word with the same factor pattern.

        Identity letters are inserted wherever the alternation is broken;
        they do not change the membership chain.
        """
        e = spec.identity
        pairs = []
        fs = self.factors
        i = 0
        while i < len(fs):
            x, s, _ = fs[i]
            if s < 0:
                if i + 1 < len(fs) and fs[i + 1][1] > 0:
                    pairs.append((x, fs[i + 1][0]))
                    i += 2
                else:
                    pairs.append((x, e))
                    i += 1
            else:
                pairs.append((e, x))
                i += 1
        return Word(tuple(pairs))

    def to_json(self, spec):
        return [[spec.payload_to_json(x), s, c] for (x, s, c) in self.factors]

    @classmethod
    def from_json(cls, data, spec):
        return cls([(spec.payload_from_json(x), int(s), int(c))
                    for x, s, c in data])

    def format(self, spec):
        bits = []
        for x, s, c in self.factors:
            t = f"t[{spec.format(x)}]" if self.multi_coeff() else \
                f"t({spec.format(x)})"
            if self.multi_coeff():
                t = f"t({spec.format(x)}:{c})"
            bits.append(t + ("*" if s < 0 else ""))
        return " ".join(bits) if bits else "1"

    def multi_coeff(self):
        return any(c != 0 for (_, _, c) in self.factors)


def eval_op_word(opword, fock):
    """Multiply out the factor matrices on the truncated Fock space."""
    spec = fock.monoid
    out = fock.identity_matrix()
    for x, s, c in reversed(opword.factors):
        if spec.is_identity(x) and c == 0 and fock.system.is_scalar:
            continue
        xi = fock.fiber_basis(x)[c]
        m = fock.creation_matrix(x, xi) if s > 0 \
            else fock.annihilation_matrix(x, xi)
        out = m @ out
    return out


def closed_form_column(opword, fock, r):
    """Predicted action on the basis of block r, by the membership chain.

    For scalar systems: returns (target, scale) with scale 1, or None if
    the word kills the block.  For matrix systems returns (target, matrix)
    where matrix is the product of the fiber coefficients applied on the
    left of X_r.
    """
    spec = fock.monoid
    be = fock.backend
    if not member_chain(spec, r, opword.skeleton_word(spec)):
        return None
    target = opword.lands_on(spec, r)
    if target is None or target not in fock.ball.index:
        return None
    coeff = None
    for x, s, c in opword.factors:
        xi = fock.fiber_basis(x)[c]
        m = xi if s > 0 else _mat_adj(xi, be)
        coeff = m if coeff is None else _mat_mul(coeff, m, be)
    if coeff is None:
        coeff = [[be.one if i == j else be.zero
                  for j in range(fock.system.dim)]
                 for i in range(fock.system.dim)]
    return target, coeff


def eval_matches_closed_form(opword, fock):
    """Cross-check the matrix product against the closed form on interior
    blocks.  Returns (ok, first mismatch description or None)."""
    spec = fock.monoid
    be = fock.backend
    m = eval_op_word(opword, fock)
    for r in opword.interior_blocks(fock):
        pred = closed_form_column(opword, fock, r)
        for j, eta in enumerate(fock.fiber_basis(r)):
            col = m.column(fock.offset[r] + j)
            if pred is None:
                if col:
                    return False, {"block": spec.format(r), "expected": "0"}
                continue
            target, coeff = pred
            want = _mat_mul(coeff, eta, be)
            want_coords = fock.fibers[target].coords(want)
            if want_coords is None:
                return False, {"block": spec.format(r),
                               "expected": "fiber member"}
            got = [be.zero] * fock.fibers[target].rank
            for i, v in col.items():
                if not (fock.offset[target] <= i <
                        fock.offset[target] + fock.fibers[target].rank):
                    return False, {"block": spec.format(r),
                                   "expected": f"support in {spec.format(target)}"}
                got[i - fock.offset[target]] = v
            for a, b in zip(got, want_coords):
                if not be.is_null(a - b):
                    return False, {"block": spec.format(r),
                                   "expected": "closed-form coefficients"}
    return True, None


def core_span(fock, opwords, backend=None, support=None):
    """Span of the evaluations of operator words, over the intersection of
    their interiors (columns outside the common interior are dropped).

    Returns (span, support, mats, interior_cols).
    """
    be = backend or fock.backend
    interiors = None
    mats = []
    for w in opwords:
        blocks = set(w.interior_blocks(fock))
        interiors = blocks if interiors is None else (interiors & blocks)
    interiors = interiors if interiors is not None else set(fock.ball.elements)
    cols = set()
    for r in interiors:
        for j in range(fock.fibers[r].rank):
            cols.add(fock.offset[r] + j)
    for w in opwords:
        mats.append(eval_op_word(w, fock).restrict(cols=cols))
    sp, supp = span_of_matrices(mats, be, support)
    return sp, supp, mats, cols
