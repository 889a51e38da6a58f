"""Constructible right-ideal calculus.

A word is an alternating tuple ((p1,q1),...,(pn,qn)) of monoid elements,
optionally with its first p / last q masked (the eps flags).  Its ideal is
built innermost-first:

    Z0 = P,   Zi = qi^{-1} (pi . Z_{i-1}),   K(word) = Zn

with q^{-1} W = {y in P : q y in W}.  Membership admits an exact chain
test: r lies in K(word) iff the partial products p_i^{-1} q_i ... r all
stay inside the monoid, so membership is decidable for every family,
including custom callback monoids.

Equality, emptiness, intersection normal forms and principality use exact
per-family backends:

* lattice cone:          K is w + N^k                       (never empty)
* free monoid:           K is w P or empty
* numerical semigroup:   K is (finite set) union [T, inf)   (never empty)
* affine N x| Z_{>0}:    K is {(x,y): x = r mod m, x >= t, n | y} or empty
* anything else:         characteristic function on a reference ball, all
                         verdicts flagged inexact ("up to horizon")

Every ideal keeps both a defining word and a backend normal form; the two
are cross-checked in the test-suite on random words.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .monoid import (AffineMonoid, FreeMonoid, LatticeCone, MonoidSpec,
                     NumericalSemigroup, enumerate_ball)


# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Word:
    """Alternating word with optional masking of the outer letters.

    ``eps_left`` masks p1 (the innermost creation block keeps no initial
    annihilation), ``eps_right`` masks qn.  Ideal computations always fold
    the masks in by substituting the identity.
    """

    pairs: tuple
    eps_left: int = 1
    eps_right: int = 1

    @property
    def n(self):
        return len(self.pairs)

    def __len__(self):
        return 2 * len(self.pairs)

    def normalized(self, spec):
        """Same ideal word with masks folded in as identity letters."""
        if (self.eps_left and self.eps_right) or not self.pairs:
            return Word(self.pairs)
        e = spec.identity
        ps = list(self.pairs)
        if not self.eps_left:
            ps[0] = (e, ps[0][1])
        if not self.eps_right:
            ps[-1] = (ps[-1][0], e)
        return Word(tuple(ps))

    def factors(self, spec):
        """Operator factor sequence, leftmost first: (payload, sign).

        sign +1 is a creation (right letter q), sign -1 an annihilation
        (left letter p, representing the adjoint block).
        """
        out = []
        n = len(self.pairs)
        for i, (p, q) in enumerate(self.pairs):
            if i > 0 or self.eps_left:
                out.append((p, -1))
            if i < n - 1 or self.eps_right:
                out.append((q, +1))
        return tuple(out)

    def degree(self, spec):
        d = spec.identity
        for x, s in self.factors(spec):
            d = spec.mul(d, x if s > 0 else spec.inv(x))
        return d

    def is_neutral(self, spec):
        return spec.is_identity(self.degree(spec))

    def mirror(self, spec):
        """Word whose ideal action realises intersection-with-K(self).

        Applying mirror(w) then w to any ideal Z yields K(w) & Z; this is
        the reduced-form law and holds for arbitrary words.
        """
        w = self.normalized(spec)
        return Word(tuple((q, p) for (p, q) in reversed(w.pairs)))

    def concat(self, other, spec):
        """Word applying self's operations first, then other's."""
        a = self.normalized(spec)
        b = other.normalized(spec)
        return Word(a.pairs + b.pairs)

    def adjoint_word(self):
        """Formal adjoint: reversed pairs with p/q swapped, flags swapped."""
        return Word(tuple((q, p) for (p, q) in reversed(self.pairs)),
                    eps_left=self.eps_right, eps_right=self.eps_left)

    def reach(self, spec, ball_level):
        """Crude truncation reach: total generator length of all letters."""
        total = 0
        for p, q in self.pairs:
            total += ball_level(p) + ball_level(q)
        return total

    def to_json(self, spec):
        return {
            "pairs": [[spec.payload_to_json(p), spec.payload_to_json(q)]
                      for (p, q) in self.pairs],
            "eps_left": self.eps_left,
            "eps_right": self.eps_right,
        }

    @classmethod
    def from_json(cls, data, spec):
        pairs = tuple((spec.payload_from_json(p), spec.payload_from_json(q))
                      for p, q in data["pairs"])
        return cls(pairs, int(data.get("eps_left", 1)),
                   int(data.get("eps_right", 1)))

    def format(self, spec):
        if not self.pairs:
            return "()"
        bits = []
        for p, q in self.pairs:
            bits.append(f"{spec.format(p)},{spec.format(q)}")
        flags = ""
        if not self.eps_left or not self.eps_right:
            flags = f"[{self.eps_left}{self.eps_right}]"
        return "(" + ";".join(bits) + ")" + flags


def member_chain(spec, r, word):
    """Exact chain membership: r in K(word)?"""
    fast = getattr(spec, "chain_member", None)
    if fast is not None:
        res = fast(r, word)
        if res is not None:
            return res
    if not spec.in_monoid(r):
        return False
    g = r
    for x, s in reversed(word.factors(spec)):
        g = spec.mul(x, g) if s > 0 else spec.mul(spec.inv(x), g)
        if not spec.in_monoid(g):
            return False
    return True


# ---------------------------------------------------------------------------
# backends


class _Backend:
    exact = True

    def member(self, r):
        raise NotImplementedError

    def leftmul(self, p):
        raise NotImplementedError

    def preimage(self, q):
        raise NotImplementedError

    def intersect(self, other):
        raise NotImplementedError

    def dedupe_key(self):
        raise NotImplementedError

    def is_empty(self):
        raise NotImplementedError

    def principal_generator(self):
        """Payload w with ideal == w P, or None if not principal."""
        return None

    def min_witness(self):
        """Some member, or None if empty."""
        raise NotImplementedError

    def subset_of(self, other):
        raise NotImplementedError


class EmptyIdeal(_Backend):
    def __init__(self, spec):
        self.spec = spec

    def member(self, r):
        return False

    def leftmul(self, p):
        return self

    def preimage(self, q):
        return self

    def intersect(self, other):
        return self

    def dedupe_key(self):
        return ("empty",)

    def is_empty(self):
        return True

    def min_witness(self):
        return None

    def subset_of(self, other):
        return True


class ConeIdeal(_Backend):
    """w + N^k; never empty."""

    def __init__(self, spec, w):
        self.spec = spec
        self.w = w

    def member(self, r):
        return self.spec.in_monoid(r) and all(x >= y for x, y in zip(r, self.w))

    def leftmul(self, p):
        return ConeIdeal(self.spec, tuple(x + y for x, y in zip(p, self.w)))

    def preimage(self, q):
        return ConeIdeal(self.spec,
                         tuple(max(x - y, 0) for x, y in zip(self.w, q)))

    def intersect(self, other):
        if isinstance(other, EmptyIdeal):
            return other
        return ConeIdeal(self.spec,
                         tuple(max(x, y) for x, y in zip(self.w, other.w)))

    def dedupe_key(self):
        return ("cone", self.w)

    def is_empty(self):
        return False

    def principal_generator(self):
        return self.w

    def min_witness(self):
        return self.w

    def subset_of(self, other):
        if isinstance(other, EmptyIdeal):
            return False
        return all(x >= y for x, y in zip(self.w, other.w))


class FreeIdeal(_Backend):
    """w P inside a free monoid (prefix ideal)."""

    def __init__(self, spec, w):
        self.spec = spec
        self.w = w

    def member(self, r):
        return (self.spec.in_monoid(r) and len(r) >= len(self.w)
                and r[:len(self.w)] == self.w)

    def leftmul(self, p):
        return FreeIdeal(self.spec, p + self.w)

    def preimage(self, q):
        w = self.w
        if w[:len(q)] == q[:len(w)]:
            if len(w) <= len(q):
                return FreeIdeal(self.spec, ())
            return FreeIdeal(self.spec, w[len(q):])
        return EmptyIdeal(self.spec)

    def intersect(self, other):
        if isinstance(other, EmptyIdeal):
            return other
        a, b = self.w, other.w
        if a[:len(b)] == b[:len(a)]:
            return FreeIdeal(self.spec, a if len(a) >= len(b) else b)
        return EmptyIdeal(self.spec)

    def dedupe_key(self):
        return ("free", self.w)

    def is_empty(self):
        return False

    def principal_generator(self):
        return self.w

    def min_witness(self):
        return self.w

    def subset_of(self, other):
        if isinstance(other, EmptyIdeal):
            return False
        return self.w[:len(other.w)] == other.w


class NumIdeal(_Backend):
    """finite set below a threshold, plus everything from the threshold on."""

    def __init__(self, spec, fin, thresh):
        # normalise: absorb a run touching the threshold, drop tail elements
        fin = {x for x in fin if 0 <= x < thresh}
        while thresh - 1 in fin:
            fin.discard(thresh - 1)
            thresh -= 1
        self.spec = spec
        self.fin = frozenset(fin)
        self.thresh = thresh

    @classmethod
    def full(cls, spec):
        return cls(spec, {x for x in range(spec.conductor) if spec.in_monoid(x)},
                   spec.conductor)

    def member(self, r):
        return r >= self.thresh or r in self.fin

    def leftmul(self, p):
        return NumIdeal(self.spec, {x + p for x in self.fin}, self.thresh + p)

    def preimage(self, q):
        sp = self.spec
        t = max(self.thresh - q, sp.conductor)
        fin = {y for y in range(t)
               if sp.in_monoid(y) and self.member(q + y)}
        return NumIdeal(sp, fin, t)

    def intersect(self, other):
        if isinstance(other, EmptyIdeal):
            return other
        t = max(self.thresh, other.thresh)
        fin = {y for y in range(t) if self.member(y) and other.member(y)}
        return NumIdeal(self.spec, fin, t)

    def dedupe_key(self):
        return ("num", tuple(sorted(self.fin)), self.thresh)

    def is_empty(self):
        return False

    def principal_generator(self):
        m = min(self.fin) if self.fin else self.thresh
        principal = NumIdeal.full(self.spec).leftmul(m)
        if principal.dedupe_key() == self.dedupe_key():
            return m
        return None

    def min_witness(self):
        return min(self.fin) if self.fin else self.thresh

    def subset_of(self, other):
        if isinstance(other, EmptyIdeal):
            return False
        if self.thresh < other.thresh:
            if any(not other.member(y) for y in range(self.thresh, other.thresh)):
                return False
        return all(other.member(y) for y in self.fin)

    def members_upto(self, bound):
        return [y for y in range(bound + 1) if self.member(y)]


class AffineIdeal(_Backend):
    """{(x, y) in P : x = r (mod m), x >= t, n | y} for N x| Z_{>0}."""

    def __init__(self, spec, m, r, t, n):
        m, n = int(m), int(n)
        r = int(r) % m
        t = int(t)
        if t < 0:
            t = 0
        rem = (r - t) % m
        t += rem
        self.spec = spec
        self.m, self.r, self.t, self.n = m, r, t, n

    @classmethod
    def full(cls, spec):
        return cls(spec, 1, 0, 0, 1)

    def member(self, x):
        if not self.spec.in_monoid(x):
            return False
        b, a = int(x[0]), int(x[1])
        return b >= self.t and (b - self.r) % self.m == 0 and a % self.n == 0

    def leftmul(self, p):
        c, d = int(p[0]), int(p[1])
        return AffineIdeal(self.spec, d * self.m, c + d * self.r,
                           c + d * self.t, d * self.n)

    def preimage(self, q):
        c, d = int(q[0]), int(q[1])
        g = gcd(d, self.m)
        if (self.r - c) % g != 0:
            return EmptyIdeal(self.spec)
        m2 = self.m // g
        if m2 == 1:
            b0 = 0
        else:
            b0 = (((self.r - c) // g) * pow(d // g, -1, m2)) % m2
        lb = max(0, -((c - self.t) // d))  # ceil((t - c) / d)
        t2 = lb + ((b0 - lb) % m2)
        n2 = self.n // gcd(self.n, d)
        return AffineIdeal(self.spec, m2, b0, t2, n2)

    def intersect(self, other):
        if isinstance(other, EmptyIdeal):
            return other
        g = gcd(self.m, other.m)
        if (self.r - other.r) % g != 0:
            return EmptyIdeal(self.spec)
        l = self.m // g * other.m
        m2 = other.m // g
        if m2 == 1:
            r2 = self.r % l
        else:
            k = (((other.r - self.r) // g) * pow(self.m // g, -1, m2)) % m2
            r2 = (self.r + self.m * k) % l
        t2 = max(self.t, other.t)
        n2 = self.n // gcd(self.n, other.n) * other.n
        return AffineIdeal(self.spec, l, r2, t2, n2)

    def dedupe_key(self):
        return ("affine", self.m, self.r, self.t, self.n)

    def is_empty(self):
        return False

    def principal_generator(self):
        if self.m == self.n:
            return (Fraction(self.t), Fraction(self.m))
        return None

    def min_witness(self):
        return (Fraction(self.t), Fraction(self.n))

    def subset_of(self, other):
        if isinstance(other, EmptyIdeal):
            return False
        return (self.m % other.m == 0
                and (self.r - other.r) % other.m == 0
                and self.t >= other.t
                and self.n % other.n == 0)


class BallIdeal(_Backend):
    """Characteristic-set fallback on a reference ball; verdicts inexact."""

    exact = False

    def __init__(self, spec, word, ball):
        self.spec = spec
        self.word = word
        self.ball = ball
        self.chi = frozenset(r for r in ball if member_chain(spec, r, word))

    def member(self, r):
        return member_chain(self.spec, r, self.word)

    def dedupe_key(self):
        return ("ball", self.ball.radius,
                tuple(sorted((self.ball.index[r] for r in self.chi))))

    def is_empty(self):
        # only trustworthy up to the horizon
        return len(self.chi) == 0

    def principal_generator(self):
        for w in self.ball:
            wp = frozenset(r for r in self.ball
                           if member_chain(self.spec, r,
                                           Word(((self.spec.identity, w),))))
            if wp == self.chi:
                return w
        return None

    def min_witness(self):
        if not self.chi:
            return None
        return min(self.chi, key=self.spec.key)

    def subset_of(self, other):
        return all(other.member(r) for r in self.chi)


def _exact_backend_family(spec):
    return isinstance(spec, (LatticeCone, FreeMonoid, NumericalSemigroup)) or (
        isinstance(spec, AffineMonoid) and not spec.full_variant)


def _full_backend(spec):
    if isinstance(spec, LatticeCone):
        return ConeIdeal(spec, spec.identity)
    if isinstance(spec, FreeMonoid):
        return FreeIdeal(spec, ())
    if isinstance(spec, NumericalSemigroup):
        return NumIdeal.full(spec)
    if isinstance(spec, AffineMonoid) and not spec.full_variant:
        return AffineIdeal.full(spec)
    return None


# ---------------------------------------------------------------------------
# ideals


class ConstructibleIdeal:
    """Dual representation: defining word + backend normal form."""

    def __init__(self, spec, word, backend):
        self.spec = spec
        self.word = word
        self.backend = backend

    @property
    def exact(self):
        return self.backend.exact

    def member(self, r):
        return self.backend.member(r)

    def member_by_chain(self, r):
        return member_chain(self.spec, r, self.word)

    def leftmul(self, p):
        word = self.word.concat(Word(((p, self.spec.identity),)), self.spec)
        return _rebuild(self.spec, word, self.backend.leftmul(p)
                        if self.backend.exact else None,
                        getattr(self.backend, "ball", None))

    def preimage(self, q):
        word = self.word.concat(Word(((self.spec.identity, q),)), self.spec)
        return _rebuild(self.spec, word, self.backend.preimage(q)
                        if self.backend.exact else None,
                        getattr(self.backend, "ball", None))

    def intersect(self, other):
        word = other.word.concat(self.word.mirror(self.spec), self.spec) \
                         .concat(self.word, self.spec)
        be = None
        if self.backend.exact and other.backend.exact:
            be = self.backend.intersect(other.backend)
        ball = getattr(self.backend, "ball", None) or \
            getattr(other.backend, "ball", None)
        return _rebuild(self.spec, word, be, ball)

    def dedupe_key(self):
        return self.backend.dedupe_key()

    def equal(self, other):
        """(same, exact): exact families decide, ball backends only up to
        the horizon."""
        same = self.dedupe_key() == other.dedupe_key()
        return same, self.backend.exact and other.backend.exact

    def emptiness(self):
        """('empty'|'nonempty'|'unknown', data)."""
        if self.backend.is_empty():
            if self.backend.exact:
                return ("empty", None)
            return ("unknown", getattr(self.backend, "ball").radius)
        w = self.backend.min_witness()
        return ("nonempty", w)

    def principal_generator(self):
        return self.backend.principal_generator()

    def subset_of(self, other):
        return self.backend.subset_of(other.backend)

    def sample(self, ball, limit=12):
        return [r for r in ball if self.member(r)][:limit]

    def describe(self, ball=None):
        out = {"kind": type(self.backend).__name__,
               "exact": self.backend.exact,
               "word": self.word.to_json(self.spec)}
        be = self.backend
        if isinstance(be, ConeIdeal):
            out["base"] = list(be.w)
        elif isinstance(be, FreeIdeal):
            out["base"] = list(be.w)
        elif isinstance(be, NumIdeal):
            out["finite_part"] = sorted(be.fin)
            out["threshold"] = be.thresh
        elif isinstance(be, AffineIdeal):
            out["datum"] = {"modulus": be.m, "residue": be.r,
                            "min_translation": be.t, "divisor": be.n}
        if ball is not None:
            out["sample"] = [self.spec.payload_to_json(r)
                             for r in self.sample(ball)]
        return out


def _rebuild(spec, word, backend, ball):
    if backend is None:
        if ball is None:
            raise ValueError("ball required for generic ideal backend")
        backend = BallIdeal(spec, word, ball)
    return ConstructibleIdeal(spec, word, backend)


def full_ideal(spec, ball=None):
    be = _full_backend(spec)
    word = Word(())
    if be is None:
        be = BallIdeal(spec, word, ball)
    return ConstructibleIdeal(spec, word, be)


def K_of_word(spec, word, ball=None):
    """Ideal of a word, built innermost-first through the backend."""
    w = word.normalized(spec)
    if _exact_backend_family(spec):
        be = _full_backend(spec)
        for p, q in w.pairs:
            be = be.leftmul(p)
            if isinstance(be, EmptyIdeal):
                break
            be = be.preimage(q)
            if isinstance(be, EmptyIdeal):
                break
        return ConstructibleIdeal(spec, w, be)
    if ball is None:
        raise ValueError("ball required for generic ideal backend")
    return ConstructibleIdeal(spec, w, BallIdeal(spec, w, ball))


def principal_ideal(spec, p, ball=None):
    return K_of_word(spec, Word(((p, spec.identity),)), ball)


def cap_closure(ideals):
    """Close a list of ideals under pairwise intersection (deduplicated)."""
    seen = {}
    for x in ideals:
        seen.setdefault(x.dedupe_key(), x)
    frontier = list(seen.values())
    while frontier:
        nxt = []
        current = list(seen.values())
        for a in frontier:
            for b in current:
                c = a.intersect(b)
                k = c.dedupe_key()
                if k not in seen:
                    seen[k] = c
                    nxt.append(c)
        frontier = nxt
    return list(seen.values())


# ---------------------------------------------------------------------------
# neutral words, lattices, unions


def neutral_words(spec, letters, max_pairs, include_trivial=True):
    """All alternating words over ``letters`` with identity degree."""
    out = []
    if include_trivial:
        out.append(Word(()))
    letters = list(letters)

    def rec(pairs, deg):
        n = len(pairs)
        if n and spec.is_identity(deg):
            out.append(Word(tuple(pairs)))
        if n == max_pairs:
            return
        for p in letters:
            dp = spec.mul(deg, spec.inv(p))
            for q in letters:
                rec(pairs + [(p, q)], spec.mul(dp, q))

    rec([], spec.identity)
    return out


class IdealClass:
    """A constructible ideal together with the neutral words that define it."""

    def __init__(self, ideal):
        self.ideal = ideal
        self.words = []


def ideal_lattice(spec, letters, max_pairs, ball, close=True):
    """Classes of K(word) over neutral words, optionally cap-closed.

    Returns dict dedupe_key -> IdealClass.  Closure representatives get a
    concatenated neutral defining word.
    """
    classes = {}
    for w in neutral_words(spec, letters, max_pairs):
        x = K_of_word(spec, w, ball)
        k = x.dedupe_key()
        if k not in classes:
            classes[k] = IdealClass(x)
        classes[k].words.append(w)
    if close:
        frontier = list(classes.values())
        while frontier:
            nxt = []
            current = [c.ideal for c in classes.values()]
            for cl in frontier:
                for other in current:
                    y = cl.ideal.intersect(other)
                    k = y.dedupe_key()
                    if k not in classes:
                        nc = IdealClass(y)
                        nc.words.append(y.word)
                        classes[k] = nc
                        nxt.append(nc)
            frontier = nxt
    return classes


def union_equals(x, parts, ball):
    """Does the ideal x equal the union of the ideals in parts?

    Returns (bool, exact).  Exact for cones, free monoids and numerical
    semigroups; ball-decided otherwise.
    """
    spec = x.spec
    if not parts:
        st, _ = x.emptiness()
        return st == "empty", x.exact
    if not all(p.subset_of(x) for p in parts):
        return False, all(p.exact for p in parts) and x.exact
    bx, bes = x.backend, [p.backend for p in parts]
    if isinstance(bx, ConeIdeal) and all(isinstance(b, ConeIdeal) for b in bes):
        w = bx.w
        cap = tuple(max(b.w[j] for b in bes) for j in range(len(w)))
        point = list(w)
        while True:
            if not any(all(point[j] >= b.w[j] for j in range(len(w)))
                       for b in bes):
                return False, True
            j = 0
            while j < len(w):
                point[j] += 1
                if point[j] <= cap[j]:
                    break
                point[j] = w[j]
                j += 1
            if j == len(w):
                return True, True
    if isinstance(bx, FreeIdeal) and all(isinstance(b, FreeIdeal) for b in bes):
        depth = max(len(b.w) for b in bes) - len(bx.w)
        stack = [bx.w]
        while stack:
            s = stack.pop()
            if any(s[:len(b.w)] == b.w for b in bes):
                continue
            if len(s) - len(bx.w) >= depth:
                return False, True
            for g in spec.generators:
                stack.append(s + g)
        return True, True
    if isinstance(bx, NumIdeal) and all(isinstance(b, NumIdeal) for b in bes):
        hi = max([bx.thresh] + [b.thresh for b in bes])
        for y in range(hi + 1):
            if bx.member(y) != any(b.member(y) for b in bes):
                return False, True
        return True, True
    # ball-decided fallback
    for r in ball:
        if x.member(r) != any(p.member(r) for p in parts):
            return False, False
    return True, False


# ---------------------------------------------------------------------------
# right LCM diagnostics


class LcmVerdict:
    """Outcome of the principality scan over ball pairs."""

    def __init__(self, status, radius, table, witness=None):
        self.status = status        # "yes" | "no" | "yes-ball"
        self.radius = radius
        self.table = table          # (p, q) -> join w, or None when empty
        self.witness = witness      # (p, q, non-principal ideal) when "no"

    def to_json(self, spec, ball=None):
        out = {"status": self.status, "radius": self.radius}
        if self.witness is not None:
            p, q, x = self.witness
            out["witness"] = {
                "p": spec.payload_to_json(p),
                "q": spec.payload_to_json(q),
                "ideal": x.describe(ball),
            }
        return out


def is_right_lcm_up_to(spec, radius, cap=5000, ball=None):
    """Scan ball pairs for principality of p P & q P.

    On failure the reported witness ideal is q^{-1}(p P), the reduced form
    of the offending intersection.
    """
    if ball is None:
        ball = enumerate_ball(spec, radius, cap)
    exact = _exact_backend_family(spec)
    table = {}
    for i, p in enumerate(ball.elements):
        if spec.is_identity(p):
            continue
        for q in ball.elements[i:]:
            if spec.is_identity(q):
                continue
            x = principal_ideal(spec, p, ball).intersect(
                principal_ideal(spec, q, ball))
            st, _ = x.emptiness()
            if st == "empty":
                table[(p, q)] = None
                continue
            w = x.principal_generator()
            if w is None:
                reduced = principal_ideal(spec, p, ball).preimage(q)
                return LcmVerdict("no", radius, table, (p, q, reduced))
            table[(p, q)] = w
    return LcmVerdict("yes" if exact else "yes-ball", radius, table)
