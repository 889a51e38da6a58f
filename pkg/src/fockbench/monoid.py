"""Monoid families embedded in groups, with deterministic ball enumeration.

Each family fixes an ambient group, a hashable canonical payload for its
elements, and a membership predicate for the positive cone.  Supported
families:

* ``LatticeCone(k)``       -- N^k inside Z^k, payload = k-tuple of ints
* ``FreeMonoid(n)``        -- positive words inside the free group F_n,
                              payload = reduced word as tuple of nonzero
                              ints (+i = generator i, -i = its inverse)
* ``NumericalSemigroup``   -- <g1,...,gm> inside Z (gcd 1), payload = int
* ``AffineMonoid``         -- N x| Z_{>0} inside the affine rational group,
                              payload = (b, a) pair of Fractions with the
                              law (b,a)(d,c) = (b + a d, a c)
* ``CustomMonoid``         -- user callbacks (mul, inv, in_monoid,
                              generators, identity)

Balls are products of at most L generators, enumerated breadth-first and
ordered graded-then-lexicographically on the canonical payload.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


class ResourceCapError(RuntimeError):
    """Raised when a ball enumeration exceeds its element cap."""


class MonoidSpec:
    """Base class: group operations plus positive-cone membership."""

    name = "abstract"

    @property
    def identity(self):
        raise NotImplementedError

    @property
    def generators(self):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def in_monoid(self, a):
        raise NotImplementedError

    def key(self, a):
        """Total-order sort key on payloads (used for deterministic output)."""
        raise NotImplementedError

    def format(self, a):
        return repr(a)

    # generic helpers ---------------------------------------------------

    def mul_all(self, elts):
        acc = self.identity
        for x in elts:
            acc = self.mul(acc, x)
        return acc

    def is_identity(self, a):
        return a == self.identity

    def payload_to_json(self, a):
        return a

    def payload_from_json(self, v):
        return v


class LatticeCone(MonoidSpec):
    """N^k sitting inside Z^k."""

    def __init__(self, k):
        if k < 1:
            raise ValueError("rank must be positive")
        self.k = k
        self.name = f"lattice_cone({k})"

    @property
    def identity(self):
        return (0,) * self.k

    @property
    def generators(self):
        gens = []
        for i in range(self.k):
            v = [0] * self.k
            v[i] = 1
            gens.append(tuple(v))
        return gens

    def mul(self, a, b):
        self._chk(a), self._chk(b)
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a):
        return tuple(-x for x in a)

    def in_monoid(self, a):
        return all(x >= 0 for x in a)

    def key(self, a):
        return a

    def format(self, a):
        return "(" + ",".join(str(x) for x in a) + ")"

    def _chk(self, a):
        if not (isinstance(a, tuple) and len(a) == self.k):
            raise TypeError(f"payload {a!r} does not belong to {self.name}")

    def payload_from_json(self, v):
        return tuple(int(x) for x in v)

    def payload_to_json(self, a):
        return list(a)


class FreeMonoid(MonoidSpec):
    """Positive words in the free group on n letters.

    Payloads are reduced words: tuples of nonzero ints in
    {-n..-1, 1..n}; the empty tuple is the identity.
    """

    def __init__(self, n):
        if n < 1:
            raise ValueError("need at least one letter")
        self.n = n
        self.name = f"free_monoid({n})"

    @property
    def identity(self):
        return ()

    @property
    def generators(self):
        return [(i,) for i in range(1, self.n + 1)]

    def mul(self, a, b):
        out = list(a)
        for x in b:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return tuple(out)

    def inv(self, a):
        return tuple(-x for x in reversed(a))

    def in_monoid(self, a):
        return all(x > 0 for x in a)

    def key(self, a):
        return (len(a), a)

    def format(self, a):
        if not a:
            return "e"
        letters = "abcdefghijklmnopqrstuvwxyz"
        out = []
        for x in a:
            s = letters[abs(x) - 1] if abs(x) <= 26 else f"g{abs(x)}"
            out.append(s if x > 0 else s + "'")
        return "".join(out)

    def payload_from_json(self, v):
        return tuple(int(x) for x in v)

    def payload_to_json(self, a):
        return list(a)


class NumericalSemigroup(MonoidSpec):
    """Additive submonoid of Z generated by coprime positive integers."""

    def __init__(self, gens):
        gens = sorted(set(int(g) for g in gens))
        if not gens or gens[0] < 1:
            raise ValueError("generators must be positive integers")
        g = 0
        for x in gens:
            g = gcd(g, x)
        if g != 1:
            raise ValueError("generators must have gcd 1")
        self.gens = gens
        self.name = "numerical(" + ",".join(str(g) for g in gens) + ")"
        # Membership table up to the point where the semigroup is cofinite.
        bound = gens[0] * gens[-1] + 1
        table = [False] * (bound + 1)
        table[0] = True
        for v in range(1, bound + 1):
            table[v] = any(v >= g and table[v - g] for g in gens)
        # conductor: least c with [c, infinity) fully inside
        run = 0
        conductor = 0
        for v in range(bound + 1):
            if table[v]:
                run += 1
                if run == gens[0]:
                    conductor = v - gens[0] + 1
            else:
                run = 0
        self.conductor = conductor
        self._table = table
        self.frobenius = conductor - 1 if conductor > 0 else -1

    @property
    def identity(self):
        return 0

    @property
    def generators(self):
        return list(self.gens)

    def mul(self, a, b):
        return a + b

    def inv(self, a):
        return -a

    def in_monoid(self, a):
        if a < 0:
            return False
        if a >= self.conductor:
            return True
        return self._table[a]

    def key(self, a):
        return a

    def format(self, a):
        return str(a)


def _affine_norm(a):
    b, s = a
    return (Fraction(b), Fraction(s))


class AffineMonoid(MonoidSpec):
    """N x| Z_{>0} (default) or Z x| (Z minus 0) inside the affine group.

    Payload (b, a): the map x -> b + a x.  Composition gives the law
    (b, a) (d, c) = (b + a d, a c); inversion needs rational entries.
    """

    def __init__(self, generators=None, full_variant=False):
        self.full_variant = full_variant
        if generators is None:
            generators = [(1, 1), (0, 2), (0, 3)]
        self._gens = [_affine_norm(g) for g in generators]
        for g in self._gens:
            if not self.in_monoid(g):
                raise ValueError(f"generator {g} outside the monoid")
        self.name = "affine_full" if full_variant else "affine"

    @property
    def identity(self):
        return (Fraction(0), Fraction(1))

    @property
    def generators(self):
        return list(self._gens)

    def mul(self, x, y):
        b, a = x
        d, c = y
        return (b + a * d, a * c)

    def inv(self, x):
        b, a = x
        return (-b / a, 1 / a)

    def in_monoid(self, x):
        b, a = x
        if b.denominator != 1 or a.denominator != 1:
            return False
        if self.full_variant:
            return a != 0
        return b >= 0 and a >= 1

    def key(self, x):
        return x

    def format(self, x):
        b, a = x
        return f"({b},{a})"

    def payload_from_json(self, v):
        return (Fraction(str(v[0])), Fraction(str(v[1])))

    def payload_to_json(self, a):
        return [str(a[0]), str(a[1])]

    def chain_member(self, r, word):
        """Integer fast path for brute-force chain membership.

        The prefix maps of the word are computed once (cached) as integer
        triples (Bn, An, D) meaning x -> (Bn + An x) / D; per element only
        integer arithmetic remains.  Returns None when not applicable.
        """
        if self.full_variant:
            return None
        rb, ra = r
        if rb.denominator != 1 or ra.denominator != 1:
            return None
        cache = getattr(self, "_chain_cache", None)
        if cache is None:
            cache = self._chain_cache = {}
        pref = cache.get(word)
        if pref is None:
            beta, alpha = Fraction(0), Fraction(1)
            pref = []
            for x, s in reversed(word.factors(self)):
                b, a = x if s > 0 else self.inv(x)
                beta, alpha = b + a * beta, a * alpha
                bd, ad = beta.denominator, alpha.denominator
                d = bd * ad // gcd(bd, ad)
                pref.append((beta.numerator * (d // bd),
                             alpha.numerator * (d // ad), d))
            if len(cache) > 4096:
                cache.clear()
            cache[word] = pref
        rb, ra = rb.numerator, ra.numerator
        if rb < 0 or ra < 1:
            return False
        for bn, an, d in pref:
            pb = bn + an * rb
            pa = an * ra
            if pb < 0 or pb % d or pa < d or pa % d:
                return False
        return True


class CustomMonoid(MonoidSpec):
    """Monoid from user callbacks; everything else is derived."""

    def __init__(self, mul, inv, in_monoid, generators, identity,
                 key=None, name="custom"):
        self._mul = mul
        self._inv = inv
        self._in = in_monoid
        self._gens = list(generators)
        self._id = identity
        self._key = key or (lambda a: a)
        self.name = name

    @property
    def identity(self):
        return self._id

    @property
    def generators(self):
        return list(self._gens)

    def mul(self, a, b):
        return self._mul(a, b)

    def inv(self, a):
        return self._inv(a)

    def in_monoid(self, a):
        return self._in(a)

    def key(self, a):
        return self._key(a)


class Ball:
    """All products of at most ``radius`` generators, deterministically ordered.

    ``elements`` is sorted by (generator length, payload key); ``level``
    maps payload -> minimal number of generators; ``word`` maps payload ->
    one shortest generator factorisation (lexicographically least).
    """

    def __init__(self, spec, radius, elements, level, word):
        self.spec = spec
        self.radius = radius
        self.elements = elements
        self.level = level
        self.word = word
        self.index = {p: i for i, p in enumerate(elements)}

    def __len__(self):
        return len(self.elements)

    def __contains__(self, p):
        return p in self.index

    def __iter__(self):
        return iter(self.elements)


def enumerate_ball(spec, radius, cap=5000):
    gens = sorted(spec.generators, key=spec.key)
    level = {spec.identity: 0}
    word = {spec.identity: ()}
    frontier = [spec.identity]
    for lev in range(1, radius + 1):
        nxt = []
        for p in sorted(frontier, key=spec.key):
            for g in gens:
                q = spec.mul(p, g)
                if q not in level:
                    level[q] = lev
                    word[q] = word[p] + (g,)
                    nxt.append(q)
                    if len(level) > cap:
                        raise ResourceCapError(
                            f"ball of radius {radius} in {spec.name} exceeds "
                            f"cap {cap}")
        frontier = nxt
    elements = sorted(level, key=lambda p: (level[p], spec.key(p)))
    return Ball(spec, radius, elements, level, word)


FAMILIES = {
    "lattice_cone": LatticeCone,
    "free_monoid": FreeMonoid,
    "numerical": NumericalSemigroup,
    "affine": AffineMonoid,
}


def spec_from_config(cfg):
    """Build a MonoidSpec from a scenario config dict."""
    fam = cfg["family"]
    if fam == "lattice_cone":
        return LatticeCone(int(cfg["k"]))
    if fam == "free_monoid":
        return FreeMonoid(int(cfg["n"]))
    if fam == "numerical":
        return NumericalSemigroup(cfg["generators"])
    if fam == "affine":
        gens = cfg.get("generators")
        if gens is not None:
            gens = [(Fraction(str(b)), Fraction(str(a))) for b, a in gens]
        return AffineMonoid(gens, full_variant=bool(cfg.get("full_variant", False)))
    raise ValueError(f"unknown monoid family {fam!r}")
