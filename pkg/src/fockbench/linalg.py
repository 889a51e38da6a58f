"""Row-reduction based linear algebra, generic over scalar backends.

Spans keep an augmented row-echelon form so membership tests also recover
coordinates with respect to the originally inserted independent vectors.
Matrices used by the operator engines are sparse dict-of-keys; products of
truncated creation/annihilation operators stay very sparse, and rank/span
questions are answered by row reduction restricted to the joint support.
"""

from __future__ import annotations


class Span:
    """Linear span of vectors with exact/tolerant membership and coords.

    Rows are kept reduced (echelon, pivot-normalised).  ``combo`` rows track
    how each reduced row decomposes over the independent vectors fed to
    ``add`` so that ``coords`` can express members over that basis.
    """

    def __init__(self, dim, backend):
        self.dim = dim
        self.backend = backend
        self.rows = []      # reduced vectors
        self.pivots = []    # pivot column of each row
        self.combos = []    # combo[i][k]: coefficient of basis vector k in rows[i]
        self.basis = []     # the independent vectors as inserted

    @property
    def rank(self):
        return len(self.rows)

    def _reduce(self, vec, want_combo=False):
        """Reduce vec against the rows; return (residual, combo or None)."""
        be = self.backend
        v = list(vec)
        combo = [be.zero] * len(self.basis) if want_combo else None
        for row, piv, rc in zip(self.rows, self.pivots, self.combos):
            c = v[piv]
            if be.is_null(c):
                continue
            for j in range(piv, self.dim):
                v[j] = v[j] - c * row[j]
            if want_combo:
                for k in range(len(rc)):
                    combo[k] = combo[k] + c * rc[k]
        return v, combo

    def _pivot_of(self, v):
        be = self.backend
        for j in range(self.dim):
            if be.pivot_ok(v[j]):
                return j
        return None

    def add(self, vec):
        """Insert a vector; return True if it enlarged the span."""
        be = self.backend
        v, combo = self._reduce(vec, want_combo=True)
        piv = self._pivot_of(v)
        if piv is None:
            return False
        c = v[piv]
        v = [x / c for x in v]
        self.basis.append(list(vec))
        new_combo = [-(x / c) for x in combo] + [be.one / c]
        # pad older combos for the new basis slot
        for rc in self.combos:
            rc.append(be.zero)
        # back-eliminate to keep reduced echelon form
        for i, row in enumerate(self.rows):
            f = row[piv]
            if be.is_null(f):
                continue
            for j in range(self.dim):
                row[j] = row[j] - f * v[j]
            for k in range(len(new_combo)):
                self.combos[i][k] = self.combos[i][k] - f * new_combo[k]
        # insert keeping pivots sorted
        pos = 0
        while pos < len(self.pivots) and self.pivots[pos] < piv:
            pos += 1
        self.rows.insert(pos, v)
        self.pivots.insert(pos, piv)
        self.combos.insert(pos, new_combo)
        return True

    def extend(self, vecs):
        for v in vecs:
            self.add(v)
        return self

    def contains(self, vec):
        v, _ = self._reduce(vec)
        return self._pivot_of(v) is None

    def coords(self, vec):
        """Coefficients over the inserted basis, or None if not in span."""
        v, combo = self._reduce(vec, want_combo=True)
        if self._pivot_of(v) is not None:
            return None
        return combo

    def residual(self, vec):
        v, _ = self._reduce(vec)
        return v

    def same_span(self, other):
        if self.rank != other.rank:
            return False
        return (all(other.contains(r) for r in self.rows)
                and all(self.contains(r) for r in other.rows))


def nullspace(rows, ncols, backend):
    """Basis of {c in K^ncols : row . c == 0 for every constraint row}."""
    be = backend
    red = Span(ncols, be)
    for r in rows:
        red.add(r)
    pivset = set(red.pivots)
    free = [j for j in range(ncols) if j not in pivset]
    basis = []
    for f in free:
        v = [be.zero] * ncols
        v[f] = be.one
        for row, piv in zip(red.rows, red.pivots):
            v[piv] = -row[f]
        basis.append(v)
    return basis


class SparseMatrix:
    """Immutable-ish sparse complex matrix as {(i, j): scalar}."""

    __slots__ = ("nrows", "ncols", "data", "backend")

    def __init__(self, nrows, ncols, backend, data=None):
        self.nrows = nrows
        self.ncols = ncols
        self.backend = backend
        self.data = {} if data is None else data

    @classmethod
    def identity(cls, n, backend):
        one = backend.one
        return cls(n, n, backend, {(i, i): one for i in range(n)})

    @classmethod
    def from_dense(cls, rows, backend):
        data = {}
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if not backend.is_null(v):
                    data[(i, j)] = v
        return cls(len(rows), len(rows[0]) if rows else 0, backend, data)

    def set(self, i, j, v):
        if self.backend.is_null(v):
            self.data.pop((i, j), None)
        else:
            self.data[(i, j)] = v

    def get(self, i, j):
        return self.data.get((i, j), self.backend.zero)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in sparse product")
        be = self.backend
        rows_of_b = {}
        for (k, j), v in other.data.items():
            rows_of_b.setdefault(k, []).append((j, v))
        out = {}
        for (i, k), a in self.data.items():
            for j, b in rows_of_b.get(k, ()):
                key = (i, j)
                cur = out.get(key)
                out[key] = a * b if cur is None else cur + a * b
        out = {k: v for k, v in out.items() if not be.is_null(v)}
        return SparseMatrix(self.nrows, other.ncols, be, out)

    def __add__(self, other):
        be = self.backend
        out = dict(self.data)
        for k, v in other.data.items():
            cur = out.get(k)
            s = v if cur is None else cur + v
            if be.is_null(s):
                out.pop(k, None)
            else:
                out[k] = s
        return SparseMatrix(self.nrows, self.ncols, be, out)

    def __sub__(self, other):
        return self + other.scale(-self.backend.one)

    def scale(self, c):
        be = self.backend
        if be.is_null(c):
            return SparseMatrix(self.nrows, self.ncols, be, {})
        return SparseMatrix(self.nrows, self.ncols, be,
                            {k: c * v for k, v in self.data.items()})

    def adjoint(self):
        be = self.backend
        return SparseMatrix(self.ncols, self.nrows, be,
                            {(j, i): be.conj(v) for (i, j), v in self.data.items()})

    def is_zero(self):
        be = self.backend
        return all(be.is_null(v) for v in self.data.values())

    def equals(self, other):
        return (self - other).is_zero()

    def restrict(self, rows=None, cols=None):
        """Compression to given row/column index subsets (None = all)."""
        rs = None if rows is None else set(rows)
        cs = None if cols is None else set(cols)
        data = {k: v for k, v in self.data.items()
                if (rs is None or k[0] in rs) and (cs is None or k[1] in cs)}
        return SparseMatrix(self.nrows, self.ncols, self.backend, data)

    def column(self, j):
        be = self.backend
        return {i: v for (i, jj), v in self.data.items() if jj == j}

    def support(self):
        return set(self.data.keys())

    def to_vector(self, support):
        """Dense vector of entries over an ordered support list."""
        z = self.backend.zero
        return [self.data.get(k, z) for k in support]

    def rank(self):
        if not self.data:
            return 0
        cols = sorted({j for (_, j) in self.data}, key=_idx_key)
        col_pos = {j: a for a, j in enumerate(cols)}
        rows = {}
        for (i, j), v in self.data.items():
            rows.setdefault(i, [self.backend.zero] * len(cols))[col_pos[j]] = v
        sp = Span(len(cols), self.backend)
        for i in sorted(rows, key=_idx_key):
            sp.add(rows[i])
        return sp.rank

    def canonical_key(self):
        """Hashable key identifying the matrix exactly (exact backend)."""
        return (self.nrows, self.ncols,
                tuple(sorted((k, _scalar_key(v)) for k, v in self.data.items())))

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={len(self.data)})"


def _idx_key(i):
    return i


def _scalar_key(v):
    if hasattr(v, "re"):
        return (str(v.re), str(v.im))
    return (repr(v.real), repr(v.imag))


def span_of_matrices(mats, backend, support=None):
    """Span of matrices viewed as vectors over their joint support.

    Returns (span, support list).  The support ordering is deterministic.
    """
    if support is None:
        supp = set()
        for m in mats:
            supp |= m.support()
        support = sorted(supp)
    sp = Span(len(support), backend)
    for m in mats:
        sp.add(m.to_vector(support))
    return sp, support
