import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from fockbench.linalg import Span, SparseMatrix, nullspace, span_of_matrices
from fockbench.scalars import EXACT, FLOAT, QQi


def q(n, d=1):
    return QQi(Fraction(n, d))


small_ints = st.integers(min_value=-4, max_value=4)


@given(st.lists(st.lists(small_ints, min_size=4, max_size=4),
                min_size=1, max_size=6))
@settings(max_examples=60, deadline=None)
def test_span_membership_and_coords(rows):
    sp = Span(4, EXACT)
    vecs = [[q(x) for x in r] for r in rows]
    for v in vecs:
        sp.add(list(v))
    assert sp.rank <= 4
    for v in vecs:
        assert sp.contains(v)
        coords = sp.coords(v)
        assert coords is not None
        recon = [EXACT.zero] * 4
        for c, b in zip(coords, sp.basis):
            for j in range(4):
                recon[j] = recon[j] + c * b[j]
        assert recon == list(v)


@given(st.lists(st.lists(small_ints, min_size=5, max_size=5),
                min_size=1, max_size=4))
@settings(max_examples=60, deadline=None)
def test_nullspace_annihilates(rows):
    mat = [[q(x) for x in r] for r in rows]
    null = nullspace(mat, 5, EXACT)
    for vec in null:
        for row in mat:
            s = EXACT.zero
            for a, b in zip(row, vec):
                s = s + a * b
            assert EXACT.is_null(s)
    # rank-nullity
    sp = Span(5, EXACT)
    for row in mat:
        sp.add(list(row))
    assert sp.rank + len(null) == 5


def test_sparse_matrix_algebra():
    rng = random.Random(3)
    def rand(n):
        m = SparseMatrix(n, n, EXACT)
        for _ in range(2 * n):
            m.set(rng.randrange(n), rng.randrange(n),
                  q(rng.randint(-3, 3)))
        return m
    a, b, c = rand(5), rand(5), rand(5)
    assert ((a @ b) @ c).equals(a @ (b @ c))
    assert (a @ (b + c)).equals(a @ b + a @ c)
    assert (a @ b).adjoint().equals(b.adjoint() @ a.adjoint())
    ident = SparseMatrix.identity(5, EXACT)
    assert (a @ ident).equals(a) and (ident @ a).equals(a)


def test_rank_and_restrict():
    m = SparseMatrix.from_dense(
        [[q(1), q(2)], [q(2), q(4)]], EXACT)
    assert m.rank() == 1
    assert m.restrict(rows=[0]).rank() == 1
    assert m.restrict(rows=[0], cols=[1]).rank() == 1
    assert SparseMatrix(3, 3, EXACT).rank() == 0


def test_same_span_and_span_of_matrices():
    a = SparseMatrix.from_dense([[q(1), q(0)], [q(0), q(0)]], EXACT)
    b = SparseMatrix.from_dense([[q(0), q(0)], [q(0), q(1)]], EXACT)
    s1, supp = span_of_matrices([a, b], EXACT)
    s2, _ = span_of_matrices([a + b, a - b], EXACT, supp)
    assert s1.same_span(s2)
    s3, _ = span_of_matrices([a], EXACT, supp)
    assert not s1.same_span(s3)


def test_float_backend_tolerance():
    sp = Span(2, FLOAT)
    sp.add([1.0, 0.0])
    assert sp.contains([1.0, 1e-12])
    assert not sp.contains([0.0, 1.0])


def test_canonical_key_identifies_equal_matrices():
    a = SparseMatrix.from_dense([[q(1), q(0)], [q(0), q(2)]], EXACT)
    b = SparseMatrix.from_dense([[q(1), q(0)], [q(0), q(2)]], EXACT)
    c = SparseMatrix.from_dense([[q(1), q(0)], [q(0), q(3)]], EXACT)
    assert a.canonical_key() == b.canonical_key()
    assert a.canonical_key() != c.canonical_key()
