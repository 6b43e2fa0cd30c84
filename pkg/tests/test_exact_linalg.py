import math

import pytest
from hypothesis import assume, given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from tatemack import exact_linalg as xl
from tatemack.exact_linalg import FinAbGroup, RankError


def matrices(max_rows=4, max_cols=4, bound=9):
    return st.integers(1, max_rows).flatmap(lambda m: st.integers(1, max_cols).flatmap(
        lambda n: st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n),
                           min_size=m, max_size=m)))


def finab_groups():
    return st.lists(st.sampled_from([2, 3, 4, 6, 8, 9, 12]), max_size=3).map(
        lambda ds: xl.finab_from_presentation([[d if i == j else 0 for j in range(len(ds))]
                                               for i, d in enumerate(ds)], len(ds)))


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_smith_normal_form(A):
    m, n = len(A), len(A[0])
    U, D, V, Ui, Vi = xl.smith_normal_form(A, with_inverses=True)
    assert xl.matmul(xl.matmul(U, A), V) == D
    assert abs(xl.det(U)) == 1 and abs(xl.det(V)) == 1
    assert xl.matmul(U, Ui) == xl.identity(m) and xl.matmul(V, Vi) == xl.identity(n)
    d = xl.diagonal(D)
    assert all(D[i][j] == 0 for i in range(m) for j in range(n) if i != j)
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (b == 0) if a == 0 else (b % a == 0)
    ref = sympy_snf(Matrix(A), domain=ZZ)
    assert [abs(ref[i, i]) for i in range(min(m, n))] == d


@settings(max_examples=150, deadline=None)
@given(matrices(bound=5))
def test_kernel_basis_is_saturated(A):
    n = len(A[0])
    K = xl.kernel_basis(A, n)
    for v in K:
        assert xl.matvec(A, v) == [0] * len(A)
    assert len(K) + xl.rank(A, n) == n
    if K:
        # saturated: the gcd of the maximal minors of the basis is 1
        snf = xl.diagonal(xl.smith_normal_form(xl.from_columns(K, n))[1])
        assert all(abs(x) == 1 for x in snf)


@settings(max_examples=150, deadline=None)
@given(matrices(bound=5), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_solve_integer(A, x):
    n = len(A[0])
    x = x[:n]
    b = xl.matvec(A, x)
    y = xl.solve_integer(A, b, n)
    assert y is not None and xl.matvec(A, y) == b


def test_solve_integer_detects_no_solution():
    assert xl.solve_integer([[2, 0], [0, 3]], [1, 0]) is None
    assert xl.solve_integer([[2, 4]], [6]) is not None


@settings(max_examples=100, deadline=None)
@given(matrices(max_rows=3, max_cols=3, bound=6))
def test_cokernel_order_is_determinant(A):
    n = len(A)
    assume(len(A[0]) == n and xl.det(A) != 0)
    C = xl.finab_from_presentation(A)
    assert C.order == abs(xl.det(A))


def test_free_part_is_refused():
    with pytest.raises(RankError):
        xl.finab_from_presentation([[2, 0], [0, 0]])


def test_invariant_factor_chain_enforced():
    with pytest.raises(ValueError):
        FinAbGroup((4, 2))
    with pytest.raises(ValueError):
        FinAbGroup((1, 2))


@settings(max_examples=150, deadline=None)
@given(finab_groups(), finab_groups(), st.data())
def test_map_invariants(A, B, data):
    cols = []
    for d in A.invariant_factors:
        # images must have order dividing d
        col = []
        for e in B.invariant_factors:
            step = e // math.gcd(d, e)
            col.append(step * data.draw(st.integers(0, e)))
        cols.append(col)
    f = xl.map_from_images(A, B, cols)
    assert f.is_surjective() == B.generated_by(f.columns())
    assert f.kernel().order * f.image_order() == A.order
    assert f.image().order == f.image_order()
    assert f.compose(xl.identity_map(A)) == f
    assert (f + f.scale(-1)).is_zero()


def test_map_respects_orders():
    A = FinAbGroup((2,))
    B = FinAbGroup((4,))
    with pytest.raises(xl.ConsistencyError):
        xl.map_from_images(A, B, [[1]])
    assert xl.map_from_images(A, B, [[2]]).image_order() == 2


def test_subquotient_projection_and_lift():
    # Z^2 / <(2,0), (1,3)> is cyclic of order 6
    G = xl.subquotient(xl.identity_columns(2), [[2, 0], [1, 3]], 2, L_is_basis=True)
    assert G.invariant_factors == (6,)
    for v in G.elements():
        assert G.project(G.lift(v)) == list(v)
