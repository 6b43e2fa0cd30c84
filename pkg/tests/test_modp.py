import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, Poly, symbols

from tatemack import modp

PRIMES = [2, 3, 5, 7]


def square(p, max_n=5):
    return st.integers(1, max_n).flatmap(lambda n: st.lists(
        st.lists(st.integers(0, p - 1), min_size=n, max_size=n), min_size=n, max_size=n).map(
        lambda rows: np.array(rows, dtype=np.int64)))


@pytest.mark.parametrize("p", [1, 4, 67])
def test_unsupported_primes(p):
    with pytest.raises(ValueError):
        modp.check_prime(p)


@pytest.mark.parametrize("p", PRIMES)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_charpoly_matches_sympy(p, data):
    A = data.draw(square(p))
    x = symbols("x")
    ref = Poly(Matrix(A.tolist()).charpoly(x).as_expr(), x, modulus=p)
    got = modp.charpoly(A, p)
    assert got == [int(c) % p for c in ref.all_coeffs()]
    # Cayley-Hamilton
    assert not modp.poly_eval_matrix(got, A, p).any()


@pytest.mark.parametrize("p", PRIMES)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_rank_nullspace_inverse(p, data):
    A = data.draw(square(p))
    n = A.shape[0]
    N = modp.nullspace(A, p)
    assert modp.rank(A, p) + len(N) == n
    if len(N):
        assert not ((A @ N.T) % p).any()
    assert modp.is_invertible(A, p) == (int(Matrix(A.tolist()).det()) % p != 0)
    if modp.is_invertible(A, p):
        assert np.array_equal(modp.mul(A, modp.inverse(A, p), p), np.eye(n, dtype=np.int64))
        b = np.arange(n, dtype=np.int64) % p
        x = modp.solve(A, b, p)
        assert np.array_equal((A @ x) % p, b)
    else:
        with pytest.raises(ValueError):
            modp.inverse(A, p)
