"""Dense linear algebra over F_p on numpy int64 arrays.

Every product is reduced immediately, so entries stay below p and sums of
p*p terms never overflow for p <= 64.
"""

from __future__ import annotations

import numpy as np

MAX_PRIME = 64


def check_prime(p: int) -> None:
    if p < 2 or p > MAX_PRIME or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"{p} is not a supported prime")


def asmat(A, p: int) -> np.ndarray:
    return np.asarray(A, dtype=np.int64) % p


def mul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    return (A @ B) % p


def inv_scalar(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


def rref(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = np.array(A, dtype=np.int64) % p
    m, n = M.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
        M[r] = (M[r] * inv_scalar(M[r, c], p)) % p
        col = M[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            M[nzr] = (M[nzr] - np.outer(col[nzr], M[r])) % p
        pivots.append(c)
        r += 1
    return M, pivots


def rank(A: np.ndarray, p: int) -> int:
    if A.size == 0:
        return 0
    return len(rref(A, p)[1])


def nullspace(A: np.ndarray, p: int) -> np.ndarray:
    """Basis of {x : A x = 0} as the rows of the returned array."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(A, p)
    free = [c for c in range(n) if c not in set(piv)]
    out = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, c in enumerate(piv):
            out[k, c] = (-R[i, f]) % p
    return out


def row_space(A: np.ndarray, p: int) -> np.ndarray:
    """Echelon basis (rows) of the row space."""
    if A.size == 0:
        return np.zeros((0, A.shape[1] if A.ndim == 2 else 0), dtype=np.int64)
    R, piv = rref(A, p)
    return R[: len(piv)]


def solve(A: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """Some x with A x = b (b may be a matrix), or None."""
    A = np.asarray(A, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    vec = b.ndim == 1
    B = b.reshape(-1, 1) if vec else b
    m, n = A.shape
    R, piv = rref(np.hstack([A, B]), p)
    if any(c >= n for c in piv):
        return None
    X = np.zeros((n, B.shape[1]), dtype=np.int64)
    for i, c in enumerate(piv):
        X[c] = R[i, n:]
    return X[:, 0] if vec else X


def inverse(A: np.ndarray, p: int) -> np.ndarray:
    n = A.shape[0]
    R, piv = rref(np.hstack([np.asarray(A) % p, np.eye(n, dtype=np.int64)]), p)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return R[:, n:]


def is_invertible(A: np.ndarray, p: int) -> bool:
    return A.shape[0] == A.shape[1] and rank(A, p) == A.shape[0]


def charpoly(A: np.ndarray, p: int) -> list[int]:
    """Characteristic polynomial coefficients, highest degree first (monic).

    Hessenberg reduction followed by the standard recurrence; exact mod p.
    """
    H = np.array(A, dtype=np.int64) % p
    n = H.shape[0]
    for j in range(n - 2):
        nz = np.nonzero(H[j + 2:, j])[0]
        if H[j + 1, j] == 0:
            if nz.size == 0:
                continue
            i = j + 2 + int(nz[0])
            H[[j + 1, i]] = H[[i, j + 1]]
            H[:, [j + 1, i]] = H[:, [i, j + 1]]
        inv = inv_scalar(H[j + 1, j], p)
        for i in range(j + 2, n):
            u = (H[i, j] * inv) % p
            if u:
                H[i] = (H[i] - u * H[j + 1]) % p
                H[:, j + 1] = (H[:, j + 1] + u * H[:, i]) % p
    # polys[k] = char poly of leading k x k block, low degree first
    polys = [[1]]
    for k in range(1, n + 1):
        prev = polys[-1]
        cur = [0] + prev  # x * prev
        for i in range(len(prev)):
            cur[i] = (cur[i] - H[k - 1, k - 1] * prev[i]) % p
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = (prod * H[i, i - 1]) % p
            if prod == 0:
                break
            c = (H[i - 1, k - 1] * prod) % p
            q = polys[i - 1]
            for t in range(len(q)):
                cur[t] = (cur[t] - c * q[t]) % p
        polys.append([int(x) for x in cur])
    return list(reversed(polys[-1]))


def poly_eval_matrix(coeffs: list[int], A: np.ndarray, p: int) -> np.ndarray:
    """Evaluate a polynomial (highest degree first) at a square matrix."""
    n = A.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    eye = np.eye(n, dtype=np.int64)
    for c in coeffs:
        out = (out @ A + c * eye) % p
    return out
