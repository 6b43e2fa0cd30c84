"""Finite-dimensional modules over F_p G and the MeatAxe.

Matrices act on column vectors.  Subspaces are passed around as arrays whose
rows form a basis.  All randomized searches draw from ``numpy`` generators
seeded with ``SEED`` so results are reproducible.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np
import sympy

from . import modp
from .perm_groups import PermGroup

SEED = 20240611
EXHAUSTIVE_LIMIT = 4096
RANDOM_TRIES = 400
MAX_DIM = 64


class MeatAxeError(RuntimeError):
    pass


class FpModule:
    """An F_p-representation of a permutation group given on generators."""

    def __init__(self, group: PermGroup, p: int, gens: Sequence[np.ndarray], dim: int | None = None,
                 check: bool = True):
        modp.check_prime(p)
        self.group = group
        self.p = p
        self.gens = [np.asarray(g, dtype=np.int64) % p for g in gens]
        self.dim = self.gens[0].shape[0] if self.gens else (dim or 0)
        if self.dim > MAX_DIM:
            raise MeatAxeError(f"module dimension {self.dim} exceeds bound {MAX_DIM}")
        self._elems: list[np.ndarray] | None = None
        if check:
            self.element_matrices()

    def __repr__(self) -> str:
        return f"FpModule(p={self.p}, dim={self.dim})"

    def element_matrices(self) -> list[np.ndarray]:
        if self._elems is None:
            G, p, n = self.group, self.p, self.dim
            elem: list = [None] * G.order
            elem[G.identity] = np.eye(n, dtype=np.int64)
            frontier = [G.identity]
            while frontier:
                nxt = []
                for x in frontier:
                    for k, s in enumerate(G.gen_index):
                        y = G.mul[s][x]
                        cand = (self.gens[k] @ elem[x]) % p
                        if elem[y] is None:
                            elem[y] = cand
                            nxt.append(y)
                        elif not np.array_equal(elem[y], cand):
                            raise ValueError("matrices violate the group relations")
                frontier = nxt
            for x in range(G.order):
                for k, s in enumerate(G.gen_index):
                    if not np.array_equal(elem[G.mul[s][x]], (self.gens[k] @ elem[x]) % p):
                        raise ValueError("matrices violate the group relations")
            self._elems = elem
        return self._elems

    def matrix(self, g: int) -> np.ndarray:
        return self.element_matrices()[g]

    # -- subspaces ---------------------------------------------------------

    def spin(self, vectors: np.ndarray, transpose: bool = False) -> np.ndarray:
        """Echelon basis (rows) of the submodule generated by the rows given."""
        p = self.p
        mats = [g.T for g in self.gens] if transpose else self.gens
        basis: list[np.ndarray] = []
        pivots: list[int] = []

        def reduce(v):
            v = v % p
            for b, c in zip(basis, pivots):
                if v[c]:
                    v = (v - v[c] * b) % p
            return v

        def add(v):
            nz = np.nonzero(v)[0]
            c = int(nz[0])
            v = (v * modp.inv_scalar(v[c], p)) % p
            for i, b in enumerate(basis):
                if b[c]:
                    basis[i] = (b - b[c] * v) % p
            basis.append(v)
            pivots.append(c)
            return v

        queue = []
        for v in np.atleast_2d(vectors):
            r = reduce(np.asarray(v, dtype=np.int64))
            if r.any():
                queue.append(add(r))
        while queue:
            v = queue.pop()
            for M in mats:
                r = reduce(M @ v)
                if r.any():
                    queue.append(add(r))
                    if len(basis) == self.dim:
                        queue = []
                        break
        if not basis:
            return np.zeros((0, self.dim), dtype=np.int64)
        order = np.argsort(pivots)
        return np.array([basis[i] for i in order], dtype=np.int64)

    def submodule(self, S: np.ndarray) -> "FpModule":
        """Action on the invariant subspace with row basis S."""
        p = self.p
        k = S.shape[0]
        gens = []
        for M in self.gens:
            X = modp.solve(S.T, (M @ S.T) % p, p)
            if X is None:
                raise ValueError("subspace is not invariant")
            gens.append(X)
        return FpModule(self.group, p, gens, dim=k, check=False)

    def complement_basis(self, S: np.ndarray) -> np.ndarray:
        _, piv = modp.rref(S, self.p) if S.shape[0] else (None, [])
        free = [c for c in range(self.dim) if c not in set(piv)]
        T = np.zeros((len(free), self.dim), dtype=np.int64)
        for i, c in enumerate(free):
            T[i, c] = 1
        return T

    def quotient(self, S: np.ndarray) -> "FpModule":
        """Action on U / S."""
        p = self.p
        k = S.shape[0]
        T = self.complement_basis(S)
        P = np.vstack([S, T]).T % p
        Pi = modp.inverse(P, p)
        gens = [((Pi @ M) % p @ P % p)[k:, k:] for M in self.gens]
        return FpModule(self.group, p, gens, dim=self.dim - k, check=False)

    def dual(self) -> "FpModule":
        G = self.group
        return FpModule(G, self.p, [self.matrix(G.inv[s]).T for s in G.gen_index], dim=self.dim)

    # -- invariants --------------------------------------------------------

    def fingerprint(self) -> tuple:
        """Characteristic polynomials of the generators, then of all elements."""
        G = self.group
        gens = tuple(tuple(modp.charpoly(self.matrix(s), self.p)) for s in G.gen_index)
        rest = tuple(tuple(modp.charpoly(M, self.p)) for M in self.element_matrices())
        return (self.dim, gens, rest)

    def fixed_space(self, elements: Sequence[int]) -> np.ndarray:
        if self.dim == 0:
            return np.zeros((0, 0), dtype=np.int64)
        eye = np.eye(self.dim, dtype=np.int64)
        rows = [self.matrix(g) - eye for g in elements]
        if not rows:
            return eye
        return modp.nullspace(np.vstack(rows) % self.p, self.p)


def fp_module_from_lattice(L, p: int) -> FpModule:
    return FpModule(L.group, p, [M % p for M in L.gen_matrices], dim=L.rank)


# ------------------------------------------------------------------- Hom

def hom_space(U: FpModule, V: FpModule, gens: Sequence[int] | None = None) -> list[np.ndarray]:
    """Basis of matrices X (dim V x dim U) with X u(g) = v(g) X.

    ``gens`` optionally restricts the commuting condition to a list of group
    elements (used for subgroup-equivariant maps).
    """
    p = U.p
    du, dv = U.dim, V.dim
    if du == 0 or dv == 0:
        return []
    if gens is None:
        pairs = list(zip(U.gens, V.gens))
    else:
        pairs = [(U.matrix(g), V.matrix(g)) for g in gens]
    if not pairs:
        return [e.reshape(dv, du) for e in np.eye(du * dv, dtype=np.int64)]
    Iu, Iv = np.eye(du, dtype=np.int64), np.eye(dv, dtype=np.int64)
    rows = [(np.kron(B, Iu) - np.kron(Iv, A.T)) % p for A, B in pairs]
    N = modp.nullspace(np.vstack(rows), p)
    return [n.reshape(dv, du) for n in N]


def hom_dim(U: FpModule, V: FpModule) -> int:
    return len(hom_space(U, V))


def _combination(basis: Sequence[np.ndarray], coeffs, p: int) -> np.ndarray:
    out = np.zeros_like(basis[0])
    for c, b in zip(coeffs, basis):
        if c:
            out = (out + int(c) * b) % p
    return out


def is_isomorphic_indecomposable(U: FpModule, V: FpModule) -> bool:
    """Isomorphism test valid when U is indecomposable (local End)."""
    if U.dim != V.dim:
        return False
    if U.dim == 0:
        return True
    F = hom_space(U, V)
    if not F:
        return False
    Gs = hom_space(V, U)
    for f in F:
        for g in Gs:
            if modp.is_invertible((g @ f) % U.p, U.p):
                return True
    return False


def is_isomorphic_simple(U: FpModule, V: FpModule) -> bool:
    return U.dim == V.dim and bool(hom_space(U, V))


# -------------------------------------------------------------- MeatAxe

def _factor(coeffs: list[int], p: int) -> list[list[int]]:
    x = sympy.Symbol("x")
    P = sympy.Poly(coeffs, x, modulus=p)
    _, facs = P.factor_list()
    out = [[int(c) % p for c in f.all_coeffs()] for f, _ in facs]
    out.sort(key=lambda c: (len(c), c))
    return out


def _random_algebra_element(mats: list[np.ndarray], pool: list[np.ndarray], rng, p: int) -> np.ndarray:
    a, b = rng.integers(0, len(pool), size=2)
    pool.append((pool[a] @ pool[b]) % p)
    if len(pool) > 12:
        del pool[len(mats)]
    coeffs = rng.integers(0, p, size=len(pool))
    A = np.zeros_like(pool[0])
    for c, M in zip(coeffs, pool):
        A = (A + int(c) * M) % p
    return A


def find_submodule(U: FpModule) -> np.ndarray | None:
    """A proper nonzero submodule (row basis), or None when U is simple."""
    n, p = U.dim, U.p
    if n <= 1:
        return None
    rng = np.random.default_rng(SEED)
    mats = list(U.gens)
    if not mats:
        return np.eye(n, dtype=np.int64)[:1]
    pool = list(mats)
    for _ in range(RANDOM_TRIES):
        A = _random_algebra_element(mats, pool, rng, p)
        for f in _factor(modp.charpoly(A, p), p):
            fA = modp.poly_eval_matrix(f, A, p)
            N = modp.nullspace(fA, p)
            if N.shape[0] == 0:
                continue
            S = U.spin(N[:1])
            if S.shape[0] < n:
                return S
            Nt = modp.nullspace(fA.T % p, p)
            St = U.spin(Nt[:1], transpose=True)
            if St.shape[0] < n:
                return modp.nullspace(St, p)
            if N.shape[0] == len(f) - 1:
                return None
    raise MeatAxeError("irreducibility test did not terminate")


def composition_factors(U: FpModule) -> list[FpModule]:
    if U.dim == 0:
        return []
    S = find_submodule(U)
    if S is None:
        return [U]
    return composition_factors(U.submodule(S)) + composition_factors(U.quotient(S))


def distinct_simples(mods: Sequence[FpModule]) -> list[FpModule]:
    out: list[FpModule] = []
    for S in mods:
        if not any(is_isomorphic_simple(S, T) for T in out):
            out.append(S)
    out.sort(key=lambda S: S.fingerprint())
    return out


def is_simple(U: FpModule) -> bool:
    return U.dim > 0 and find_submodule(U) is None


# ------------------------------------------------- indecomposable summands

def _power(M: np.ndarray, e: int, p: int) -> np.ndarray:
    R = np.eye(M.shape[0], dtype=np.int64)
    B = M % p
    while e:
        if e & 1:
            R = (R @ B) % p
        B = (B @ B) % p
        e >>= 1
    return R


def _fitting_split(phi: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray] | None:
    n = phi.shape[0]
    Phi = _power(phi, n, p)
    r = modp.rank(Phi, p)
    if r == 0 or r == n:
        return None
    image = modp.row_space(Phi.T % p, p)  # column space as rows
    kernel = modp.nullspace(Phi, p)
    return kernel, image


def _splitting_endomorphism(E: list[np.ndarray], p: int) -> np.ndarray | None:
    """An endomorphism that is neither nilpotent nor invertible, if any."""
    if not E:
        return None
    cands = list(E)
    cands += [(a @ b) % p for a in E[:6] for b in E[:6]]
    for phi in cands:
        if _fitting_split(phi, p) is not None:
            return phi
    d = len(E)
    if p ** d <= EXHAUSTIVE_LIMIT:
        for coeffs in itertools.product(range(p), repeat=d):
            phi = _combination(E, coeffs, p)
            if _fitting_split(phi, p) is not None:
                return phi
        return None
    rng = np.random.default_rng(SEED)
    for _ in range(RANDOM_TRIES):
        phi = _combination(E, rng.integers(0, p, size=d), p)
        if _fitting_split(phi, p) is not None:
            return phi
    return None


def _decompose(U: FpModule) -> list[FpModule]:
    if U.dim <= 1:
        return [U] if U.dim else []
    E = hom_space(U, U)
    phi = _splitting_endomorphism(E, U.p)
    if phi is None:
        return [U]
    kernel, image = _fitting_split(phi, U.p)
    return _decompose(U.submodule(kernel)) + _decompose(U.submodule(image))


def split_indecomposables(U: FpModule) -> list[tuple[FpModule, int]]:
    """Indecomposable summands of U up to isomorphism, with multiplicities.

    The order is canonical: by (dimension, fingerprint).
    """
    classes: list[list] = []
    for P in _decompose(U):
        for c in classes:
            if is_isomorphic_indecomposable(P, c[0]):
                c[1] += 1
                break
        else:
            classes.append([P, 1])
    out = [(P, m) for P, m in classes]
    out.sort(key=lambda t: t[0].fingerprint())
    return out


def is_indecomposable(U: FpModule) -> bool:
    return U.dim > 0 and _splitting_endomorphism(hom_space(U, U), U.p) is None
