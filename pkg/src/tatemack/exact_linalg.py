"""Exact integer linear algebra and finite abelian groups.

Matrices are lists of rows of Python ints (arbitrary precision).  Vectors are
lists of ints.  Nothing here touches floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import modp

IntMatrix = list[list[int]]
IntVector = list[int]


class RankError(ValueError):
    """A presentation whose cokernel is infinite."""

    def __init__(self, free_rank: int):
        super().__init__(f"cokernel is infinite (free rank {free_rank})")
        self.free_rank = free_rank


class ConsistencyError(ValueError):
    """A matrix that does not induce a well-defined map on quotients."""


# ---------------------------------------------------------------- basic ops

def zeros(m: int, n: int) -> IntMatrix:
    return [[0] * n for _ in range(m)]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A: IntMatrix, ncols: int | None = None) -> IntMatrix:
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(r) for r in zip(*A)]


def matmul(A: IntMatrix, B: IntMatrix, inner: int | None = None) -> IntMatrix:
    if not A:
        return []
    if not B:
        return [[] for _ in A]
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col) if a) for col in Bt] for row in A]


def matvec(A: IntMatrix, v: Sequence[int]) -> IntVector:
    return [sum(a * x for a, x in zip(row, v) if a) for row in A]


def matsub(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    return [[a - b for a, b in zip(r, s)] for r, s in zip(A, B)]


def hstack(*blocks: IntMatrix, rows: int) -> IntMatrix:
    out = [[] for _ in range(rows)]
    for B in blocks:
        for i in range(rows):
            out[i].extend(B[i] if B else [])
    return out


def columns(A: IntMatrix, ncols: int | None = None) -> list[IntVector]:
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*A)]


def from_columns(cols: Sequence[Sequence[int]], nrows: int) -> IntMatrix:
    if not cols:
        return [[] for _ in range(nrows)]
    return [list(r) for r in zip(*cols)]


def det(A: IntMatrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


# ------------------------------------------------------- Smith normal form

def smith_normal_form(A: IntMatrix, ncols: int | None = None, with_inverses: bool = False):
    """Return ``(U, D, V)`` with ``U*A*V == D`` diagonal, ``d1 | d2 | ...``.

    U and V are unimodular.  With ``with_inverses=True`` the result is
    ``(U, D, V, Uinv, Vinv)``.
    """
    m = len(A)
    n = len(A[0]) if A else (ncols or 0)
    D = [list(r) for r in A]
    U, V = identity(m), identity(n)
    Ui, Vi = identity(m), identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for M in (D, V):
            for r in M:
                r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        if q == 0:
            return
        for M in (D, U):
            rs, rd = M[src], M[dst]
            for k, x in enumerate(rs):
                if x:
                    rd[k] += q * x
        for r in Ui:  # inverse: col_src -= q * col_dst
            r[src] -= q * r[dst]

    def add_col(dst, src, q):  # col_dst += q * col_src
        if q == 0:
            return
        for M in (D, V):
            for r in M:
                if r[src]:
                    r[dst] += q * r[src]
        rs, rd = Vi[dst], Vi[src]  # inverse: row_src -= q * row_dst
        for k, x in enumerate(rs):
            if x:
                rd[k] -= q * x

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    if D[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    if D[t][j]:
                        dirty = True
            if dirty:
                # move the smallest remaining entry of row/column t to the pivot
                cand = [(abs(D[i][t]), 0, i) for i in range(t + 1, m) if D[i][t]]
                cand += [(abs(D[t][j]), 1, j) for j in range(t + 1, n) if D[t][j]]
                _, kind, k = min(cand)
                if kind == 0:
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            for M in (D, U):
                M[t] = [-x for x in M[t]]
            for r in Ui:
                r[t] = -r[t]
        t += 1
    if with_inverses:
        return U, D, V, Ui, Vi
    return U, D, V


def diagonal(D: IntMatrix) -> list[int]:
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


# ------------------------------------------------- column echelon machinery

class _Echelon:
    """Column echelon form ``A * V = E`` of a matrix, tracking only V.

    Columns are stored as lists so column operations are cheap.  After
    construction, ``pivots[k] = (row, col=k)`` and columns ``rank..n-1`` of E
    are zero, so the matching columns of V span the integer kernel.
    """

    def __init__(self, A: IntMatrix, ncols: int | None = None, track: bool = True):
        m = len(A)
        n = len(A[0]) if A else (ncols or 0)
        cols = [list(c) for c in zip(*A)] if A else [[] for _ in range(n)]
        Vc = [[int(i == j) for i in range(n)] for j in range(n)] if track else None
        piv = 0
        pivots = []
        for r in range(m):
            if piv >= n:
                break
            nz = [j for j in range(piv, n) if cols[j][r]]
            if not nz:
                continue
            while len(nz) > 1:
                # Euclid on the entries of row r across the nonzero columns
                nz.sort(key=lambda j: abs(cols[j][r]))
                j0 = nz[0]
                a = cols[j0][r]
                ca = cols[j0]
                va = Vc[j0] if track else None
                for j in nz[1:]:
                    q = cols[j][r] // a
                    if q:
                        cj = cols[j]
                        for k, x in enumerate(ca):
                            if x:
                                cj[k] -= q * x
                        if track:
                            vj = Vc[j]
                            for k, x in enumerate(va):
                                if x:
                                    vj[k] -= q * x
                nz = [j for j in nz if cols[j][r]]
            j = nz[0]
            cols[piv], cols[j] = cols[j], cols[piv]
            if track:
                Vc[piv], Vc[j] = Vc[j], Vc[piv]
            if cols[piv][r] < 0:
                cols[piv] = [-x for x in cols[piv]]
                if track:
                    Vc[piv] = [-x for x in Vc[piv]]
            pivots.append(r)
            piv += 1
        self.m, self.n = m, n
        self.cols = cols
        self.Vcols = Vc
        self.pivot_rows = pivots
        self.rank = piv

    def kernel_columns(self) -> list[IntVector]:
        return [_size_reduce(v) for v in self.Vcols[self.rank:]]

    def image_columns(self) -> list[IntVector]:
        return self.cols[: self.rank]

    def solve(self, b: Sequence[int]) -> IntVector | None:
        """Integer y with E*y = b (forward substitution), mapped back by V."""
        res = list(b)
        y = [0] * self.n
        for k, r in enumerate(self.pivot_rows):
            c = self.cols[k]
            if res[r] % c[r]:
                return None
            q = res[r] // c[r]
            if q:
                y[k] = q
                for i, x in enumerate(c):
                    if x:
                        res[i] -= q * x
        if any(res):
            return None
        if self.Vcols is None:
            return y
        x = [0] * self.n
        for k in range(self.rank):
            if y[k]:
                for i, v in enumerate(self.Vcols[k]):
                    if v:
                        x[i] += y[k] * v
        return x


def _size_reduce(v: IntVector) -> IntVector:
    # kernel vectors are defined up to sign; make the first nonzero positive
    for x in v:
        if x:
            return v if x > 0 else [-y for y in v]
    return v


def kernel_basis(A: IntMatrix, ncols: int | None = None) -> list[IntVector]:
    """Z-basis (as a list of vectors) of ``{x : A x = 0}``; always saturated."""
    E = _Echelon(A, ncols)
    ker = E.kernel_columns()
    return _lll_reduce(ker) if ker and len(ker) <= 40 else ker


def image_basis(cols: Sequence[Sequence[int]], n: int) -> list[IntVector]:
    """Z-basis of the lattice spanned by the given vectors of Z^n."""
    if not cols:
        return []
    A = from_columns(cols, n)
    return _Echelon(A, track=False).image_columns()


def rank(A: IntMatrix, ncols: int | None = None) -> int:
    return _Echelon(A, ncols, track=False).rank


def solve_integer(A: IntMatrix, b: Sequence[int], ncols: int | None = None) -> IntVector | None:
    """An integer x with ``A x = b``, or None when none exists.

    The particular solution is the one obtained by forward substitution in
    the column echelon form of A with all non-pivot coordinates zero.
    """
    E = _Echelon(A, ncols)
    x = E.solve(b)
    if x is not None:
        assert matvec(A, x) == list(b)
    return x


def _lll_reduce(vectors: list[IntVector]) -> list[IntVector]:
    """Cheap size reduction of a lattice basis to keep entries small.

    Pairwise reduction only (not full LLL); it never changes the lattice.
    """
    B = [list(v) for v in vectors]
    changed = True
    rounds = 0
    while changed and rounds < 6:
        changed = False
        rounds += 1
        B.sort(key=lambda v: sum(x * x for x in v))
        for i in range(len(B)):
            for j in range(len(B)):
                if i == j:
                    continue
                bj = B[j]
                nj = sum(x * x for x in bj)
                if not nj:
                    continue
                dot = sum(x * y for x, y in zip(B[i], bj))
                q = (2 * dot + nj) // (2 * nj)
                if q:
                    cand = [x - q * y for x, y in zip(B[i], bj)]
                    if sum(x * x for x in cand) < sum(x * x for x in B[i]):
                        B[i] = cand
                        changed = True
    return [_size_reduce(v) for v in B]


class SublatticeCoords:
    """Coordinates of vectors with respect to a basis of a sublattice."""

    def __init__(self, basis: Sequence[Sequence[int]], n: int):
        self.basis = [list(b) for b in basis]
        self.n = n
        self.r = len(self.basis)
        self._ech = _Echelon(from_columns(self.basis, n), self.r) if self.r else None

    def coords(self, x: Sequence[int]) -> IntVector:
        if self.r == 0:
            if any(x):
                raise ValueError("vector not in the sublattice")
            return []
        c = self._ech.solve(x)
        if c is None:
            raise ValueError("vector not in the sublattice")
        return c

    def vector(self, c: Sequence[int]) -> IntVector:
        out = [0] * self.n
        for ci, b in zip(c, self.basis):
            if ci:
                for k, x in enumerate(b):
                    if x:
                        out[k] += ci * x
        return out


# ---------------------------------------------------- finite abelian groups

@dataclass(eq=False)
class FinAbGroup:
    """A finite abelian group ``Z/d1 + ... + Z/dk`` with d1 | d2 | ... | dk.

    When built as a subquotient ``L / L0`` of an ambient Z^n, ``lift`` holds
    one ambient representative per canonical generator and ``project`` maps
    ambient vectors of L to canonical coordinates.
    """

    invariant_factors: tuple[int, ...]
    ambient_dim: int = 0
    generator_lift: list[IntVector] = field(default_factory=list)
    _coords: SublatticeCoords | None = None
    _proj: IntMatrix | None = None  # canonical = _proj * (L coords) mod d

    def __post_init__(self):
        d = self.invariant_factors
        for a, b in zip(d, d[1:]):
            if b % a:
                raise ValueError(f"not a divisibility chain: {d}")
        if any(x < 2 for x in d):
            raise ValueError(f"invariant factors must be >= 2: {d}")

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def __repr__(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " + ".join(f"Z/{d}" for d in self.invariant_factors)

    def same_as(self, other: "FinAbGroup") -> bool:
        return self.invariant_factors == other.invariant_factors

    def reduce(self, v: Sequence[int]) -> IntVector:
        return [x % d for x, d in zip(v, self.invariant_factors)]

    def zero(self) -> IntVector:
        return [0] * self.rank

    def project(self, x: Sequence[int]) -> IntVector:
        """Canonical coordinates of an ambient vector lying in L."""
        if self._proj is None:
            raise ValueError("group has no ambient presentation")
        c = self._coords.coords(x)
        return self.reduce(matvec(self._proj, c))

    def lift(self, v: Sequence[int]) -> IntVector:
        out = [0] * self.ambient_dim
        for vi, g in zip(v, self.generator_lift):
            if vi:
                for k, x in enumerate(g):
                    if x:
                        out[k] += vi * x
        return out

    def elements(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def relation_columns(self) -> list[IntVector]:
        k = self.rank
        return [[d if i == j else 0 for i in range(k)] for j, d in enumerate(self.invariant_factors)]

    def subgroup_order(self, vectors: Sequence[Sequence[int]]) -> int:
        """Order of the subgroup generated by the given canonical vectors."""
        if not self.invariant_factors:
            return 1
        cols = [list(v) for v in vectors] + self.relation_columns()
        basis = image_basis(cols, self.rank)
        # index of the sublattice spanned by relations inside span(vectors)
        return self.order // abs(det(from_columns(basis, self.rank)))

    def generated_by(self, vectors: Sequence[Sequence[int]]) -> bool:
        return self.subgroup_order(vectors) == self.order


def subquotient(L_gens: Sequence[Sequence[int]], L0_gens: Sequence[Sequence[int]], n: int,
                L_is_basis: bool = False) -> FinAbGroup:
    """The finite group L/L0 for lattices L0 <= L <= Z^n given by generators."""
    basis = [list(b) for b in L_gens] if L_is_basis else image_basis(L_gens, n)
    coords = SublatticeCoords(basis, n)
    r = len(basis)
    rel_cols = [coords.coords(g) for g in L0_gens]
    rel = from_columns(rel_cols, r) if rel_cols else [[] for _ in range(r)]
    if r == 0:
        return FinAbGroup((), n, [], coords, [])
    U, D, V, Ui, Vi = smith_normal_form(rel, ncols=len(rel_cols), with_inverses=True)
    diag = diagonal(D) if rel_cols else []
    diag = diag + [0] * (r - len(diag))
    free = sum(1 for d in diag if d == 0)
    if free:
        raise RankError(free)
    keep = [i for i, d in enumerate(diag) if d != 1]
    factors = tuple(diag[i] for i in keep)
    proj = [U[i] for i in keep]
    lifts = []
    for i in keep:
        col = [Ui[k][i] for k in range(r)]
        lifts.append(coords.vector(col))
    return FinAbGroup(factors, n, lifts, coords, proj)


def finab_from_presentation(rel: IntMatrix, nrows: int | None = None) -> FinAbGroup:
    """Cokernel of ``rel : Z^m -> Z^n`` (columns are relations)."""
    n = len(rel) if rel else (nrows or 0)
    cols = columns(rel) if rel and rel[0] else []
    return subquotient(identity_columns(n), cols, n, L_is_basis=True)


def identity_columns(n: int) -> list[IntVector]:
    return [[int(i == j) for i in range(n)] for j in range(n)]


@dataclass(eq=False)
class FinAbMap:
    """A homomorphism between canonical forms: ``matrix`` is target x source."""

    source: FinAbGroup
    target: FinAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        t = self.target.invariant_factors
        self.matrix = [[x % d for x in row] for row, d in zip(self.matrix, t)]
        if len(self.matrix) != len(t):
            raise ValueError("matrix row count must match target rank")

    def __call__(self, v: Sequence[int]) -> IntVector:
        return self.target.reduce(matvec(self.matrix, v)) if self.matrix else []

    def columns(self) -> list[IntVector]:
        k = self.source.rank
        return [[row[j] for row in self.matrix] for j in range(k)]

    def compose(self, other: "FinAbMap") -> "FinAbMap":
        """self o other."""
        if self.matrix and other.matrix:
            M = matmul(self.matrix, other.matrix)
        else:
            M = zeros(self.target.rank, other.source.rank)
        return FinAbMap(other.source, self.target, M)

    def __add__(self, other: "FinAbMap") -> "FinAbMap":
        return FinAbMap(self.source, self.target,
                        [[a + b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)])

    def scale(self, c: int) -> "FinAbMap":
        return FinAbMap(self.source, self.target, [[c * a for a in r] for r in self.matrix])

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.matrix)

    def __eq__(self, other) -> bool:
        return isinstance(other, FinAbMap) and self.matrix == other.matrix

    def is_surjective(self) -> bool:
        """Checked modulo each prime p on B/pB (Nakayama); SNF fallback for large p."""
        t = self.target.invariant_factors
        primes = sorted({q for d in t for q in _prime_divisors(d)})
        k = self.source.rank
        for p in primes:
            rows = [i for i, d in enumerate(t) if d % p == 0]
            if k == 0:
                return False
            if p > modp.MAX_PRIME:
                return self.target.generated_by(self.columns())
            A = np.array([[self.matrix[i][j] % p for j in range(k)] for i in rows], dtype=np.int64)
            if modp.rank(A, p) < len(rows):
                return False
        return True

    def image_order(self) -> int:
        return self.target.subgroup_order(self.columns())

    def kernel(self) -> FinAbGroup:
        """ker as a subgroup of the source (ambient = source coordinates)."""
        A, B = self.source, self.target
        k, m = A.rank, B.rank
        # x in ker  <=>  F x + D_B y = 0 for some integer y
        big = [list(self.matrix[i]) + [B.invariant_factors[i] if j == i else 0 for j in range(m)]
               for i in range(m)]
        ker = kernel_basis(big, k + m) if m else identity_columns(k)
        gens = [v[:k] for v in ker] + A.relation_columns()
        return subquotient(gens, A.relation_columns(), k)

    def image(self) -> FinAbGroup:
        B = self.target
        return subquotient(self.columns() + B.relation_columns(), B.relation_columns(), B.rank)


def _prime_divisors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def zero_map(A: FinAbGroup, B: FinAbGroup) -> FinAbMap:
    return FinAbMap(A, B, zeros(B.rank, A.rank))


def identity_map(A: FinAbGroup) -> FinAbMap:
    return FinAbMap(A, A, identity(A.rank))


def induced_map(f_raw: IntMatrix, src: FinAbGroup, tgt: FinAbGroup) -> FinAbMap:
    """The map on canonical forms induced by an ambient integer matrix.

    Raises ConsistencyError when f_raw does not respect the order of some
    source generator.
    """
    cols = []
    for i, (d, g) in enumerate(zip(src.invariant_factors, src.generator_lift)):
        img = tgt.project(matvec(f_raw, g)) if tgt.rank else []
        if any((d * x) % e for x, e in zip(img, tgt.invariant_factors)):
            raise ConsistencyError(f"generator {i} of order {d} maps to an element of larger order")
        cols.append(img)
    return FinAbMap(src, tgt, from_columns(cols, tgt.rank) if cols else zeros(tgt.rank, 0))


def map_from_images(src: FinAbGroup, tgt: FinAbGroup, images: Sequence[Sequence[int]]) -> FinAbMap:
    """FinAbMap sending canonical generator i of src to images[i]."""
    for i, (d, img) in enumerate(zip(src.invariant_factors, images)):
        if any((d * x) % e for x, e in zip(img, tgt.invariant_factors)):
            raise ConsistencyError(f"generator {i} of order {d} maps to an element of larger order")
    return FinAbMap(src, tgt, from_columns(images, tgt.rank) if images else zeros(tgt.rank, 0))
