"""G-lattices: integral representations of a permutation group."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import exact_linalg as xl
from .perm_groups import (DoubleCoset, PermGroup, Subgroup, SubgroupClass, class_by_label,
                          double_cosets, left_cosets, subgroup_classes)

MAX_ENTRY = 1 << 20


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class GSetSpec:
    """A finite G-set written as a disjoint union of orbits ``G/H_i``."""

    group: PermGroup
    orbits: tuple[SubgroupClass, ...]

    @classmethod
    def from_labels(cls, G: PermGroup, labels: Sequence[str]) -> "GSetSpec":
        return cls(G, tuple(class_by_label(G, s) for s in labels))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.orbits)

    @property
    def size(self) -> int:
        return sum(self.group.order // c.order for c in self.orbits)

    def __add__(self, other: "GSetSpec") -> "GSetSpec":
        return GSetSpec(self.group, self.orbits + other.orbits)

    def sorted(self) -> "GSetSpec":
        return GSetSpec(self.group, tuple(sorted(self.orbits, key=lambda c: c.order_key)))

    def __len__(self) -> int:
        return len(self.orbits)

    def __repr__(self) -> str:
        if not self.orbits:
            return "(empty)"
        return " + ".join(f"G/{c.label}" for c in self.orbits)


@dataclass
class PermBasis:
    """Basis bookkeeping of a permutation lattice: basis vector -> coset."""

    spec: GSetSpec
    subgroups: list[Subgroup]          # orbit stabilizers (class representatives)
    offsets: list[int]
    coset_reps: list[list[int]]        # per orbit, lex-least representatives
    where: list[dict[int, int]]        # per orbit, group element -> coset position

    def index(self, orbit: int, g: int) -> int:
        """Basis index of the coset g*H_orbit."""
        return self.offsets[orbit] + self.where[orbit][g]

    def locate(self, b: int) -> tuple[int, int]:
        for i in range(len(self.offsets) - 1, -1, -1):
            if b >= self.offsets[i]:
                return i, b - self.offsets[i]
        raise IndexError(b)


class GLattice:
    """A free Z-module of finite rank with a G-action.

    ``gen_matrices[k]`` is the matrix of the k-th generator of ``group`` acting
    on column vectors.  Matrices for every element are built on construction,
    which also checks that the generator matrices define a homomorphism.
    """

    def __init__(self, group: PermGroup, gen_matrices: Sequence[Sequence[Sequence[int]]],
                 name: str = "", perm: PermBasis | None = None, rank: int | None = None):
        self.group = group
        self.name = name
        self.perm = perm
        if len(gen_matrices) != len(group.generators):
            raise LatticeError("one matrix per group generator required")
        mats = [np.array(m, dtype=np.int64).reshape(len(m), -1) if len(m) else np.zeros((0, 0), np.int64)
                for m in gen_matrices]
        r = mats[0].shape[0] if mats else (rank or 0)
        for k, M in enumerate(mats):
            if M.shape != (r, r):
                raise LatticeError(f"matrix for {group.gen_names[k]} is not {r}x{r}")
            if r and np.abs(M).max() > MAX_ENTRY:
                raise LatticeError("action matrix entries too large")
            if abs(xl.det(M.tolist())) != 1:
                raise LatticeError(f"matrix for {group.gen_names[k]} is not invertible over Z")
        self.rank = r
        self.gen_matrices = mats
        elem: list[np.ndarray | None] = [None] * group.order
        elem[group.identity] = np.eye(r, dtype=np.int64)
        frontier = [group.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for k, s in enumerate(group.gen_index):
                    y = group.mul[s][x]
                    cand = mats[k] @ elem[x]
                    if elem[y] is None:
                        elem[y] = cand
                        nxt.append(y)
                    elif not np.array_equal(elem[y], cand):
                        raise LatticeError("generator matrices violate the group relations")
            frontier = nxt
        for x in range(group.order):
            for k, s in enumerate(group.gen_index):
                if not np.array_equal(elem[group.mul[s][x]], mats[k] @ elem[x]):
                    raise LatticeError("generator matrices violate the group relations")
        self.mats: list[np.ndarray] = elem
        self._lists = [m.tolist() for m in elem]
        self._fixed: dict[tuple[int, ...], list[list[int]]] = {}

    def __repr__(self) -> str:
        return f"GLattice({self.name or 'rank ' + str(self.rank)})"

    def matrix(self, g: int) -> list[list[int]]:
        return self._lists[g]

    def act(self, g: int, v: Sequence[int]) -> list[int]:
        return xl.matvec(self._lists[g], v)

    @property
    def is_permutation(self) -> bool:
        return self.perm is not None

    def norm_matrix(self, H: Subgroup) -> list[list[int]]:
        S = np.zeros((self.rank, self.rank), dtype=np.int64)
        for h in H.elements:
            S += self.mats[h]
        return S.tolist()

    def augmentation_columns(self, H: Subgroup) -> list[list[int]]:
        """Generators of I_H L: columns of (h - 1) for generators h of H."""
        cols = []
        for h in H.generators:
            D = self.mats[h] - np.eye(self.rank, dtype=np.int64)
            cols.extend(D.T.tolist())
        return cols

    def fixed_sublattice(self, H: Subgroup) -> list[list[int]]:
        return fixed_sublattice(H, self)


def fixed_sublattice(H: Subgroup, L: GLattice) -> list[list[int]]:
    """Z-basis (list of vectors) of L^H."""
    hit = L._fixed.get(H.elements)
    if hit is not None:
        return hit
    if not H.generators:
        out = xl.identity_columns(L.rank)
    else:
        eye = np.eye(L.rank, dtype=np.int64)
        rows = np.vstack([L.mats[h] - eye for h in H.generators]).tolist()
        out = xl.kernel_basis(rows, L.rank)
    L._fixed[H.elements] = out
    return out


def trivial_lattice(G: PermGroup, rank: int = 1) -> GLattice:
    return GLattice(G, [np.eye(rank, dtype=np.int64)] * len(G.generators), name="Z", rank=rank)


def sign_lattice(G: PermGroup, signs: Sequence[int], name: str = "sign") -> GLattice:
    """Rank-1 lattice with generator k acting by signs[k] in {1, -1}."""
    return GLattice(G, [[[s]] for s in signs], name=name)


def perm_lattice(G: PermGroup, X: GSetSpec | Sequence[str]) -> GLattice:
    """Z[X] with basis the left cosets of each orbit stabilizer."""
    if not isinstance(X, GSetSpec):
        X = GSetSpec.from_labels(G, X)
    subs, offsets, reps, where = [], [], [], []
    n = 0
    for c in X.orbits:
        H = c.representative
        R = left_cosets(G, H)
        w = {}
        for pos, g in enumerate(R):
            for h in H.elements:
                w[G.mul[g][h]] = pos
        subs.append(H)
        offsets.append(n)
        reps.append(R)
        where.append(w)
        n += len(R)
    pb = PermBasis(X, subs, offsets, reps, where)
    mats = []
    for s in G.gen_index:
        M = np.zeros((n, n), dtype=np.int64)
        for i in range(len(subs)):
            for pos, g in enumerate(reps[i]):
                M[pb.index(i, G.mul[s][g]), offsets[i] + pos] = 1
        mats.append(M)
    return GLattice(G, mats, name=f"Z[{X!r}]", perm=pb, rank=n)


def dual(L: GLattice) -> GLattice:
    """Hom_Z(L, Z) with g acting by the inverse transpose."""
    G = L.group
    mats = [L.mats[G.inv[s]].T.copy() for s in G.gen_index]
    return GLattice(G, mats, name=f"{L.name}^v" if L.name else "", rank=L.rank)


def direct_sum(*Ls: GLattice) -> GLattice:
    G = Ls[0].group
    n = sum(L.rank for L in Ls)
    mats = []
    for k in range(len(G.gen_index)):
        M = np.zeros((n, n), dtype=np.int64)
        o = 0
        for L in Ls:
            M[o:o + L.rank, o:o + L.rank] = L.gen_matrices[k]
            o += L.rank
        mats.append(M)
    return GLattice(G, mats, name=" + ".join(L.name for L in Ls), rank=n)


def sublattice(L: GLattice, basis: Sequence[Sequence[int]], name: str = "") -> GLattice:
    """The G-stable saturated-or-not sublattice spanned by ``basis``, in its own basis."""
    coords = xl.SublatticeCoords(basis, L.rank)
    mats = []
    for s in L.group.gen_index:
        cols = [coords.coords(L.act(s, b)) for b in basis]
        mats.append(xl.from_columns(cols, len(basis)))
    if not basis:
        mats = [np.zeros((0, 0), dtype=np.int64) for _ in L.group.gen_index]
    return GLattice(L.group, mats, name=name, rank=len(basis))


@dataclass
class LatticeMap:
    """A G-equivariant map; ``matrix`` is target.rank x source.rank."""

    source: GLattice
    target: GLattice
    matrix: list[list[int]]
    tag: object = None

    def __post_init__(self):
        if len(self.matrix) != self.target.rank or any(len(r) != self.source.rank for r in self.matrix):
            raise LatticeError("map matrix has the wrong shape")

    def check(self) -> bool:
        A = np.array(self.matrix, dtype=object).reshape(self.target.rank, self.source.rank)
        for k in range(len(self.source.group.gen_index)):
            lhs = A.dot(self.source.gen_matrices[k].astype(object)) if self.source.rank else None
            rhs = self.target.gen_matrices[k].astype(object).dot(A) if self.target.rank else None
            if lhs is not None and rhs is not None and not (lhs == rhs).all():
                return False
        return True

    def __call__(self, v: Sequence[int]) -> list[int]:
        return xl.matvec(self.matrix, v)

    def compose(self, other: "LatticeMap") -> "LatticeMap":
        """self o other."""
        if not self.matrix or not other.matrix:
            M = xl.zeros(self.target.rank, other.source.rank)
        else:
            M = xl.matmul(self.matrix, other.matrix)
        return LatticeMap(other.source, self.target, M)


def zero_lattice(G: PermGroup) -> GLattice:
    return _rank_zero(G)


def _rank_zero(G: PermGroup) -> GLattice:
    return GLattice(G, [np.zeros((0, 0), dtype=np.int64) for _ in G.gen_index], name="0")


def perm_hom_basis(X: GLattice, Y: GLattice) -> list[LatticeMap]:
    """Double-coset basis of Hom_G(Z[X], Z[Y]) for permutation lattices.

    For orbits ``G/H`` of X and ``G/K`` of Y, the element tagged by the
    double coset ``H g K`` sends the coset ``xH`` to the sum of the cosets
    ``xyK`` over ``yK`` contained in ``HgK``.  Tags are ``(i, j, DoubleCoset)``.
    """
    G = X.group
    px, py = X.perm, Y.perm
    out = []
    for i, H in enumerate(px.subgroups):
        for j, K in enumerate(py.subgroups):
            for dc in double_cosets(G, H, K):
                out.append(LatticeMap(X, Y, _dc_matrix(G, X.rank, Y.rank, px, py, i, j, dc), tag=(i, j, dc)))
    return out


def _dc_matrix(G, n: int, m: int, px: PermBasis, py: PermBasis, i: int, j: int,
               dc: DoubleCoset) -> list[list[int]]:
    M = [[0] * n for _ in range(m)]
    ys = sorted({py.where[j][y] for y in dc.elements})
    ys = [py.coset_reps[j][pos] for pos in ys]
    for pos, x in enumerate(px.coset_reps[i]):
        col = px.offsets[i] + pos
        for y in ys:
            M[py.index(j, G.mul[x][y])][col] += 1
    return M


def hom_basis(L1: GLattice, L2: GLattice) -> list[LatticeMap]:
    """Z-basis of Hom_{ZG}(L1, L2)."""
    if L1.is_permutation and L2.is_permutation:
        return perm_hom_basis(L1, L2)
    if L2.is_permutation:
        return _hom_into_perm(L1, L2)
    r1, r2 = L1.rank, L2.rank
    if r1 == 0 or r2 == 0:
        return []
    # unknown F (r2 x r1), row-major; constraint M2(s) F - F M1(s) = 0
    rows = []
    for k in range(len(L1.group.gen_index)):
        A, B = L2.gen_matrices[k], L1.gen_matrices[k]
        for a in range(r2):
            for b in range(r1):
                row = [0] * (r1 * r2)
                for c in range(r2):
                    if A[a, c]:
                        row[c * r1 + b] += int(A[a, c])
                for c in range(r1):
                    if B[c, b]:
                        row[a * r1 + c] -= int(B[c, b])
                rows.append(row)
    ker = xl.kernel_basis(rows, r1 * r2)
    return [LatticeMap(L1, L2, [v[a * r1:(a + 1) * r1] for a in range(r2)]) for v in ker]


def _hom_into_perm(L: GLattice, P: GLattice) -> list[LatticeMap]:
    # Frobenius: maps L -> Z[G/H] correspond to H-invariant functionals on L
    G = L.group
    pb = P.perm
    Ld = dual(L)
    out = []
    for j, H in enumerate(pb.subgroups):
        for phi in fixed_sublattice(H, Ld):
            M = [[0] * L.rank for _ in range(P.rank)]
            for pos, g in enumerate(pb.coset_reps[j]):
                # coordinate at gH of f(x) is phi(g^-1 x)
                row = xl.matvec(xl.transpose(L.matrix(G.inv[g])), phi)
                M[pb.offsets[j] + pos] = row
            out.append(LatticeMap(L, P, M, tag=(j, H)))
    return out


def is_equivariant(f: LatticeMap) -> bool:
    return f.check()


def lattice_from_classes(G: PermGroup, labels: Sequence[str]) -> GLattice:
    return perm_lattice(G, GSetSpec.from_labels(G, labels))


def all_transitive_specs(G: PermGroup) -> list[GSetSpec]:
    return [GSetSpec(G, (c,)) for c in subgroup_classes(G)]
