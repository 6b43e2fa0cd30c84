"""Tate cohomology of G-lattices in degrees -1, 0, 1 with Mackey structure.

Conventions
-----------
* degree 0:  L^H / N_H L
* degree -1: ker(N_H) / I_H L, with I_H L spanned by (h - 1) L
* degree 1:  Z^1(H, L) / B^1(H, L)

Degree-0 and degree -1 classes live in the coordinates of L.  A degree-1
class is stored through its values on the generators of H (in order); the
full table over H is recovered by ``cocycle_table``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import exact_linalg as xl
from .exact_linalg import FinAbGroup, FinAbMap, induced_map
from .g_lattices import GLattice, fixed_sublattice
from .perm_groups import CapacityError, PermGroup, Subgroup, double_cosets, left_cosets, subgroup_list

DEGREES = (-1, 0, 1)
MAX_COCYCLE_ORDER = 48


def canonical_subgroups(G: PermGroup) -> dict[tuple[int, ...], Subgroup]:
    cache = getattr(G, "_canon_subgroups", None)
    if cache is None:
        cache = {H.elements: H for H in subgroup_list(G)}
        G._canon_subgroups = cache
    return cache


def canon(G: PermGroup, H: Subgroup) -> Subgroup:
    return canonical_subgroups(G)[H.elements]


@dataclass
class TateValue:
    subgroup: Subgroup
    degree: int
    group: FinAbGroup

    @property
    def rep_lift(self) -> list[list[int]]:
        return self.group.generator_lift


class _CocycleSystem:
    """Linear description of 1-cochains determined by values on generators.

    ``T[x]`` is the r x (k r) integer matrix giving c(x) from the stacked
    generator values, built along a spanning tree of the Cayley graph.
    """

    def __init__(self, H: Subgroup, L: GLattice):
        G = L.group
        r, gens = L.rank, H.generators
        k = len(gens)
        self.H, self.L, self.r, self.k = H, L, r, k
        n = r * k
        T: dict[int, np.ndarray] = {G.identity: np.zeros((r, n), dtype=object)}
        E = []
        for j in range(k):
            Ej = np.zeros((r, n), dtype=object)
            for a in range(r):
                Ej[a, j * r + a] = 1
            E.append(Ej)
        mats = [L.mats[s].astype(object) for s in gens]
        constraints = []
        frontier = [G.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for j, s in enumerate(gens):
                    y = G.mul[s][x]
                    val = E[j] + mats[j].dot(T[x])
                    if y not in T:
                        T[y] = val
                        nxt.append(y)
                    else:
                        D = T[y] - val
                        if D.any():
                            constraints.append(D)
            frontier = nxt
        self.T = T
        self.constraints = np.vstack(constraints).tolist() if constraints else []

    def table(self, u: Sequence[int]) -> dict[int, list[int]]:
        uu = np.array(list(u), dtype=object)
        return {x: list(M.dot(uu)) if self.r else [] for x, M in self.T.items()}


def _system(H: Subgroup, L: GLattice) -> _CocycleSystem:
    cache = L.__dict__.setdefault("_cocycles", {})
    hit = cache.get(H.elements)
    if hit is None:
        if H.order > MAX_COCYCLE_ORDER:
            raise CapacityError(f"|H| = {H.order} exceeds the cocycle-table bound {MAX_COCYCLE_ORDER}")
        hit = _CocycleSystem(H, L)
        cache[H.elements] = hit
    return hit


def tate_value(H: Subgroup, L: GLattice, i: int) -> TateValue:
    G = L.group
    H = canon(G, H)
    cache = L.__dict__.setdefault("_tate", {})
    key = (H.elements, i)
    if key in cache:
        return cache[key]
    r = L.rank
    if i == 0:
        F = fixed_sublattice(H, L)
        N = xl.columns(L.norm_matrix(H), r) if r else []
        grp = xl.subquotient(F, N, r, L_is_basis=True)
    elif i == -1:
        Ker = xl.kernel_basis(L.norm_matrix(H), r) if r else []
        grp = xl.subquotient(Ker, L.augmentation_columns(H), r, L_is_basis=True)
    elif i == 1:
        S = _system(H, L)
        n = S.r * S.k
        Z = xl.kernel_basis(S.constraints, n) if S.constraints else xl.identity_columns(n)
        B = []
        for a in range(r):
            v = [0] * r
            v[a] = 1
            col = []
            for s in H.generators:
                gv = L.act(s, v)
                col.extend(x - y for x, y in zip(gv, v))
            B.append(col)
        grp = xl.subquotient(Z, B, n, L_is_basis=True)
    else:
        raise ValueError(f"unsupported degree {i}")
    val = TateValue(H, i, grp)
    cache[key] = val
    return val


def cocycle_table(H: Subgroup, L: GLattice, u: Sequence[int]) -> dict[int, list[int]]:
    """All values c(h), h in H, of the cocycle with generator values ``u``."""
    return _system(canon(L.group, H), L).table(u)


def is_cocycle(H: Subgroup, L: GLattice, table: dict[int, list[int]]) -> bool:
    G = L.group
    for a in H.elements:
        for b in H.elements:
            lhs = table[G.mul[a][b]]
            rhs = [x + y for x, y in zip(table[a], L.act(a, table[b]))]
            if lhs != rhs:
                return False
    return True


def h0_fixed(H: Subgroup, L: GLattice) -> list[list[int]]:
    """Plain (non-Tate) H^0: a basis of L^H."""
    return fixed_sublattice(H, L)


# ------------------------------------------------------------ the three maps

def _right_transversal(G: PermGroup, H: Subgroup, K: Subgroup) -> list[int]:
    """t with K = disjoint union of H t."""
    seen: set[int] = set()
    out = []
    for t in K.elements:
        if t in seen:
            continue
        out.append(t)
        seen.update(G.mul[h][t] for h in H.elements)
    return out


def _left_transversal(G: PermGroup, H: Subgroup, K: Subgroup) -> list[int]:
    """t with K = disjoint union of t H (lex-least representatives)."""
    seen: set[int] = set()
    out = []
    for t in K.elements:
        if t in seen:
            continue
        out.append(t)
        seen.update(G.mul[t][h] for h in H.elements)
    return out


def _sum_mats(L: GLattice, elems: Sequence[int]) -> list[list[int]]:
    S = np.zeros((L.rank, L.rank), dtype=np.int64)
    for g in elems:
        S += L.mats[g]
    return S.tolist()


def _stack_rows(blocks: list[np.ndarray]) -> list[list[int]]:
    return [list(map(int, row)) for B in blocks for row in B.tolist()]


def res_map(K: Subgroup, H: Subgroup, L: GLattice, i: int) -> FinAbMap:
    """Restriction Ĥ^i(K, L) -> Ĥ^i(H, L) for H <= K."""
    G = L.group
    K, H = canon(G, K), canon(G, H)
    if not H <= K:
        raise ValueError("restriction needs H <= K")
    src, tgt = tate_value(K, L, i).group, tate_value(H, L, i).group
    r = L.rank
    if i == 0:
        f = xl.identity(r)
    elif i == -1:
        f = _sum_mats(L, _right_transversal(G, H, K))
    else:
        S = _system(K, L)
        f = _stack_rows([S.T[h] for h in H.generators]) if H.generators else []
        if not f:
            f = xl.zeros(0, r * len(K.generators))
    return induced_map(f, src, tgt)


def cor_map(H: Subgroup, K: Subgroup, L: GLattice, i: int) -> FinAbMap:
    """Corestriction (transfer) Ĥ^i(H, L) -> Ĥ^i(K, L) for H <= K."""
    G = L.group
    K, H = canon(G, K), canon(G, H)
    if not H <= K:
        raise ValueError("corestriction needs H <= K")
    src, tgt = tate_value(H, L, i).group, tate_value(K, L, i).group
    r = L.rank
    if i == 0:
        f = _sum_mats(L, _left_transversal(G, H, K))
    elif i == -1:
        f = xl.identity(r)
    else:
        S = _system(H, L)
        T = _left_transversal(G, H, K)
        where = {}
        for t in T:
            for h in H.elements:
                where[G.mul[t][h]] = t
        blocks = []
        for s in K.generators:
            acc = np.zeros((r, r * len(H.generators)), dtype=object)
            for t in T:
                kt = G.mul[s][t]
                t2 = where[kt]
                h = G.mul[G.inv[t2]][kt]
                acc = acc + L.mats[t2].astype(object).dot(S.T[h])
            blocks.append(acc)
        f = _stack_rows(blocks) if blocks else xl.zeros(0, r * len(H.generators))
    return induced_map(f, src, tgt)


def conj_map(g: int, H: Subgroup, L: GLattice, i: int) -> FinAbMap:
    """C_g : Ĥ^i(H, L) -> Ĥ^i(gHg^-1, L)."""
    G = L.group
    H = canon(G, H)
    gH = canon(G, H.conjugate(g))
    src, tgt = tate_value(H, L, i).group, tate_value(gH, L, i).group
    if i in (0, -1):
        f = L.matrix(g)
    else:
        S = _system(H, L)
        Mg = L.mats[g].astype(object)
        ginv = G.inv[g]
        blocks = [Mg.dot(S.T[G.mul[G.mul[ginv][h]][g]]) for h in gH.generators]
        f = _stack_rows(blocks) if blocks else xl.zeros(0, L.rank * len(H.generators))
    return induced_map(f, src, tgt)


# --------------------------------------------------------------- Mackey data

class MackeyDatum:
    """All values and structure maps of H -> Ĥ^i(H, L), built lazily."""

    def __init__(self, L: GLattice, degree: int):
        self.lattice = L
        self.degree = degree
        self.group = L.group
        self.subgroups = subgroup_list(L.group)
        self._res: dict = {}
        self._cor: dict = {}
        self._conj: dict = {}

    def value(self, H: Subgroup) -> FinAbGroup:
        return tate_value(H, self.lattice, self.degree).group

    @property
    def values(self) -> dict[Subgroup, FinAbGroup]:
        return {H: self.value(H) for H in self.subgroups}

    def res(self, K: Subgroup, H: Subgroup) -> FinAbMap:
        key = (K.elements, H.elements)
        if key not in self._res:
            self._res[key] = res_map(K, H, self.lattice, self.degree)
        return self._res[key]

    def cor(self, H: Subgroup, K: Subgroup) -> FinAbMap:
        key = (H.elements, K.elements)
        if key not in self._cor:
            self._cor[key] = cor_map(H, K, self.lattice, self.degree)
        return self._cor[key]

    def conj(self, g: int, H: Subgroup) -> FinAbMap:
        key = (g, H.elements)
        if key not in self._conj:
            self._conj[key] = conj_map(g, H, self.lattice, self.degree)
        return self._conj[key]

    def populate(self) -> "MackeyDatum":
        G = self.group
        for K in self.subgroups:
            for H in self.subgroups:
                if H <= K:
                    self.res(K, H)
                    self.cor(H, K)
            for g in range(G.order):
                self.conj(g, K)
        return self


def mackey_datum(L: GLattice, i: int) -> MackeyDatum:
    return MackeyDatum(L, i).populate()


def _is_identity(f: FinAbMap) -> bool:
    return f == xl.identity_map(f.source)


def verify_mackey_axioms(D: MackeyDatum, elements: Sequence[int] | None = None) -> list[str]:
    """Check every Mackey axiom instance and the cohomological axiom.

    Returns a list of human-readable violations (empty when all hold).
    ``elements`` restricts the conjugating elements tried (default: all).
    """
    G = D.group
    subs = D.subgroups
    gs = list(range(G.order)) if elements is None else list(elements)
    canon_of = canonical_subgroups(G)
    bad = []
    name = lambda H: "<" + ",".join(G.word(x) for x in H.generators) + ">" if H.generators else "1"

    for H in subs:
        if not _is_identity(D.res(H, H)):
            bad.append(f"R^H_H != id at H={name(H)}")
        if not _is_identity(D.cor(H, H)):
            bad.append(f"I^H_H != id at H={name(H)}")
        for h in H.elements:
            if not _is_identity(D.conj(h, H)):
                bad.append(f"C_h != id at H={name(H)}, h={G.word(h)}")
    # transitivity
    for Lg in subs:
        for K in subs:
            if not K <= Lg:
                continue
            for H in subs:
                if not H <= K:
                    continue
                if D.res(K, H).compose(D.res(Lg, K)) != D.res(Lg, H):
                    bad.append(f"R transitivity fails for {name(H)} <= {name(K)} <= {name(Lg)}")
                if D.cor(K, Lg).compose(D.cor(H, K)) != D.cor(H, Lg):
                    bad.append(f"I transitivity fails for {name(H)} <= {name(K)} <= {name(Lg)}")
    # C_g C_h = C_gh
    for H in subs:
        for g in gs:
            for h in gs:
                hH = canon_of[H.conjugate(h).elements]
                lhs = D.conj(g, hH).compose(D.conj(h, H))
                if lhs != D.conj(G.mul[g][h], H):
                    bad.append(f"C_g C_h != C_gh at H={name(H)}, g={G.word(g)}, h={G.word(h)}")
    # conjugation compatibility
    for K in subs:
        for H in subs:
            if not H <= K:
                continue
            for g in gs:
                gK = canon_of[K.conjugate(g).elements]
                gH = canon_of[H.conjugate(g).elements]
                if D.conj(g, H).compose(D.res(K, H)) != D.res(gK, gH).compose(D.conj(g, K)):
                    bad.append(f"C_g R mismatch at {name(H)} <= {name(K)}, g={G.word(g)}")
                if D.conj(g, K).compose(D.cor(H, K)) != D.cor(gH, gK).compose(D.conj(g, H)):
                    bad.append(f"C_g I mismatch at {name(H)} <= {name(K)}, g={G.word(g)}")
    # double coset formula and cohomological axiom
    for K in subs:
        for H in subs:
            if not H <= K:
                continue
            idx = K.order // H.order
            if D.cor(H, K).compose(D.res(K, H)) != xl.identity_map(D.value(K)).scale(idx):
                bad.append(f"I R != [K:H] at {name(H)} <= {name(K)}")
            for J in subs:
                if not J <= K:
                    continue
                lhs = D.res(K, J).compose(D.cor(H, K))
                rhs = xl.zero_map(D.value(H), D.value(J))
                for dc in double_cosets(G, J, H):
                    x = dc.rep
                    if x not in K.element_set:
                        continue
                    xH = H.conjugate(x)
                    A = canon_of[J.intersect(xH).elements]
                    B = canon_of[H.intersect(J.conjugate(G.inv[x])).elements]
                    term = D.cor(A, J).compose(D.conj(x, B)).compose(D.res(H, B))
                    rhs = rhs + term
                if lhs != rhs:
                    bad.append(f"double coset formula fails for H={name(H)}, J={name(J)}, K={name(K)}")
    return bad
