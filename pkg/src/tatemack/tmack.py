"""Tate Mackey functors as modules over the finite ring tau(G).

A functor N is stored through its values N(H) at every subgroup (finite
abelian groups) and its restriction, corestriction and conjugation maps.
The symbol ``[HgK]`` acts as ``N(K) -> N(H)``,
``I^H_{H ∩ gKg^-1} C_g R^K_{K ∩ g^-1 H g}``.

Heads and projective covers are computed one prime at a time on N/pN, a
graded F_p-module over the algebra generated by the idempotents e_H, the
restrictions and corestrictions along maximal inclusions, and the
conjugations by the generators of G.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import exact_linalg as xl
from . import modp
from .exact_linalg import FinAbGroup, FinAbMap
from .fp_modules import FpModule, composition_factors, find_submodule, hom_space
from .g_lattices import GLattice, GSetSpec, perm_lattice
from .perm_groups import (CapacityError, PermGroup, Subgroup, class_of, double_cosets,
                          left_cosets, maximal_subgroups, normalizer, p_subgroup_classes,
                          prime_factors, quotient_as_perm_group, subgroup_list)
from .tate_cohomology import MackeyDatum, canon, canonical_subgroups
from .trivial_source import MultiplicityVector, TSLabel, simple_fp_modules

MAX_TAU_ORDER = 48


# ----------------------------------------------------------- tau(G) itself

@dataclass(frozen=True)
class Symbol:
    """Double-coset symbol [H g K]; ``g`` is the least element of HgK."""

    left: int   # index into subgroup_list(G)
    rep: int
    right: int


class TauAlgebra:
    """tau(G): the double-coset algebra modulo the ideal generated by [1e1].

    The basis element [HgK] has additive order |H ∩ gKg^-1| in tau(G);
    symbols whose intersection is trivial vanish.  ``n_symbols_total``
    counts symbols before the quotient.
    """

    def __init__(self, G: PermGroup):
        if G.order > MAX_TAU_ORDER:
            raise CapacityError(f"|G| = {G.order} exceeds the tau(G) bound {MAX_TAU_ORDER}")
        self.group = G
        self.modulus = G.order
        self.subgroups = subgroup_list(G)
        self.index = {H.elements: i for i, H in enumerate(self.subgroups)}
        self.symbols_total: list[Symbol] = []
        self.orders: dict[Symbol, int] = {}
        self._dc: dict[Symbol, frozenset[int]] = {}
        for i, H in enumerate(self.subgroups):
            for j, K in enumerate(self.subgroups):
                for dc in double_cosets(G, H, K):
                    s = Symbol(i, dc.rep, j)
                    self.symbols_total.append(s)
                    self._dc[s] = dc.elements
                    self.orders[s] = H.intersect(K.conjugate(dc.rep)).order
        self.basis = [s for s in self.symbols_total if self.orders[s] > 1]
        self._cosets = {j: left_cosets(G, K) for j, K in enumerate(self.subgroups)}
        self._prod: dict = {}

    @property
    def n_symbols_total(self) -> int:
        return len(self.symbols_total)

    def symbol(self, H: Subgroup, g: int, K: Subgroup) -> Symbol:
        i, j = self.index[H.elements], self.index[K.elements]
        for s, elems in self._dc.items():
            if s.left == i and s.right == j and g in elems:
                return s
        raise KeyError("no such double coset")

    def identity(self) -> dict[Symbol, int]:
        e = self.group.identity
        return {self.symbol(H, e, H): 1 for H in self.subgroups if H.order > 1}

    def _phi(self, s: Symbol) -> dict[int, dict[int, int]]:
        """phi_s on the basis coset e_H: coset-position -> coefficient (right cosets)."""
        G = self.group
        K = self.subgroups[s.right]
        where = {}
        for pos, y in enumerate(self._cosets[s.right]):
            for k in K.elements:
                where[G.mul[y][k]] = pos
        return where

    def product(self, a: Symbol, b: Symbol) -> dict[Symbol, int]:
        """a o b as operators (b acts first), reduced in tau(G)."""
        key = (a, b)
        if key in self._prod:
            return self._prod[key]
        G = self.group
        if a.right != b.left:
            self._prod[key] = {}
            return {}
        K = self.subgroups[a.right]
        L = self.subgroups[b.right]
        where_K = {}
        for pos, y in enumerate(self._cosets[a.right]):
            for k in K.elements:
                where_K[G.mul[y][k]] = pos
        where_L = {}
        for pos, y in enumerate(self._cosets[b.right]):
            for l in L.elements:
                where_L[G.mul[y][l]] = pos
        ys = sorted({where_K[x] for x in self._dc[a]})
        zs = sorted({where_L[x] for x in self._dc[b]})
        counts: dict[int, int] = {}
        for yp in ys:
            y = self._cosets[a.right][yp]
            for zp in zs:
                z = self._cosets[b.right][zp]
                w = where_L[G.mul[y][z]]
                counts[w] = counts.get(w, 0) + 1
        out: dict[Symbol, int] = {}
        Hs = self.subgroups[a.left]
        for s, elems in self._dc.items():
            if s.left != a.left or s.right != b.right:
                continue
            c = counts.get(where_L[s.rep], 0) % self.orders[s]
            if c:
                out[s] = c
        self._prod[key] = out
        return out

    def multiply(self, x: dict[Symbol, int], y: dict[Symbol, int]) -> dict[Symbol, int]:
        out: dict[Symbol, int] = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for s, c in self.product(a, b).items():
                    out[s] = (out.get(s, 0) + ca * cb * c) % self.orders[s]
        return {s: c for s, c in out.items() if c}


_TAU_CACHE: dict = {}


def tau_algebra(G: PermGroup) -> TauAlgebra:
    hit = _TAU_CACHE.get(id(G))
    if hit is None or hit[0] is not G:
        hit = (G, TauAlgebra(G))
        _TAU_CACHE[id(G)] = hit
    return hit[1]


# --------------------------------------------------------- Mackey modules

class TMackModule:
    """Abstract Tate Mackey functor; subclasses supply values and maps."""

    group: PermGroup

    @cached_property
    def subgroups(self) -> list[Subgroup]:
        return subgroup_list(self.group)

    def value(self, H: Subgroup) -> FinAbGroup:
        raise NotImplementedError

    def res(self, K: Subgroup, H: Subgroup) -> FinAbMap:
        raise NotImplementedError

    def cor(self, H: Subgroup, K: Subgroup) -> FinAbMap:
        raise NotImplementedError

    def conj(self, g: int, H: Subgroup) -> FinAbMap:
        raise NotImplementedError

    def order(self) -> int:
        out = 1
        for H in self.subgroups:
            out *= self.value(H).order
        return out

    def is_zero(self) -> bool:
        return all(self.value(H).is_trivial() for H in self.subgroups)

    def tate_condition(self) -> bool:
        return self.value(self.group.trivial).is_trivial()

    def symbol_map(self, H: Subgroup, g: int, K: Subgroup) -> FinAbMap:
        """Action of [HgK] : N(K) -> N(H)."""
        G = self.group
        canon_of = canonical_subgroups(G)
        A = canon_of[H.intersect(K.conjugate(g)).elements]
        B = canon_of[K.intersect(H.conjugate(G.inv[g])).elements]
        return self.cor(A, H).compose(self.conj(g, B)).compose(self.res(K, B))

    def act(self, tau: TauAlgebra, x: dict[Symbol, int], H: Subgroup, K: Subgroup) -> FinAbMap:
        """Action of an algebra element restricted to N(K) -> N(H)."""
        out = xl.zero_map(self.value(K), self.value(H))
        i, j = tau.index[H.elements], tau.index[K.elements]
        for s, c in x.items():
            if s.left == i and s.right == j:
                out = out + self.symbol_map(H, s.rep, K).scale(c)
        return out


class DatumModule(TMackModule):
    """The Tate Mackey functor H -> Ĥ^i(H, L)."""

    def __init__(self, datum: MackeyDatum, label: str = ""):
        self.datum = datum
        self.group = datum.group
        self.label = label

    def value(self, H):
        return self.datum.value(H)

    def res(self, K, H):
        return self.datum.res(K, H)

    def cor(self, H, K):
        return self.datum.cor(H, K)

    def conj(self, g, H):
        return self.datum.conj(g, H)


class SubModule(TMackModule):
    """A subfunctor given by subgroups of each value (ambient = parent coords)."""

    def __init__(self, parent: TMackModule, values: dict[tuple[int, ...], FinAbGroup], label: str = ""):
        self.parent = parent
        self.group = parent.group
        self.values = values
        self.label = label
        self._cache: dict = {}

    def value(self, H):
        return self.values[H.elements]

    def _induce(self, key, f: FinAbMap, src: Subgroup, tgt: Subgroup) -> FinAbMap:
        if key not in self._cache:
            self._cache[key] = xl.induced_map(f.matrix if f.matrix else xl.zeros(f.target.rank, f.source.rank),
                                              self.value(src), self.value(tgt))
        return self._cache[key]

    def res(self, K, H):
        return self._induce(("r", K.elements, H.elements), self.parent.res(K, H), K, H)

    def cor(self, H, K):
        return self._induce(("i", H.elements, K.elements), self.parent.cor(H, K), H, K)

    def conj(self, g, H):
        gH = canon(self.group, H.conjugate(g))
        return self._induce(("c", g, H.elements), self.parent.conj(g, H), H, gH)


def hat0_tmack(X: GSetSpec | GLattice) -> DatumModule:
    L = X if isinstance(X, GLattice) else perm_lattice(X.group, X)
    return DatumModule(MackeyDatum(L, 0), label=f"H0^({L.name})")


def h1_tmack(M: GLattice) -> DatumModule:
    return DatumModule(MackeyDatum(M, 1), label=f"H1({M.name})")


def zero_tmack(G: PermGroup) -> DatumModule:
    return hat0_tmack(GSetSpec(G, ()))


# ---------------------------------------------------- mod-p graded modules

def covering_pairs(G: PermGroup) -> list[tuple[Subgroup, Subgroup]]:
    """(H, K) with H maximal in K, in subgroup-list order."""
    out = []
    for K in subgroup_list(G):
        for H in maximal_subgroups(G, K):
            out.append((canon(G, H), K))
    return out


@dataclass
class OpSpec:
    kind: str       # "R", "I" or "C"
    src: int
    tgt: int
    data: tuple


def operator_specs(G: PermGroup) -> list[OpSpec]:
    cache = getattr(G, "_tmack_ops", None)
    if cache is not None:
        return cache
    subs = subgroup_list(G)
    idx = {H.elements: i for i, H in enumerate(subs)}
    ops = []
    for H, K in covering_pairs(G):
        ops.append(OpSpec("R", idx[K.elements], idx[H.elements], (K, H)))
        ops.append(OpSpec("I", idx[H.elements], idx[K.elements], (H, K)))
    for k, s in enumerate(G.gen_index):
        for i, H in enumerate(subs):
            ops.append(OpSpec("C", i, idx[H.conjugate(s).elements], (s, H)))
    G._tmack_ops = ops
    return ops


def _pmask(A: FinAbGroup, p: int) -> list[int]:
    return [i for i, d in enumerate(A.invariant_factors) if d % p == 0]


@dataclass
class GradedFp:
    """A graded F_p-module: one block per subgroup, one matrix per OpSpec."""

    group: PermGroup
    p: int
    dims: list[int]
    blocks: list[np.ndarray]

    @property
    def dim(self) -> int:
        return sum(self.dims)

    @property
    def offsets(self) -> list[int]:
        out, o = [], 0
        for d in self.dims:
            out.append(o)
            o += d
        return out

    def support(self) -> list[int]:
        return [i for i, d in enumerate(self.dims) if d]

    def full_module(self) -> FpModule:
        """Ungraded form: idempotents followed by all operators as full matrices."""
        n, off = self.dim, self.offsets
        gens = []
        for i, d in enumerate(self.dims):
            if d:
                E = np.zeros((n, n), dtype=np.int64)
                E[off[i]:off[i] + d, off[i]:off[i] + d] = np.eye(d, dtype=np.int64)
                gens.append(E)
        for op, B in zip(operator_specs(self.group), self.blocks):
            if B.size:
                M = np.zeros((n, n), dtype=np.int64)
                M[off[op.tgt]:off[op.tgt] + self.dims[op.tgt], off[op.src]:off[op.src] + self.dims[op.src]] = B
                gens.append(M)
        if not gens:
            gens = [np.zeros((n, n), dtype=np.int64)]
        return FpModule(None, self.p, gens, dim=n, check=False)

    def restrict_to(self, S: np.ndarray) -> "GradedFp":
        """The graded submodule with (graded) row basis S."""
        return _regrade(self, S, quotient=False)

    def quotient_by(self, S: np.ndarray) -> "GradedFp":
        return _regrade(self, S, quotient=True)

    def operator(self, kind: str, src: int, data0) -> np.ndarray:
        for op, B in zip(operator_specs(self.group), self.blocks):
            if op.kind == kind and op.src == src and op.data[0] == data0:
                return B
        raise KeyError((kind, src, data0))

    def conj_block(self, g: int, src: int) -> tuple[np.ndarray, int]:
        """Matrix of C_g on block ``src`` and the target block index."""
        G = self.group
        subs = subgroup_list(G)
        idx = {H.elements: i for i, H in enumerate(subs)}
        M = np.eye(self.dims[src], dtype=np.int64)
        cur = src
        for k in reversed(G.words[g]):
            s = G.gen_index[k]
            B = self.operator("C", cur, s)
            M = (B @ M) % self.p
            cur = idx[subs[cur].conjugate(s).elements]
        return M, cur


def _regrade(U: GradedFp, S: np.ndarray, quotient: bool) -> GradedFp:
    p, off = U.p, U.offsets
    # split S into its graded pieces (S is invariant under every idempotent)
    pieces = []
    for i, d in enumerate(U.dims):
        if d == 0 or S.shape[0] == 0:
            pieces.append(np.zeros((0, d), dtype=np.int64))
            continue
        part = S[:, off[i]:off[i] + d] % p
        pieces.append(modp.row_space(part, p) if part.any() else np.zeros((0, d), dtype=np.int64))
    bases, coords = [], []
    for i, d in enumerate(U.dims):
        Si = pieces[i]
        if quotient:
            T = _complement(Si, d, p)
            Pfull = np.vstack([Si, T]).T % p if d else np.zeros((0, 0), dtype=np.int64)
            bases.append((Si.shape[0], T, Pfull))
        else:
            bases.append(Si)
    blocks = []
    for op, B in zip(operator_specs(U.group), U.blocks):
        if quotient:
            ks, Ts, Ps = bases[op.src]
            kt, Tt, Pt = bases[op.tgt]
            if Ts.shape[0] == 0 or Tt.shape[0] == 0:
                blocks.append(np.zeros((Tt.shape[0], Ts.shape[0]), dtype=np.int64))
                continue
            Pti = modp.inverse(Pt, p)
            full = (Pti @ ((B @ Ts.T) % p)) % p
            blocks.append(full[kt:, :])
        else:
            Ss, St = bases[op.src], bases[op.tgt]
            if Ss.shape[0] == 0 or St.shape[0] == 0:
                blocks.append(np.zeros((St.shape[0], Ss.shape[0]), dtype=np.int64))
                continue
            X = modp.solve(St.T, (B @ Ss.T) % p, p)
            if X is None:
                raise ValueError("subspace is not a submodule")
            blocks.append(X)
    if quotient:
        dims = [b[1].shape[0] for b in bases]
    else:
        dims = [b.shape[0] for b in bases]
    return GradedFp(U.group, p, dims, blocks)


def _complement(S: np.ndarray, d: int, p: int) -> np.ndarray:
    piv = set(modp.rref(S, p)[1]) if S.shape[0] else set()
    free = [c for c in range(d) if c not in piv]
    T = np.zeros((len(free), d), dtype=np.int64)
    for i, c in enumerate(free):
        T[i, c] = 1
    return T


def reduce_mod_p(N: TMackModule, p: int) -> GradedFp:
    G = N.group
    subs = subgroup_list(G)
    masks = [_pmask(N.value(H), p) for H in subs]
    dims = [len(m) for m in masks]
    blocks = []
    for op in operator_specs(G):
        if op.kind == "R":
            f = N.res(*op.data)
        elif op.kind == "I":
            f = N.cor(*op.data)
        else:
            f = N.conj(*op.data)
        ms, mt = masks[op.src], masks[op.tgt]
        B = np.zeros((len(mt), len(ms)), dtype=np.int64)
        for a, i in enumerate(mt):
            for b, j in enumerate(ms):
                B[a, b] = f.matrix[i][j] % p
        blocks.append(B)
    return GradedFp(G, p, dims, blocks)


def graded_hom(U: GradedFp, V: GradedFp) -> list[list[np.ndarray]]:
    """Basis of graded module maps U -> V, each as a list of blocks."""
    p = U.p
    n_unk = [V.dims[i] * U.dims[i] for i in range(len(U.dims))]
    offs = np.cumsum([0] + n_unk)
    total = int(offs[-1])
    if total == 0:
        return []
    rows = []
    for op, A, B in zip(operator_specs(U.group), U.blocks, V.blocks):
        s, t = op.src, op.tgt
        dus, dut, dvs, dvt = U.dims[s], U.dims[t], V.dims[s], V.dims[t]
        if dvt == 0 or dus == 0:
            continue
        # X_t A - B X_s = 0, a dvt x dus system
        R = np.zeros((dvt * dus, total), dtype=np.int64)
        if dut:
            R[:, offs[t]:offs[t + 1]] += np.kron(np.eye(dvt, dtype=np.int64), A.T)
        if dvs:
            R[:, offs[s]:offs[s + 1]] -= np.kron(B, np.eye(dus, dtype=np.int64))
        rows.append(R % p)
    if not rows:
        N = np.eye(total, dtype=np.int64)
    else:
        N = modp.nullspace(np.vstack(rows), p)
    out = []
    for v in N:
        out.append([v[offs[i]:offs[i + 1]].reshape(V.dims[i], U.dims[i]) for i in range(len(U.dims))])
    return out


def graded_composition_factors(U: GradedFp) -> list[GradedFp]:
    if U.dim == 0:
        return []
    F = U.full_module()
    S = find_submodule(F)
    if S is None:
        return [U]
    return graded_composition_factors(U.restrict_to(S)) + graded_composition_factors(U.quotient_by(S))


@dataclass
class SimpleFunctor:
    label: TSLabel
    module: GradedFp
    end_dim: int


_SIMPLE_CACHE: dict = {}


def simple_tmack_functors(G: PermGroup, p: int) -> list[SimpleFunctor]:
    """Simple Tate Mackey functors over F_p, labelled by (vertex, simple index).

    They are the composition factors of Ĥ^0(Z[G/H]) / p over nontrivial
    p-subgroups H.  A simple S is labelled by the class of its minimal
    subgroups H and by S(H) as an F_p[N_G(H)/H]-module.
    """
    key = (id(G), p)
    hit = _SIMPLE_CACHE.get(key)
    if hit is not None and hit[0] is G:
        return hit[1]
    subs = subgroup_list(G)
    found: dict[TSLabel, SimpleFunctor] = {}
    for c in p_subgroup_classes(G, p):
        if c.is_trivial:
            continue
        N = hat0_tmack(GSetSpec(G, (c,)))
        for S in graded_composition_factors(reduce_mod_p(N, p)):
            lab = _label_simple(S, p)
            if lab not in found:
                found[lab] = SimpleFunctor(lab, S, len(graded_hom(S, S)))
    out = [found[k] for k in sorted(found, key=lambda l: l.sort_key())]
    _SIMPLE_CACHE[key] = (G, out)
    return out


def _label_simple(S: GradedFp, p: int) -> TSLabel:
    G = S.group
    subs = subgroup_list(G)
    supp = S.support()
    m = min(subs[i].order for i in supp)
    H0 = subs[[i for i in supp if subs[i].order == m][0]]
    c = class_of(G, H0)
    H = canon(G, c.representative)
    hi = subs.index(H)
    Nz = normalizer(G, H)
    Q = quotient_as_perm_group(Nz, H)
    acts = []
    for n in Nz.generators:
        M, tgt = S.conj_block(n, hi)
        assert tgt == hi
        acts.append(M)
    V = FpModule(Q.group, p, acts, dim=S.dims[hi])
    simples = simple_fp_modules(Q.group, p)
    for i, W in enumerate(simples):
        if W.dim == V.dim and hom_space(V, W):
            return TSLabel(p, c.label, i + 1)
    raise RuntimeError(f"simple functor at {c.label} not matched")


def head_multiplicities(N: TMackModule, p: int) -> MultiplicityVector:
    U = reduce_mod_p(N, p)
    out = {}
    if U.dim == 0:
        return MultiplicityVector()
    for S in simple_tmack_functors(N.group, p):
        h = len(graded_hom(U, S.module))
        if h % S.end_dim:
            raise RuntimeError("Hom dimension not divisible by End dimension")
        out[S.label] = h // S.end_dim
    return MultiplicityVector(out)


def projective_cover_vector(N: TMackModule, catalog=None) -> MultiplicityVector:
    """Multiplicities of the projectives Ĥ^0(T_{H,V}) in a projective cover of N."""
    out = MultiplicityVector()
    for p in prime_factors(N.group.order):
        out = out + head_multiplicities(N, p)
    if catalog is not None:
        known = set(catalog.labels())
        for k in out:
            if k not in known:
                raise RuntimeError(f"head label {k} missing from the trivial source catalog")
    return out
