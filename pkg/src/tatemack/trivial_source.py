"""Trivial source modules: vertices, Brauer quotients, catalog, multiplicities."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import modp
from .fp_modules import (FpModule, MeatAxeError, composition_factors, distinct_simples,
                         fp_module_from_lattice, hom_space, is_isomorphic_indecomposable,
                         split_indecomposables)
from .g_lattices import GSetSpec, perm_lattice
from .perm_groups import (PermGroup, Quotient, Subgroup, SubgroupClass, class_of, left_cosets,
                          maximal_subgroups, normalizer, p_subgroup_classes, prime_factors,
                          quotient_as_perm_group, subgroup_classes)


@dataclass(frozen=True)
class TSLabel:
    """Trivial source module T_{H,V}: vertex class H, V the simple of given index."""

    p: int
    vertex: str
    index: int

    def __str__(self) -> str:
        return f"({self.vertex},{self.index})"

    def sort_key(self):
        o, k = (int(x) for x in self.vertex.split("."))
        return (o, k, self.index, self.p)


def relative_trace(U: FpModule, Q: Subgroup, K: Subgroup, phi: np.ndarray) -> np.ndarray:
    """tr_Q^K(phi) = sum over t in K/Q of t phi t^-1."""
    G, p = U.group, U.p
    out = np.zeros_like(phi)
    seen: set[int] = set()
    for t in K.elements:
        if t in seen:
            continue
        seen.update(G.mul[t][q] for q in Q.elements)
        out = (out + U.matrix(t) @ phi % p @ U.matrix(G.inv[t])) % p
    return out


def is_relatively_projective(U: FpModule, Q: Subgroup) -> np.ndarray | None:
    """Higman's criterion: an endomorphism over Q whose trace to G is the identity."""
    G, p, n = U.group, U.p, U.dim
    E = hom_space(U, U, gens=Q.generators) if Q.generators else None
    if E is None:
        E = [e.reshape(n, n) for e in np.eye(n * n, dtype=np.int64)]
    if not E:
        return None
    whole = G.whole
    traces = [relative_trace(U, Q, whole, phi) for phi in E]
    A = np.array([t.reshape(-1) for t in traces]).T % p
    x = modp.solve(A, np.eye(n, dtype=np.int64).reshape(-1), p)
    if x is None:
        return None
    wit = np.zeros((n, n), dtype=np.int64)
    for c, phi in zip(x, E):
        wit = (wit + int(c) * phi) % p
    return wit


def vertex(U: FpModule) -> tuple[SubgroupClass, np.ndarray]:
    """Minimal p-subgroup class relative to which U is projective, with witness."""
    for c in p_subgroup_classes(U.group, U.p):
        w = is_relatively_projective(U, c.representative)
        if w is not None:
            return c, w
    raise MeatAxeError("no vertex found; module is not indecomposable?")


@dataclass
class BrauerQuotient:
    module: FpModule
    quotient: Quotient


def brauer_quotient(U: FpModule, H: Subgroup) -> BrauerQuotient:
    """U[H] = U^H / sum of tr_Q^H(U^Q) over maximal Q < H, as an N_G(H)/H-module."""
    G, p = U.group, U.p
    N = normalizer(G, H)
    Q = quotient_as_perm_group(N, H)
    F = U.fixed_space(H.elements) if U.dim else np.zeros((0, 0), dtype=np.int64)
    k = F.shape[0]
    if k == 0:
        return BrauerQuotient(FpModule(Q.group, p, [np.zeros((0, 0), dtype=np.int64)] * len(Q.group.gen_index),
                                       dim=0, check=False), Q)
    traces = []
    for Qs in maximal_subgroups(G, H):
        for v in U.fixed_space(Qs.elements):
            acc = np.zeros(U.dim, dtype=np.int64)
            seen: set[int] = set()
            for t in H.elements:
                if t in seen:
                    continue
                seen.update(G.mul[t][q] for q in Qs.elements)
                acc = (acc + U.matrix(t) @ v) % p
            traces.append(acc)
    # coordinates w.r.t. the basis F of U^H
    def coords(vecs):
        X = modp.solve(F.T, np.array(vecs, dtype=np.int64).T % p, p)
        assert X is not None
        return X.T
    T = coords(traces) if traces else np.zeros((0, k), dtype=np.int64)
    T = modp.row_space(T, p) if T.shape[0] else T
    acts = [coords([(U.matrix(n) @ f) % p for f in F]).T for n in N.generators]
    if not N.generators:
        acts = [np.eye(k, dtype=np.int64)]
    full = FpModule(Q.group, p, acts, dim=k)
    mod = full.quotient(T) if T.shape[0] else full
    return BrauerQuotient(mod, Q)


def regular_module(W: PermGroup, p: int) -> FpModule:
    n = W.order
    gens = []
    for s in W.gen_index:
        M = np.zeros((n, n), dtype=np.int64)
        for x in range(n):
            M[W.mul[s][x], x] = 1
        gens.append(M)
    return FpModule(W, p, gens, dim=n)


def simple_fp_modules(W: PermGroup, p: int) -> list[FpModule]:
    """All simple F_p W-modules, ordered by (dimension, char-poly fingerprint)."""
    return distinct_simples(composition_factors(regular_module(W, p)))


@dataclass
class CatalogEntry:
    label: TSLabel
    module: FpModule
    vertex: SubgroupClass
    vertex_witness: np.ndarray
    brauer_quotient: FpModule
    simple: FpModule

    @property
    def dim(self) -> int:
        return self.module.dim


@dataclass
class TrivialSourceCatalog:
    group: PermGroup
    entries: dict[int, list[CatalogEntry]]

    def labels(self, p: int | None = None) -> list[TSLabel]:
        ps = [p] if p is not None else sorted(self.entries)
        return [e.label for q in ps for e in self.entries.get(q, [])]

    def all_entries(self) -> list[CatalogEntry]:
        return [e for p in sorted(self.entries) for e in self.entries[p]]

    def entry(self, label: TSLabel) -> CatalogEntry:
        for e in self.entries.get(label.p, []):
            if e.label == label:
                return e
        raise KeyError(str(label))

    def label_by_name(self, text: str) -> TSLabel:
        for e in self.all_entries():
            if str(e.label) == text:
                return e.label
        raise KeyError(text)

    def match(self, U: FpModule) -> TSLabel | None:
        for e in self.entries.get(U.p, []):
            if e.dim == U.dim and is_isomorphic_indecomposable(U, e.module):
                return e.label
        return None


_PERM_CACHE: dict = {}


def perm_module(G: PermGroup, c: SubgroupClass, p: int) -> FpModule:
    key = (id(G), c.label, p)
    if key not in _PERM_CACHE:
        _PERM_CACHE[key] = (G, fp_module_from_lattice(perm_lattice(G, GSetSpec(G, (c,))), p))
    return _PERM_CACHE[key][1]


_SPLIT_CACHE: dict = {}


def perm_summands(G: PermGroup, c: SubgroupClass, p: int) -> list[tuple[FpModule, int, SubgroupClass]]:
    """Indecomposable summands of F_p[G/H] with multiplicity and vertex."""
    key = (id(G), c.label, p)
    hit = _SPLIT_CACHE.get(key)
    if hit is None or hit[0] is not G:
        out = []
        for U, m in split_indecomposables(perm_module(G, c, p)):
            v, _ = vertex(U)
            out.append((U, m, v))
        hit = (G, out)
        _SPLIT_CACHE[key] = hit
    return hit[1]


_CATALOG_CACHE: dict = {}


def ts_catalog(G: PermGroup) -> TrivialSourceCatalog:
    hit = _CATALOG_CACHE.get(id(G))
    if hit is not None and hit[0] is G:
        return hit[1]
    entries: dict[int, list[CatalogEntry]] = {}
    for p in prime_factors(G.order):
        lst = []
        for c in p_subgroup_classes(G, p):
            if c.is_trivial:
                continue
            H = c.representative
            simples = None
            found: dict[int, CatalogEntry] = {}
            for U, _, vc in perm_summands(G, c, p):
                if vc.label != c.label:
                    continue
                w = is_relatively_projective(U, H)
                bq = brauer_quotient(U, H)
                if simples is None:
                    simples = simple_fp_modules(bq.quotient.group, p)
                hits = [i for i, S in enumerate(simples) if hom_space(bq.module, S)]
                if len(hits) != 1:
                    raise MeatAxeError(f"Brauer quotient of a summand of F_{p}[G/{c.label}] "
                                       f"has {len(hits)} simple heads")
                i = hits[0]
                if i in found:
                    continue
                found[i] = CatalogEntry(TSLabel(p, c.label, i + 1), U, c, w, bq.module, simples[i])
            if simples is None:
                simples = simple_fp_modules(quotient_as_perm_group(normalizer(G, H), H).group, p)
            if len(found) != len(simples):
                raise MeatAxeError(f"identified {len(found)} of {len(simples)} modules with vertex {c.label}")
            lst.extend(found[i] for i in sorted(found))
        entries[p] = lst
    cat = TrivialSourceCatalog(G, entries)
    _CATALOG_CACHE[id(G)] = (G, cat)
    return cat


class MultiplicityVector(dict):
    """TSLabel -> multiplicity, with zero entries omitted."""

    def __init__(self, data=None):
        super().__init__()
        for k, v in (data or {}).items():
            if v:
                self[k] = v

    def __add__(self, other):
        out = MultiplicityVector(self)
        for k, v in other.items():
            out[k] = out.get(k, 0) + v
            if not out[k]:
                del out[k]
        return out

    def __sub__(self, other):
        out = MultiplicityVector(self)
        for k, v in other.items():
            out[k] = out.get(k, 0) - v
            if not out[k]:
                del out[k]
        return out

    def __ge__(self, other) -> bool:
        keys = set(self) | set(other)
        return all(self.get(k, 0) >= other.get(k, 0) for k in keys)

    def __le__(self, other) -> bool:
        return MultiplicityVector(other) >= self

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.values())

    def as_strings(self) -> dict[str, int]:
        return {str(k): v for k, v in sorted(self.items(), key=lambda kv: kv[0].sort_key())}


def multiplicity_vector(X: GSetSpec, catalog: TrivialSourceCatalog) -> MultiplicityVector:
    G = X.group
    out = MultiplicityVector()
    for c in X.orbits:
        out = out + _orbit_vector(G, c, catalog)
    return out


def _orbit_vector(G: PermGroup, c: SubgroupClass, catalog: TrivialSourceCatalog) -> MultiplicityVector:
    vec = MultiplicityVector()
    for p in sorted(catalog.entries):
        for U, m, vc in perm_summands(G, c, p):
            if vc.is_trivial:
                continue
            lab = catalog.match(U)
            if lab is None:
                raise MeatAxeError(f"summand of F_{p}[G/{c.label}] of dim {U.dim} not in catalog")
            vec = vec + MultiplicityVector({lab: m})
    return vec


def multiplicity_table(G: PermGroup, catalog: TrivialSourceCatalog | None = None):
    """Rows: subgroup classes (label -> MultiplicityVector)."""
    catalog = catalog or ts_catalog(G)
    return {c.label: _orbit_vector(G, c, catalog) for c in subgroup_classes(G)}


def projective_summand_dims(G: PermGroup, c: SubgroupClass, p: int) -> int:
    return sum(U.dim * m for U, m, vc in perm_summands(G, c, p) if vc.is_trivial)
