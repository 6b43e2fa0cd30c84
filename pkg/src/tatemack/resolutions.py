"""Flasque and coflasque resolutions, invertibility, retract rationality."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exact_linalg as xl
from .g_lattices import (GLattice, GSetSpec, LatticeMap, dual, fixed_sublattice, hom_basis,
                         perm_lattice, sublattice)
from .perm_groups import SubgroupClass, double_cosets, left_cosets, subgroup_classes
from .tate_cohomology import tate_value


@dataclass
class PredicateResult:
    holds: bool
    which: str
    failing_class: SubgroupClass | None = None
    failing_group: xl.FinAbGroup | None = None
    section: list[list[int]] | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.holds

    def summary(self) -> str:
        if self.holds:
            return f"{self.which}: true"
        if self.failing_class is not None:
            return (f"{self.which}: false (subgroup {self.failing_class.label}, "
                    f"group {self.failing_group!r})")
        return f"{self.which}: false ({self.detail})"


@dataclass
class ExactnessCertificate:
    left_injective: bool
    right_surjective: bool
    composite_zero: bool
    middle_exact: bool

    @property
    def ok(self) -> bool:
        return self.left_injective and self.right_surjective and self.composite_zero and self.middle_exact


@dataclass
class Resolution:
    """A short exact sequence ``0 -> A -> B -> C -> 0`` of G-lattices."""

    kind: str
    terms: tuple[GLattice, GLattice, GLattice]
    maps: tuple[LatticeMap, LatticeMap]
    perm_spec: GSetSpec | None = None
    witnesses: dict = field(default_factory=dict)

    def certificate(self) -> ExactnessCertificate:
        return certify_short_exact(*self.maps)


def _unit_snf(M: list[list[int]], rows: int, cols: int) -> tuple[int, bool]:
    """(rank, all nonzero invariant factors equal 1)."""
    if rows == 0 or cols == 0:
        return 0, True
    _, D, _ = xl.smith_normal_form(M)
    d = [x for x in xl.diagonal(D) if x]
    return len(d), all(x == 1 for x in d)


def certify_short_exact(f: LatticeMap, g: LatticeMap) -> ExactnessCertificate:
    A, B, C = f.source, f.target, g.target
    rf, unit_f = _unit_snf(f.matrix, B.rank, A.rank)
    rg, unit_g = _unit_snf(g.matrix, C.rank, B.rank)
    comp = g.compose(f).matrix
    zero = not any(any(r) for r in comp)
    return ExactnessCertificate(
        left_injective=rf == A.rank,
        right_surjective=rg == C.rank and unit_g,
        composite_zero=zero,
        # im f is saturated of rank rank(B) - rank(C), hence equals ker g
        middle_exact=zero and unit_f and rf + rg == B.rank,
    )


def lattice_predicate(L: GLattice, which: str) -> PredicateResult:
    """Test ``flasque``, ``coflasque`` or ``invertible``."""
    if which in ("flasque", "coflasque"):
        deg = -1 if which == "flasque" else 1
        if L.is_permutation:
            return PredicateResult(True, which)
        for c in subgroup_classes(L.group):
            T = tate_value(c.representative, L, deg).group
            if not T.is_trivial():
                return PredicateResult(False, which, c, T)
        return PredicateResult(True, which)
    if which == "invertible":
        if L.is_permutation:
            return PredicateResult(True, which, section=xl.identity(L.rank))
        for w in ("coflasque", "flasque"):
            r = lattice_predicate(L, w)
            if not r:
                return PredicateResult(False, which, r.failing_class, r.failing_group,
                                       detail=f"not {w}")
        res = coflasque_res_first(L)
        s = find_section(res.maps[1])
        if s is None:
            return PredicateResult(False, which, detail="first-type coflasque resolution does not split")
        return PredicateResult(True, which, section=s)
    raise ValueError(f"unknown predicate {which!r}")


def find_section(pi: LatticeMap) -> list[list[int]] | None:
    """An equivariant s with pi o s = id, or None."""
    P, L = pi.source, pi.target
    if L.rank == 0:
        return []
    basis = hom_basis(L, P)
    if not basis:
        return None
    comps = [pi.compose(f).matrix for f in basis]
    A = [[c[a][b] for c in comps] for a in range(L.rank) for b in range(L.rank)]
    rhs = [int(a == b) for a in range(L.rank) for b in range(L.rank)]
    x = xl.solve_integer(A, rhs, len(basis))
    if x is None:
        return None
    S = xl.zeros(P.rank, L.rank)
    for coef, f in zip(x, basis):
        if coef:
            for i in range(P.rank):
                for j in range(L.rank):
                    S[i][j] += coef * f.matrix[i][j]
    return S


def _orbit_sum_images(L: GLattice, H, K, v) -> list[list[int]]:
    """Images in L^H of the H-orbit sums of Z[G/K] under e_K -> v."""
    G = L.group
    out = []
    for dc in double_cosets(G, H, K):
        g = dc.rep
        gv = L.act(g, v)
        seen = set()
        acc = [0] * L.rank
        for h in H.elements:
            c = frozenset(G.mul[G.mul[h][g]][k] for k in K.elements)
            if c in seen:
                continue
            seen.add(c)
            acc = [a + b for a, b in zip(acc, L.act(h, gv))]
        out.append(acc)
    return out


def coflasque_res_first(L: GLattice) -> Resolution:
    """``0 -> C -> P -> L -> 0`` with P permutation and C coflasque.

    Orbit types are added greedily, largest stabilizers first: for each
    class representative H, enough copies of Z[G/H] are added to make
    P^H -> L^H surjective.
    """
    G = L.group
    chosen: list[tuple[SubgroupClass, list[int]]] = []
    for c in sorted(subgroup_classes(G), key=lambda c: (-c.order, c.order_key)):
        H = c.representative
        F = fixed_sublattice(H, L)
        if not F:
            continue
        imgs = []
        for c2, v in chosen:
            imgs.extend(_orbit_sum_images(L, H, c2.representative, v))
        coords = xl.SublatticeCoords(F, L.rank)
        f = len(F)
        A = xl.from_columns([coords.coords(x) for x in imgs], f) if imgs else [[] for _ in range(f)]
        if imgs:
            U, D, V, Ui, Vi = xl.smith_normal_form(A, with_inverses=True)
            diag = xl.diagonal(D)
        else:
            Ui, diag = xl.identity(f), []
        diag = diag + [0] * (f - len(diag))
        for i, d in enumerate(diag):
            if d != 1:
                gen = coords.vector([Ui[k][i] for k in range(f)])
                chosen.append((c, gen))
    spec = GSetSpec(G, tuple(c for c, _ in chosen))
    P = perm_lattice(G, spec)
    pb = P.perm
    pi = xl.zeros(L.rank, P.rank)
    for i, (_, v) in enumerate(chosen):
        for pos, g in enumerate(pb.coset_reps[i]):
            col = L.act(g, v)
            for a in range(L.rank):
                pi[a][pb.offsets[i] + pos] = col[a]
    Cb = xl.kernel_basis(pi, P.rank) if L.rank else xl.identity_columns(P.rank)
    C = sublattice(P, Cb, name="C")
    inc = LatticeMap(C, P, xl.from_columns(Cb, P.rank) if Cb else xl.zeros(P.rank, 0))
    proj = LatticeMap(P, L, pi)
    return Resolution("coflasque1", (C, P, L), (inc, proj), perm_spec=spec)


def flasque_res_first(L: GLattice) -> Resolution:
    """``0 -> L -> P -> F -> 0`` by dualizing a coflasque resolution of L^v."""
    R = coflasque_res_first(dual(L))
    C, P, _ = R.terms
    inc, proj = R.maps
    F = dual(C)
    # P is a permutation lattice; its dual has the same matrices
    left = LatticeMap(L, P, xl.transpose(proj.matrix, L.rank) if proj.matrix else xl.zeros(P.rank, L.rank))
    right = LatticeMap(P, F, xl.transpose(inc.matrix, C.rank) if inc.matrix and inc.matrix[0] else xl.zeros(F.rank, P.rank))
    return Resolution("flasque1", (L, P, F), (left, right), perm_spec=R.perm_spec)


def coflasque_res_second(L: GLattice) -> Resolution:
    """``0 -> L -> C -> Q -> 0`` with Q permutation and C coflasque (pullback)."""
    Rf = flasque_res_first(L)
    _, P, F = Rf.terms
    j, q = Rf.maps
    Rc = coflasque_res_first(F)
    B, Q, _ = Rc.terms
    r = Rc.maps[1]
    n = P.rank + Q.rank
    # C = ker [q | -r] inside P + Q
    big = [list(q.matrix[a]) + [-x for x in r.matrix[a]] for a in range(F.rank)]
    Cb = xl.kernel_basis(big, n) if F.rank else xl.identity_columns(n)
    from .g_lattices import direct_sum
    PQ = direct_sum(P, Q)
    C = sublattice(PQ, Cb, name="C")
    coords = xl.SublatticeCoords(Cb, n)
    left_cols = [coords.coords(list(col) + [0] * Q.rank) for col in xl.columns(j.matrix, L.rank)]
    left = LatticeMap(L, C, xl.from_columns(left_cols, C.rank) if left_cols else xl.zeros(C.rank, 0))
    right_cols = [v[P.rank:] for v in Cb]
    right = LatticeMap(C, Q, xl.from_columns(right_cols, Q.rank) if right_cols else xl.zeros(Q.rank, 0))
    return Resolution("coflasque2", (L, C, Q), (left, right), perm_spec=Rc.perm_spec,
                      witnesses={"B": B, "P": P, "F": F, "flasque": Rf, "coflasque": Rc})


@dataclass
class RationalityVerdict:
    retract_rational: bool
    resolution: Resolution
    predicate: PredicateResult

    def __bool__(self) -> bool:
        return self.retract_rational


def retract_rational(M: GLattice) -> RationalityVerdict:
    R = coflasque_res_second(M)
    C = R.terms[1]
    p = lattice_predicate(C, "invertible")
    return RationalityVerdict(bool(p), R, p)
