"""Permutation presentations Ĥ^0(X1) -> Ĥ^0(X0) -> H^1(M) -> 0.

A morphism Ĥ^0(Z[X]) -> N out of a permutation functor is fixed by one
element n_i of N(H_i) per orbit G/H_i of X: the class of the coset H_i maps
to n_i, and the L-orbit sum over L g H_i maps to [L g H_i] n_i.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import exact_linalg as xl
from .exact_linalg import FinAbGroup, FinAbMap
from .g_lattices import GLattice, GSetSpec, LatticeMap, perm_hom_basis, perm_lattice
from .perm_groups import PermGroup, Subgroup, SubgroupClass, double_cosets, subgroup_classes
from .resolutions import RationalityVerdict, retract_rational
from .tate_cohomology import MackeyDatum, canonical_subgroups
from .tmack import DatumModule, SubModule, TMackModule, h1_tmack, hat0_tmack, projective_cover_vector
from .trivial_source import MultiplicityVector, TrivialSourceCatalog, multiplicity_table, ts_catalog

MAX_SEARCH = 200000


class RefusalError(Exception):
    """Input outside the scope of the construction (with a certificate)."""

    def __init__(self, message: str, verdict: RationalityVerdict | None = None):
        super().__init__(message)
        self.verdict = verdict


class PresentationError(RuntimeError):
    pass


# ---------------------------------------------- maps out of Ĥ^0(Z[X])

class PermMorphisms:
    """Linear description of morphisms Ĥ^0(Z[X]) -> N.

    ``basic(L, i, b)`` is the map at L obtained by sending the orbit-i
    generator to the b-th canonical generator of N(H_i).
    """

    def __init__(self, N: TMackModule, X: GSetSpec, P: GLattice | None = None):
        self.N = N
        self.X = X
        self.P = P if P is not None else perm_lattice(X.group, X)
        self.src = hat0_tmack(self.P)
        self.group = X.group
        self._basic: dict = {}

    def source_value(self, L: Subgroup) -> FinAbGroup:
        return self.src.value(L)

    def _orbit_image_vectors(self, L: Subgroup, i: int, n: Sequence[int]):
        """Images of the L-orbit sums meeting orbit i, keyed by coset index."""
        G = self.group
        pb = self.P.perm
        H = pb.subgroups[i]
        out = {}
        for dc in double_cosets(G, L, H):
            img = self.N.symbol_map(L, dc.rep, H)(n)
            out[pb.index(i, dc.rep)] = img
        return out

    def basic(self, L: Subgroup, i: int, b: int) -> FinAbMap:
        key = (L.elements, i, b)
        if key not in self._basic:
            H = self.P.perm.subgroups[i]
            NH = self.N.value(H)
            n = [int(k == b) for k in range(NH.rank)]
            imgs = self._orbit_image_vectors(L, i, n)
            src = self.source_value(L)
            tgt = self.N.value(L)
            cols = []
            for v in src.generator_lift:
                acc = [0] * tgt.rank
                for pos, img in imgs.items():
                    c = v[pos]
                    if c:
                        acc = [a + c * x for a, x in zip(acc, img)]
                cols.append(tgt.reduce(acc))
            self._basic[key] = xl.map_from_images(src, tgt, cols)
        return self._basic[key]

    def map_at(self, L: Subgroup, choice: Sequence[Sequence[int]]) -> FinAbMap:
        src, tgt = self.source_value(L), self.N.value(L)
        M = xl.zeros(tgt.rank, src.rank)
        for i, n in enumerate(choice):
            for b, c in enumerate(n):
                if c:
                    for row, brow in zip(M, self.basic(L, i, b).matrix):
                        for k, x in enumerate(brow):
                            if x:
                                row[k] += c * x
        return FinAbMap(src, tgt, M)

    def choices(self) -> list[list[tuple[int, ...]]]:
        return [list(self.N.value(H).elements()) for H in self.P.perm.subgroups]


def _image_orders(pm: PermMorphisms, choice) -> list[int]:
    return [pm.map_at(L, choice).image_order() for L in pm.N.subgroups]


def _surjective(pm: PermMorphisms, choice, order: Sequence[Subgroup]) -> bool:
    for L in order:
        if not pm.map_at(L, choice).is_surjective():
            return False
    return True


def find_surjection(N: TMackModule, X: GSetSpec, P: GLattice | None = None, extra=None,
                    greedy: bool = False) -> tuple[PermMorphisms, list[tuple[int, ...]]] | None:
    """First choice (lexicographic in the orbit values) giving a surjection.

    ``extra(choice) -> bool`` adds a further acceptance test.  With
    ``greedy=True`` orbits are fixed one at a time, each maximizing the
    total image size; exhaustive search is the fallback.
    """
    pm = PermMorphisms(N, X, P)
    order = sorted(N.subgroups, key=lambda L: -N.value(L).order)
    order = [L for L in order if not N.value(L).is_trivial()]
    opts = pm.choices()
    if greedy and opts:
        choice = [opts[i][0] for i in range(len(opts))]
        for i in range(len(opts)):
            best, best_val = None, -1
            for cand in opts[i]:
                trial = list(choice)
                trial[i] = cand
                val = 1
                for s in _image_orders(pm, trial):
                    val *= s
                if val > best_val:
                    best, best_val = cand, val
            choice[i] = best
        if _surjective(pm, choice, order) and (extra is None or extra(choice)):
            return pm, choice
    count = 0
    for choice in itertools.product(*opts):
        count += 1
        if count > MAX_SEARCH:
            break
        if _surjective(pm, choice, order) and (extra is None or extra(choice)):
            return pm, list(choice)
    return None


def kernel_module(pm: PermMorphisms, choice) -> SubModule:
    vals = {}
    for L in pm.N.subgroups:
        vals[L.elements] = pm.map_at(L, choice).kernel()
    return SubModule(pm.src, vals, label="ker")


# ----------------------------------------------------------- Betti vectors

@dataclass
class BettiResult:
    beta0: MultiplicityVector
    beta1: MultiplicityVector
    witness_X0: GSetSpec | None
    kernel_vector: MultiplicityVector
    verdict: RationalityVerdict


def _alpha(X: GSetSpec, table) -> MultiplicityVector:
    out = MultiplicityVector()
    for c in X.orbits:
        out = out + table[c.label]
    return out


def betti_presentation(M: GLattice, table=None, check_rationality: bool = True) -> BettiResult:
    """beta0 = cover of H^1(M); beta1 via any permutation presentation."""
    G = M.group
    verdict = retract_rational(M) if check_rationality else None
    if verdict is not None and not verdict.retract_rational:
        raise RefusalError("lattice is not retract rational: " + verdict.predicate.summary(), verdict)
    table = table if table is not None else multiplicity_table(G)
    N = h1_tmack(M)
    beta0 = projective_cover_vector(N)
    if not beta0:
        return BettiResult(beta0, MultiplicityVector(), GSetSpec(G, ()), MultiplicityVector(), verdict)
    for X0, _ in enumerate_minimal_presentations(beta0, None, table, G):
        found = find_surjection(N, X0)
        if found is None:
            continue
        pm, choice = found
        K = kernel_module(pm, choice)
        kv = projective_cover_vector(K)
        alpha0 = _alpha(X0, table)
        beta1 = kv - (alpha0 - beta0)
        if not beta1.is_nonnegative():
            raise PresentationError("negative first Betti number; inconsistent data")
        return BettiResult(beta0, beta1, X0, kv, verdict)
    raise PresentationError("no surjection from any minimal X0")


# -------------------------------------------------------------- enumeration

def alternating_sums_admissible(alphas: Sequence[MultiplicityVector], betas: Sequence[MultiplicityVector]) -> bool:
    """For every d: sum_{i<=d} (-1)^(d-i) (alpha_i - beta_i) >= 0 componentwise."""
    acc = MultiplicityVector()
    for a, b in zip(alphas, betas):
        diff = a - b
        # acc_d = diff_d - acc_{d-1}
        acc = diff - acc
        if not acc.is_nonnegative():
            return False
    return True


def _multisets(types: Sequence[SubgroupClass], max_size: int) -> Iterable[tuple[SubgroupClass, ...]]:
    for k in range(0, max_size + 1):
        yield from itertools.combinations_with_replacement(types, k)


def _minimal_covers(target: MultiplicityVector, rows: dict, types: list[SubgroupClass],
                    max_size: int) -> list[tuple[SubgroupClass, ...]]:
    """Multisets X with mult(X) >= target from which no orbit can be deleted."""
    useful = [c for c in types if any(target.get(k, 0) and v for k, v in rows[c.label].items())]
    out = []
    for combo in _multisets(useful, max_size):
        tot = MultiplicityVector()
        for c in combo:
            tot = tot + rows[c.label]
        if not tot >= target:
            continue
        minimal = True
        for k in range(len(combo)):
            rest = MultiplicityVector()
            for j, c in enumerate(combo):
                if j != k:
                    rest = rest + rows[c.label]
            if rest >= target:
                minimal = False
                break
        if minimal:
            out.append(combo)
    return out


def enumerate_minimal_presentations(beta0: MultiplicityVector, beta1: MultiplicityVector | None,
                                    table: dict, G: PermGroup) -> list[tuple[GSetSpec, GSetSpec | None]]:
    """Minimal admissible (X0, X1) pairs.

    X0 is minimal when mult(X0) >= beta0 and no orbit can be deleted.  For
    each X0 the X1 returned have mult(X1) >= beta1 + (mult(X0) - beta0),
    no deletable orbit, and the least total multiplicity among those; ties
    are all listed.  With ``beta1=None`` only X0 is enumerated.
    """
    types = list(subgroup_classes(G))
    if not beta0:
        return [(GSetSpec(G, ()), GSetSpec(G, ()))] if beta1 is not None and not beta1 else \
               [(GSetSpec(G, ()), None if beta1 is None else GSetSpec(G, ()))]
    bound0 = sum(beta0.values())
    out = []
    for combo in _minimal_covers(beta0, table, types, bound0):
        X0 = GSetSpec(G, combo)
        if beta1 is None:
            out.append((X0, None))
            continue
        for X1 in minimal_x1(X0, beta0, beta1, table):
            out.append((X0, X1))
    return out


def minimal_x1(X0: GSetSpec, beta0: MultiplicityVector, beta1: MultiplicityVector, table: dict) -> list[GSetSpec]:
    G = X0.group
    gamma = beta1 + (_alpha(X0, table) - beta0)
    if not gamma:
        return [GSetSpec(G, ())]
    cands = _minimal_covers(gamma, table, list(subgroup_classes(G)), sum(gamma.values()))
    if not cands:
        return []
    weight = lambda combo: sum(sum(table[c.label].values()) for c in combo)
    best = min(weight(c) for c in cands)
    return [GSetSpec(G, c) for c in cands if weight(c) == best]


def admissible_x0(beta0: MultiplicityVector, table: dict, G: PermGroup, max_orbits: int) -> list[GSetSpec]:
    """Every X0 with at most ``max_orbits`` orbits and mult(X0) >= beta0."""
    out = []
    for combo in _multisets(list(subgroup_classes(G)), max_orbits):
        if _alpha(GSetSpec(G, combo), table) >= beta0:
            out.append(GSetSpec(G, combo))
    return out


# ----------------------------------------------------------- realization

@dataclass
class SubgroupCertificate:
    subgroup: Subgroup
    source_order: int
    middle_order: int
    target_order: int
    epsilon_surjective: bool
    composite_zero: bool
    image_order: int
    kernel_order: int

    @property
    def exact(self) -> bool:
        return (self.epsilon_surjective and self.composite_zero
                and self.image_order == self.kernel_order)


@dataclass
class PresentationSpec:
    M: GLattice
    X0: GSetSpec
    X1: GSetSpec
    psi: LatticeMap
    epsilon_choice: list[tuple[int, ...]]
    epsilon: dict = field(default_factory=dict)
    certificate: list[SubgroupCertificate] = field(default_factory=list)
    alpha0: MultiplicityVector = field(default_factory=MultiplicityVector)
    alpha1: MultiplicityVector = field(default_factory=MultiplicityVector)
    kernel_vector: MultiplicityVector = field(default_factory=MultiplicityVector)

    @property
    def certified(self) -> bool:
        return all(c.exact for c in self.certificate)

    def psi_terms(self) -> list[tuple[int, object, int]]:
        """psi in the double-coset basis: (coefficient, basis tag, index)."""
        return expand_in_double_cosets(self.psi)


def expand_in_double_cosets(psi: LatticeMap) -> list[tuple[int, object, int]]:
    """Coefficients of a map of permutation lattices in the double-coset basis."""
    X1, X0 = psi.source, psi.target
    out = []
    for k, f in enumerate(perm_hom_basis(X1, X0)):
        j, i, dc = f.tag
        col = X1.perm.offsets[j]  # the coset of the identity in orbit j
        c = psi.matrix[X0.perm.index(i, dc.rep)][col]
        if c:
            out.append((c, f.tag, k))
    return out


@dataclass(frozen=True)
class PsiTerm:
    """coefficient * (double coset K' g H') for subgroups K' of an X1 orbit, H' of an X0 orbit."""

    source: Subgroup
    target: Subgroup
    g: int
    coefficient: int = 1
    source_orbit: int | None = None
    target_orbit: int | None = None


def _conjugator(G: PermGroup, rep: Subgroup, H: Subgroup) -> int:
    for a in range(G.order):
        if rep.conjugate(a) == H:
            return a
    raise PresentationError(f"{H!r} is not conjugate to {rep!r}")


def psi_from_terms(X1: GSetSpec, X0: GSetSpec, terms: Sequence[PsiTerm]) -> LatticeMap:
    """Assemble psi: Z[X1] -> Z[X0] from double-coset terms on arbitrary class members.

    With K' = a K a^-1 and H' = b H b^-1 for the orbit representatives K, H,
    the term for K' g H' is the basis element of K (a^-1 g b) H.
    """
    G = X1.group
    P1, P0 = perm_lattice(G, X1), perm_lattice(G, X0)
    M = xl.zeros(P0.rank, P1.rank)
    basis = perm_hom_basis(P1, P0)
    for t in terms:
        j = t.source_orbit if t.source_orbit is not None else _orbit_of(X1, t.source)
        i = t.target_orbit if t.target_orbit is not None else _orbit_of(X0, t.target)
        K, H = P1.perm.subgroups[j], P0.perm.subgroups[i]
        a, b = _conjugator(G, K, t.source), _conjugator(G, H, t.target)
        x = G.mul[G.mul[G.inv[a]][t.g]][b]
        hits = [f for f in basis if f.tag[0] == j and f.tag[1] == i and x in f.tag[2].elements]
        assert len(hits) == 1
        for r in range(P0.rank):
            for c in range(P1.rank):
                M[r][c] += t.coefficient * hits[0].matrix[r][c]
    return LatticeMap(P1, P0, M)


def _orbit_of(X: GSetSpec, H: Subgroup) -> int:
    for i, c in enumerate(X.orbits):
        if H in c:
            return i
    raise PresentationError(f"no orbit of {X!r} has stabilizer class containing {H!r}")


def _psi_from_choice(X1P: GLattice, X0P: GLattice, hat0_X0: TMackModule, K: TMackModule,
                     choice) -> LatticeMap:
    G = X1P.group
    pb1 = X1P.perm
    M = xl.zeros(X0P.rank, X1P.rank)
    for j, H in enumerate(pb1.subgroups):
        k_vec = K.value(H).lift(choice[j]) if K is not None else choice[j]
        w = hat0_X0.value(H).lift(k_vec)
        for pos, g in enumerate(pb1.coset_reps[j]):
            col = X0P.act(g, w)
            for a in range(X0P.rank):
                M[a][pb1.offsets[j] + pos] = col[a]
    return LatticeMap(X1P, X0P, M)


def certify(M: GLattice, X0: GSetSpec, X1: GSetSpec, psi_matrix, epsilon_choice,
            P0: GLattice | None = None, P1: GLattice | None = None):
    """Per-subgroup exactness of Ĥ^0(X1) -> Ĥ^0(X0) -> H^1(M) -> 0, from scratch."""
    G = M.group
    P0 = P0 if P0 is not None else perm_lattice(G, X0)
    P1 = P1 if P1 is not None else perm_lattice(G, X1)
    N = h1_tmack(M)
    pm = PermMorphisms(N, X0, P0)
    d0, d1 = MackeyDatum(P0, 0), MackeyDatum(P1, 0)
    certs, eps = [], {}
    for L in N.subgroups:
        A, B, C = d1.value(L), d0.value(L), N.value(L)
        e = pm.map_at(L, epsilon_choice)
        ps = xl.induced_map(psi_matrix if psi_matrix else xl.zeros(P0.rank, P1.rank), A, B)
        comp = e.compose(ps)
        certs.append(SubgroupCertificate(L, A.order, B.order, C.order, e.is_surjective(), comp.is_zero(),
                                         ps.image_order(), B.order // C.order if e.is_surjective() else -1))
        eps[L.elements] = e
    return certs, eps


def realize_presentation(M: GLattice, X0: GSetSpec, X1: GSetSpec, psi: LatticeMap | None = None,
                         table: dict | None = None) -> PresentationSpec:
    """Build (or, with ``psi`` given, complete) a certified presentation."""
    G = M.group
    table = table if table is not None else multiplicity_table(G)
    P0, P1 = perm_lattice(G, X0), perm_lattice(G, X1)
    N = h1_tmack(M)
    if psi is not None:
        psi_M = psi.matrix

        def exact_with(choice):
            certs, _ = certify(M, X0, X1, psi_M, choice, P0, P1)
            return all(c.exact for c in certs)

        found = find_surjection(N, X0, P0, extra=exact_with)
        if found is None:
            raise PresentationError("no epsilon makes the given psi exact")
        pm, choice = found
        K = kernel_module(pm, choice)
        psi_map = LatticeMap(P1, P0, psi_M)
    else:
        found = find_surjection(N, X0, P0)
        if found is None:
            raise PresentationError(f"no surjection Ĥ^0({X0!r}) -> H^1(M)")
        pm, choice = found
        K = kernel_module(pm, choice)
        got = find_surjection(K, X1, P1, greedy=True)
        if got is None:
            raise PresentationError(f"Ĥ^0({X1!r}) does not cover the kernel")
        _, kchoice = got
        psi_map = _psi_from_choice(P1, P0, pm.src, K, kchoice)
    certs, eps = certify(M, X0, X1, psi_map.matrix, choice, P0, P1)
    spec = PresentationSpec(M, X0, X1, psi_map, list(choice), eps, certs,
                            _alpha(X0, table), _alpha(X1, table), projective_cover_vector(K))
    if not spec.certified:
        bad = [c.subgroup for c in certs if not c.exact]
        raise PresentationError(f"presentation not exact at {len(bad)} subgroups")
    return spec


@dataclass
class ExactnessReport:
    ok: bool
    failures: list[str]
    checked: int


def verify_exactness(spec: PresentationSpec) -> ExactnessReport:
    """Recompute psi_* and epsilon at every subgroup and check exactness."""
    certs, _ = certify(spec.M, spec.X0, spec.X1, spec.psi.matrix, spec.epsilon_choice)
    G = spec.M.group
    fails = []
    for c in certs:
        if not c.exact:
            H = c.subgroup
            name = "<" + ",".join(G.word(x) for x in H.generators) + ">" if H.generators else "1"
            why = []
            if not c.epsilon_surjective:
                why.append("epsilon not surjective")
            if not c.composite_zero:
                why.append("epsilon o psi != 0")
            if c.image_order != c.kernel_order:
                why.append(f"|im psi| = {c.image_order} but |ker epsilon| = {c.kernel_order}")
            fails.append(f"subgroup {name}: " + "; ".join(why))
    return ExactnessReport(not fails, fails, len(certs))
