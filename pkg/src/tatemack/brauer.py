"""Brauer-group descriptions of a certified permutation presentation.

A map psi: Z[X1] -> Z[X0] of permutation lattices is expanded in the
double-coset basis; the basis element for the orbits G/K (in X1), G/H (in
X0) and the double coset K g H becomes the word

    Cor_{K^{J'}/K^K} o conj_g o Res_{K^J/K^H},   J = H n g^-1 K g,  J' = g J g^-1,

read as a map Br(K^H) -> Br(K^K).  Identity arrows are elided.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from . import exact_linalg as xl
from .g_lattices import GSetSpec, perm_lattice
from .perm_groups import PermGroup, Subgroup, SubgroupClass, class_of, subgroup_list
from .presentations import PresentationSpec
from .tate_cohomology import MackeyDatum

SCHEMA_ID = "tatemack.describe/1"


class DescriptionError(ValueError):
    pass


@dataclass(frozen=True)
class FieldLabel:
    """The fixed field K^H of a subgroup H, with a display name."""

    subgroup: Subgroup
    cls: SubgroupClass
    name: str

    @property
    def degree(self) -> int:
        """[K^H : k] = [G : H]."""
        return self.subgroup.parent.order // self.subgroup.order

    def as_json(self) -> dict:
        G = self.subgroup.parent
        return {"name": self.name, "class": self.cls.label, "degree": self.degree,
                "subgroup": [G.word(x) for x in self.subgroup.generators]}


class FieldNamer:
    """Names fixed fields from a class-label -> name alias map.

    Unaliased classes are shown as ``K^{label}``; the trivial subgroup and
    G default to ``K`` and ``k``.  A non-representative member g H g^-1 of
    a class is shown as ``g(F)`` where F names the representative's field.
    """

    def __init__(self, G: PermGroup, aliases: dict[str, str] | None = None,
                 class_names: dict[str, str] | None = None):
        self.G = G
        self.aliases = dict(aliases or {})
        self.class_names = dict(class_names or {})
        names = list(self.aliases.values())
        if len(set(names)) != len(names):
            raise DescriptionError("field aliases must be distinct")

    def base_name(self, c: SubgroupClass) -> str:
        if c.label in self.aliases:
            return self.aliases[c.label]
        if c.is_trivial:
            return "K"
        if c.order == self.G.order:
            return "k"
        return f"K^{{{self.class_names.get(c.label, c.label)}}}"

    def label(self, H: Subgroup) -> FieldLabel:
        c = class_of(self.G, H)
        name = self.base_name(c)
        if H != c.representative:
            g = _shortest(self.G, [x for x in range(self.G.order) if c.representative.conjugate(x) == H])
            name = f"{self.G.word(g)}({name})"
        return FieldLabel(H, c, name)


def _shortest(G: PermGroup, xs: Sequence[int]) -> int:
    return min(xs, key=lambda x: (len(G.words[x]), x))


@dataclass(frozen=True)
class Arrow:
    """Res_{upper/lower}, Cor_{upper/lower} or conj_g between fixed fields.

    ``lower`` is the smaller field.  Res maps Br(lower) -> Br(upper), Cor maps
    Br(upper) -> Br(lower) and conj_g maps Br(K^J) -> Br(K^{gJg^-1}).
    """

    op: str
    upper: FieldLabel
    lower: FieldLabel
    g: int | None = None

    def source(self) -> FieldLabel:
        return self.lower if self.op == "Res" else self.upper

    def target(self) -> FieldLabel:
        if self.op == "conj":
            return self.lower
        return self.upper if self.op == "Res" else self.lower

    def apply_text(self, inner: str) -> str:
        if self.op == "conj":
            return f"conj_{{{self.upper.subgroup.parent.word(self.g)}}}({inner})"
        return f"{self.op}_{{{self.upper.name}/{self.lower.name}}}({inner})"

    def as_json(self) -> dict:
        d = {"op": self.op}
        if self.op == "conj":
            d["g"] = self.upper.subgroup.parent.word(self.g)
            d["from"] = self.upper.as_json()
            d["to"] = self.lower.as_json()
        else:
            d["upper"] = self.upper.as_json()
            d["lower"] = self.lower.as_json()
        return d


@dataclass(frozen=True)
class WordTerm:
    coefficient: int
    arrows: tuple[Arrow, ...]  # in order of application
    source: FieldLabel
    target: FieldLabel

    def apply_text(self, var: str) -> str:
        s = var
        for a in self.arrows:
            s = a.apply_text(s)
        return s


@dataclass
class BrauerWord:
    """An integer combination of arrow composites Br(source) -> Br(target)."""

    source: FieldLabel
    target: FieldLabel
    terms: list[WordTerm] = field(default_factory=list)

    def is_zero(self) -> bool:
        return not self.terms

    def apply_text(self, var: str) -> list[str]:
        return [_coef_text(t.coefficient, t.apply_text(var)) for t in self.terms]


def _coef_text(c: int, body: str) -> str:
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return f"{c}*{body}"


def arrow_semantics(G: PermGroup, K: Subgroup, H: Subgroup, g: int,
                    namer: FieldNamer | None = None) -> tuple[Arrow, ...]:
    """Arrows for the double coset K g H of a map Z[G/K] -> Z[G/H], Br(K^H) -> Br(K^K)."""
    namer = namer or FieldNamer(G)
    ginv = G.inv[g]
    J = H.intersect(K.conjugate(ginv))
    Jp = J.conjugate(g)
    out: list[Arrow] = []
    if J != H:
        out.append(Arrow("Res", namer.label(J), namer.label(H)))
    if g not in J:
        # xJ' -> xgJ is the identity exactly when g lies in J
        out.append(Arrow("conj", namer.label(J), namer.label(Jp), g))
    if Jp != K:
        out.append(Arrow("Cor", namer.label(Jp), namer.label(K)))
    return tuple(out)


def _dc_representative(G: PermGroup, dc) -> int:
    return _shortest(G, sorted(dc.elements))


# ------------------------------------------------------------ description

@dataclass
class Source:
    field: FieldLabel
    variable: str
    orbit: int


@dataclass
class Target:
    field: FieldLabel
    kind: str  # "orbit" or "augmentation"
    orbit: int


@dataclass
class BrauerDescription:
    mode: str
    group: PermGroup
    sources: list[Source]
    targets: list[Target]
    words: dict[tuple[int, int], BrauerWord]  # (target, source) -> word
    map_name: str = "Psi"
    class_names: dict[str, str] = field(default_factory=dict)

    @property
    def trivial(self) -> bool:
        return not self.sources

    def relations(self) -> list[str]:
        """One condition per target, in target order; zero rows dropped."""
        return [r for _, r in _rel_with_target(self)]

    def map_text(self) -> str:
        args = ", ".join(s.variable for s in self.sources)
        comps = []
        for t, tgt in enumerate(self.targets):
            if tgt.kind != "orbit":
                continue
            parts = []
            for s, src in enumerate(self.sources):
                w = self.words.get((t, s))
                if w is not None:
                    parts.extend(w.apply_text(src.variable))
            comps.append(_join(parts) if parts else "0")
        return f"{self.map_name}({args}) = ({', '.join(comps)})"


def _join(parts: Sequence[str]) -> str:
    s = parts[0]
    for p in parts[1:]:
        s += " - " + p[1:] if p.startswith("-") else " + " + p
    return s


def psi_to_description(spec: PresentationSpec, mode: str = "relative",
                       aliases: dict[str, str] | None = None,
                       variables: dict[str, str] | None = None,
                       class_names: dict[str, str] | None = None) -> BrauerDescription:
    """Translate psi into Brauer words.

    ``aliases`` maps subgroup class labels to field names, ``variables``
    maps X0 orbit class labels to variable names (default x1, x2, ...) and
    ``class_names`` gives display names for classes.
    In absolute mode one extra target K per X0 orbit carries Res_{K/F_i}.
    """
    if mode not in ("relative", "absolute"):
        raise DescriptionError(f"unknown mode {mode!r}")
    if not spec.certified:
        raise DescriptionError("presentation is not certified exact")
    G = spec.M.group
    namer = FieldNamer(G, aliases, class_names)
    variables = variables or {}
    P1, P0 = spec.psi.source, spec.psi.target
    sources = []
    used: set[str] = set()
    for i, H in enumerate(P0.perm.subgroups):
        c = spec.X0.orbits[i]
        var = variables.get(c.label, f"x{i + 1}")
        if var in used:
            var = f"{var}{i + 1}"
        used.add(var)
        sources.append(Source(namer.label(H), var, i))
    targets = [Target(namer.label(K), "orbit", j) for j, K in enumerate(P1.perm.subgroups)]
    words: dict[tuple[int, int], BrauerWord] = {}
    for coef, (j, i, dc), _ in spec.psi_terms():
        K, H = P1.perm.subgroups[j], P0.perm.subgroups[i]
        g = _dc_representative(G, dc)
        arrows = arrow_semantics(G, K, H, g, namer)
        w = words.setdefault((j, i), BrauerWord(sources[i].field, targets[j].field))
        w.terms.append(WordTerm(coef, arrows, sources[i].field, targets[j].field))
    if mode == "absolute":
        triv = namer.label(G.trivial)
        for i, src in enumerate(sources):
            t = len(targets)
            targets.append(Target(triv, "augmentation", i))
            H = src.field.subgroup
            arrows = (Arrow("Res", triv, src.field),) if H.order > 1 else ()
            words[(t, i)] = BrauerWord(src.field, triv, [WordTerm(1, arrows, src.field, triv)])
    return BrauerDescription(mode, G, sources, targets, words, class_names=dict(class_names or {}))


# --------------------------------------------------------------- rendering

def _algebra_text(fields: Sequence[FieldLabel]) -> str:
    return " x ".join(f.name for f in fields) if fields else "0"


def _br_product(fields: Sequence[FieldLabel]) -> str:
    if not fields:
        return "0"
    counts: dict[str, int] = {}
    order = []
    for f in fields:
        if f.name not in counts:
            order.append(f.name)
        counts[f.name] = counts.get(f.name, 0) + 1
    return " x ".join(f"Br({n})" + (f"^{counts[n]}" if counts[n] > 1 else "") for n in order)


def render_text(desc: BrauerDescription) -> str:
    if desc.trivial:
        return "H^1(k,T) = 0\n"
    lines = [f"mode: {desc.mode}"]
    lines.append("fields:")
    seen = set()
    for f in [s.field for s in desc.sources] + [t.field for t in desc.targets]:
        if f.name in seen:
            continue
        seen.add(f.name)
        cname = desc.class_names.get(f.cls.label)
        shown = f"{cname} = {f.cls.label}" if cname else f.cls.label
        lines.append(f"  {f.name}: fixed field of {shown}, degree {f.degree}")
    src = [s.field for s in desc.sources]
    orb = [t.field for t in desc.targets if t.kind == "orbit"]
    aug = [t.field for t in desc.targets if t.kind != "orbit"]
    lines.append(f"algebra of X0: {_algebra_text(src)}")
    lines.append(f"algebra of X1: {_algebra_text(orb)}")
    lines.append(f"sequence: 0 -> H^1(k,T) -> {_br_product(src)} -> {_br_product(orb + aug)}")
    lines.append(desc.map_text())
    lines.append("conditions:")
    for n, r in enumerate(ordered_conditions(desc), 1):
        lines.append(f"  ({n}) {r}")
    return "\n".join(lines) + "\n"


def _rel_with_target(desc: BrauerDescription) -> list[tuple[int, str]]:
    out = []
    for t in range(len(desc.targets)):
        parts = []
        for s, src in enumerate(desc.sources):
            w = desc.words.get((t, s))
            if w is not None:
                parts.extend(w.apply_text(src.variable))
        if parts:
            out.append((t, _join(parts) + " = 0"))
    return out


def ordered_conditions(desc: BrauerDescription) -> list[str]:
    """Augmentation conditions first, then one per orbit of X1."""
    rows = _rel_with_target(desc)
    return [r for t, r in sorted(rows, key=lambda tr: (desc.targets[tr[0]].kind == "orbit", tr[0]))]


def to_json(desc: BrauerDescription) -> dict:
    G = desc.group
    doc = {
        "schema": SCHEMA_ID,
        "mode": desc.mode,
        "group": {"order": G.order, "generators": list(G.gen_names)},
        "trivial": desc.trivial,
        "sources": [{"index": i, "variable": s.variable, "field": s.field.as_json()}
                    for i, s in enumerate(desc.sources)],
        "targets": [{"index": j, "kind": t.kind, "field": t.field.as_json()}
                    for j, t in enumerate(desc.targets)],
        "entries": [],
        "map": desc.map_text() if not desc.trivial else "",
        "conditions": ordered_conditions(desc),
    }
    for (t, s) in sorted(desc.words):
        w = desc.words[(t, s)]
        doc["entries"].append({
            "target": t, "source": s,
            "terms": [{"coefficient": term.coefficient,
                       "arrows": [a.as_json() for a in term.arrows],
                       "text": term.apply_text(desc.sources[s].variable)} for term in w.terms],
        })
    return doc


def render(desc: BrauerDescription, fmt: str = "text") -> str:
    if fmt == "text":
        return render_text(desc)
    if fmt == "json":
        return json.dumps(to_json(desc), indent=2, sort_keys=True) + "\n"
    raise DescriptionError(f"unknown format {fmt!r}")


# --------------------------------------------------------------- round trip

def _parse_subgroup(G: PermGroup, words: Sequence[str]) -> Subgroup:
    return G.subgroup(G.parse_word(w) for w in words)


def _coset_key(G: PermGroup, x: int, S: Subgroup) -> int:
    return min(G.mul[x][s] for s in S.elements)


def _apply_word_to_coset(G: PermGroup, x: int, K: Subgroup, arrows: Sequence[dict]) -> tuple[dict[int, int], Subgroup]:
    """Image of the coset xK under the lattice maps dual to the arrows (read backwards).

    Cor_{E/F} with F = K^S, E = K^T gives Z[G/S] -> Z[G/T], xS -> sum of xsT;
    conj_g gives Z[G/gJg^-1] -> Z[G/J], xgJg^-1 -> xgJ; Res_{E/F} gives the
    collapse Z[G/T] -> Z[G/S].
    """
    vec = {_coset_key(G, x, K): 1}
    cur = K
    for a in reversed(arrows):
        op = a["op"]
        if op == "Cor":
            upper = _parse_subgroup(G, a["upper"]["subgroup"])
            lower = _parse_subgroup(G, a["lower"]["subgroup"])
            if lower != cur or not upper <= lower:
                raise DescriptionError("Cor arrow endpoints do not compose")
            new: dict[int, int] = {}
            reps = sorted({_coset_key(G, s, upper) for s in lower.elements})
            for y, c in vec.items():
                for s in reps:
                    key = _coset_key(G, G.mul[y][s], upper)
                    new[key] = new.get(key, 0) + c
            vec, cur = new, upper
        elif op == "conj":
            g = G.parse_word(a["g"])
            src = _parse_subgroup(G, a["from"]["subgroup"])
            dst = _parse_subgroup(G, a["to"]["subgroup"])
            if dst != cur or src.conjugate(g) != dst:
                raise DescriptionError("conj arrow endpoints do not compose")
            new = {}
            for y, c in vec.items():
                key = _coset_key(G, G.mul[y][g], src)
                new[key] = new.get(key, 0) + c
            vec, cur = new, src
        elif op == "Res":
            upper = _parse_subgroup(G, a["upper"]["subgroup"])
            lower = _parse_subgroup(G, a["lower"]["subgroup"])
            if upper != cur or not upper <= lower:
                raise DescriptionError("Res arrow endpoints do not compose")
            new = {}
            for y, c in vec.items():
                key = _coset_key(G, y, lower)
                new[key] = new.get(key, 0) + c
            vec, cur = new, lower
        else:
            raise DescriptionError(f"unknown arrow {op!r}")
    return vec, cur


def lattice_map_from_json(doc: dict, G: PermGroup, X0: GSetSpec, X1: GSetSpec) -> list[list[int]]:
    """Rebuild the integer matrix Z[X1] -> Z[X0] from the orbit entries of a description."""
    P0, P1 = perm_lattice(G, X0), perm_lattice(G, X1)
    M = xl.zeros(P0.rank, P1.rank)
    orbit_targets = {t["index"] for t in doc["targets"] if t["kind"] == "orbit"}
    for e in doc["entries"]:
        j, i = e["target"], e["source"]
        if j not in orbit_targets:
            continue
        K = P1.perm.subgroups[j]
        H = P0.perm.subgroups[i]
        for term in e["terms"]:
            for pos, x in enumerate(P1.perm.coset_reps[j]):
                vec, end = _apply_word_to_coset(G, x, K, term["arrows"])
                if end != H:
                    raise DescriptionError("word does not end at the source field")
                for y, c in vec.items():
                    M[P0.perm.index(i, y)][P1.perm.offsets[j] + pos] += term["coefficient"] * c
    return M


@dataclass
class RoundTripReport:
    ok: bool
    lattice_equal: bool
    failures: list[str]


def round_trip(spec: PresentationSpec, doc: dict | str) -> RoundTripReport:
    """Re-derive psi_* on Ĥ^0 from the words and compare with the certified psi at every subgroup."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    G = spec.M.group
    M = lattice_map_from_json(doc, G, spec.X0, spec.X1)
    P0, P1 = spec.psi.target, spec.psi.source
    d0, d1 = MackeyDatum(P0, 0), MackeyDatum(P1, 0)
    fails = []
    for L in subgroup_list(G):
        A, B = d1.value(L), d0.value(L)
        got = xl.induced_map(M if P1.rank else xl.zeros(P0.rank, 0), A, B)
        want = xl.induced_map(spec.psi.matrix if P1.rank else xl.zeros(P0.rank, 0), A, B)
        if not (got == want):
            fails.append(f"psi_* differs at subgroup {L!r}")
    return RoundTripReport(not fails, M == spec.psi.matrix, fails)
