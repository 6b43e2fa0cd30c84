"""Problem files: a permutation group, an optional lattice, subgroup and field names.

The format is TOML; see docs/problem_format.md for the grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib as _toml
except ModuleNotFoundError:  # Python < 3.11
    import tomli as _toml

from .g_lattices import GLattice, GSetSpec, LatticeError, LatticeMap, perm_lattice
from .perm_groups import (CapacityError, PermGroup, Subgroup, SubgroupClass, class_by_label,
                          class_of, parse_cycles)
from .presentations import PsiTerm, psi_from_terms


class ProblemError(ValueError):
    """An input error with an optional 1-based (line, column) position."""

    def __init__(self, message: str, source: str = "<problem>", line: int | None = None,
                 column: int | None = None):
        self.message, self.source, self.line, self.column = message, source, line, column
        where = source
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


@dataclass
class PinnedPresentation:
    X0: GSetSpec
    X1: GSetSpec
    terms: list[PsiTerm]

    def psi(self) -> LatticeMap:
        return psi_from_terms(self.X1, self.X0, self.terms)


@dataclass
class Problem:
    source: str
    group: PermGroup
    lattice: GLattice | None
    subgroup_names: dict[str, Subgroup] = field(default_factory=dict)
    field_names: dict[str, str] = field(default_factory=dict)     # class label -> field name
    variables: dict[str, str] = field(default_factory=dict)       # class label -> variable
    presentation: PinnedPresentation | None = None

    def resolve(self, name: str) -> SubgroupClass:
        """A subgroup class from an alias, a class label, ``1`` or ``G``."""
        H = self.subgroup(name)
        return class_of(self.group, H)

    def subgroup(self, name: str) -> Subgroup:
        G = self.group
        if name in self.subgroup_names:
            return self.subgroup_names[name]
        if name == "1":
            return G.trivial
        if name == "G":
            return G.whole
        try:
            return class_by_label(G, name).representative
        except KeyError:
            raise ProblemError(f"unknown subgroup name {name!r}", self.source) from None

    def class_aliases(self) -> dict[str, str]:
        """class label -> alias (first alias given wins); G itself is ``G`` by default."""
        out: dict[str, str] = {}
        for name, H in self.subgroup_names.items():
            out.setdefault(class_of(self.group, H).label, name)
        out.setdefault(class_of(self.group, self.group.whole).label, "G")
        return out

    def display(self, label: str) -> str:
        a = self.class_aliases().get(label)
        return f"{label} ({a})" if a else label


_POS = re.compile(r"\(at line (\d+), column (\d+)\)")


def _locate(text: str, section: str, key: str | None = None) -> tuple[int | None, int | None]:
    """Best-effort position of ``key`` inside ``[section]`` (or of the section header)."""
    lines = text.splitlines()
    cur = ""
    sec_line = None
    for n, raw in enumerate(lines, 1):
        s = raw.strip()
        m = re.fullmatch(r"\[\[?\s*([^\]]+?)\s*\]\]?(\s*#.*)?", s)
        if m:
            cur = m.group(1)
            if sec_line is None and (cur == section or cur.startswith(section + ".")):
                sec_line = n
            continue
        if key is None:
            continue
        km = re.match(r"([A-Za-z0-9_\"'.-]+)\s*=", s)
        if not km:
            continue
        k = km.group(1).strip("\"'")
        full = f"{cur}.{k}" if cur else k
        if full == f"{section}.{key}" or (cur == section and k == key):
            return n, raw.index(km.group(1)) + 1
    return sec_line, (1 if sec_line else None)


class _Reader:
    def __init__(self, text: str, source: str):
        self.text, self.source = text, source

    def fail(self, msg: str, section: str, key: str | None = None):
        line, col = _locate(self.text, section, key)
        raise ProblemError(msg, self.source, line, col)

    def table(self, data: dict, section: str, key: str, required: bool = True) -> dict | None:
        v = data.get(key)
        if v is None:
            if required:
                self.fail(f"missing table [{section + '.' if section else ''}{key}]", section)
            return None
        if not isinstance(v, dict):
            self.fail(f"{key} must be a table", section, key)
        return v


def load_problem(path: str | Path) -> Problem:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ProblemError(f"cannot read file: {e.strerror}", str(p)) from None
    return parse_problem(text, str(p))


def parse_problem(text: str, source: str = "<problem>") -> Problem:
    try:
        data = _toml.loads(text)
    except _toml.TOMLDecodeError as e:
        msg = str(e)
        m = _POS.search(msg)
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        if m is None and "end of document" in msg:
            lines = text.splitlines() or [""]
            line, col = len(lines), len(lines[-1]) + 1
        msg = re.sub(r"\s*\(at end of document\)", "", _POS.sub("", msg)).strip()
        raise ProblemError("TOML syntax error: " + msg, source, line, col) from None
    r = _Reader(text, source)
    unknown = set(data) - {"group", "lattice", "subgroups", "fields", "variables", "presentation"}
    if unknown:
        r.fail(f"unknown section [{sorted(unknown)[0]}]", sorted(unknown)[0])
    G = _read_group(r, data)
    prob = Problem(source, G, None)
    for name, words in (r.table(data, "", "subgroups", required=False) or {}).items():
        if not isinstance(words, list) or not all(isinstance(w, str) for w in words):
            r.fail(f"subgroup {name!r} must be a list of generator words", "subgroups", name)
        try:
            prob.subgroup_names[name] = G.subgroup(G.parse_word(w) for w in words)
        except ValueError as e:
            r.fail(str(e), "subgroups", name)
    if "lattice" in data:
        prob.lattice = _read_lattice(r, data["lattice"], G, prob)
    for fname, sub in (r.table(data, "", "fields", required=False) or {}).items():
        if not isinstance(sub, str):
            r.fail(f"field {fname!r} must name a subgroup", "fields", fname)
        label = _resolve(r, prob, sub, "fields", fname).label
        if label in prob.field_names:
            r.fail(f"two field names for subgroup class {label}", "fields", fname)
        prob.field_names[label] = fname
    for var, sub in (r.table(data, "", "variables", required=False) or {}).items():
        if not isinstance(sub, str):
            r.fail(f"variable {var!r} must name a subgroup", "variables", var)
        prob.variables[_resolve(r, prob, sub, "variables", var).label] = var
    if "presentation" in data:
        prob.presentation = _read_presentation(r, data["presentation"], prob)
    return prob


def _resolve(r: _Reader, prob: Problem, name: str, section: str, key: str) -> SubgroupClass:
    try:
        return prob.resolve(name)
    except ProblemError as e:
        r.fail(e.message, section, key)


def _read_group(r: _Reader, data: dict) -> PermGroup:
    g = r.table(data, "", "group")
    deg = g.get("degree")
    if not isinstance(deg, int) or deg < 1:
        r.fail("group.degree must be a positive integer", "group", "degree")
    gens = r.table(g, "group", "generators")
    names, perms = [], []
    for name, cyc in gens.items():
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in ("e", "G"):
            r.fail(f"invalid generator name {name!r}", "group.generators", name)
        if not isinstance(cyc, str):
            r.fail(f"generator {name} must be given in cycle notation", "group.generators", name)
        try:
            perms.append(parse_cycles(cyc, deg))
        except ValueError as e:
            r.fail(str(e), "group.generators", name)
        names.append(name)
    try:
        return PermGroup(deg, perms, names)
    except CapacityError as e:
        r.fail(str(e), "group")


def _read_lattice(r: _Reader, lat: dict, G: PermGroup, prob: Problem) -> GLattice:
    if not isinstance(lat, dict):
        r.fail("lattice must be a table", "lattice")
    name = str(lat.get("name", "M"))
    if "permutation" in lat:
        orbits = lat["permutation"]
        if not isinstance(orbits, list):
            r.fail("lattice.permutation must be a list of subgroup names", "lattice", "permutation")
        cls = tuple(_resolve(r, prob, str(o), "lattice", "permutation") for o in orbits)
        P = perm_lattice(G, GSetSpec(G, cls))
        P.name = name
        return P
    conv = lat.get("convention", "column")
    if conv not in ("column", "row"):
        r.fail("lattice.convention must be \"column\" or \"row\"", "lattice", "convention")
    mats = r.table(lat, "lattice", "matrices")
    rank = lat.get("rank")
    out = []
    for gname in G.gen_names:
        if gname not in mats:
            r.fail(f"no matrix for generator {gname}", "lattice.matrices")
        A = mats[gname]
        if (not isinstance(A, list) or not all(isinstance(row, list) for row in A)
                or not all(isinstance(x, int) for row in A for x in row)):
            r.fail(f"matrix for {gname} must be a list of integer rows", "lattice.matrices", gname)
        n = len(A)
        if any(len(row) != n for row in A):
            r.fail(f"matrix for {gname} is not square", "lattice.matrices", gname)
        if rank is None:
            rank = n
        elif n != rank:
            r.fail(f"matrix for {gname} has size {n}, expected {rank}", "lattice.matrices", gname)
        # a row-vector action v -> vA is the column action of the transpose
        out.append([list(col) for col in zip(*A)] if conv == "row" else A)
    extra = set(mats) - set(G.gen_names)
    if extra:
        r.fail(f"matrix for unknown generator {sorted(extra)[0]}", "lattice.matrices", sorted(extra)[0])
    try:
        return GLattice(G, out, name=name, rank=rank if rank is not None else 0)
    except LatticeError as e:
        r.fail(f"not a G-lattice: {e}", "lattice")


def _read_presentation(r: _Reader, pres: dict, prob: Problem) -> PinnedPresentation:
    G = prob.group

    def spec(key):
        v = pres.get(key)
        if not isinstance(v, list):
            r.fail(f"presentation.{key} must be a list of subgroup names", "presentation", key)
        return GSetSpec(G, tuple(_resolve(r, prob, str(x), "presentation", key) for x in v))

    X0, X1 = spec("X0"), spec("X1")
    terms = []
    for t in pres.get("psi", []):
        if not isinstance(t, dict) or not {"from", "to"} <= set(t):
            r.fail("each psi term needs 'from' and 'to'", "presentation", "psi")
        try:
            g = G.parse_word(str(t.get("g", "e")))
        except ValueError as e:
            r.fail(str(e), "presentation", "psi")
        c = t.get("coefficient", 1)
        if not isinstance(c, int):
            r.fail("psi coefficients must be integers", "presentation", "psi")
        src, tgt = prob.subgroup(str(t["from"])), prob.subgroup(str(t["to"]))
        terms.append(PsiTerm(src, tgt, g, c, t.get("from_orbit"), t.get("to_orbit")))
    return PinnedPresentation(X0, X1, terms)
