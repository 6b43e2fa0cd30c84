"""Finite permutation groups with an eagerly materialized element list.

Permutations are tuples of images of ``0..degree-1``.  Products apply the
right factor first: ``(a * b)(x) == a[b[x]]``.  Elements are stored sorted
lexicographically, so comparing sorted index lists of two subgroups is the
same as comparing their sorted element lists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

Perm = tuple[int, ...]

MAX_ORDER = 200


class CapacityError(ValueError):
    """Raised when an input exceeds a documented size bound."""


def compose(a: Perm, b: Perm) -> Perm:
    return tuple(a[i] for i in b)


def invert(a: Perm) -> Perm:
    inv = [0] * len(a)
    for i, x in enumerate(a):
        inv[x] = i
    return tuple(inv)


def parse_cycles(text: str, degree: int) -> Perm:
    """Parse 1-indexed cycle notation such as ``"(1 2)(4 5)"``.

    ``"()"`` and the empty string denote the identity.  A point may occur in
    at most one cycle.
    """
    text = text.strip()
    if not re.fullmatch(r"(\s*\([\d\s,]*\)\s*)*", text):
        raise ValueError(f"malformed cycle notation: {text!r}")
    image = list(range(degree))
    seen: set[int] = set()
    for body in re.findall(r"\(([^)]*)\)", text):
        pts = [int(t) for t in re.split(r"[\s,]+", body.strip()) if t]
        for x in pts:
            if not 1 <= x <= degree:
                raise ValueError(f"point {x} out of range 1..{degree} in {text!r}")
            if x in seen:
                raise ValueError(f"point {x} repeated (overlapping cycles) in {text!r}")
            seen.add(x)
        for i, x in enumerate(pts):
            image[x - 1] = pts[(i + 1) % len(pts)] - 1
    return tuple(image)


def cycle_string(p: Perm) -> str:
    seen = set()
    parts = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = p[j]
        parts.append("(" + " ".join(str(x + 1) for x in cyc) + ")")
    return "".join(parts) or "()"


class PermGroup:
    """A finite group given by permutation generators.

    Parameters
    ----------
    degree:
        Number of points acted on.
    generators:
        Generating permutations (0-indexed images).
    names:
        Optional generator names, used to render elements as words.
    """

    def __init__(self, degree: int, generators: Sequence[Perm], names: Sequence[str] | None = None):
        self.degree = degree
        self.generators = tuple(tuple(g) for g in generators)
        for g in self.generators:
            if sorted(g) != list(range(degree)):
                raise ValueError(f"not a permutation of degree {degree}: {g}")
        if names is None:
            names = [f"g{i + 1}" for i in range(len(self.generators))]
        if len(names) != len(self.generators):
            raise ValueError("one name per generator required")
        self.gen_names = tuple(names)
        ident = tuple(range(degree))
        # breadth-first closure; words[x] is a shortest word in generator indices
        found = {ident: ()}
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                for k, s in enumerate(self.generators):
                    y = compose(s, x)
                    if y not in found:
                        found[y] = (k,) + found[x]
                        if len(found) > MAX_ORDER:
                            raise CapacityError(f"group order exceeds supported bound {MAX_ORDER}")
                        nxt.append(y)
            frontier = nxt
        self.elements: list[Perm] = sorted(found)
        self.index = {p: i for i, p in enumerate(self.elements)}
        self.words: list[tuple[int, ...]] = [found[p] for p in self.elements]
        self.identity = self.index[ident]
        n = len(self.elements)
        self.mul = [[self.index[compose(a, b)] for b in self.elements] for a in self.elements]
        self.inv = [self.index[invert(a)] for a in self.elements]
        self.gen_index = tuple(self.index[g] for g in self.generators)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        gens = ", ".join(f"{n}={cycle_string(g)}" for n, g in zip(self.gen_names, self.generators))
        return f"PermGroup(order={self.order}, {gens})"

    def conj(self, g: int, x: int) -> int:
        """g x g^-1."""
        return self.mul[self.mul[g][x]][self.inv[g]]

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.mul[y][x]
            k += 1
        return k

    def word(self, x: int) -> str:
        """Render an element as a product of generator names (``e`` for 1)."""
        w = self.words[x]
        return "*".join(self.gen_names[k] for k in w) if w else "e"

    def parse_word(self, text: str) -> int:
        text = text.strip()
        if text in ("", "e", "1"):
            return self.identity
        x = self.identity
        for tok in re.split(r"\s*\*\s*", text):
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?", tok)
            if not m or m.group(1) not in self.gen_names:
                raise ValueError(f"unknown generator word {tok!r}")
            s = self.gen_index[self.gen_names.index(m.group(1))]
            e = int(m.group(2) or 1)
            if e < 0:
                s, e = self.inv[s], -e
            for _ in range(e):
                x = self.mul[x][s]
        return x

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        gens = list(gens)
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = self.mul[s][x]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def subgroup(self, gens: Iterable[int]) -> "Subgroup":
        return Subgroup.from_elements(self, self.closure(gens))

    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self.order)), self.gen_index)

    @cached_property
    def trivial(self) -> "Subgroup":
        return Subgroup(self, (self.identity,), ())


def _greedy_generators(G: PermGroup, elements: Sequence[int]) -> tuple[int, ...]:
    target = len(elements)
    gens: list[int] = []
    span = frozenset([G.identity])
    # prefer high-order elements so cyclic groups get a single generator
    for x in sorted(elements, key=lambda y: (-G.element_order(y), y)):
        if x in span:
            continue
        gens.append(x)
        span = G.closure(gens)
        if len(span) == target:
            break
    for x in list(gens):
        rest = [y for y in gens if y != x]
        if len(G.closure(rest)) == target:
            gens = rest
    return tuple(gens)


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: PermGroup
    elements: tuple[int, ...]
    generators: tuple[int, ...]

    @classmethod
    def from_elements(cls, G: PermGroup, elems: Iterable[int]) -> "Subgroup":
        elems = tuple(sorted(set(elems)))
        return cls(G, elems, _greedy_generators(G, elems))

    @cached_property
    def element_set(self) -> frozenset[int]:
        return frozenset(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x: int) -> bool:
        return x in self.element_set

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and other.parent is self.parent and other.elements == self.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __le__(self, other: "Subgroup") -> bool:
        return self.element_set <= other.element_set

    def __lt__(self, other: "Subgroup") -> bool:
        return self.element_set < other.element_set

    def __repr__(self) -> str:
        gens = ", ".join(self.parent.word(g) for g in self.generators)
        return f"<{gens}>(order {self.order})"

    def conjugate(self, g: int) -> "Subgroup":
        """g H g^-1."""
        G = self.parent
        return Subgroup(G, tuple(sorted(G.conj(g, x) for x in self.elements)),
                        tuple(G.conj(g, x) for x in self.generators))

    def intersect(self, other: "Subgroup") -> "Subgroup":
        return Subgroup.from_elements(self.parent, self.element_set & other.element_set)

    def is_abelian(self) -> bool:
        mul = self.parent.mul
        gens = self.generators
        return all(mul[a][b] == mul[b][a] for a in gens for b in gens)

    def as_perm_group(self) -> PermGroup:
        G = self.parent
        return PermGroup(G.degree, [G.elements[g] for g in self.generators],
                         [G.word(g) for g in self.generators])


@dataclass(frozen=True, eq=False)
class SubgroupClass:
    representative: Subgroup
    members: tuple[Subgroup, ...]
    label: str
    order_key: tuple[int, int] = field(default=(0, 0))

    @property
    def order(self) -> int:
        return self.representative.order

    @property
    def is_trivial(self) -> bool:
        return self.representative.order == 1

    def __contains__(self, H: Subgroup) -> bool:
        return any(H == K for K in self.members)

    def __repr__(self) -> str:
        return f"SubgroupClass({self.label}, rep={self.representative!r}, size={len(self.members)})"


@dataclass(frozen=True)
class DoubleCoset:
    left: Subgroup
    right: Subgroup
    rep: int
    elements: frozenset[int]


def all_subgroups(G: PermGroup) -> list[Subgroup]:
    """Every subgroup of G, found by repeatedly joining cyclic subgroups."""
    if G.order > MAX_ORDER:
        raise CapacityError(f"group order {G.order} exceeds bound {MAX_ORDER}")
    cyclic = {G.closure([x]) for x in range(G.order)}
    found = set(cyclic)
    frontier = list(cyclic)
    while frontier:
        nxt = []
        for S in frontier:
            for C in cyclic:
                if C <= S:
                    continue
                T = G.closure(S | C)
                if T not in found:
                    found.add(T)
                    nxt.append(T)
        frontier = nxt
    return sorted((Subgroup.from_elements(G, S) for S in found), key=lambda H: (H.order, H.elements))


def _conjugacy_classes(G: PermGroup, subs: list[Subgroup]) -> list[SubgroupClass]:
    by_elems = {H.elements: H for H in subs}
    done: set[tuple[int, ...]] = set()
    raw = []
    for H in subs:
        if H.elements in done:
            continue
        orbit = {}
        for g in range(G.order):
            K = tuple(sorted(G.conj(g, x) for x in H.elements))
            orbit[K] = by_elems[K]
        done.update(orbit)
        members = tuple(orbit[k] for k in sorted(orbit))
        raw.append(members)
    raw.sort(key=lambda m: (m[0].order, m[0].elements))
    classes = []
    count: dict[int, int] = {}
    for members in raw:
        o = members[0].order
        count[o] = count.get(o, 0) + 1
        classes.append(SubgroupClass(members[0], members, f"{o}.{count[o]}", (o, count[o])))
    return classes


_CLASS_CACHE: dict[int, tuple[PermGroup, list[SubgroupClass]]] = {}


def subgroup_classes(G: PermGroup) -> list[SubgroupClass]:
    """Conjugacy classes of subgroups, sorted by (order, label).

    Labels have the form ``"<order>.<k>"``; within one order, classes are
    numbered by the lexicographically least sorted element list of their
    representative.
    """
    hit = _CLASS_CACHE.get(id(G))
    if hit is not None and hit[0] is G:
        return hit[1]
    classes = _conjugacy_classes(G, all_subgroups(G))
    _CLASS_CACHE[id(G)] = (G, classes)
    return classes


def class_of(G: PermGroup, H: Subgroup) -> SubgroupClass:
    for c in subgroup_classes(G):
        if c.order == H.order and H in c:
            return c
    raise ValueError(f"{H!r} is not a subgroup of {G!r}")


def class_by_label(G: PermGroup, label: str) -> SubgroupClass:
    for c in subgroup_classes(G):
        if c.label == label:
            return c
    raise KeyError(f"unknown subgroup class label {label!r}")


def subgroup_list(G: PermGroup) -> list[Subgroup]:
    """All subgroups in class order (class, then member order)."""
    return [H for c in subgroup_classes(G) for H in c.members]


def normalizer(G: PermGroup, H: Subgroup) -> Subgroup:
    s = H.element_set
    return Subgroup.from_elements(G, [g for g in range(G.order)
                                      if all(G.conj(g, x) in s for x in H.generators)])


def is_normal(N: Subgroup, H: Subgroup) -> bool:
    G = N.parent
    return H <= N and all(G.conj(n, x) in H.element_set for n in N.generators for x in H.generators)


@dataclass(frozen=True)
class Quotient:
    """``N/H`` as a permutation group on the left cosets of H in N.

    The generators of ``group`` are the images of ``N.generators`` in order.
    """

    group: PermGroup
    projection: dict[int, int]
    cosets: tuple[frozenset[int], ...]
    numerator: Subgroup
    kernel: Subgroup


def quotient_as_perm_group(N: Subgroup, H: Subgroup) -> Quotient:
    if not is_normal(N, H):
        raise ValueError("H is not a normal subgroup of N")
    G = N.parent
    cosets = []
    where = {}
    for n in N.elements:
        if n in where:
            continue
        c = frozenset(G.mul[n][h] for h in H.elements)
        for x in c:
            where[x] = len(cosets)
        cosets.append(c)

    def action(n: int) -> Perm:
        return tuple(where[G.mul[n][min(c)]] for c in cosets)

    names = [G.word(g) for g in N.generators]
    gens = [action(g) for g in N.generators]
    if not gens:
        gens, names = [tuple(range(len(cosets)))], ["e"]
    W = PermGroup(len(cosets), gens, names)
    proj = {n: W.index[action(n)] for n in N.elements}
    return Quotient(W, proj, tuple(cosets), N, H)


def double_cosets(G: PermGroup, K: Subgroup, H: Subgroup) -> list[DoubleCoset]:
    """The double cosets K g H, each represented by its least element."""
    out = []
    seen: set[int] = set()
    for g in range(G.order):
        if g in seen:
            continue
        elems = frozenset(G.mul[G.mul[k][g]][h] for k in K.elements for h in H.elements)
        seen |= elems
        out.append(DoubleCoset(K, H, min(elems), elems))
    return out


def left_cosets(G: PermGroup, H: Subgroup) -> list[int]:
    """Lex-least representatives of the left cosets gH, in increasing order."""
    reps = []
    seen: set[int] = set()
    for g in range(G.order):
        if g in seen:
            continue
        reps.append(g)
        seen.update(G.mul[g][h] for h in H.elements)
    return reps


def is_prime_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def p_subgroup_classes(G: PermGroup, p: int) -> list[SubgroupClass]:
    """Classes of p-subgroups, the trivial class first (check ``is_trivial``)."""
    if p < 2 or prime_factors(p) != [p]:
        raise ValueError(f"{p} is not prime")
    return [c for c in subgroup_classes(G) if is_prime_power(c.order, p)]


def maximal_subgroups(G: PermGroup, K: Subgroup) -> list[Subgroup]:
    subs = [H for H in subgroup_list(G) if H < K]
    return [H for H in subs if not any(H < L for L in subs)]


def structure_name(H: Subgroup) -> str:
    """A short isomorphism-type name (cyclic, abelian, dihedral, S3...)."""
    G = H.parent
    n = H.order
    if n == 1:
        return "1"
    orders = [G.element_order(x) for x in H.elements]
    if max(orders) == n:
        return f"C{n}"
    if H.is_abelian():
        factors = []
        for p in prime_factors(n):
            # counts of elements killed by p^k determine the p-primary part
            e = 0
            m = n
            while m % p == 0:
                m //= p
                e += 1
            parts = []
            prev = 0
            k = 1
            sizes = []
            while True:
                cnt = sum(1 for o in orders if (p ** k) % o == 0)
                r = 0
                while p ** r < cnt:
                    r += 1
                sizes.append(r)
                if r == e:
                    break
                k += 1
            # sizes[k-1] = sum_i min(e_i, k); recover partition
            counts = [sizes[0]] + [sizes[i] - sizes[i - 1] for i in range(1, len(sizes))]
            for k in range(len(counts)):
                num_ge = counts[k]
                num_gt = counts[k + 1] if k + 1 < len(counts) else 0
                parts += [p ** (k + 1)] * (num_ge - num_gt)
            factors += sorted(parts)
        names = {}
        for f in factors:
            names[f] = names.get(f, 0) + 1
        return "x".join(f"C{f}" + (f"^{c}" if c > 1 else "") for f, c in sorted(names.items()))
    if n == 6:
        return "S3"
    half = n // 2
    if any(o == half for o in orders):
        cyc = [x for x, o in zip(H.elements, orders) if o == half][0]
        C = G.closure([cyc])
        if all(orders[i] == 2 for i, x in enumerate(H.elements) if x not in C):
            return f"D{n}"
        if n == 8:
            return "Q8"
    return f"Group{n}"


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)
