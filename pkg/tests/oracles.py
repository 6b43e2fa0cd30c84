"""Independent reference computations used to check the library.

Nothing here calls Smith normal form or the cohomology code: everything is
finite enumeration with numpy.
"""

import itertools

import numpy as np
from sympy import factorint


def invariants_from_cyclic(orders):
    """Invariant factors of a direct sum of cyclic groups Z/n."""
    powers = {}
    for n in orders:
        for p, e in factorint(n).items():
            powers.setdefault(p, []).append(p ** e)
    if not powers:
        return ()
    width = max(len(v) for v in powers.values())
    for v in powers.values():
        v.sort(reverse=True)
        v.extend([1] * (width - len(v)))
    out = []
    for i in range(width):
        d = 1
        for v in powers.values():
            d *= v[i]
        out.append(d)
    return tuple(sorted(x for x in out if x > 1))


def invariants_from_order_counts(p, counts):
    """Invariant factors of a finite abelian p-group.

    ``counts[k]`` is the number of elements killed by p^k (k = 0, 1, ...),
    continuing until the whole group is reached.
    """
    # number of cyclic factors of order >= p^k is log_p(counts[k] / counts[k-1])
    ge = []
    for k in range(1, len(counts)):
        ratio = counts[k] // counts[k - 1]
        e = 0
        while ratio > 1:
            ratio //= p
            e += 1
        ge.append(e)
    ge.append(0)
    out = []
    for k in range(1, len(ge)):
        exact = ge[k - 1] - ge[k]
        out += [p ** k] * exact
    return out


def _elements(H, G):
    return sorted(H.element_set)


def _fixed_vectors(mats, modulus, rank):
    """All v in (Z/modulus)^rank fixed by every matrix, as an int array of rows."""
    grid = np.array(list(itertools.product(range(modulus), repeat=rank)), dtype=np.int64)
    if grid.size == 0:
        return np.zeros((1, 0), dtype=np.int64)
    keep = np.ones(len(grid), dtype=bool)
    for A in mats:
        img = (grid @ np.asarray(A, dtype=np.int64).T) % modulus
        keep &= (img == grid).all(axis=1)
    return grid[keep]


def brute_h1(H, L):
    """Invariant factors of H^1(H, L) by enumeration.

    For each prime p with p-part d of |H|, the p-primary part of H^1 is
    (L/dL)^H modulo the reductions of (L/d^2 L)^H: multiplication by d on L
    gives the exact sequence L^H -> (L/dL)^H -> H^1[d] -> 0, and every
    (L/d^2 L)^H class reduces into the image of L^H because d kills H^1[d^2].
    """
    G = L.group
    n = H.order
    r = L.rank
    gens = [L.mats[h] for h in H.generators] if H.generators else []
    out = []
    for p, e in factorint(n).items():
        d = p ** e
        A = _fixed_vectors(gens, d, r)
        B = {tuple(v) for v in (_fixed_vectors(gens, d * d, r) % d)}
        counts = [1]
        k = 1
        while True:
            killed = sum(1 for a in A if tuple((p ** k * a) % d) in B)
            counts.append(killed)
            if killed == len(A):
                break
            k += 1
        counts = [c // len(B) for c in [len(B)] + counts[1:]]
        out += invariants_from_order_counts(p, counts)
    return invariants_from_cyclic(out)


def _min_generators(H):
    """A smallest generating set of H, by search over subsets of its elements."""
    G = H.parent
    elems = sorted(H.element_set)
    for k in range(0, 3):
        for S in itertools.combinations(elems, k):
            if G.subgroup(S).order == H.order:
                return list(S)
    raise ValueError("subgroup needs more than two generators")


def _spanning_tree(H, gens):
    """BFS order of H from e, with (parent, generator index) for each non-root element."""
    G = H.parent
    order, parent = [G.identity], {G.identity: None}
    for x in order:
        for k, s in enumerate(gens):
            y = G.mul[x][s]
            if y not in parent:
                parent[y] = (x, k)
                order.append(y)
    return order, parent


def _cocycles(H, L, gens, modulus):
    """All 1-cocycles H -> L/modulus, as an array (count, len(gens), rank) of generator values.

    Generator values are enumerated exhaustively; a tuple is kept when the
    function it determines along a spanning tree satisfies
    c(x s) = c(x) + x c(s) on every edge of the Cayley graph.
    """
    G = H.parent
    r = L.rank
    mats = {x: np.asarray(L.mats[x], dtype=np.int64) for x in H.element_set}
    box = np.array(list(itertools.product(range(modulus), repeat=r)), dtype=np.int64).reshape(-1, r)
    per_gen = []
    for s in gens:
        # c(s^m) = (1 + s + ... + s^(m-1)) c(s) must vanish
        N = np.zeros((r, r), dtype=np.int64)
        x = G.identity
        while True:
            N += mats[x]
            x = G.mul[x][s]
            if x == G.identity:
                break
        per_gen.append(box[((box @ N.T) % modulus == 0).all(axis=1)])
    cands = np.array([np.stack(t) for t in itertools.product(*per_gen)], dtype=np.int64)
    if cands.size == 0:
        return cands.reshape(0, len(gens), r)
    order, parent = _spanning_tree(H, gens)
    vals = {G.identity: np.zeros((len(cands), r), dtype=np.int64)}
    for y in order[1:]:
        x, k = parent[y]
        vals[y] = (vals[x] + cands[:, k, :] @ mats[x].T) % modulus
    ok = np.ones(len(cands), dtype=bool)
    for x in order:
        for k, s in enumerate(gens):
            rhs = (vals[x] + cands[:, k, :] @ mats[x].T) % modulus
            ok &= (vals[G.mul[x][s]] == rhs).all(axis=1)
    return cands[ok]


def brute_h1_cocycles(H, L):
    """Invariant factors of H^1(H, L) by exhaustive cocycle enumeration.

    For each prime p with p-part d of |H|, the p-part of H^1(H, L) is the
    group of cocycles H -> L/d that lift to cocycles H -> L/d^2, modulo the
    coboundaries H -> L/d.  Lifting mod d^2 already forces an integral lift:
    the obstruction lies in H^2(H, L)[d] and in d H^2(H, L), whose
    intersection is 0.
    """
    n = H.order
    r = L.rank
    if n == 1 or r == 0:
        return ()
    gens = _min_generators(H)
    out = []
    for p, e in factorint(n).items():
        d = p ** e
        Z = {tuple(c.ravel()) for c in (_cocycles(H, L, gens, d * d) % d)}
        box = np.array(list(itertools.product(range(d), repeat=r)), dtype=np.int64).reshape(-1, r)
        B = {tuple(np.stack([(box[i] @ L.mats[s].T - box[i]) % d for s in gens]).ravel())
             for i in range(len(box))}
        assert B <= Z
        counts = [1]
        k = 1
        while counts[-1] * len(B) < len(Z):
            killed = sum(1 for z in Z if tuple((p ** k * np.array(z)) % d) in B)
            counts.append(killed // len(B))
            k += 1
        out += invariants_from_order_counts(p, counts)
    return invariants_from_cyclic(out)


def brute_subgroups(G):
    """Every subgroup as a frozenset of element indices, by closing all subsets of generators."""
    elems = range(G.order)
    found = {frozenset([G.identity])}
    frontier = list(found)
    while frontier:
        nxt = []
        for S in frontier:
            for x in elems:
                if x in S:
                    continue
                T = set(S) | {x}
                # close under multiplication
                changed = True
                while changed:
                    changed = False
                    for a in list(T):
                        for b in list(T):
                            c = G.mul[a][b]
                            if c not in T:
                                T.add(c)
                                changed = True
                T = frozenset(T)
                if T not in found:
                    found.add(T)
                    nxt.append(T)
        frontier = nxt
    return found
