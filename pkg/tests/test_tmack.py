import itertools
import random

import pytest

from conftest import load
from tatemack import exact_linalg as xl
from tatemack.g_lattices import GSetSpec, all_transitive_specs
from tatemack.perm_groups import PermGroup, class_by_label, parse_cycles, subgroup_list
from tatemack.tmack import (h1_tmack, hat0_tmack, projective_cover_vector, simple_tmack_functors, tau_algebra,
                            zero_tmack)
from tatemack.trivial_source import MultiplicityVector, TSLabel, multiplicity_vector, ts_catalog


def _brute_symbol_count(G):
    subs = subgroup_list(G)
    n = 0
    for H, K in itertools.product(subs, repeat=2):
        seen = set()
        for g in range(G.order):
            dc = frozenset(G.mul[G.mul[h][g]][k] for h in H.elements for k in K.elements)
            seen.add(dc)
        n += len(seen)
    return n


def test_tau_of_c2():
    C2 = PermGroup(2, [parse_cycles("(1,2)", 2)])
    t = tau_algebra(C2)
    # pairs (1,1): two double cosets, (1,C2), (C2,1), (C2,C2): one each
    assert t.n_symbols_total == _brute_symbol_count(C2) == 5
    assert t.modulus == 2
    assert len(t.basis) == 1
    (s,) = t.basis
    assert t.orders[s] == 2
    assert t.identity() == {s: 1}
    assert t.multiply({s: 1}, {s: 1}) == {s: 1}


@pytest.mark.parametrize("name", ["dp6", "s3", "c4", "v4"])
def test_symbol_count_and_orders(name):
    G = load(name).group
    t = tau_algebra(G)
    assert t.n_symbols_total == _brute_symbol_count(G)
    for s in t.basis:
        assert G.order % t.orders[s] == 0 and t.orders[s] > 1


@pytest.mark.parametrize("name", ["s3", "c4", "v4", "dp6"])
def test_identity_is_two_sided(name):
    t = tau_algebra(load(name).group)
    one = t.identity()
    for s in t.basis:
        assert t.multiply(one, {s: 1}) == {s: 1}
        assert t.multiply({s: 1}, one) == {s: 1}
    # each identity component [HeH] is idempotent
    for s in one:
        assert t.product(s, s) == {s: 1}


@pytest.mark.parametrize("name,samples", [("s3", None), ("v4", None), ("dp6", 400)])
def test_associativity(name, samples):
    t = tau_algebra(load(name).group)
    triples = [(a, b, c) for a in t.basis for b in t.basis if a.right == b.left
               for c in t.basis if b.right == c.left]
    if samples:
        triples = random.Random(7).sample(triples, samples)
    for a, b, c in triples:
        x, y, z = {a: 1}, {b: 1}, {c: 1}
        assert t.multiply(t.multiply(x, y), z) == t.multiply(x, t.multiply(y, z))


def _modules(prob):
    G = prob.group
    out = [hat0_tmack(GSetSpec.from_labels(G, [c.orbits[0].label])) for c in all_transitive_specs(G)]
    return out + [h1_tmack(prob.lattice)]


@pytest.mark.parametrize("name", ["s3", "v4", "dp6"])
def test_products_act_compatibly(name):
    # the functor maps are a representation: act(a o b) = act(a) act(b)
    prob = load(name)
    t = tau_algebra(prob.group)
    subs = t.subgroups
    rng = random.Random(3)
    pairs = [(a, b) for a in t.basis for b in t.basis if a.right == b.left]
    if len(pairs) > 300:
        pairs = rng.sample(pairs, 300)
    for N in _modules(prob):
        for a, b in pairs:
            H, K, L = subs[a.left], subs[a.right], subs[b.right]
            lhs = N.act(t, t.product(a, b), H, L)
            rhs = N.symbol_map(H, a.rep, K).compose(N.symbol_map(K, b.rep, L))
            assert lhs == rhs, (N.label, a, b)


def test_identity_acts_as_identity(dp6):
    t = tau_algebra(dp6.group)
    N = h1_tmack(dp6.lattice)
    for H in t.subgroups:
        if H.order > 1:
            assert N.act(t, t.identity(), H, H) == xl.identity_map(N.value(H))


def test_symbol_is_cor_conj_res(dp6):
    # [K e H] for H <= K is corestriction, [H e K] is restriction
    G = dp6.group
    t = tau_algebra(G)
    N = hat0_tmack(GSetSpec.from_labels(G, ["6.2"]))
    for H in t.subgroups:
        for K in t.subgroups:
            if H <= K:
                assert N.symbol_map(K, G.identity, H) == N.cor(H, K)
                assert N.symbol_map(H, G.identity, K) == N.res(K, H)


def test_values(dp6):
    G = dp6.group
    N = h1_tmack(dp6.lattice)
    A1 = class_by_label(G, "2.1").representative
    B = class_by_label(G, "3.1").representative
    assert N.value(A1).invariant_factors == (2, 2)
    assert N.value(B).invariant_factors == (3,)
    assert N.tate_condition()
    assert hat0_tmack(GSetSpec.from_labels(G, ["1.1"])).is_zero()
    assert hat0_tmack(GSetSpec.from_labels(G, ["12.1"])).value(G.whole).invariant_factors == (12,)
    assert zero_tmack(G).is_zero()


@pytest.mark.parametrize("name", ["s3", "c4", "v4", "dp6"])
def test_head_route_matches_trivial_source_route(name):
    G = load(name).group
    cat = ts_catalog(G)
    for X in all_transitive_specs(G):
        assert projective_cover_vector(hat0_tmack(X), cat) == multiplicity_vector(X, cat), X


def test_cover_of_h1(dp6):
    v = projective_cover_vector(h1_tmack(dp6.lattice), ts_catalog(dp6.group))
    assert v == MultiplicityVector({TSLabel(2, "2.1", 2): 1, TSLabel(3, "3.1", 2): 1})


def test_cover_of_pinned_x0(dp6):
    G = dp6.group
    v = projective_cover_vector(hat0_tmack(GSetSpec.from_labels(G, ["4.1", "6.2"])))
    assert sorted(v.as_strings()) == sorted(["(2.1,2)", "(4.1,1)", "(2.2,1)", "(3.1,4)", "(3.1,2)"])


def test_cover_of_zero(dp6):
    assert projective_cover_vector(zero_tmack(dp6.group)) == MultiplicityVector()


@pytest.mark.parametrize("name", ["s3", "c4", "v4", "dp6"])
def test_simple_functor_labels_match_catalog(name):
    G = load(name).group
    cat = ts_catalog(G)
    for p, entries in cat.entries.items():
        assert [S.label for S in simple_tmack_functors(G, p)] == [e.label for e in entries]
