import numpy as np
import pytest

from conftest import load
from tatemack.fp_modules import hom_space, is_indecomposable
from tatemack.g_lattices import GSetSpec
from tatemack.perm_groups import normalizer, p_subgroup_classes, quotient_as_perm_group, subgroup_classes
from tatemack.trivial_source import (MultiplicityVector, TSLabel, brauer_quotient, is_relatively_projective,
                                     multiplicity_table, multiplicity_vector, perm_module, perm_summands,
                                     projective_summand_dims, relative_trace, simple_fp_modules, ts_catalog,
                                     vertex)


@pytest.mark.parametrize("name,counts", [("dp6", {2: 5, 3: 4}), ("s3", {2: 1, 3: 2}), ("c4", {2: 2}),
                                         ("v4", {2: 4})])
def test_catalog_size_is_number_of_pairs(name, counts):
    G = load(name).group
    cat = ts_catalog(G)
    assert {p: len(v) for p, v in cat.entries.items()} == counts
    # one module per (vertex, simple module of N(H)/H)
    for p, n in counts.items():
        expected = 0
        for c in p_subgroup_classes(G, p):
            if not c.is_trivial:
                H = c.representative
                W = quotient_as_perm_group(normalizer(G, H), H).group
                expected += len(simple_fp_modules(W, p))
        assert expected == n


def test_catalog_entries_are_consistent(d12):
    cat = ts_catalog(d12)
    for e in cat.all_entries():
        U = e.module
        assert is_indecomposable(U)
        assert vertex(U)[0].label == e.vertex.label == e.label.vertex
        # the Brauer quotient at the vertex has the labelled simple as its head
        assert hom_space(e.brauer_quotient, e.simple)
        assert cat.match(U) == e.label
        assert cat.label_by_name(str(e.label)) == e.label


def test_higman_witness(d12):
    cat = ts_catalog(d12)
    for e in cat.all_entries():
        H = e.vertex.representative
        w = is_relatively_projective(e.module, H)
        assert w is not None
        n = e.module.dim
        assert np.array_equal(relative_trace(e.module, H, d12.whole, w), np.eye(n, dtype=np.int64))
        # and not projective relative to the trivial subgroup
        assert is_relatively_projective(e.module, d12.trivial) is None


def test_brauer_quotient_vanishes_off_vertex(d12):
    cat = ts_catalog(d12)
    e = cat.entry(TSLabel(2, "2.2", 1))
    C = next(c for c in subgroup_classes(d12) if c.label == "4.1").representative
    assert brauer_quotient(e.module, C).module.dim == 0


@pytest.mark.parametrize("name", ["dp6", "s3", "c4", "v4"])
def test_dimension_count(name):
    G = load(name).group
    cat = ts_catalog(G)
    table = multiplicity_table(G, cat)
    for c in subgroup_classes(G):
        for p in cat.entries:
            dim = sum(cat.entry(lab).dim * m for lab, m in table[c.label].items() if lab.p == p)
            assert dim + projective_summand_dims(G, c, p) == G.order // c.order
            total = sum(U.dim * m for U, m, _ in perm_summands(G, c, p))
            assert total == perm_module(G, c, p).dim


def test_multiplicity_vector_algebra(d12):
    a = TSLabel(2, "2.1", 1)
    b = TSLabel(3, "3.1", 2)
    x = MultiplicityVector({a: 2, b: 0})
    y = MultiplicityVector({a: 1, b: 1})
    assert b not in x
    assert (x - y) == MultiplicityVector({a: 1, b: -1})
    assert not (x - y).is_nonnegative()
    assert x + y >= y and not x >= y
    table = multiplicity_table(d12)
    X = GSetSpec.from_labels(d12, ["4.1", "6.2"])
    assert multiplicity_vector(X, ts_catalog(d12)) == table["4.1"] + table["6.2"]
    assert list(table["3.1"].as_strings()) == ["(3.1,1)", "(3.1,2)", "(3.1,3)", "(3.1,4)"]
