import dataclasses

import pytest
from hypothesis import given, strategies as st

from conftest import load
from tatemack import exact_linalg as xl
from tatemack.g_lattices import GLattice, GSetSpec, LatticeMap, perm_lattice
from tatemack.presentations import (PresentationError, RefusalError, alternating_sums_admissible,
                                    betti_presentation, enumerate_minimal_presentations, minimal_x1,
                                    realize_presentation, verify_exactness)
from tatemack.tmack import h1_tmack, projective_cover_vector
from tatemack.trivial_source import MultiplicityVector, TSLabel, multiplicity_table


def _spec(G, *labels):
    return GSetSpec.from_labels(G, list(labels)).sorted()


@pytest.fixture(scope="module")
def betti(dp6):
    return betti_presentation(dp6.lattice)


@pytest.fixture(scope="module")
def pinned(dp6):
    pin = dp6.presentation
    return realize_presentation(dp6.lattice, pin.X0, pin.X1, pin.psi())


def test_betti_vectors(betti):
    assert betti.beta0 == MultiplicityVector({TSLabel(2, "2.1", 2): 1, TSLabel(3, "3.1", 2): 1})
    assert not betti.beta1
    assert betti.verdict.retract_rational


def test_minimal_x0_and_x1(dp6, betti):
    G = dp6.group
    table = multiplicity_table(G)
    pairs = enumerate_minimal_presentations(betti.beta0, betti.beta1, table, G)
    x0s = {X0.sorted().labels for X0, _ in pairs}
    assert x0s == {("2.1", "3.1"), ("3.1", "4.1"), ("2.1", "6.2"), ("4.1", "6.2")}
    X0 = _spec(G, "4.1", "6.2")
    assert [X.sorted().labels for X in minimal_x1(X0, betti.beta0, betti.beta1, table)] == [("2.2", "12.1")]
    # every listed X1 covers the excess of X0 over beta0
    for X0, X1 in pairs:
        gamma = betti.beta1 + sum((table[c.label] for c in X0.orbits), MultiplicityVector()) - betti.beta0
        assert sum((table[c.label] for c in X1.orbits), MultiplicityVector()) >= gamma


def test_empty_beta0_gives_empty_presentation(d12):
    table = multiplicity_table(d12)
    ((X0, X1),) = enumerate_minimal_presentations(MultiplicityVector(), MultiplicityVector(), table, d12)
    assert X0.size == 0 and X1.size == 0


def test_permutation_lattice_has_trivial_presentation(d12):
    P = perm_lattice(d12, ["4.1", "6.2"])
    b = betti_presentation(P)
    assert not b.beta0 and not b.beta1
    empty = GSetSpec(d12, ())
    spec = realize_presentation(P, empty, empty)
    assert spec.certified and verify_exactness(spec).ok


def test_pinned_presentation(pinned):
    assert pinned.certified
    rep = verify_exactness(pinned)
    assert rep.ok and rep.checked == 16
    assert pinned.kernel_vector == MultiplicityVector(
        {TSLabel(2, "2.2", 1): 1, TSLabel(2, "4.1", 1): 1, TSLabel(3, "3.1", 4): 1})
    assert sorted(c for c, _, _ in pinned.psi_terms()) == [1, 1, 1]


def test_other_minimal_choices_certify(dp6, betti):
    G = dp6.group
    table = multiplicity_table(G)
    for X0, X1 in enumerate_minimal_presentations(betti.beta0, betti.beta1, table, G):
        spec = realize_presentation(dp6.lattice, X0, X1, table=table)
        assert verify_exactness(spec).ok
        assert spec.alpha0 >= betti.beta0


def test_zero_psi_is_rejected(pinned):
    P1, P0 = pinned.psi.source, pinned.psi.target
    bad = dataclasses.replace(pinned, psi=LatticeMap(P1, P0, xl.zeros(P0.rank, P1.rank)))
    rep = verify_exactness(bad)
    assert not rep.ok
    assert any(f.startswith("subgroup <sigma>") for f in rep.failures)


def test_tampered_epsilon_is_rejected(pinned):
    zero = [tuple(0 for _ in n) for n in pinned.epsilon_choice]
    rep = verify_exactness(dataclasses.replace(pinned, epsilon_choice=zero))
    assert not rep.ok
    assert any("epsilon not surjective" in f for f in rep.failures)


def test_realize_errors(dp6, pinned):
    G = dp6.group
    # G/A1 alone misses the 3-part of H^1(M)
    with pytest.raises(PresentationError):
        realize_presentation(dp6.lattice, _spec(G, "2.1"), _spec(G, "2.1"))
    P1, P0 = pinned.psi.source, pinned.psi.target
    zero = LatticeMap(P1, P0, xl.zeros(P0.rank, P1.rank))
    with pytest.raises(PresentationError, match="no epsilon"):
        realize_presentation(dp6.lattice, pinned.X0, pinned.X1, zero)


def test_refusal_for_non_retract_rational(v4):
    with pytest.raises(RefusalError) as info:
        betti_presentation(v4.lattice)
    assert info.value.verdict is not None and not info.value.verdict.retract_rational


def test_column_convention_changes_the_cover(dp6):
    # the same matrices read as a column action give the dual-type lattice
    G = dp6.group
    mats = [[[-1, 0], [0, -1]], [[0, 1], [1, 0]], [[0, -1], [1, -1]]]
    C = GLattice(G, mats, name="Mcol")
    v = projective_cover_vector(h1_tmack(C))
    assert v == MultiplicityVector({TSLabel(2, "2.1", 2): 1, TSLabel(3, "3.1", 1): 1})


LABELS = [TSLabel(2, "2.1", 1), TSLabel(2, "2.1", 2), TSLabel(3, "3.1", 1)]
vectors = st.lists(st.integers(0, 3), min_size=3, max_size=3).map(
    lambda xs: MultiplicityVector({k: x for k, x in zip(LABELS, xs) if x}))


@given(st.lists(st.tuples(vectors, vectors), min_size=1, max_size=4))
def test_alternating_sums_law(pairs):
    alphas = [a for a, _ in pairs]
    betas = [b for _, b in pairs]
    expected = True
    for d in range(len(pairs)):
        for k in LABELS:
            s = sum((-1) ** (d - i) * (alphas[i].get(k, 0) - betas[i].get(k, 0)) for i in range(d + 1))
            expected &= s >= 0
    assert alternating_sums_admissible(alphas, betas) == expected
