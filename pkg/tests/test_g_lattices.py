import itertools

import numpy as np
import pytest

from conftest import augmentation_ideal
from tatemack.g_lattices import (GLattice, GSetSpec, LatticeError, LatticeMap, all_transitive_specs, direct_sum,
                                 dual, fixed_sublattice, hom_basis, perm_hom_basis, perm_lattice, sign_lattice,
                                 trivial_lattice)
from tatemack.perm_groups import double_cosets, left_cosets, subgroup_classes, subgroup_list


def test_rejects_bad_matrices(d12):
    with pytest.raises(LatticeError, match="invertible"):
        GLattice(d12, [[[2]], [[1]], [[1]]])
    with pytest.raises(LatticeError, match="relations"):
        # delta has order 3 but acts by -1
        sign_lattice(d12, [1, 1, -1])
    with pytest.raises(LatticeError, match="one matrix"):
        GLattice(d12, [[[1]]])
    with pytest.raises(LatticeError, match="not 2x2"):
        GLattice(d12, [[[1, 0], [0, 1]], [[1]], [[1, 0], [0, 1]]])


def test_element_matrices_form_a_homomorphism(dp6):
    L = dp6.lattice
    G = L.group
    for x, y in itertools.product(range(G.order), repeat=2):
        assert np.array_equal(L.mats[G.mul[x][y]], L.mats[x] @ L.mats[y])


def test_row_convention_is_transposed(dp6):
    # the fixture gives delta acting on row vectors by [[0,-1],[1,-1]]
    d = dp6.group.parse_word("delta")
    assert dp6.lattice.matrix(d) == [[0, 1], [-1, -1]]


def test_permutation_lattice_acts_on_cosets(d12):
    for c in subgroup_classes(d12):
        P = perm_lattice(d12, [c.label])
        H = c.representative
        R = left_cosets(d12, H)
        assert P.rank == len(R)
        for g in range(d12.order):
            M = P.mats[g]
            assert sorted(M.sum(axis=0).tolist()) == [1] * P.rank
            for pos, x in enumerate(R):
                gx = d12.mul[g][x]
                assert M[P.perm.index(0, gx), pos] == 1
        # fixed points: one orbit sum per H-orbit on G/K
        for K in subgroup_list(d12):
            assert len(fixed_sublattice(K, P)) == len(double_cosets(d12, K, H))


def test_dual_and_direct_sum(dp6):
    M = dp6.lattice
    G = M.group
    D = dual(M)
    for g in range(G.order):
        assert np.array_equal(D.mats[g], np.linalg.inv(M.mats[g]).round().astype(np.int64).T)
    S = direct_sum(M, trivial_lattice(G))
    assert S.rank == 3
    assert np.array_equal(dual(dual(M)).mats[1], M.mats[1])


def test_hom_dimension_counts_double_cosets(d12):
    specs = all_transitive_specs(d12)
    for X, Y in itertools.product(specs[::3], repeat=2):
        PX, PY = perm_lattice(d12, X), perm_lattice(d12, Y)
        basis = perm_hom_basis(PX, PY)
        H, K = X.orbits[0].representative, Y.orbits[0].representative
        assert len(basis) == len(double_cosets(d12, H, K))
        assert all(f.check() for f in basis)


def test_hom_basis_general_and_into_permutation(dp6):
    M = dp6.lattice
    G = M.group
    # End(M) has rank 1: M tensor Q is absolutely irreducible
    E = hom_basis(M, M)
    assert len(E) == 1 and all(f.check() for f in E)
    for c in subgroup_classes(G):
        P = perm_lattice(G, [c.label])
        into = hom_basis(M, P)
        assert all(f.check() for f in into)
        # Hom(M, Z[G/H]) has rank = rank of (M dual)^H
        assert len(into) == len(fixed_sublattice(c.representative, dual(M)))


def test_lattice_map_shape_and_composition(d12):
    P = perm_lattice(d12, ["12.1"])
    Q = perm_lattice(d12, ["6.2"])
    with pytest.raises(LatticeError):
        LatticeMap(P, Q, [[1]])
    f = LatticeMap(P, Q, [[1], [1]])
    g = LatticeMap(Q, P, [[1, 1]])
    assert f.check() and g.check()
    assert g.compose(f).matrix == [[2]]


def test_augmentation_ideal_rank(c4):
    I = augmentation_ideal(c4.group)
    assert I.rank == 3
    assert fixed_sublattice(c4.group.whole, I) == []


def test_gsetspec_labels(d12):
    X = GSetSpec.from_labels(d12, ["6.2", "4.1"])
    assert X.labels == ("6.2", "4.1")
    assert X.sorted().labels == ("4.1", "6.2")
    assert X.size == 2 + 3
    assert repr(GSetSpec(d12, ())) == "(empty)"
