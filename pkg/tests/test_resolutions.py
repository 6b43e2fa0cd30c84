import pytest

from conftest import lattice_zoo, load
from tatemack.g_lattices import GLattice, LatticeMap, dual, perm_lattice, sign_lattice, trivial_lattice
from tatemack.perm_groups import subgroup_list
from tatemack.resolutions import (certify_short_exact, coflasque_res_first, coflasque_res_second,
                                  flasque_res_first, lattice_predicate, retract_rational)
from tatemack.tate_cohomology import tate_value

SMALL = [pytest.param(L, id=f"{n}-{L.name}") for n in ("dp6", "s3", "c4", "v4")
         for L in lattice_zoo(load(n), max_rank=4) if not L.is_permutation]


def _vanishes(L, degree):
    return all(tate_value(H, L, degree).group.is_trivial() for H in subgroup_list(L.group))


@pytest.mark.parametrize("L", SMALL)
def test_coflasque_first_type(L):
    R = coflasque_res_first(L)
    C, P, _ = R.terms
    assert R.certificate().ok
    assert P.is_permutation
    assert all(f.check() for f in R.maps)
    assert _vanishes(C, 1)


@pytest.mark.parametrize("L", SMALL)
def test_flasque_first_type(L):
    R = flasque_res_first(L)
    _, P, F = R.terms
    assert R.certificate().ok
    assert P.is_permutation
    assert all(f.check() for f in R.maps)
    assert _vanishes(F, -1)


@pytest.mark.parametrize("L", SMALL)
def test_coflasque_second_type(L):
    R = coflasque_res_second(L)
    _, C, Q = R.terms
    assert R.certificate().ok
    assert Q.is_permutation
    assert all(f.check() for f in R.maps)
    assert _vanishes(C, 1)


@pytest.mark.parametrize("name,expected", [("dp6", True), ("s3", True), ("c4", True), ("v4", False)])
def test_retract_rational(name, expected):
    v = retract_rational(load(name).lattice)
    assert bool(v) is expected
    assert v.resolution.certificate().ok
    if not expected:
        assert v.predicate.failing_class is not None or v.predicate.detail


def test_predicates_on_permutation_and_dp6(dp6):
    G = dp6.group
    P = perm_lattice(G, ["4.1", "6.2"])
    for w in ("flasque", "coflasque", "invertible"):
        assert lattice_predicate(P, w)
    M = dp6.lattice
    r = lattice_predicate(M, "coflasque")
    assert not r and r.failing_class.label == "2.1" and r.failing_group.invariant_factors == (2, 2)
    assert not lattice_predicate(M, "flasque")
    inv = lattice_predicate(M, "invertible")
    assert not inv and inv.detail == "not coflasque" and "false" in inv.summary()
    with pytest.raises(ValueError):
        lattice_predicate(M, "stably permutation")


def test_invertible_without_permutation_basis(s3):
    # a permutation lattice forgotten to a plain lattice is still invertible; the dual root lattice is not
    G = s3.group
    P = perm_lattice(G, ["2.1"])
    Q = GLattice(G, P.gen_matrices, name="plain")
    assert not Q.is_permutation
    r = lattice_predicate(Q, "invertible")
    assert r and r.section is not None
    assert not lattice_predicate(dual(s3.lattice), "invertible")


def test_certificate_rejects_non_exact(d12):
    Z = trivial_lattice(d12)
    double = LatticeMap(Z, Z, [[2]])
    zero = LatticeMap(Z, Z, [[0]])
    c = certify_short_exact(double, zero)
    assert not c.ok and not c.right_surjective
    ident = LatticeMap(Z, Z, [[1]])
    c = certify_short_exact(ident, ident)
    assert not c.composite_zero


def test_inflated_sign_lattice(d12):
    # retract rational through its coflasque resolution, though not invertible itself
    L = sign_lattice(d12, [-1, 1, 1])
    assert retract_rational(L)
    r = lattice_predicate(L, "flasque")
    assert not r and r.failing_class.label == "2.1"
    assert not lattice_predicate(L, "invertible")
