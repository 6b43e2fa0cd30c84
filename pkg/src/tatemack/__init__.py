"""Tate cohomology, Tate Mackey functors and permutation presentations of G-lattices."""

__version__ = "0.1.0"

from .brauer import psi_to_description, render, round_trip
from .g_lattices import GLattice, GSetSpec, dual, perm_lattice, sign_lattice, trivial_lattice
from .perm_groups import PermGroup, parse_cycles, subgroup_classes
from .presentations import (betti_presentation, enumerate_minimal_presentations,
                            realize_presentation, verify_exactness)
from .problem import load_problem, parse_problem
from .resolutions import lattice_predicate, retract_rational
from .tate_cohomology import mackey_datum, tate_value, verify_mackey_axioms
from .tmack import h1_tmack, hat0_tmack, projective_cover_vector, tau_algebra
from .trivial_source import multiplicity_table, ts_catalog

__all__ = [
    "GLattice", "GSetSpec", "PermGroup", "betti_presentation", "dual", "enumerate_minimal_presentations",
    "h1_tmack", "hat0_tmack", "lattice_predicate", "load_problem", "mackey_datum", "multiplicity_table",
    "parse_cycles", "parse_problem", "perm_lattice", "projective_cover_vector", "psi_to_description",
    "realize_presentation", "render", "retract_rational", "round_trip", "sign_lattice",
    "subgroup_classes", "tate_value", "tau_algebra", "trivial_lattice", "ts_catalog",
    "verify_exactness", "verify_mackey_axioms",
]
