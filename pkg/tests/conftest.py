from importlib import resources

import pytest

from tatemack.g_lattices import all_transitive_specs, perm_lattice, sign_lattice, trivial_lattice
from tatemack.problem import load_problem

FIXTURES = ("dp6", "s3", "c4", "v4", "dp6_perm")


def fixture_path(name):
    return resources.files("tatemack") / "fixtures" / f"{name}.toml"


def load(name):
    return load_problem(fixture_path(name))


@pytest.fixture(scope="session")
def dp6():
    return load("dp6")


@pytest.fixture(scope="session")
def d12(dp6):
    return dp6.group


@pytest.fixture(scope="session")
def s3():
    return load("s3")


@pytest.fixture(scope="session")
def c4():
    return load("c4")


@pytest.fixture(scope="session")
def v4():
    return load("v4")


def sign_lattices(G):
    """Every rank-1 lattice whose generators act by +-1 and which defines a valid action."""
    import itertools
    from tatemack.g_lattices import LatticeError
    out = []
    for signs in itertools.product((1, -1), repeat=len(G.generators)):
        if all(s == 1 for s in signs):
            continue
        try:
            out.append(sign_lattice(G, signs, name="sign" + "".join("+" if s > 0 else "-" for s in signs)))
        except LatticeError:
            pass
    return out


def lattice_zoo(prob, max_rank=None):
    """The trivial lattice, the sign lattices, all transitive permutation lattices and the fixture lattice."""
    G = prob.group
    out = [trivial_lattice(G)] + sign_lattices(G)
    for X in all_transitive_specs(G):
        P = perm_lattice(G, X)
        P.name = f"Z[G/{X.orbits[0].label}]"
        out.append(P)
    if prob.lattice is not None:
        out.append(prob.lattice)
    if max_rank is not None:
        out = [L for L in out if L.rank <= max_rank]
    return out


def augmentation_ideal(G):
    """Kernel of Z[G] -> Z, on the basis e_g - e_1; H^1 of it is Z/|G|."""
    from tatemack.g_lattices import sublattice
    P = perm_lattice(G, ["1.1"])
    basis = []
    for k in range(1, P.rank):
        v = [0] * P.rank
        v[0], v[k] = -1, 1
        basis.append(v)
    return sublattice(P, basis, name="I")


# ------------------------------------------------ acceptance criteria report

CRITERIA = {
    1: "subgroup classes of D12 with structures and representatives",
    2: "trivial source catalog: labels, dimensions, vertices, module isomorphism",
    3: "multiplicity table of transitive permutation functors",
    4: "Betti vectors of the degree 6 del Pezzo lattice",
    5: "minimal X0 list, kernel vector and minimal X1",
    6: "relative and absolute Brauer descriptions of the pinned presentation",
    7: "Mackey axioms on every datum of the fixture zoo",
    8: "H^1 by Smith form equals exhaustive cocycle enumeration",
    9: "Ĥ^0(H, Z[G/K]) against the double coset formula",
    10: "exactness of every admissible presentation, route agreement",
    11: "alpha/beta inequality law on every certified presentation",
}

_outcomes: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        if hasattr(rep, "wasxfail"):
            status = "xfail"
        else:
            status = rep.outcome
        _outcomes.setdefault(m.args[0], []).append((item.name, status))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_outcomes):
        runs = _outcomes[n]
        ok = all(s == "passed" for _, s in runs)
        tr.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {CRITERIA.get(n, '')}")
        if not ok:
            for name, s in runs:
                tr.write_line(f"              {s:<7} {name}")


@pytest.fixture
def cli(capsys):
    """Run the command line in-process; returns (exit code, stdout, stderr)."""
    from tatemack.cli import main

    def run(*argv):
        capsys.readouterr()
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err
    return run
