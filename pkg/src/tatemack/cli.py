"""Command-line interface.

Exit codes: 0 success, 1 refusal (the lattice is not retract rational),
2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

from . import __version__
from .brauer import psi_to_description, render
from .g_lattices import GSetSpec
from .perm_groups import cycle_string, normalizer, structure_name, subgroup_classes
from .presentations import (PresentationError, RefusalError, betti_presentation,
                            enumerate_minimal_presentations, realize_presentation, verify_exactness)
from .problem import Problem, ProblemError, load_problem
from .resolutions import lattice_predicate, retract_rational
from .tate_cohomology import mackey_datum, tate_value, verify_mackey_axioms
from .tmack import hat0_tmack, projective_cover_vector
from .trivial_source import multiplicity_table, ts_catalog

EXIT_OK, EXIT_REFUSED, EXIT_INPUT = 0, 1, 2
OUTPUT_SCHEMA = "tatemack.output/1"


def bundled_fixture(name: str) -> Path | None:
    p = resources.files("tatemack") / "fixtures" / f"{name}.toml"
    return Path(str(p)) if p.is_file() else None


def _open_problem(arg: str | None) -> Problem:
    if arg is None:
        raise ProblemError("no problem file given (use --problem FILE)", "<command line>")
    path = Path(arg)
    if not path.exists():
        alt = bundled_fixture(arg)
        if alt is not None:
            path = alt
    return load_problem(path)


def _need_lattice(prob: Problem):
    if prob.lattice is None:
        raise ProblemError("this command needs a [lattice] section", prob.source)
    return prob.lattice


def _name(prob: Problem, label: str) -> str:
    return prob.display(label)


def _alias(prob: Problem, label: str):
    return prob.class_aliases().get(label)


def _words(G, H) -> list[str]:
    return [G.word(x) for x in H.generators]


def _vec_json(v) -> dict[str, int]:
    return v.as_strings()


def _vec_text(v) -> str:
    if not v:
        return "0"
    return " + ".join(f"{m}*{k}" if m != 1 else k for k, m in v.as_strings().items())


def _spec_labels(X: GSetSpec) -> list[str]:
    return list(X.labels)


def _spec_text(prob: Problem, X: GSetSpec) -> str:
    if not X.orbits:
        return "(empty)"
    return " + ".join(f"G/{_name(prob, c.label)}" for c in X.orbits)


# ------------------------------------------------------------ subcommands

def cmd_group_info(prob: Problem, args) -> tuple[dict, str]:
    G = prob.group
    gens = [{"name": n, "cycles": cycle_string(g)} for n, g in zip(G.gen_names, G.generators)]
    classes = subgroup_classes(G)
    doc = {"order": G.order, "degree": G.degree, "generators": gens,
           "structure": structure_name(G.whole), "subgroup_classes": len(classes),
           "subgroups": sum(len(c.members) for c in classes)}
    lines = [f"order: {G.order}", f"degree: {G.degree}", f"structure: {doc['structure']}",
             "generators: " + ", ".join(f"{g['name']} = {g['cycles']}" for g in gens),
             f"subgroups: {doc['subgroups']} in {len(classes)} conjugacy classes"]
    return doc, "\n".join(lines) + "\n"


def cmd_subgroups(prob: Problem, args) -> tuple[dict, str]:
    G = prob.group
    rows = []
    for c in subgroup_classes(G):
        H = c.representative
        rows.append({"label": c.label, "alias": _alias(prob, c.label), "order": c.order,
                     "structure": structure_name(H), "conjugates": len(c.members),
                     "representative": _words(G, H), "normalizer_order": normalizer(G, H).order})
    lines = [f"{'label':<7}{'alias':<7}{'order':>6}  {'structure':<10}{'conj':>5}  representative"]
    for r in rows:
        rep = "<" + ", ".join(r["representative"]) + ">"
        lines.append(f"{r['label']:<7}{(r['alias'] or '-'):<7}{r['order']:>6}  {r['structure']:<10}"
                     f"{r['conjugates']:>5}  {rep}")
    return {"classes": rows}, "\n".join(lines) + "\n"


def cmd_ts_catalog(prob: Problem, args) -> tuple[dict, str]:
    G = prob.group
    cat = ts_catalog(G)
    primes = []
    lines = []
    for p in sorted(cat.entries):
        mods = []
        lines.append(f"p = {p}")
        for e in cat.entries[p]:
            mats = {n: e.module.matrix(s).tolist() for n, s in zip(G.gen_names, G.gen_index)}
            mods.append({"label": str(e.label), "vertex": e.vertex.label,
                         "vertex_alias": _alias(prob, e.vertex.label), "index": e.label.index,
                         "dim": e.dim, "simple_dim": e.simple.dim, "matrices": mats})
            mt = "  ".join(f"{n}={m}" for n, m in mats.items())
            lines.append(f"  {str(e.label):<10} vertex {_name(prob, e.vertex.label):<10} dim {e.dim}"
                         f"  simple dim {e.simple.dim}  {mt}")
        primes.append({"p": p, "modules": mods})
    return {"primes": primes}, "\n".join(lines) + "\n"


def _mult_rows(prob: Problem, route: str):
    G = prob.group
    cat = ts_catalog(G)
    table = multiplicity_table(G, cat) if route == "meataxe" else None
    rows = []
    for c in subgroup_classes(G):
        if c.is_trivial:
            continue
        if route == "meataxe":
            v = table[c.label]
        else:
            v = projective_cover_vector(hat0_tmack(GSetSpec(G, (c,))), cat)
        rows.append((c, v))
    return cat, rows


def cmd_mult_table(prob: Problem, args) -> tuple[dict, str]:
    cat, rows = _mult_rows(prob, args.route)
    cols = [str(l) for l in cat.labels()]
    doc = {"route": args.route, "columns": cols,
           "rows": [{"orbit": c.label, "alias": _alias(prob, c.label), "multiplicities": _vec_json(v)}
                    for c, v in rows]}
    w = max(len(x) for x in cols) + 1 if cols else 4
    head = f"{'orbit':<14}" + "".join(f"{x:>{w}}" for x in cols)
    lines = [head]
    for c, v in rows:
        s = v.as_strings()
        lines.append(f"{'G/' + _name(prob, c.label):<14}" + "".join(f"{(s.get(x) or ''):>{w}}" for x in cols))
    return doc, "\n".join(lines) + "\n"


def _fin_text(A) -> str:
    return repr(A)


def cmd_cohomology(prob: Problem, args) -> tuple[dict, str]:
    L = _need_lattice(prob)
    G = prob.group
    rows = []
    lines = [f"lattice {L.name or 'L'} of rank {L.rank}",
             f"{'subgroup':<14}{'H^-1':<14}{'H^0':<14}{'H^1':<14}"]
    for c in subgroup_classes(G):
        vals = {str(i): tate_value(c.representative, L, i).group for i in (-1, 0, 1)}
        rows.append({"class": c.label, "alias": _alias(prob, c.label),
                     "tate": {k: [int(d) for d in v.invariant_factors] for k, v in vals.items()}})
        lines.append(f"{_name(prob, c.label):<14}" + "".join(f"{_fin_text(vals[k]):<14}" for k in ("-1", "0", "1")))
    doc = {"lattice": L.name, "rank": L.rank, "values": rows}
    if args.check_mackey:
        viol = {}
        for i in (-1, 0, 1):
            viol[str(i)] = len(verify_mackey_axioms(mackey_datum(L, i)))
        doc["mackey_violations"] = viol
        lines.append("Mackey axiom violations: " + ", ".join(f"degree {k}: {v}" for k, v in viol.items()))
    return doc, "\n".join(lines) + "\n"


def _pred_json(r) -> dict:
    d = {"holds": r.holds}
    if r.failing_class is not None:
        d["witness"] = {"class": r.failing_class.label,
                        "group": [int(x) for x in r.failing_group.invariant_factors]}
    elif r.detail:
        d["detail"] = r.detail
    return d


def cmd_classify(prob: Problem, args) -> tuple[dict, str]:
    L = _need_lattice(prob)
    preds = {w: lattice_predicate(L, w) for w in ("flasque", "coflasque", "invertible")}
    v = retract_rational(L)
    res = v.resolution
    C = res.terms[1]
    doc = {"lattice": L.name, "rank": L.rank,
           **{k: _pred_json(r) for k, r in preds.items()},
           "retract_rational": v.retract_rational,
           "certificate": {"resolution": "0 -> M -> C -> Q -> 0",
                           "Q": _spec_labels(res.perm_spec), "C_rank": C.rank,
                           "exact": res.certificate().ok,
                           "C_invertible": _pred_json(v.predicate)}}
    lines = [f"lattice {L.name or 'L'} of rank {L.rank}"]
    for k, r in preds.items():
        lines.append(_pred_line(prob, r))
    lines.append(f"retract rational: {'true' if v.retract_rational else 'false'}")
    lines.append(f"  resolution 0 -> M -> C -> Q -> 0 with Q = Z[{_spec_text(prob, res.perm_spec)}], "
                 f"rank C = {C.rank}, exact: {'yes' if doc['certificate']['exact'] else 'no'}")
    lines.append("  C " + _pred_line(prob, v.predicate))
    return doc, "\n".join(lines) + "\n"


def _pred_line(prob: Problem, r) -> str:
    if r.holds:
        return f"{r.which}: true"
    if r.failing_class is not None:
        return f"{r.which}: false (subgroup {_name(prob, r.failing_class.label)}: {r.failing_group!r})"
    return f"{r.which}: false ({r.detail})"


def _realize_task(source: str, x0: list[str], x1: list[str]) -> dict:
    prob = load_problem(source)
    G = prob.group
    spec = realize_presentation(prob.lattice, GSetSpec.from_labels(G, x0), GSetSpec.from_labels(G, x1))
    return _spec_json(prob, spec)


def _coset_names(prob: Problem, P) -> list[str]:
    G = prob.group
    out = []
    for i, c in enumerate(P.perm.spec.orbits):
        for g in P.perm.coset_reps[i]:
            out.append(f"{c.label}:{G.word(g)}")
    return out


def _spec_json(prob: Problem, spec) -> dict:
    G = prob.group
    rep = verify_exactness(spec)
    terms = []
    P1, P0 = spec.psi.source, spec.psi.target
    for coef, (j, i, dc), _ in spec.psi_terms():
        terms.append({"coefficient": coef, "from": P1.perm.spec.orbits[j].label,
                      "to": P0.perm.spec.orbits[i].label, "g": G.word(dc.rep)})
    return {"X0": _spec_labels(spec.X0), "X1": _spec_labels(spec.X1),
            "alpha0": _vec_json(spec.alpha0), "alpha1": _vec_json(spec.alpha1),
            "kernel_vector": _vec_json(spec.kernel_vector),
            "certified": spec.certified and rep.ok, "subgroups_checked": rep.checked,
            "failures": rep.failures,
            "psi": {"matrix": spec.psi.matrix, "rows": _coset_names(prob, P0),
                    "columns": _coset_names(prob, P1), "terms": terms}}


def cmd_presentations(prob: Problem, args) -> tuple[dict, str]:
    L = _need_lattice(prob)
    G = prob.group
    table = multiplicity_table(G)
    b = betti_presentation(L, table)
    pairs = enumerate_minimal_presentations(b.beta0, b.beta1, table, G)
    tasks = [(list(x0.labels), list(x1.labels)) for x0, x1 in pairs]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            futs = [ex.submit(_realize_task, prob.source, a, c) for a, c in tasks]
            results = [f.result() for f in futs]
    else:
        results = []
        for x0, x1 in pairs:
            results.append(_spec_json(prob, realize_presentation(L, x0, x1, table=table)))
    x0s = []
    for x0, _ in pairs:
        if list(x0.labels) not in x0s:
            x0s.append(list(x0.labels))
    doc = {"lattice": L.name, "beta0": _vec_json(b.beta0), "beta1": _vec_json(b.beta1),
           "minimal_X0": x0s, "choices": [{"index": n, **r} for n, r in enumerate(results, 1)]}
    lines = [f"beta0: {_vec_text(b.beta0)}", f"beta1: {_vec_text(b.beta1)}",
             f"minimal X0 ({len(x0s)}):"]
    for x in x0s:
        lines.append("  " + _spec_text(prob, GSetSpec.from_labels(G, x)))
    lines.append("presentations:")
    for n, r in enumerate(results, 1):
        X0 = _spec_text(prob, GSetSpec.from_labels(G, r["X0"]))
        X1 = _spec_text(prob, GSetSpec.from_labels(G, r["X1"]))
        ok = "exact" if r["certified"] else "NOT exact"
        lines.append(f"  [{n}] X0 = {X0}; X1 = {X1}; kernel = "
                     f"{_vec_text_s(r['kernel_vector'])}; {ok} at {r['subgroups_checked']} subgroups")
    return doc, "\n".join(lines) + "\n"


def _vec_text_s(d: dict) -> str:
    return " + ".join(f"{m}*{k}" if m != 1 else k for k, m in d.items()) if d else "0"


def _choose(prob: Problem, choice: str | None, table):
    """The presentation to describe: pinned, a 1-based index, or X0=...[;X1=...]."""
    G = prob.group
    L = _need_lattice(prob)
    if choice is None:
        choice = "pinned" if prob.presentation is not None else "1"
    if choice == "pinned":
        if prob.presentation is None:
            raise ProblemError("the problem file has no [presentation] section", prob.source)
        v = retract_rational(L)
        if not v:
            raise RefusalError("the lattice is not retract rational", v)
        pp = prob.presentation
        return realize_presentation(L, pp.X0, pp.X1, psi=pp.psi(), table=table)
    b = betti_presentation(L, table)
    pairs = enumerate_minimal_presentations(b.beta0, b.beta1, table, G)
    if choice.isdigit():
        k = int(choice)
        if not 1 <= k <= len(pairs):
            raise ProblemError(f"--choice must be between 1 and {len(pairs)}", "<command line>")
        x0, x1 = pairs[k - 1]
        return realize_presentation(L, x0, x1, table=table)
    want = {}
    for part in choice.split(";"):
        key, _, val = part.partition("=")
        key = key.strip()
        if key not in ("X0", "X1") or not val:
            raise ProblemError(f"cannot parse --choice {choice!r}", "<command line>")
        want[key] = sorted(prob.resolve(v.strip()).label for v in val.split(","))
    for x0, x1 in pairs:
        if sorted(x0.labels) == want["X0"] and ("X1" not in want or sorted(x1.labels) == want["X1"]):
            return realize_presentation(L, x0, x1, table=table)
    if "X1" in want:
        X0, X1 = GSetSpec.from_labels(G, want["X0"]), GSetSpec.from_labels(G, want["X1"])
        return realize_presentation(L, X0, X1, table=table)
    raise ProblemError(f"no minimal presentation matches --choice {choice!r}", "<command line>")


def cmd_describe(prob: Problem, args) -> tuple[dict, str]:
    table = multiplicity_table(prob.group)
    spec = _choose(prob, args.choice, table)
    fields = dict(prob.field_names)
    for a in args.alias or []:
        sub, _, name = a.partition("=")
        if not name:
            raise ProblemError(f"--alias expects SUBGROUP=NAME, got {a!r}", "<command line>")
        fields[prob.resolve(sub).label] = name
    desc = psi_to_description(spec, args.mode, fields, prob.variables, prob.class_aliases())
    doc = json.loads(render(desc, "json"))
    return doc, render(desc, "text")


COMMANDS = {
    "group-info": (cmd_group_info, "order, generators and structure of the group"),
    "subgroups": (cmd_subgroups, "conjugacy classes of subgroups"),
    "ts-catalog": (cmd_ts_catalog, "trivial source modules with nontrivial vertex"),
    "mult-table": (cmd_mult_table, "trivial source multiplicities of transitive permutation modules"),
    "cohomology": (cmd_cohomology, "Tate cohomology of the lattice in degrees -1, 0, 1"),
    "classify": (cmd_classify, "flasque, coflasque, invertible and retract rational tests"),
    "presentations": (cmd_presentations, "Betti vectors and certified minimal presentations"),
    "describe": (cmd_describe, "Brauer-group description of a presentation"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tatemack", description="Tate cohomology, Mackey functors and "
                                 "permutation presentations for finite group lattices.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("--problem", "--lattice", dest="problem", metavar="FILE",
                       help="problem file (TOML), or the name of a bundled fixture such as dp6")
        p.add_argument("--json", action="store_true", help="emit JSON instead of text")
        p.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes")
        if name == "mult-table":
            p.add_argument("--route", choices=("meataxe", "tau"), default="meataxe",
                           help="decompose F_p[G/H] directly, or take heads over the Tate ring")
        if name == "cohomology":
            p.add_argument("--check-mackey", action="store_true", help="also verify the Mackey axioms")
        if name == "describe":
            p.add_argument("--choice", help="'pinned', a 1-based index, or X0=A,B[;X1=C,D]")
            p.add_argument("--mode", choices=("relative", "absolute"), default="relative")
            p.add_argument("--alias", action="append", metavar="H=NAME", help="name the fixed field of H")
            p.add_argument("--format", choices=("text", "json"), default=None)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.jobs < 1:
        ap.error("--jobs must be at least 1")
    as_json = args.json or getattr(args, "format", None) == "json"
    fn = COMMANDS[args.command][0]
    try:
        prob = _open_problem(args.problem)
        doc, text = fn(prob, args)
    except ProblemError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except RefusalError as e:
        v = e.verdict
        if as_json:
            out = {"schema": OUTPUT_SCHEMA, "command": args.command, "refused": True, "reason": str(e)}
            if v is not None:
                out["certificate"] = _pred_json(v.predicate)
            print(json.dumps(out, indent=2, sort_keys=True))
        else:
            print(f"refused: {e}")
            if v is not None:
                print("  C " + _pred_line(prob, v.predicate))
        return EXIT_REFUSED
    except PresentationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_REFUSED
    if as_json:
        doc = {"schema": OUTPUT_SCHEMA, "command": args.command, **doc}
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
