import copy
import dataclasses
import json

import pytest

from conftest import load
from tatemack.brauer import (DescriptionError, FieldNamer, arrow_semantics, psi_to_description, render,
                             round_trip, to_json)
from tatemack.g_lattices import GSetSpec
from tatemack.perm_groups import class_by_label
from tatemack.presentations import realize_presentation


@pytest.fixture(scope="module")
def pinned(dp6):
    pin = dp6.presentation
    return realize_presentation(dp6.lattice, pin.X0, pin.X1, pin.psi())


def _describe(prob, spec, mode="relative"):
    return psi_to_description(spec, mode, prob.field_names, prob.variables, prob.class_aliases())


def _rep(G, label):
    return class_by_label(G, label).representative


def test_arrow_semantics(dp6):
    G = dp6.group
    namer = FieldNamer(G, dp6.field_names)
    A2, E1, C = _rep(G, "2.2"), _rep(G, "6.2"), _rep(G, "4.1")
    # inclusion A2 <= E1 read as Br(F2) -> Br(F2F3)
    (a,) = arrow_semantics(G, A2, E1, G.identity, namer)
    assert a.op == "Res" and a.apply_text("B") == "Res_{F2F3/F2}(B)"
    assert a.source().name == "F2" and a.target().name == "F2F3"
    # the orbit sum Z[G/G] -> Z[G/C] is a corestriction
    (a,) = arrow_semantics(G, G.whole, C, G.identity, namer)
    assert a.apply_text("Q") == "Cor_{F3/k}(Q)"
    assert a.source().name == "F3" and a.target().name == "k"
    assert arrow_semantics(G, C, C, G.identity, namer) == ()


def test_arrow_with_conjugation(dp6):
    G = dp6.group
    B = _rep(G, "3.1")
    g = G.parse_word("sigma")
    (a,) = arrow_semantics(G, B, B, g)
    assert a.op == "conj" and a.apply_text("x") == "conj_{sigma}(x)"


def test_conjugate_fields_are_named_by_the_conjugator(dp6):
    G = dp6.group
    namer = FieldNamer(G, dp6.field_names)
    c = class_by_label(G, "4.1")
    others = [H for H in c.members if H != c.representative]
    assert len(others) == 2
    for H in others:
        name = namer.label(H).name
        assert name.endswith("(F3)") and name != "F3"
    assert namer.label(G.trivial).name == "K" and namer.label(G.whole).name == "k"
    with pytest.raises(DescriptionError):
        FieldNamer(G, {"2.1": "F", "2.2": "F"})


def test_relative_description(dp6, pinned):
    d = _describe(dp6, pinned)
    assert d.map_text() == "Psi(B, Q) = (Res_{F2F3/F2}(B), Cor_{F2/k}(B) + Cor_{F3/k}(Q))"
    assert d.relations() == ["Res_{F2F3/F2}(B) = 0", "Cor_{F2/k}(B) + Cor_{F3/k}(Q) = 0"]
    assert [s.field.degree for s in d.sources] == [2, 3]


def test_absolute_description(dp6, pinned):
    d = _describe(dp6, pinned, "absolute")
    text = render(d)
    for i, cond in enumerate(["Res_{K/F2}(B) = 0", "Res_{K/F3}(Q) = 0", "Res_{F2F3/F2}(B) = 0",
                              "Cor_{F2/k}(B) + Cor_{F3/k}(Q) = 0"], 1):
        assert f"  ({i}) {cond}\n" in text
    assert "Br(F2F3) x Br(k) x Br(K)^2" in text


def test_second_choice_uses_default_names(dp6):
    G = dp6.group
    spec = realize_presentation(dp6.lattice, GSetSpec.from_labels(G, ["2.1", "3.1"]),
                                GSetSpec.from_labels(G, ["2.1", "3.1"]))
    d = psi_to_description(spec, "relative", class_names=dp6.class_aliases())
    assert [(s.field.name, s.field.degree) for s in d.sources] == [("K^{A1}", 6), ("K^{B}", 4)]
    assert round_trip(spec, to_json(d)).ok


def test_trivial_description():
    prob = load("dp6_perm")
    empty = GSetSpec(prob.group, ())
    spec = realize_presentation(prob.lattice, empty, empty)
    d = psi_to_description(spec)
    assert d.trivial
    assert render(d) == "H^1(k,T) = 0\n"
    assert to_json(d)["conditions"] == []


def test_round_trip(dp6, pinned):
    for mode in ("relative", "absolute"):
        doc = render(_describe(dp6, pinned, mode), "json")
        rep = round_trip(pinned, doc)
        assert rep.ok and rep.lattice_equal


def test_round_trip_detects_tampering(dp6, pinned):
    doc = to_json(_describe(dp6, pinned))
    bad = copy.deepcopy(doc)
    bad["entries"][0]["terms"][0]["coefficient"] = 2
    rep = round_trip(pinned, bad)
    assert not rep.ok and rep.failures
    bad = copy.deepcopy(doc)
    bad["entries"][-1]["terms"].pop()
    assert not round_trip(pinned, bad).ok


def test_refuses_uncertified_and_bad_mode(dp6, pinned):
    broken = dataclasses.replace(pinned, certificate=[dataclasses.replace(pinned.certificate[0],
                                                                          composite_zero=False)])
    with pytest.raises(DescriptionError, match="certified"):
        psi_to_description(broken)
    with pytest.raises(DescriptionError, match="mode"):
        psi_to_description(pinned, "sideways")
    with pytest.raises(DescriptionError, match="format"):
        render(psi_to_description(pinned), "yaml")


def test_json_is_deterministic(dp6, pinned):
    a = render(_describe(dp6, pinned, "absolute"), "json")
    b = render(_describe(dp6, pinned, "absolute"), "json")
    assert a == b
    doc = json.loads(a)
    assert doc["mode"] == "absolute" and doc["trivial"] is False
    assert [t["kind"] for t in doc["targets"]] == ["orbit", "orbit", "augmentation", "augmentation"]
