import json

import pytest

from decoysynth.arena import (P1, P2, Arena, label_of, load_arena, save_arena, successor,
                              validate_arena)
from decoysynth.errors import ArenaError, UndefinedTransition, UnknownPerspective
from decoysynth.fixtures import build_toy_ab, load_bundled


def tiny(**overrides):
    doc = {
        "states": [{"id": "x", "owner": "P1"}, {"id": "y", "owner": "P2"}],
        "actions": [{"id": "d", "owner": "P1"}, {"id": "a", "owner": "P2"}],
        "transitions": [{"from": "x", "action": "d", "to": "y"}, {"from": "y", "action": "a", "to": "x"}],
        "ap": ["p"],
        "labels": {"true": {"x": ["p"], "y": []}},
        "initial": "x",
    }
    doc.update(overrides)
    return doc


def test_toy_fixture_is_valid(toy):
    assert validate_arena(toy) == []
    assert len(toy.states) == 16
    assert toy.states[toy.initial] == "h0|A|circle"


def test_turn_violation_reported():
    doc = tiny(transitions=[{"from": "x", "action": "a", "to": "y"},
                            {"from": "y", "action": "a", "to": "x"}])
    kinds = [v.kind for v in validate_arena(Arena.from_dict(doc))]
    assert kinds == ["turn violation"]


def test_dead_end_reported():
    doc = tiny(transitions=[{"from": "x", "action": "d", "to": "y"}])
    report = validate_arena(Arena.from_dict(doc))
    assert [v.kind for v in report] == ["dead end"]
    assert "y" in report[0].detail


def test_nondeterminism_partial_and_undeclared_labels():
    doc = tiny(transitions=tiny()["transitions"] + [{"from": "x", "action": "d", "to": "x"}],
               labels={"true": {"x": ["q"]}})
    kinds = sorted(v.kind for v in validate_arena(Arena.from_dict(doc)))
    assert kinds == ["nondeterminism", "partial labeling", "undeclared proposition"]


def test_validate_is_idempotent(toy):
    assert validate_arena(toy) == validate_arena(toy)


def test_successor_examples(toy):
    assert successor(toy, "h0|A|circle", "to1") == "h1|A|square"
    assert successor(toy, "h1|A|square", "switchB") == "h1|B|circle"
    with pytest.raises(UndefinedTransition):
        successor(toy, "h1|A|square", "to2")
    with pytest.raises(KeyError):
        successor(toy, "h0|A|circle", "noop")


def test_successor_closure(toy):
    for s in range(len(toy.states)):
        for _, t in toy.enabled(s):
            assert 0 <= t < len(toy.states)


def test_label_examples(toy):
    assert label_of(toy, "true", "h2|A|square") == {"decoy"}
    assert label_of(toy, "P2", "h2|A|square") == frozenset()
    for persp in ("true", "P2", "L1", "L2", "P1"):
        assert label_of(toy, persp, "h3|A|circle") == {"p"}
    with pytest.raises(UnknownPerspective):
        label_of(toy, "P3", "h0|A|circle")


def test_perspectives_differ_only_at_decoy(toy):
    diff = {s for s, a, b in zip(toy.states, toy.labeling("true"), toy.labeling("P2")) if a != b}
    assert diff == {s for s in toy.states if s.startswith("h2|")}


def test_round_trip(tmp_path, toy):
    path = tmp_path / "toy.json"
    save_arena(toy, path)
    again = load_arena(path)
    assert again == toy
    assert again.to_dict() == toy.to_dict()


def test_bundled_file_matches_builder():
    assert Arena.from_dict(load_bundled("toy_ab")) == build_toy_ab()


@pytest.mark.parametrize("change", [
    {"extra": 1},
    {"initial": "nowhere"},
    {"transitions": [{"from": "x", "action": "zz", "to": "y"}]},
    {"states": [{"id": "x", "owner": "P1"}, {"id": "x", "owner": "P2"}]},
    {"states": [{"id": "x", "owner": "P3"}, {"id": "y", "owner": "P2"}]},
])
def test_rejects_malformed_documents(change):
    with pytest.raises(ArenaError):
        Arena.from_dict(tiny(**change))


def test_missing_key_rejected():
    doc = tiny()
    del doc["ap"]
    with pytest.raises(ArenaError, match="missing"):
        Arena.from_dict(doc)


def test_owner_partition(toy):
    assert set(toy.owners) == {P1, P2}
    for s, owner in zip(toy.states, toy.owners):
        assert (owner == P1) == s.endswith("square")
