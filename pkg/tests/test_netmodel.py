import copy
import json
from dataclasses import replace

import pytest

from decoysynth.arena import P1, P2, validate_arena
from decoysynth.errors import CapExceeded, NetworkError, PreconditionViolated
from decoysynth.fixtures import build_toy_ab, host_of, load_bundled
from decoysynth.netmodel import (apply_vuln, compile_arena, compile_network, load_model, load_network, restore,
                                 suspend, vuln_applicable)


@pytest.fixture(scope="module")
def case6():
    return load_model("case6")


@pytest.fixture(scope="module")
def case6_compiled(case6):
    return compile_network(case6)


def minimal():
    return {"hosts": [{"id": 0, "services": [0]}], "connectivity": [],
            "vulns": [{"id": 0, "service": 0}], "attacker": {"start": 0}}


def test_case6_document(case6):
    assert case6.host(3).noncritical == {0, 1}
    assert case6.host(3).services == {0, 1, 2}
    assert case6.decoys == {4}
    assert case6.objectives["attacker"] == "(!decoy U p2) && (!decoy U p5)"
    assert [v.grant for v in case6.vulns] == [2, 1, 2]


def test_noncritical_must_be_running():
    doc = minimal()
    doc["hosts"][0]["noncritical"] = [1]
    with pytest.raises(NetworkError) as err:
        load_network(doc)
    assert err.value.path == "$.hosts[0].noncritical"


@pytest.mark.parametrize("mutate, path", [
    (lambda d: d.update(bogus=1), "$"),
    (lambda d: d["attacker"].pop("start"), "$.attacker"),
    (lambda d: d["hosts"][0].update(services="0"), "$.hosts[0].services"),
    (lambda d: d["attacker"].update(start=7), "$.attacker.start"),
    (lambda d: d.update(decoys=[5]), "$.decoys"),
    (lambda d: d.update(connectivity=[[0, 9]]), "$.connectivity[0]"),
    (lambda d: d["vulns"][0].update(service=4), "$.vulns[0]"),
    (lambda d: d.update(defender={"actions": ["switch"]}), "$.defender.actions"),
])
def test_schema_errors_carry_paths(mutate, path):
    doc = minimal()
    mutate(doc)
    with pytest.raises(NetworkError) as err:
        load_network(doc)
    assert err.value.path == path


def test_minimal_model_compiles():
    arena = compile_arena(load_network(minimal()))
    assert len(arena.states) == 2
    assert validate_arena(arena) == []
    assert set(arena.actions) == {"skip", "noop"}


def test_vuln_preconditions(case6):
    s0 = case6.initial_state()
    v0, v1 = case6.vuln(0), case6.vuln(1)
    assert vuln_applicable(case6, s0, v0, 0, 1)
    assert not vuln_applicable(case6, s0, v0, 0, 2)  # no edge 0 -> 2
    assert not vuln_applicable(case6, s0, v0, 1, 2)  # not at host 1
    assert not vuln_applicable(case6, s0.with_credential(0, 0), v0, 0, 1)
    at3 = replace(apply_vuln(case6, s0, v0, 3), location=0, turn=P2)
    blocked = suspend(case6, at3, 3, 1)
    assert vuln_applicable(case6, at3, v1, 0, 3)
    assert not vuln_applicable(case6, blocked, v1, 0, 3)


def test_no_credentials_no_exploits(case6):
    s = case6.initial_state().with_credential(0, 0)
    for v in case6.vulns:
        for src, dst in case6.connectivity["-"]:
            assert not vuln_applicable(case6, s, v, src, dst)


def test_apply_vuln_postconditions(case6):
    s0 = case6.initial_state()
    s = apply_vuln(case6, s0, case6.vuln(0), 1)
    assert (s.location, s.credential(1), s.turn) == (1, 2, P1)
    assert (1, 0) in s.stopped
    s = apply_vuln(case6, s0, case6.vuln(2), 3)
    assert s.credential(3) == 2 and s.stopped == frozenset()
    s = apply_vuln(case6, s0, case6.vuln(1), 3)
    assert s.credential(3) == 1
    with pytest.raises(PreconditionViolated):
        apply_vuln(case6, s0, case6.vuln(2), 1)  # host 1 does not run service 2


def test_suspend_restore_roundtrip(case6):
    s0 = case6.initial_state()
    assert restore(case6, suspend(case6, s0, 3, 0), 3, 0) == s0
    with pytest.raises(PreconditionViolated):
        suspend(case6, s0, 3, 2)
    with pytest.raises(PreconditionViolated):
        restore(case6, s0, 3, 0)


def test_credentials_monotone(case6_compiled):
    arena, states = case6_compiled.arena, case6_compiled.network_states
    for s, _, t in arena.transitions:
        before, after = dict(states[s].credentials), dict(states[t].credentials)
        assert all(after[h] >= level for h, level in before.items())


def test_case6_compiled_arena(case6_compiled):
    arena = case6_compiled.arena
    assert validate_arena(arena) == []
    assert "p0" in arena.labeling("true")[arena.initial]
    assert arena.states[arena.initial] == "h0|-|circle|c100000|-"
    assert len(arena.states) == 2128


def test_label_asymmetry_is_decoy_location(case6_compiled):
    arena = case6_compiled.arena
    diff = {i for i, (a, b) in enumerate(zip(arena.labeling("true"), arena.labeling("P2"))) if a != b}
    assert diff == {i for i in range(len(arena.states)) if case6_compiled.location(i) == 4}
    assert all(host_of(arena.states[i]) == case6_compiled.location(i) for i in range(len(arena.states)))


def test_no_decoys_no_asymmetry():
    doc = copy.deepcopy(load_bundled("case6"))
    doc["decoys"] = []
    arena = compile_arena(load_network(doc))
    assert arena.labeling("true") == arena.labeling("P2")


def test_toy_network_collapses_onto_fixture():
    compiled = compile_arena(load_model("toy_ab_net"))
    fixture = build_toy_ab()
    assert validate_arena(compiled) == []

    def image(sid):
        loc, topo, shape = sid.split("|")[:3]
        return fixture.state_index(f"h{int(loc[1:])}|{topo}|{shape}")

    def rename(action):
        if action.startswith("v"):
            return "to" + action.split("->h")[1]
        return {"skip": "stay"}.get(action, action)

    seen = set()
    for s, a, t in compiled.transitions:
        src = image(compiled.states[s])
        edge = (src, fixture.action_index(rename(compiled.actions[a])), image(compiled.states[t]))
        assert edge[2] == fixture.enabled(src)[[x for x, _ in fixture.enabled(src)].index(edge[1])][1]
        seen.add(edge)
    reachable = {image(sid) for sid in compiled.states}
    expected = {(s, a, t) for s, a, t in fixture.transitions if s in reachable}
    assert seen == expected
    for i, sid in enumerate(compiled.states):
        j = image(sid)
        for persp in ("true", "P2"):
            mine = {"p" if x == "p3" else x for x in compiled.labeling(persp)[i] if x in ("decoy", "p3")}
            assert mine == fixture.labeling(persp)[j]
        assert compiled.labeling("hosts")[i] == fixture.labeling("hosts")[j]


def test_cap(case6):
    with pytest.raises(CapExceeded):
        compile_arena(case6, cap=50)


def test_load_from_path(tmp_path):
    path = tmp_path / "net.json"
    path.write_text(json.dumps(minimal()))
    assert load_network(path).start == 0
    with pytest.raises(NetworkError):
        load_network(tmp_path / "missing.json")
