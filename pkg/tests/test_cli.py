import io
import json

import pytest

from decoysynth.arena import P1, P2, load_arena
from decoysynth.cli import main, step_session
from decoysynth.hypergame import synthesize
from decoysynth.logic import load_dfa, parse_scltl, translate_to_dfa


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_translate(capsys, tmp_path):
    code, out, _ = run(capsys, "translate", "F(h2 && F h3)", "--out", str(tmp_path / "d.json"),
                       "--dot", str(tmp_path / "d.dot"))
    assert code == 0
    assert "states: 3 (3 non-sink), accepting: q2" in out
    assert len(load_dfa(tmp_path / "d.json").states) == 3
    assert "doublecircle" in (tmp_path / "d.dot").read_text()


def test_solve_empty_defender_region(capsys):
    code, out, _ = run(capsys, "solve", "toy_ab", "--formula", "F h3", "--perspective", "hosts", "--owner", "P2")
    assert code == 0
    assert "defender winning region: 0 states" in out


def test_solve_writes_strategies(capsys, tmp_path):
    out_path = tmp_path / "r.json"
    code, _, _ = run(capsys, "solve", "toy_ab", "--formula", "!p U decoy", "--out", str(out_path))
    doc = json.loads(out_path.read_text())
    assert code == 0 and doc["defender_strategy"]["(h1|A|square, q0)"] == "switchB"


def test_synth_toy(capsys, tmp_path):
    code, out, _ = run(capsys, "synth", "toy_ab", "--formula", "!p U decoy", "--out", str(tmp_path / "s.json"),
                       "--dot", str(tmp_path / "hg.dot"))
    assert code == 0
    assert "initial state deceptively sure-winning for the defender: yes" in out
    assert "stealth violations: 0" in out
    assert "fillcolor" in (tmp_path / "hg.dot").read_text()


def test_synth_uses_network_objective(capsys):
    code, out, _ = run(capsys, "synth", "case6")
    assert code == 0
    assert "objective (attacker): (!decoy U p2) && (!decoy U p5)" in out
    assert "initial state perceived winning by the attacker: yes" in out


def test_dynamic(capsys):
    code, out, _ = run(capsys, "dynamic", "toy_ab", "--formula", "!decoy U p", "--owner", "P2")
    assert code == 0
    assert "known-decoy set monotone: yes" in out


def test_compile_and_reload(capsys, tmp_path):
    path = tmp_path / "a.json"
    code, out, _ = run(capsys, "compile", "toy_ab_net", "--out", str(path))
    assert code == 0 and "16 states" in out
    assert len(load_arena(path).states) == 16


@pytest.mark.parametrize("kind", ["arena", "product", "hypergame"])
def test_export_dot(capsys, tmp_path, kind):
    path = tmp_path / "g.dot"
    code, _, _ = run(capsys, "export-dot", "toy_ab", "--kind", kind, "--formula", "!p U decoy", "--out", str(path))
    text = path.read_text()
    assert code == 0 and text.startswith("digraph") and "shape=box" in text and "shape=circle" in text


def test_stats_is_deterministic(capsys):
    first = run(capsys, "stats", "--seed", "7", "--count", "3")[1]
    second = run(capsys, "stats", "--seed", "7", "--count", "3")[1]
    strip = lambda text: text.rsplit(" in ", 1)[0]
    assert strip(first) == strip(second)


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "solve")[0] == 1
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys, "solve", "toy_ab")[0] == 1  # no objective anywhere
    assert run(capsys, "solve", str(tmp_path / "missing.json"), "--formula", "a")[0] == 2
    assert run(capsys, "solve", "toy_ab", "--formula", "G p")[0] == 2
    assert run(capsys, "solve", "toy_ab", "--formula", "F nowhere")[0] == 2
    assert run(capsys, "compile", "case6", "--cap-states", "10")[0] == 3
    assert run(capsys, "translate", "F (a && X X X b)", "--cap-dfa", "2")[0] == 3


def session(toy, text, owner, role, moves, filtered=False):
    syn = synthesize(toy, translate_to_dfa(parse_scltl(text)), owner)
    out = io.StringIO()
    transcript = step_session(syn, role, io.StringIO("".join(m + "\n" for m in moves)), out, filtered)
    return transcript, out.getvalue()


def test_session_attacker_walks_into_decoy(toy):
    transcript, out = session(toy, "!p U decoy", P1, "attacker", ["to1", "oops", "to2"])
    assert out.rstrip().endswith("decoy reached: defender objective satisfied")
    assert "invalid action 'oops'" in out
    assert [t["action"] for t in transcript] == ["to1", "switchB", "to2"]
    assert "tool plays switchB" in out


def test_session_filtered_view(toy):
    _, out = session(toy, "!p U decoy", P1, "attacker", ["0", "0"], filtered=True)
    assert "actions: 0:to2" in out


def test_session_out_of_region_defender(toy):
    _, out = session(toy, "F p", P2, "defender", [])
    assert out.startswith("out of region")


def test_session_immediate_eof(toy):
    transcript, _ = session(toy, "!p U decoy", P1, "attacker", [])
    assert transcript == []


def test_session_is_byte_stable(toy):
    runs = [session(toy, "!p U decoy", P1, "attacker", ["to1", "to2"]) for _ in range(2)]
    assert runs[0] == runs[1]
