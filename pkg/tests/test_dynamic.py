import pytest

from decoysynth.arena import P1, P2
from decoysynth.dynamic import (LabelingFamily, build_dynamic_hypergame, decoy_entering_actions, infer_update,
                                known_monotone, region_statistics, solve_repeated)
from decoysynth.errors import CapExceeded, ModelError
from decoysynth.hypergame import perceive
from decoysynth.logic import parse_scltl, translate_to_dfa
from decoysynth.product import build_product
from decoysynth.solver import permissive_strategy, sure_winning_regions


def dfa_for(text):
    return translate_to_dfa(parse_scltl(text))


@pytest.fixture(scope="module")
def dyn(toy):
    return build_dynamic_hypergame(toy, dfa_for("!decoy U p"), objective_owner=P2)


def test_infer_update_examples():
    assert infer_update(frozenset(), 4, {4}) == {4}
    assert infer_update(frozenset({4}), 4, {4}) == {4}
    assert infer_update(frozenset({4}), 1, {4}) == {4}


def test_family(toy):
    fam = LabelingFamily.from_arena(toy)
    assert fam.decoys == {2} and fam.size == 2
    assert list(fam.members()) == [frozenset(), frozenset({2})]
    assert fam.labeling(frozenset()) == toy.labeling("P2")
    assert fam.labeling(frozenset({2})) == toy.labeling("true")


def test_round_two_avoids_decoy(dyn):
    assert decoy_entering_actions(dyn, frozenset()) != []
    assert decoy_entering_actions(dyn, frozenset({2})) == []


def test_known_set_monotone(dyn):
    assert known_monotone(dyn) == []
    assert dyn.num_states <= 1000


def test_restart_returns_to_initial_state(dyn):
    arena = dyn.arena
    for i in dyn.restarts:
        s, _, _, known = dyn.states[i]
        assert dyn.family.locations[s] == 2 and known == {2}
        ((_, j),) = dyn.edges[i]
        assert dyn.states[j][0] == arena.initial and dyn.states[j][3] == known
        assert dyn.owner[i] == P1


def test_full_knowledge_round_is_symmetric_game(toy, dyn):
    true_game = build_product(toy, dyn.dfa, "true")
    symmetric = permissive_strategy(sure_winning_regions(true_game, P2, true_game.final), P2)
    rnd = dyn.rounds[frozenset({2})]
    named = lambda game, pi: {game.states[s]: acts for s, acts in pi.actions.items()}
    assert named(rnd.product, rnd.permissive) == named(true_game, symmetric)


def test_projection_consistency(dyn):
    arena = dyn.arena
    views = {known: perceive(rnd.product, rnd.analysis) for known, rnd in dyn.rounds.items()}
    for i, (s, q1, q2, known) in enumerate(dyn.states):
        if i in dyn.restarts or dyn.owner[i] != P2:
            continue
        expected = [a for a, _ in views[known].enabled(s, q2, P2, arena.enabled(s))]
        assert [a for a, _ in dyn.edges[i]] == expected


def test_defender_objective_won_in_first_round(toy):
    dyn = build_dynamic_hypergame(toy, dfa_for("!p U decoy"), objective_owner=P1)
    result = solve_repeated(dyn)
    assert dyn.initial in result.region
    rows = region_statistics(dyn, result)
    assert [r["known_decoys"] for r in rows] == [[], [2]]


def test_unsatisfiable_objective_gives_empty_region(toy):
    dyn = build_dynamic_hypergame(toy, dfa_for("p && decoy"), objective_owner=P1)
    assert solve_repeated(dyn).region == frozenset()


def test_no_decoys_matches_product(toy):
    blind = toy.with_labeling("true", toy.labeling("P2"))
    dfa = dfa_for("!decoy U p")
    game = build_product(blind, dfa, "true")
    plain = build_dynamic_hypergame(blind, dfa, objective_owner=P2, filter_attacker=False)
    assert plain.family.decoys == frozenset() and plain.restarts == frozenset()
    assert plain.num_states == game.num_states
    for i, (s, q1, q2, known) in enumerate(plain.states):
        assert q1 == q2 and known == frozenset()
        j = game.index[(s, q1)]
        assert [(a, plain.states[t][:2]) for a, t in plain.edges[i]] == \
            [(a, game.states[t]) for a, t in game.edges[j]]
    filtered = build_dynamic_hypergame(blind, dfa, objective_owner=P2)
    region = solve_repeated(filtered).region
    symmetric = sure_winning_regions(game, P2, game.final).region(P1)
    assert {filtered.states[i][:2] for i in region} == {game.states[i] for i in symmetric}


def test_bad_policy_and_cap(toy):
    with pytest.raises(ModelError):
        build_dynamic_hypergame(toy, dfa_for("F p"), restart_policy="partial")
    with pytest.raises(CapExceeded):
        build_dynamic_hypergame(toy, dfa_for("F p"), cap=3)
