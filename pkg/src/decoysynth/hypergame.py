"""Level-2 hypergame under one-sided labeling misperception.

The defender knows both the true labeling and the attacker's (decoy-blind)
labeling.  Two product games over a shared DFA are solved: ``g1`` with the
true labels and ``g2`` as the attacker perceives it.  The hypergame tracks
the arena state together with the true DFA progress ``q`` and the perceived
progress ``p``, and only enables the moves each player would take if the
attacker's perception were correct.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .arena import P1, P2
from .errors import ModelError
from .graph import GameGraph
from .product import ProductGame
from .solver import (
    PositionalStrategy,
    WinningAnalysis,
    permissive_strategy,
    positional_strategy,
    sure_winning_regions,
)

ABSORB = "<absorb>"


@dataclass(frozen=True)
class PerceptionPartition:
    """Classes of true-game pairs (s, q), keyed by arena and DFA indices."""

    defender_sure: frozenset
    true_win_perceived_lose: frozenset
    true_win_perceived_win: frozenset
    residual: frozenset

    def classes(self) -> dict[str, frozenset]:
        return {
            "defender_sure": self.defender_sure,
            "true_win_perceived_lose": self.true_win_perceived_lose,
            "true_win_perceived_win": self.true_win_perceived_win,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class PerceivedModel:
    """The attacker's view: regions and set-based strategies in ``g2``."""

    game: ProductGame
    analysis: WinningAnalysis
    regions: dict       # player -> frozenset of g2 indices
    permissive: dict    # player -> PermissiveStrategy

    def enabled(self, s: int, p: int, owner: int, all_actions):
        """Actions the attacker considers possible for `owner` at (s, p)."""
        idx = self.game.index.get((s, p))
        if idx is not None and idx in self.regions[owner]:
            allowed = self.permissive[owner].actions.get(idx)
            if allowed:
                return [(a, t) for a, t in all_actions if a in allowed]
        return list(all_actions)


def perceive(g2: ProductGame, analysis2: WinningAnalysis) -> PerceivedModel:
    regions = {P1: analysis2.region(P1), P2: analysis2.region(P2)}
    permissive = {pl: permissive_strategy(analysis2, pl) for pl in (P1, P2)}
    return PerceivedModel(g2, analysis2, regions, permissive)


def _pairs(game: ProductGame, states) -> frozenset:
    return frozenset(game.states[i] for i in states)


def classify_states(analysis1: WinningAnalysis, analysis2: WinningAnalysis) -> PerceptionPartition:
    g1, g2 = analysis1.game, analysis2.game
    win1 = _pairs(g1, analysis1.region(P1))
    win2 = _pairs(g1, analysis1.region(P2))
    win1_p2 = _pairs(g2, analysis2.region(P1))
    win2_p2 = _pairs(g2, analysis2.region(P2))
    return PerceptionPartition(
        defender_sure=win1,
        true_win_perceived_lose=win2 & win1_p2,
        true_win_perceived_win=win2 & win2_p2,
        residual=win2 - win1_p2 - win2_p2,
    )


@dataclass(frozen=True, eq=False)
class HypergameGraph(GameGraph):
    g1: ProductGame
    g2: ProductGame
    analysis1: WinningAnalysis
    perceived: PerceivedModel
    objective_owner: int
    states: tuple[tuple[int, int, int], ...]
    index: dict
    target: frozenset[int]
    divergent: frozenset[int]

    def state_name(self, state: int) -> str:
        s, q, p = self.states[state]
        names = self.g1.dfa.states
        return f"({self.g1.arena.states[s]}, {names[q]}, {names[p]})"

    def lookup(self, arena_state, q, p) -> int:
        arena, dfa = self.g1.arena, self.g1.dfa
        return self.index[(arena.state_index(arena_state), dfa.index(q), dfa.index(p))]

    @property
    def absorb_action(self) -> int:
        return len(self.g1.arena.actions)


def build_hypergame(g1: ProductGame, g2: ProductGame,
                    analysis1: WinningAnalysis, analysis2: WinningAnalysis) -> HypergameGraph:
    """Hypergame over triples (s, q, p) reachable from (s0, q0, p0).

    The node set is every triple some play reaches; transitions follow the
    perception-filtered dynamics, and states whose true pair is in the
    defender's region are absorbing targets.
    """
    if g1.arena is not g2.arena and g1.arena.transitions != g2.arena.transitions:
        raise ModelError("hypergame products must share one arena")
    if g1.dfa is not g2.dfa and g1.dfa != g2.dfa:
        raise ModelError("hypergame products must share one DFA")
    if analysis1.game is not g1 or analysis2.game is not g2:
        raise ModelError("analyses do not belong to the given products")
    if analysis1.reach_player != analysis2.reach_player:
        raise ModelError("both analyses must use the same objective owner")

    arena, dfa = g1.arena, g1.dfa
    true_masks = [dfa.mask(lab) for lab in arena.labelings[g1.perspective]]
    seen_masks = [dfa.mask(lab) for lab in arena.labelings[g2.perspective]]
    delta = dfa.delta
    win1 = _pairs(g1, analysis1.region(P1))
    perceived = perceive(g2, analysis2)

    s0 = arena.initial
    init = (s0, g1.states[g1.initial][1], g2.states[g2.initial][1])
    index = {init: 0}
    states = [init]
    queue = deque([init])
    while queue:
        s, q, p = queue.popleft()
        for _, t in arena.enabled(s):
            nxt = (t, delta[q][true_masks[t]], delta[p][seen_masks[t]])
            if nxt not in index:
                index[nxt] = len(states)
                states.append(nxt)
                queue.append(nxt)

    absorb = len(arena.actions)
    edges, target = [], set()
    for i, (s, q, p) in enumerate(states):
        if (s, q) in win1:
            target.add(i)
            edges.append(((absorb, i),))
            continue
        owner = arena.owners[s]
        row = []
        for a, t in perceived.enabled(s, p, owner, arena.enabled(s)):
            row.append((a, index[(t, delta[q][true_masks[t]], delta[p][seen_masks[t]])]))
        edges.append(tuple(row))

    return HypergameGraph(
        owner=tuple(arena.owners[s] for s, _, _ in states),
        edges=tuple(edges),
        action_names=arena.actions + (ABSORB,),
        initial=0,
        g1=g1,
        g2=g2,
        analysis1=analysis1,
        perceived=perceived,
        objective_owner=analysis1.reach_player,
        states=tuple(states),
        index=index,
        target=frozenset(target),
        divergent=frozenset(i for i, (_, q, p) in enumerate(states) if q != p),
    )


@dataclass(frozen=True, eq=False)
class DeceptiveResult:
    region: frozenset[int]
    strategy: PositionalStrategy
    analysis: WinningAnalysis


def deceptive_sure_winning(hg: HypergameGraph) -> DeceptiveResult:
    """Defender's attractor to Win1 x Q under the filtered dynamics.

    This is the same reachability game whichever side owns the objective:
    once the true pair enters Win1 the classical strategy takes over.
    """
    analysis = sure_winning_regions(hg, P1, hg.target)
    full = positional_strategy(analysis, P1)
    return DeceptiveResult(analysis.win_reach, full, analysis)


@dataclass(frozen=True)
class StealthViolation:
    state: int
    action: int
    allowed: frozenset

    def describe(self, hg: HypergameGraph) -> str:
        names = hg.action_names
        return (f"{hg.state_name(self.state)}: chose {names[self.action]}, "
                f"perceived-rational moves {sorted(names[a] for a in self.allowed)}")


def check_stealthy(hg: HypergameGraph, strategy: PositionalStrategy,
                   partition: PerceptionPartition) -> list[StealthViolation]:
    """Defender moves that would contradict the attacker's perception.

    Only states the attacker truly wins but believes the defender wins are
    constrained; where she believes herself winning every defender move is
    consistent with her view.
    """
    g2_index = hg.g2.index
    win1_p2 = hg.perceived.regions[P1]
    pi1 = hg.perceived.permissive[P1]
    true_win2 = hg.analysis1.region(P2)
    report = []
    for state, action in sorted(strategy.choice.items()):
        s, q, p = hg.states[state]
        if hg.owner[state] != P1:
            continue
        if hg.g1.index.get((s, q)) not in true_win2:
            continue
        perceived_state = g2_index.get((s, p))
        if perceived_state not in win1_p2:
            continue
        allowed = pi1.actions.get(perceived_state, frozenset())
        if action not in allowed:
            report.append(StealthViolation(state, action, allowed))
    return report


def defender_controller(hg: HypergameGraph, result: DeceptiveResult):
    """Defender move at a hypergame triple: the classical strategy inside the
    true winning region, the deceptive one elsewhere in the deceptive region."""
    classical = positional_strategy(hg.analysis1, P1)
    g1 = hg.g1

    def choose(state: int):
        s, q, _ = hg.states[state]
        if state in hg.target:
            return classical.get(g1.index[(s, q)])
        return result.strategy.get(state)

    return choose


def projected(hg: HypergameGraph, states) -> frozenset:
    """Project hypergame triples onto true-game pairs (s, q)."""
    return frozenset(hg.states[i][:2] for i in states)


def synthesize(arena, dfa, objective_owner: int = P1, true_perspective: str = "true",
               attacker_perspective: str = "P2"):
    """Full pipeline: both products, both analyses, hypergame and its solution."""
    from .product import build_product

    g1 = build_product(arena, dfa, true_perspective)
    g2 = build_product(arena, dfa, attacker_perspective)
    an1 = sure_winning_regions(g1, objective_owner, g1.final)
    an2 = sure_winning_regions(g2, objective_owner, g2.final)
    hg = build_hypergame(g1, g2, an1, an2)
    result = deceptive_sure_winning(hg)
    partition = classify_states(an1, an2)
    return Synthesis(g1, g2, an1, an2, hg, result, partition)


@dataclass(frozen=True, eq=False)
class Synthesis:
    g1: ProductGame
    g2: ProductGame
    analysis1: WinningAnalysis
    analysis2: WinningAnalysis
    hg: HypergameGraph
    result: DeceptiveResult
    partition: PerceptionPartition

    @property
    def win1(self) -> frozenset:
        return self.analysis1.region(P1)

    def stealth_report(self) -> list[StealthViolation]:
        return check_stealthy(self.hg, self.result.strategy, self.partition)

    def summary(self) -> dict:
        hg, g1, g2 = self.hg, self.g1, self.g2
        region = self.result.region
        return {
            "objective_owner": f"P{hg.objective_owner}",
            "true_product_states": g1.num_states,
            "perceived_product_states": g2.num_states,
            "hypergame_states": hg.num_states,
            "divergent_states": len(hg.divergent),
            "symmetric_defender_region": len(self.win1),
            "deceptive_defender_region": len(region),
            "deceptive_region_projected": len(projected(hg, region)),
            "initial_symmetric_winning": g1.initial in self.win1,
            "initial_deceptive_winning": hg.initial in region,
            "initial_perceived_attacker_winning": g2.initial in self.analysis2.region(P2),
            "stealth_violations": len(self.stealth_report()),
            "counts_reachable_states_only": True,
        }


__all__ = [
    "PerceptionPartition", "HypergameGraph", "DeceptiveResult", "StealthViolation",
    "Synthesis", "build_hypergame", "classify_states", "deceptive_sure_winning",
    "check_stealthy", "defender_controller", "projected", "synthesize",
]
