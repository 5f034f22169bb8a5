"""Sure-winning regions and strategies for turn-based reachability games."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .arena import P1, P2, opponent
from .graph import GameGraph


@dataclass(frozen=True, eq=False)
class WinningAnalysis:
    game: GameGraph
    reach_player: int
    targets: frozenset[int]
    win_reach: frozenset[int]
    win_safe: frozenset[int]
    rank: dict

    @property
    def safe_player(self) -> int:
        return opponent(self.reach_player)

    def region(self, player: int) -> frozenset[int]:
        return self.win_reach if player == self.reach_player else self.win_safe

    def winner(self, state: int) -> int:
        return self.reach_player if state in self.win_reach else self.safe_player


@dataclass(frozen=True, eq=False)
class PermissiveStrategy:
    player: int
    region: frozenset[int]
    actions: dict  # state -> frozenset of action indices

    def __getitem__(self, state):
        return self.actions[state]

    def __contains__(self, state):
        return state in self.actions


@dataclass(frozen=True, eq=False)
class PositionalStrategy:
    player: int
    choice: dict  # state -> action index
    ties: dict = field(default_factory=dict)  # state -> tuple of equally ranked actions

    def __getitem__(self, state):
        return self.choice[state]

    def __contains__(self, state):
        return state in self.choice

    def get(self, state, default=None):
        return self.choice.get(state, default)


def attractor(game: GameGraph, player: int, target: Iterable[int], naive: bool = False):
    """Least fixed point of the controllable-predecessor operator for `player`.

    Returns the attractor and the iteration at which each state entered it.
    The default worklist version runs in O(|edges|); ``naive=True`` iterates
    the operator directly and exists as a cross-check.
    """
    if naive:
        return _attractor_naive(game, player, target)
    owner, edges = game.owner, game.edges
    rank = {s: 0 for s in target}
    pending = [len(row) for row in edges]
    preds = game.predecessors()
    layer = sorted(rank)
    level = 0
    while layer:
        level += 1
        nxt = []
        for t in layer:
            for s in preds[t]:
                if s in rank:
                    continue
                if owner[s] == player:
                    rank[s] = level
                    nxt.append(s)
                else:
                    pending[s] -= 1
                    if pending[s] == 0:
                        rank[s] = level
                        nxt.append(s)
        layer = nxt
    return frozenset(rank), rank


def _attractor_naive(game, player, target):
    rank = {s: 0 for s in target}
    level = 0
    while True:
        level += 1
        new = []
        for s, row in enumerate(game.edges):
            if s in rank:
                continue
            succ = [t in rank for _, t in row]
            if (game.owner[s] == player and any(succ)) or (game.owner[s] != player and all(succ)):
                new.append(s)
        if not new:
            return frozenset(rank), rank
        for s in new:
            rank[s] = level


def sure_winning_regions(game: GameGraph, reach_player: int, targets: Iterable[int],
                         naive: bool = False) -> WinningAnalysis:
    targets = frozenset(targets)
    win, rank = attractor(game, reach_player, targets, naive=naive)
    safe = frozenset(range(game.num_states)) - win
    assert not (win & safe) and len(win) + len(safe) == game.num_states
    return WinningAnalysis(game, reach_player, targets, win, safe, rank)


def permissive_strategy(analysis: WinningAnalysis, player: int, region=None) -> PermissiveStrategy:
    """All actions of `player` that keep the play inside `region`.

    `region` defaults to the player's own winning region.  Reach-player
    states that are targets keep every enabled action.
    """
    game = analysis.game
    region = analysis.region(player) if region is None else frozenset(region)
    absorbing = analysis.targets if player == analysis.reach_player else frozenset()
    actions = {}
    for s in region:
        if game.owner[s] != player:
            continue
        if s in absorbing:
            allowed = frozenset(a for a, _ in game.edges[s])
        else:
            allowed = frozenset(a for a, t in game.edges[s] if t in region)
        if allowed:
            actions[s] = allowed
    return PermissiveStrategy(player, region, actions)


def positional_strategy(analysis: WinningAnalysis, player: int) -> PositionalStrategy:
    """Deterministic memoryless strategy on the player's winning region.

    The reach player moves to a successor of least rank; the safe player
    takes the first action (by name) that stays in its region.  Remaining
    ties are broken by action name.
    """
    game = analysis.game
    names = game.action_names
    choice, ties = {}, {}
    if player == analysis.reach_player:
        rank = analysis.rank
        for s in analysis.win_reach:
            if game.owner[s] != player or s in analysis.targets:
                continue
            scored = [(rank[t], names[a], a) for a, t in game.edges[s] if t in rank]
            best = min(scored)
            tied = tuple(a for r, _, a in sorted(scored) if r == best[0])
            choice[s] = best[2]
            if len(tied) > 1:
                ties[s] = tied
    else:
        region = analysis.win_safe
        for s in region:
            if game.owner[s] != player:
                continue
            staying = sorted((names[a], a) for a, t in game.edges[s] if t in region)
            choice[s] = staying[0][1]
            if len(staying) > 1:
                ties[s] = tuple(a for _, a in staying)
    return PositionalStrategy(player, choice, ties)


def product_analysis(game, reach_player: int = P2) -> WinningAnalysis:
    """Regions of a product game whose reachability objective is its final set."""
    return sure_winning_regions(game, reach_player, game.final)


__all__ = [
    "P1", "P2", "WinningAnalysis", "PermissiveStrategy", "PositionalStrategy",
    "attractor", "sure_winning_regions", "permissive_strategy",
    "positional_strategy", "product_analysis",
]
