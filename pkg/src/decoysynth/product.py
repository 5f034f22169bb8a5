"""Synchronous product of an arena with a specification DFA."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .arena import Arena
from .errors import AlphabetMismatch, ArenaError
from .graph import GameGraph
from .logic import Dfa


@dataclass(frozen=True, eq=False)
class ProductGame(GameGraph):
    arena: Arena
    dfa: Dfa
    perspective: str
    states: tuple[tuple[int, int], ...]
    index: dict
    final: frozenset[int]

    def state_name(self, state: int) -> str:
        s, q = self.states[state]
        return f"({self.arena.states[s]}, {self.dfa.states[q]})"

    def lookup(self, arena_state, dfa_state) -> int:
        """Product index of a pair given by identifiers or indices."""
        key = (self.arena.state_index(arena_state), self.dfa.index(dfa_state))
        try:
            return self.index[key]
        except KeyError:
            raise KeyError(f"({arena_state}, {dfa_state}) is not a reachable product state") from None

    def project_state(self, state: int) -> tuple[str, str]:
        s, q = self.states[state]
        return self.arena.states[s], self.dfa.states[q]


def build_product(arena: Arena, dfa: Dfa, perspective: str = "true") -> ProductGame:
    """Reachable part of G x A for the labeling of `perspective`.

    The DFA reads the label of the state being entered, and the initial DFA
    state has already consumed the label of the initial arena state.  DFA
    propositions must be a subset of the arena's; arena propositions the DFA
    does not mention are ignored.
    """
    extra = set(dfa.ap) - arena.ap
    if extra:
        raise AlphabetMismatch(f"DFA propositions {sorted(extra)} are not declared by the arena")
    name = arena.perspective_name(perspective)
    labels = arena.labelings[name]
    if any(lab is None for lab in labels):
        raise ArenaError(f"labeling {name!r} is not total")
    masks = [dfa.mask(lab) for lab in labels]
    delta = dfa.delta

    init = (arena.initial, delta[dfa.initial][masks[arena.initial]])
    index = {init: 0}
    states = [init]
    edges = []
    queue = deque([init])
    while queue:
        s, q = queue.popleft()
        row = []
        for a, t in arena.enabled(s):
            nxt = (t, delta[q][masks[t]])
            if nxt not in index:
                index[nxt] = len(states)
                states.append(nxt)
                queue.append(nxt)
            row.append((a, index[nxt]))
        edges.append(tuple(row))
    return ProductGame(
        owner=tuple(arena.owners[s] for s, _ in states),
        edges=tuple(edges),
        action_names=arena.actions,
        initial=0,
        arena=arena,
        dfa=dfa,
        perspective=name,
        states=tuple(states),
        index=index,
        final=frozenset(i for i, (_, q) in enumerate(states) if q in dfa.finals),
    )


def project_state(game: ProductGame, state: int) -> tuple[str, str]:
    return game.project_state(state)
