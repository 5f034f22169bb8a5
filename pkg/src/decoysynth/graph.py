"""Explicit turn-based game graphs consumed by the solver."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True, eq=False)
class GameGraph:
    """Finite game graph with dense state and action indices.

    `edges[i]` lists the enabled `(action, successor)` pairs at state `i`,
    sorted by action name.  Subclasses add the meaning of each state.
    """

    owner: tuple[int, ...]
    edges: tuple[tuple[tuple[int, int], ...], ...]
    action_names: tuple[str, ...]
    initial: int
    _preds: list = field(init=False, repr=False, compare=False)

    @property
    def num_states(self) -> int:
        return len(self.owner)

    def predecessors(self) -> list[list[int]]:
        """Predecessor lists with multiplicity (one entry per edge)."""
        if getattr(self, "_preds", None) is None:
            preds = [[] for _ in self.owner]
            for s, row in enumerate(self.edges):
                for _, t in row:
                    preds[t].append(s)
            object.__setattr__(self, "_preds", preds)
        return self._preds

    def successor(self, state: int, action: int) -> int:
        for a, t in self.edges[state]:
            if a == action:
                return t
        raise KeyError((state, action))

    def state_name(self, state: int) -> str:
        return str(state)
