"""Turn-based deterministic game arenas with one labeling per perspective.

States and actions are opaque strings at the boundary and dense integers
inside.  Player 1 is the defender (square states), player 2 the attacker
(circle states).
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import ArenaError, UndefinedTransition, UnknownPerspective

P1, P2 = 1, 2

PERSPECTIVE_ALIASES = {"P1": "true", "L": "true", "L1": "true", "L2": "P2"}

_OWNER_NAMES = {"P1": P1, "P2": P2, 1: P1, 2: P2, "1": P1, "2": P2}
_ARENA_KEYS = {"states", "actions", "transitions", "ap", "labels", "initial"}


def parse_owner(value) -> int:
    try:
        return _OWNER_NAMES[value]
    except (KeyError, TypeError):
        raise ArenaError(f"unknown owner {value!r}; expected P1 or P2") from None


def opponent(player: int) -> int:
    return P2 if player == P1 else P1


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


@dataclass(frozen=True)
class Arena:
    states: tuple[str, ...]
    owners: tuple[int, ...]
    actions: tuple[str, ...]
    action_owners: tuple[int, ...]
    transitions: tuple[tuple[int, int, int], ...]
    ap: frozenset[str]
    labelings: Mapping[str, tuple[frozenset[str], ...]]
    initial: int

    _state_index: dict = field(init=False, repr=False, compare=False)
    _action_index: dict = field(init=False, repr=False, compare=False)
    _delta: dict = field(init=False, repr=False, compare=False)
    _out: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "_state_index", {s: i for i, s in enumerate(self.states)})
        set_(self, "_action_index", {a: i for i, a in enumerate(self.actions)})
        delta = {}
        out = [[] for _ in self.states]
        for s, a, t in self.transitions:
            if (s, a) not in delta:
                out[s].append((a, t))
            delta[(s, a)] = t
        for row in out:
            row.sort(key=lambda at: self.actions[at[0]])
        set_(self, "_delta", delta)
        set_(self, "_out", tuple(tuple(row) for row in out))

    @classmethod
    def build(
        cls,
        states: Sequence[tuple[str, object]],
        actions: Sequence[tuple[str, object]],
        transitions: Sequence[tuple[str, str, str]],
        ap,
        labels: Mapping[str, Mapping[str, Sequence[str]]],
        initial: str,
    ) -> "Arena":
        """Build an arena from string identifiers.

        Structural errors (unknown identifiers, duplicate declarations) raise
        `ArenaError`; semantic invariants are left to `validate_arena`.
        """
        state_ids = [s for s, _ in states]
        action_ids = [a for a, _ in actions]
        for kind, ids in (("state", state_ids), ("action", action_ids)):
            dup = [x for x, n in Counter(ids).items() if n > 1]
            if dup:
                raise ArenaError(f"duplicate {kind} identifiers: {sorted(dup)}")
        sidx = {s: i for i, s in enumerate(state_ids)}
        aidx = {a: i for i, a in enumerate(action_ids)}
        trans = []
        for src, act, dst in transitions:
            for kind, name, table in (("state", src, sidx), ("action", act, aidx), ("state", dst, sidx)):
                if name not in table:
                    raise ArenaError(f"transition ({src}, {act}, {dst}) references unknown {kind} {name!r}")
            trans.append((sidx[src], aidx[act], sidx[dst]))
        if initial not in sidx:
            raise ArenaError(f"unknown initial state {initial!r}")
        labelings = {}
        for persp, table in labels.items():
            unknown = set(table) - set(sidx)
            if unknown:
                raise ArenaError(f"labeling {persp!r} mentions unknown states {sorted(unknown)}")
            # missing states are kept as None so the validator can report them
            labelings[persp] = tuple(
                frozenset(table[s]) if s in table else None for s in state_ids
            )
        return cls(
            states=tuple(state_ids),
            owners=tuple(parse_owner(o) for _, o in states),
            actions=tuple(action_ids),
            action_owners=tuple(parse_owner(o) for _, o in actions),
            transitions=tuple(trans),
            ap=frozenset(ap),
            labelings=labelings,
            initial=sidx[initial],
        )

    # -- lookup helpers -------------------------------------------------
    def state_index(self, state) -> int:
        if isinstance(state, int):
            return state
        try:
            return self._state_index[state]
        except KeyError:
            raise ArenaError(f"unknown state {state!r}") from None

    def action_index(self, action) -> int:
        if isinstance(action, int):
            return action
        try:
            return self._action_index[action]
        except KeyError:
            raise ArenaError(f"unknown action {action!r}") from None

    def enabled(self, state) -> tuple[tuple[int, int], ...]:
        """(action, successor) pairs at a state, sorted by action identifier."""
        return self._out[self.state_index(state)]

    def perspective_name(self, perspective: str) -> str:
        name = PERSPECTIVE_ALIASES.get(perspective, perspective)
        if name not in self.labelings:
            raise UnknownPerspective(
                f"unknown perspective {perspective!r}; available: {sorted(self.labelings)}"
            )
        return name

    def labeling(self, perspective: str) -> tuple[frozenset[str], ...]:
        return self.labelings[self.perspective_name(perspective)]

    def with_labeling(self, name: str, labels: Sequence[frozenset[str]]) -> "Arena":
        """Copy of the arena with one extra (or replaced) perspective."""
        if len(labels) != len(self.states):
            raise ArenaError("labeling must cover every state")
        return Arena(
            self.states, self.owners, self.actions, self.action_owners,
            self.transitions, self.ap, {**self.labelings, name: tuple(labels)},
            self.initial,
        )

    # -- interchange ----------------------------------------------------
    def to_dict(self) -> dict:
        owner = {P1: "P1", P2: "P2"}
        return {
            "states": [{"id": s, "owner": owner[o]} for s, o in zip(self.states, self.owners)],
            "actions": [{"id": a, "owner": owner[o]} for a, o in zip(self.actions, self.action_owners)],
            "transitions": [
                {"from": self.states[s], "action": self.actions[a], "to": self.states[t]}
                for s, a, t in self.transitions
            ],
            "ap": sorted(self.ap),
            "labels": {
                persp: {s: sorted(lab) for s, lab in zip(self.states, table) if lab is not None}
                for persp, table in sorted(self.labelings.items())
            },
            "initial": self.states[self.initial],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Arena":
        if not isinstance(doc, Mapping):
            raise ArenaError("arena document must be an object")
        unknown = set(doc) - _ARENA_KEYS
        if unknown:
            raise ArenaError(f"unknown arena keys: {sorted(unknown)}")
        missing = _ARENA_KEYS - set(doc)
        if missing:
            raise ArenaError(f"missing arena keys: {sorted(missing)}")
        try:
            return cls.build(
                states=[(d["id"], d["owner"]) for d in doc["states"]],
                actions=[(d["id"], d["owner"]) for d in doc["actions"]],
                transitions=[(d["from"], d["action"], d["to"]) for d in doc["transitions"]],
                ap=doc["ap"],
                labels=doc["labels"],
                initial=doc["initial"],
            )
        except (KeyError, TypeError) as exc:
            raise ArenaError(f"malformed arena document: {exc!r}") from None


def load_arena(path) -> Arena:
    with open(path, encoding="utf-8") as fh:
        return Arena.from_dict(json.load(fh))


def save_arena(arena: Arena, path) -> None:
    Path(path).write_text(json.dumps(arena.to_dict(), indent=1, sort_keys=True) + "\n", encoding="utf-8")


def validate_arena(arena: Arena) -> list[Violation]:
    report = []
    seen = {}
    for s, a, t in arena.transitions:
        sid, aid = arena.states[s], arena.actions[a]
        if arena.owners[s] != arena.action_owners[a]:
            report.append(Violation(
                "turn violation",
                f"action {aid} (P{arena.action_owners[a]}) enabled at {sid} (P{arena.owners[s]})",
            ))
        if (s, a) in seen and seen[(s, a)] != t:
            report.append(Violation(
                "nondeterminism",
                f"({sid}, {aid}) leads to both {arena.states[seen[(s, a)]]} and {arena.states[t]}",
            ))
        seen.setdefault((s, a), t)
    for i, sid in enumerate(arena.states):
        if arena.owners[i] not in (P1, P2):
            report.append(Violation("owner", f"state {sid} has owner {arena.owners[i]!r}"))
        if not arena.enabled(i):
            report.append(Violation("dead end", f"state {sid} has no enabled action"))
    for persp, table in sorted(arena.labelings.items()):
        for sid, lab in zip(arena.states, table):
            if lab is None:
                report.append(Violation("partial labeling", f"{persp} does not label {sid}"))
            elif not lab <= arena.ap:
                report.append(Violation(
                    "undeclared proposition",
                    f"{persp} labels {sid} with {sorted(lab - arena.ap)}",
                ))
    return report


def successor(arena: Arena, state, action) -> str:
    s, a = arena.state_index(state), arena.action_index(action)
    try:
        return arena.states[arena._delta[(s, a)]]
    except KeyError:
        raise UndefinedTransition(
            f"no transition from {arena.states[s]} under {arena.actions[a]}"
        ) from None


def label_of(arena: Arena, perspective: str, state) -> frozenset[str]:
    return arena.labeling(perspective)[arena.state_index(state)]
