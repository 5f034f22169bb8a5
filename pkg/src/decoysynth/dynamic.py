"""Repeated interaction with an attacker who learns decoy locations (experimental).

Each round is a play of the arena.  When the attacker enters a decoy host she
detects it, adds the host to her known-decoy set D, and the network restarts
from its initial state while D persists.  Within a round her moves are
filtered by the permissive strategy of the product under her current
labeling L_D, exactly as in the static hypergame.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from .arena import P1, P2, Arena
from .errors import CapExceeded, ModelError
from .fixtures import host_of
from .graph import GameGraph
from .logic import Dfa
from .product import ProductGame, build_product
from .solver import (PermissiveStrategy, PositionalStrategy, WinningAnalysis, permissive_strategy,
                     positional_strategy, sure_winning_regions)

DEFAULT_DYN_CAP = 1_000_000
RESTART = "restart"


@dataclass(frozen=True, eq=False)
class LabelingFamily:
    """Attacker labelings indexed by the set D of decoys she has identified.

    The member for D is the decoy-blind labeling plus ``decoy`` at every state
    whose location is in D; there are 2**M members for M decoy hosts.
    """

    arena: Arena
    decoys: frozenset[int]
    locations: tuple[int | None, ...]
    blind: str = "P2"
    decoy_prop: str = "decoy"

    @classmethod
    def from_arena(cls, arena: Arena, true: str = "true", blind: str = "P2",
                   decoy_prop: str = "decoy") -> "LabelingFamily":
        locations = tuple(host_of(s) for s in arena.states)
        truth = arena.labeling(true)
        decoys = set()
        for i, lab in enumerate(truth):
            if decoy_prop in lab:
                if locations[i] is None:
                    raise ModelError(f"decoy state {arena.states[i]} has no host location")
                decoys.add(locations[i])
        return cls(arena, frozenset(decoys), locations, arena.perspective_name(blind), decoy_prop)

    @property
    def size(self) -> int:
        return 2 ** len(self.decoys)

    def members(self):
        hosts = sorted(self.decoys)
        for k in range(len(hosts) + 1):
            for subset in combinations(hosts, k):
                yield frozenset(subset)

    def labeling(self, known: frozenset[int]) -> tuple[frozenset[str], ...]:
        base = self.arena.labeling(self.blind)
        extra = frozenset({self.decoy_prop})
        return tuple(lab | extra if loc in known else lab
                     for lab, loc in zip(base, self.locations))

    def perspective(self, known: frozenset[int]) -> str:
        return "L_D{" + ",".join(map(str, sorted(known))) + "}"

    def infer_update(self, known: frozenset[int], state: int) -> frozenset[int]:
        return infer_update(known, self.locations[state], self.decoys)


def infer_update(known: frozenset[int], location, decoys) -> frozenset[int]:
    """Add the current location to D when it is a decoy; monotone and idempotent."""
    if location in decoys and location not in known:
        return known | {location}
    return known


@dataclass(frozen=True)
class Round:
    """The attacker's perceived game for one known-decoy set."""

    known: frozenset[int]
    product: ProductGame
    analysis: WinningAnalysis
    permissive: PermissiveStrategy

    @property
    def region(self) -> frozenset[int]:
        return self.analysis.region(P2)


@dataclass(frozen=True, eq=False)
class DynamicHypergame(GameGraph):
    arena: Arena
    dfa: Dfa
    family: LabelingFamily
    objective_owner: int
    states: tuple  # (s, q1, q2, D)
    index: dict
    rounds: dict   # D -> Round
    restarts: frozenset[int]  # states whose only move is the restart

    def state_name(self, state: int) -> str:
        s, q1, q2, known = self.states[state]
        names = self.dfa.states
        d = "{" + ",".join(map(str, sorted(known))) + "}"
        return f"({self.arena.states[s]}, {names[q1]}, {names[q2]}, D={d})"

    @cached_property
    def accepting(self) -> frozenset[int]:
        finals = self.dfa.finals
        return frozenset(i for i, (_, q1, _, _) in enumerate(self.states) if q1 in finals)

    def by_known(self) -> dict:
        out = {}
        for i, (_, _, _, known) in enumerate(self.states):
            out.setdefault(known, []).append(i)
        return out


def _perceived_round(arena: Arena, dfa: Dfa, family: LabelingFamily, known, owner) -> Round:
    name = family.perspective(known)
    view = arena.with_labeling(name, family.labeling(known))
    product = build_product(view, dfa, name)
    analysis = sure_winning_regions(product, owner, product.final)
    return Round(known, product, analysis, permissive_strategy(analysis, P2))


def build_dynamic_hypergame(arena: Arena, dfa: Dfa, family: LabelingFamily | None = None,
                            restart_policy: str = "full", objective_owner: int = P1,
                            true_perspective: str = "true", filter_attacker: bool = True,
                            cap: int = DEFAULT_DYN_CAP) -> DynamicHypergame:
    """Reachable graph over (s, q1, q2, D) with restarts on decoy entry.

    q1 follows the true labeling, q2 the attacker's current labeling L_D.
    A state whose location is a decoy has a single defender-owned restart
    move back to the initial arena state with fresh DFA components and the
    updated D.  Nodes are everything reachable without filtering; the edges
    of attacker states in her perceived winning region are filtered.
    """
    if restart_policy != "full":
        raise ModelError(f"unsupported restart policy {restart_policy!r}; only 'full' is implemented")
    family = family or LabelingFamily.from_arena(arena)
    truth = [dfa.mask(lab) for lab in arena.labeling(true_perspective)]
    masks, rounds = {}, {}

    def perceived(known):
        if known not in masks:
            masks[known] = [dfa.mask(lab) for lab in family.labeling(known)]
            rounds[known] = _perceived_round(arena, dfa, family, known, objective_owner)
        return masks[known]

    delta = dfa.delta
    s0 = arena.initial

    def start(known):
        return (s0, delta[dfa.initial][truth[s0]], delta[dfa.initial][perceived(known)[s0]], known)

    def step(s, q1, q2, known, t):
        return (t, delta[q1][truth[t]], delta[q2][perceived(known)[t]], family.infer_update(known, t))

    init = start(frozenset())
    index, order = {init: 0}, [init]
    raw_edges = []
    queue = deque([init])
    while queue:
        node = queue.popleft()
        s, q1, q2, known = node
        if family.locations[s] in family.decoys:
            succ = [(RESTART, start(known))]
        else:
            succ = [(a, step(s, q1, q2, known, t)) for a, t in arena.enabled(s)]
        for _, nxt in succ:
            if nxt not in index:
                if len(order) >= cap:
                    raise CapExceeded(f"dynamic hypergame exceeds {cap} states")
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
        raw_edges.append(succ)

    restart_action = len(arena.actions)
    edges, owners, restarts = [], [], set()
    for i, ((s, q1, q2, known), succ) in enumerate(zip(order, raw_edges)):
        if succ[0][0] == RESTART:
            restarts.add(i)
            owners.append(P1)
            edges.append(((restart_action, index[succ[0][1]]),))
            continue
        owners.append(arena.owners[s])
        row = [(a, index[nxt]) for a, nxt in succ]
        if filter_attacker and arena.owners[s] == P2:
            rnd = rounds[known]
            perceived_state = rnd.product.index.get((s, q2))
            allowed = rnd.permissive.actions.get(perceived_state) if perceived_state in rnd.region else None
            if allowed:
                row = [(a, t) for a, t in row if a in allowed]
        edges.append(tuple(row))

    return DynamicHypergame(
        owner=tuple(owners),
        edges=tuple(edges),
        action_names=arena.actions + (RESTART,),
        initial=0,
        arena=arena,
        dfa=dfa,
        family=family,
        objective_owner=objective_owner,
        states=tuple(order),
        index=index,
        rounds=dict(rounds),
        restarts=frozenset(restarts),
    )


@dataclass(frozen=True, eq=False)
class RepeatedResult:
    region: frozenset[int]
    strategy: PositionalStrategy
    analysis: WinningAnalysis


def solve_repeated(dyn: DynamicHypergame, targets=None) -> RepeatedResult:
    """Defender region over all rounds.

    With a defender objective he must reach an accepting q1 in some round;
    with an attacker objective he must keep q1 out of the accepting set in
    every round, restarts included.
    """
    targets = dyn.accepting if targets is None else frozenset(targets)
    if dyn.objective_owner == P1:
        analysis = sure_winning_regions(dyn, P1, targets)
    else:
        analysis = sure_winning_regions(dyn, P2, targets)
    return RepeatedResult(analysis.region(P1), positional_strategy(analysis, P1), analysis)


def known_monotone(dyn: DynamicHypergame) -> list[tuple[int, int]]:
    """Edges along which the known-decoy set shrinks (expected empty)."""
    bad = []
    for i, row in enumerate(dyn.edges):
        for _, t in row:
            if not dyn.states[i][3] <= dyn.states[t][3]:
                bad.append((i, t))
    return bad


def decoy_entering_actions(dyn: DynamicHypergame, known: frozenset[int]) -> list[tuple[int, int]]:
    """(product state, action) pairs of the round-D permissive strategy that enter a decoy."""
    rnd = dyn.rounds[known]
    game, locs = rnd.product, dyn.family.locations
    bad = []
    for state, allowed in sorted(rnd.permissive.actions.items()):
        for a, t in game.edges[state]:
            if a in allowed and locs[game.states[t][0]] in dyn.family.decoys:
                bad.append((state, a))
    return bad


def region_statistics(dyn: DynamicHypergame, result: RepeatedResult) -> list[dict]:
    rows = []
    for known, members in sorted(dyn.by_known().items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
        rnd = dyn.rounds.get(known)
        rows.append({
            "known_decoys": sorted(known),
            "states": len(members),
            "defender_region": sum(1 for i in members if i in result.region),
            "perceived_attacker_region": len(rnd.region) if rnd else 0,
        })
    return rows
