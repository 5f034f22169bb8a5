"""Bundled models: the four-node topology-switching toy and the six-host network."""
from __future__ import annotations

import json
from importlib import resources

from .arena import Arena

TOPOLOGY_EDGES = {
    "A": [(0, 1), (1, 2), (1, 3), (2, 3)],
    "B": [(0, 1), (1, 2), (2, 3)],
}
DECOY_NODE = 2
GOAL_NODE = 3

BUNDLED = {
    "toy_ab": "toy_ab.arena.json",
    "toy_ab_net": "toy_ab.network.json",
    "case6": "case6.network.json",
}


def toy_state(node: int, topology: str, shape: str) -> str:
    """Identifier of a toy state; circles are attacker turns, squares defender turns."""
    return f"h{node}|{topology}|{shape}"


def build_toy_ab() -> Arena:
    """Attacker walks nodes 0-3; the defender may switch topology after each move.

    Under A node 1 reaches 2 and 3, under B only 2.  Node 2 is the decoy and
    node 3 the attacker's goal.  Perspectives: ``true`` labels the decoy,
    ``P2`` is decoy-blind, ``hosts`` emits ``h<n>`` for the current node.
    """
    nodes, topologies = range(4), ("A", "B")
    states, transitions = [], []
    for n in nodes:
        for x in topologies:
            states.append((toy_state(n, x, "circle"), "P2"))
            states.append((toy_state(n, x, "square"), "P1"))
            for y in topologies:
                act = "noop" if y == x else f"switch{y}"
                transitions.append((toy_state(n, x, "square"), act, toy_state(n, y, "circle")))
            moves = [b for a, b in TOPOLOGY_EDGES[x] if a == n]
            for b in moves:
                transitions.append((toy_state(n, x, "circle"), f"to{b}", toy_state(b, x, "square")))
            if not moves:
                transitions.append((toy_state(n, x, "circle"), "stay", toy_state(n, x, "square")))
    actions = [("to1", "P2"), ("to2", "P2"), ("to3", "P2"), ("stay", "P2"),
               ("noop", "P1"), ("switchA", "P1"), ("switchB", "P1")]
    labels = {"true": {}, "P2": {}, "hosts": {}}
    for sid, _ in states:
        n = int(sid.split("|")[0][1:])
        common = ["p"] if n == GOAL_NODE else []
        labels["P2"][sid] = common
        labels["true"][sid] = common + (["decoy"] if n == DECOY_NODE else [])
        labels["hosts"][sid] = [f"h{n}"]
    ap = ["decoy", "p"] + [f"h{n}" for n in nodes]
    return Arena.build(states, actions, transitions, ap, labels, toy_state(0, "A", "circle"))


def host_of(state_id: str) -> int | None:
    """Attacker location encoded in toy and compiled-network state identifiers."""
    head = state_id.split("|", 1)[0]
    if head.startswith("h") and head[1:].isdigit():
        return int(head[1:])
    return None


def load_bundled(name: str) -> dict:
    try:
        filename = BUNDLED[name]
    except KeyError:
        raise KeyError(f"no bundled model named {name!r}; choose from {sorted(BUNDLED)}") from None
    text = resources.files("decoysynth").joinpath("data", filename).read_text(encoding="utf-8")
    return json.loads(text)
