"""Seeded random formulas, arenas and networks for property checks and stats."""
from __future__ import annotations

import random

from .arena import P1, P2, Arena
from .logic import FALSE, TRUE, Atom, Formula, eventually, mk_and, mk_next, mk_or, mk_until, neg_atom

DEFAULT_PROPS = ("a", "b", "c")


def random_formula(rng: random.Random, budget: int = 8, props=DEFAULT_PROPS) -> Formula:
    """Random co-safe formula in negation normal form with AST size <= budget."""
    if budget <= 1:
        roll = rng.random()
        if roll < 0.08:
            return rng.choice((TRUE, FALSE))
        return Atom(rng.choice(props))
    if budget == 2:
        return rng.choice((neg_atom(rng.choice(props)), mk_next(Atom(rng.choice(props)))))
    kind = rng.choice(("and", "or", "until", "until", "next", "eventually"))
    if kind in ("next", "eventually"):
        # F x normalizes to (true U x), which costs two nodes
        if kind == "next":
            return mk_next(random_formula(rng, budget - 1, props))
        return eventually(random_formula(rng, budget - 2, props))
    left = rng.randint(1, budget - 2)
    a = random_formula(rng, left, props)
    b = random_formula(rng, budget - 1 - left, props)
    return {"and": mk_and, "or": mk_or, "until": mk_until}[kind](a, b)


def random_arena(rng: random.Random, max_states: int = 200, max_actions: int = 4,
                 props=DEFAULT_PROPS, decoy_rate: float = 0.0) -> Arena:
    """Random turn-based arena.

    Every state gets 1..max_actions actions of its owner.  ``true`` and ``P2``
    labelings agree except that states drawn as decoys (with probability
    `decoy_rate`) carry ``decoy`` only in the true labeling.
    """
    n = rng.randint(2, max_states)
    owners = [rng.choice((P1, P2)) for _ in range(n)]
    names = {P1: [f"d{i}" for i in range(max_actions)], P2: [f"a{i}" for i in range(max_actions)]}
    trans = []
    for s in range(n):
        for a in rng.sample(range(max_actions), rng.randint(1, max_actions)):
            trans.append((s, a if owners[s] == P2 else max_actions + a, rng.randrange(n)))
    blind = [frozenset(p for p in props if rng.random() < 0.3) for _ in range(n)]
    true = [lab | {"decoy"} if rng.random() < decoy_rate else lab for lab in blind]
    return Arena(
        states=tuple(f"s{i}" for i in range(n)),
        owners=tuple(owners),
        actions=tuple(names[P2] + names[P1]),
        action_owners=(P2,) * max_actions + (P1,) * max_actions,
        transitions=tuple(trans),
        ap=frozenset(props) | {"decoy"},
        labelings={"true": tuple(true), "P2": tuple(blind)},
        initial=0,
    )


VULN_TABLE = [
    {"id": 0, "service": 0, "threshold": 1, "grant": 2, "stops": [0]},
    {"id": 1, "service": 1, "threshold": 1, "grant": 1},
    {"id": 2, "service": 2, "threshold": 1, "grant": 2},
]


def random_network(rng: random.Random, max_hosts: int = 6) -> dict:
    """Network document with at least one decoy and few suspendable services."""
    n = rng.randint(3, max_hosts)
    hosts, budget = [], 3
    for h in range(n):
        services = sorted(rng.sample(range(3), rng.randint(1, 3)))
        noncritical = []
        if h and budget and rng.random() < 0.4:
            noncritical = [rng.choice(services)]
            budget -= 1
        hosts.append({"id": h, "services": services, "noncritical": noncritical})
    running = {svc for h in hosts for svc in h["services"]}
    vulns = [v for v in VULN_TABLE if {v["service"], *v.get("stops", [])} <= running]
    edges = {(rng.randrange(h), h) for h in range(1, n)}
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(range(n), 2)
        edges.add((a, b))
    decoys = sorted(rng.sample(range(1, n), rng.randint(1, min(2, n - 1))))
    goals = [h for h in range(1, n) if h not in decoys] or [decoys[0]]
    picked = sorted(rng.sample(goals, min(2, len(goals))))
    objective = " && ".join(f"(!decoy U p{g})" for g in picked)
    return {
        "name": f"random-{n}",
        "hosts": hosts,
        "connectivity": sorted(map(list, edges)),
        "vulns": vulns,
        "decoys": decoys,
        "attacker": {"start": 0, "credential": 1, "skip": rng.choice(("always", "when-stuck"))},
        "defender": {"actions": ["suspend", "restore"]},
        "objectives": {"attacker": objective},
    }
