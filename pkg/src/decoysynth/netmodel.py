"""Declarative network-security models compiled into game arenas.

A network document lists hosts with their services, a directed
connectivity relation (optionally one per topology), vulnerabilities with
pre- and post-conditions, decoy hosts and the defender's action schema.
Compilation enumerates the reachable network states and emits an arena
with three perspectives: ``true`` (decoys labeled), ``P2`` (decoy-blind)
and ``hosts`` (attacker location).
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, replace
from typing import Mapping

import jsonschema

from .arena import P1, P2, Arena
from .errors import CapExceeded, NetworkError, PreconditionViolated

DEFAULT_STATE_CAP = 2_000_000
SINGLE_TOPOLOGY = "-"
DEFENDER_ACTIONS = ("suspend", "restore", "switch")

_ids = {"type": "array", "items": {"type": "integer", "minimum": 0}, "uniqueItems": True}
_edges = {"type": "array", "items": {"type": "array", "items": {"type": "integer"},
                                     "minItems": 2, "maxItems": 2}}

SCHEMA = {
    "type": "object",
    "required": ["hosts", "connectivity", "vulns", "attacker"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "hosts": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "services"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "services": _ids,
                    "noncritical": _ids,
                },
            },
        },
        "connectivity": {
            "oneOf": [
                _edges,
                {"type": "object", "minProperties": 1, "additionalProperties": _edges},
            ],
        },
        "initial_topology": {"type": "string"},
        "vulns": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "service"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "service": {"type": "integer", "minimum": 0},
                    "threshold": {"type": "integer", "minimum": 0, "maximum": 2},
                    "grant": {"type": "integer", "minimum": 1, "maximum": 2},
                    "stops": _ids,
                },
            },
        },
        "decoys": _ids,
        "attacker": {
            "type": "object",
            "required": ["start"],
            "additionalProperties": False,
            "properties": {
                "start": {"type": "integer"},
                "credential": {"type": "integer", "minimum": 0, "maximum": 2},
                "skip": {"enum": ["always", "when-stuck"]},
            },
        },
        "defender": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "actions": {"type": "array", "items": {"enum": list(DEFENDER_ACTIONS)},
                            "uniqueItems": True},
            },
        },
        "objectives": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"defender": {"type": "string"}, "attacker": {"type": "string"}},
        },
    },
}


@dataclass(frozen=True)
class Host:
    id: int
    services: frozenset[int]
    noncritical: frozenset[int]
    is_decoy: bool = False


@dataclass(frozen=True)
class Vuln:
    """Exploit of `service` on a target, usable with credential >= `threshold`
    on the source host; grants `grant` on the target and stops `stops` there."""

    id: int
    service: int
    threshold: int = 1
    grant: int = 2
    stops: frozenset[int] = frozenset()


@dataclass(frozen=True)
class NetworkState:
    location: int
    credentials: tuple[tuple[int, int], ...]  # sorted (host, level)
    stopped: frozenset[tuple[int, int]] = frozenset()
    suspended: frozenset[tuple[int, int]] = frozenset()
    turn: int = P2
    topology: str = SINGLE_TOPOLOGY

    def credential(self, host: int) -> int:
        return dict(self.credentials).get(host, 0)

    def with_credential(self, host: int, level: int) -> "NetworkState":
        creds = dict(self.credentials)
        creds[host] = level
        return replace(self, credentials=tuple(sorted(creds.items())))


@dataclass(frozen=True)
class NetworkModel:
    hosts: tuple[Host, ...]
    connectivity: Mapping[str, frozenset[tuple[int, int]]]
    initial_topology: str
    vulns: tuple[Vuln, ...]
    start: int
    start_credential: int = 1
    skip: str = "always"
    defender_actions: frozenset[str] = frozenset({"suspend", "restore"})
    objectives: Mapping[str, str] = None
    name: str = ""

    @property
    def host_ids(self) -> tuple[int, ...]:
        return tuple(h.id for h in self.hosts)

    @property
    def decoys(self) -> frozenset[int]:
        return frozenset(h.id for h in self.hosts if h.is_decoy)

    def host(self, host_id: int) -> Host:
        for h in self.hosts:
            if h.id == host_id:
                return h
        raise NetworkError(f"unknown host {host_id}")

    def vuln(self, vuln_id: int) -> Vuln:
        for v in self.vulns:
            if v.id == vuln_id:
                return v
        raise NetworkError(f"unknown vulnerability {vuln_id}")

    def running(self, state: NetworkState, host: int, service: int) -> bool:
        key = (host, service)
        return (service in self.host(host).services
                and key not in state.stopped and key not in state.suspended)

    def initial_state(self) -> NetworkState:
        creds = tuple((h, self.start_credential if h == self.start else 0) for h in self.host_ids)
        return NetworkState(self.start, creds, turn=P2, topology=self.initial_topology)


def _load_json_doc(document):
    if isinstance(document, Mapping):
        return document
    try:
        with open(document, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise NetworkError(f"cannot read network document: {exc.strerror}", str(document)) from None
    except json.JSONDecodeError as exc:
        raise NetworkError(f"not valid JSON: {exc}", str(document)) from None


def _path(error) -> str:
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in error.absolute_path)


def load_network(document) -> NetworkModel:
    """Validate a network document (mapping or file path) into a model."""
    doc = _load_json_doc(document)
    errors = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(doc),
                    key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        raise NetworkError(errors[0].message, _path(errors[0]))

    decoys = set(doc.get("decoys", []))
    hosts, seen = [], set()
    for i, h in enumerate(doc["hosts"]):
        if h["id"] in seen:
            raise NetworkError(f"duplicate host id {h['id']}", f"$.hosts[{i}].id")
        seen.add(h["id"])
        services = frozenset(h["services"])
        noncritical = frozenset(h.get("noncritical", []))
        if not noncritical <= services:
            raise NetworkError(
                f"noncritical services {sorted(noncritical - services)} are not running",
                f"$.hosts[{i}].noncritical")
        hosts.append(Host(h["id"], services, noncritical, h["id"] in decoys))
    for d in sorted(decoys - seen):
        raise NetworkError(f"decoy {d} is not a declared host", "$.decoys")

    conn = doc["connectivity"]
    topologies = {SINGLE_TOPOLOGY: conn} if isinstance(conn, list) else dict(conn)
    connectivity = {}
    for name, edges in topologies.items():
        where = "$.connectivity" if isinstance(conn, list) else f"$.connectivity.{name}"
        for j, (a, b) in enumerate(edges):
            for end in (a, b):
                if end not in seen:
                    raise NetworkError(f"edge mentions unknown host {end}", f"{where}[{j}]")
        connectivity[name] = frozenset(map(tuple, edges))
    initial_topology = doc.get("initial_topology", next(iter(topologies)))
    if initial_topology not in connectivity:
        raise NetworkError(f"unknown topology {initial_topology!r}", "$.initial_topology")

    all_services = set().union(*(h.services for h in hosts))
    vulns, vseen = [], set()
    for i, v in enumerate(doc["vulns"]):
        if v["id"] in vseen:
            raise NetworkError(f"duplicate vulnerability id {v['id']}", f"$.vulns[{i}].id")
        vseen.add(v["id"])
        stops = frozenset(v.get("stops", []))
        for svc in {v["service"]} | stops:
            if svc not in all_services:
                raise NetworkError(f"service {svc} is not run by any host", f"$.vulns[{i}]")
        vulns.append(Vuln(v["id"], v["service"], v.get("threshold", 1), v.get("grant", 2), stops))

    attacker = doc["attacker"]
    if attacker["start"] not in seen:
        raise NetworkError(f"start host {attacker['start']} is not declared", "$.attacker.start")
    actions = frozenset(doc.get("defender", {}).get("actions", ["suspend", "restore"]))
    if "switch" in actions and len(connectivity) < 2:
        raise NetworkError("topology switching needs at least two topologies", "$.defender.actions")
    return NetworkModel(
        hosts=tuple(hosts),
        connectivity=connectivity,
        initial_topology=initial_topology,
        vulns=tuple(vulns),
        start=attacker["start"],
        start_credential=attacker.get("credential", 1),
        skip=attacker.get("skip", "always"),
        defender_actions=actions,
        objectives=dict(doc.get("objectives", {})),
        name=doc.get("name", ""),
    )


def vuln_applicable(model: NetworkModel, state: NetworkState, vuln: Vuln, source: int, target: int) -> bool:
    return (
        source == state.location
        and (source, target) in model.connectivity[state.topology]
        and state.credential(source) >= vuln.threshold
        and model.running(state, target, vuln.service)
    )


def apply_vuln(model: NetworkModel, state: NetworkState, vuln: Vuln, target: int) -> NetworkState:
    if not vuln_applicable(model, state, vuln, state.location, target):
        raise PreconditionViolated(
            f"vulnerability {vuln.id} is not applicable from host {state.location} to host {target}")
    # credentials never decrease: exploiting grants at least `grant`
    nxt = state.with_credential(target, max(state.credential(target), vuln.grant))
    stopped = {(target, s) for s in vuln.stops if s in model.host(target).services}
    return replace(nxt, location=target, stopped=state.stopped | stopped, turn=P1)


def suspend(model: NetworkModel, state: NetworkState, host: int, service: int) -> NetworkState:
    if service not in model.host(host).noncritical:
        raise PreconditionViolated(f"service {service} on host {host} is critical")
    if not model.running(state, host, service):
        raise PreconditionViolated(f"service {service} on host {host} is not running")
    return replace(state, suspended=state.suspended | {(host, service)})


def restore(model: NetworkModel, state: NetworkState, host: int, service: int) -> NetworkState:
    if (host, service) not in state.suspended:
        raise PreconditionViolated(f"service {service} on host {host} is not suspended")
    return replace(state, suspended=state.suspended - {(host, service)})


def state_id(state: NetworkState) -> str:
    """Canonical identifier; the ``h<location>`` head is what `host_of` reads."""
    shape = "circle" if state.turn == P2 else "square"
    creds = "".join(str(level) for _, level in state.credentials)
    off = sorted([f"{h}.{s}x" for h, s in state.stopped] + [f"{h}.{s}s" for h, s in state.suspended])
    return f"h{state.location}|{state.topology}|{shape}|c{creds}|{','.join(off) or '-'}"


def attacker_moves(model: NetworkModel, state: NetworkState):
    moves = []
    for vuln in model.vulns:
        for source, target in sorted(model.connectivity[state.topology]):
            if vuln_applicable(model, state, vuln, source, target):
                moves.append((f"v{vuln.id}->h{target}", apply_vuln(model, state, vuln, target)))
    if model.skip == "always" or not moves:
        moves.append(("skip", replace(state, turn=P1)))
    return moves


def defender_moves(model: NetworkModel, state: NetworkState):
    moves = [("noop", state)]
    if "suspend" in model.defender_actions:
        for h in model.hosts:
            for svc in sorted(h.noncritical):
                if model.running(state, h.id, svc):
                    moves.append((f"suspend{h.id}.{svc}", suspend(model, state, h.id, svc)))
    if "restore" in model.defender_actions:
        for h, svc in sorted(state.suspended):
            moves.append((f"restore{h}.{svc}", restore(model, state, h, svc)))
    if "switch" in model.defender_actions:
        for topo in model.connectivity:
            if topo != state.topology:
                moves.append((f"switch{topo}", replace(state, topology=topo)))
    return [(name, replace(nxt, turn=P2)) for name, nxt in moves]


def state_labels(model: NetworkModel, state: NetworkState) -> dict[str, frozenset[str]]:
    compromised = {f"p{h}" for h, level in state.credentials if level >= 1}
    blind = frozenset(compromised)
    true = blind | ({"decoy"} if state.location in model.decoys else set())
    return {"true": frozenset(true), "P2": blind, "hosts": frozenset({f"h{state.location}"})}


@dataclass(frozen=True, eq=False)
class CompiledNetwork:
    model: NetworkModel
    arena: Arena
    network_states: tuple[NetworkState, ...]

    def location(self, state: int) -> int:
        return self.network_states[state].location


def compile_network(model: NetworkModel, cap: int = DEFAULT_STATE_CAP) -> CompiledNetwork:
    init = model.initial_state()
    index = {init: 0}
    order = [init]
    trans = []
    action_index, action_owner = {}, {}
    queue = deque([init])
    while queue:
        st = queue.popleft()
        s = index[st]
        moves = attacker_moves(model, st) if st.turn == P2 else defender_moves(model, st)
        for name, nxt in moves:
            if nxt not in index:
                if len(order) >= cap:
                    raise CapExceeded(f"network arena exceeds {cap} states")
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            a = action_index.setdefault(name, len(action_index))
            action_owner[name] = st.turn
            trans.append((s, a, index[nxt]))

    labels = [state_labels(model, st) for st in order]
    ap = {"decoy"} | {f"p{h}" for h in model.host_ids} | {f"h{h}" for h in model.host_ids}
    arena = Arena(
        states=tuple(state_id(st) for st in order),
        owners=tuple(st.turn for st in order),
        actions=tuple(action_index),
        action_owners=tuple(action_owner[a] for a in action_index),
        transitions=tuple(trans),
        ap=frozenset(ap),
        labelings={p: tuple(lab[p] for lab in labels) for p in ("true", "P2", "hosts")},
        initial=0,
    )
    return CompiledNetwork(model, arena, tuple(order))


def compile_arena(model: NetworkModel, cap: int = DEFAULT_STATE_CAP) -> Arena:
    return compile_network(model, cap).arena


def load_model(name_or_path) -> NetworkModel:
    """Load a bundled network by name or a network document from disk."""
    from .fixtures import BUNDLED, load_bundled

    if isinstance(name_or_path, str) and name_or_path in BUNDLED:
        return load_network(load_bundled(name_or_path))
    return load_network(name_or_path)
