"""Graphviz DOT rendering of arenas, product games and hypergames.

Attacker states are circles and defender states boxes; accepting product
states get a double outline, strategy edges are dashed red and hypergame
states whose two DFA components disagree are shaded.
"""
from __future__ import annotations

from .arena import P1, Arena


def _quote(text: str) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _shape(owner: int) -> str:
    return "box" if owner == P1 else "circle"


def arena_dot(arena: Arena, perspective: str = "true") -> str:
    labels = arena.labeling(perspective)
    lines = ["digraph arena {", "  rankdir=LR;"]
    for i, sid in enumerate(arena.states):
        lab = ",".join(sorted(labels[i] or ()))
        text = f"{sid}\\n{{{lab}}}" if lab else sid
        extra = ", penwidth=2" if i == arena.initial else ""
        lines.append(f"  {i} [label={_quote(text)}, shape={_shape(arena.owners[i])}{extra}];")
    for s, a, t in arena.transitions:
        lines.append(f"  {s} -> {t} [label={_quote(arena.actions[a])}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def game_dot(game, strategy=None, region=None, shaded=(), final=(), name="game") -> str:
    """Any `GameGraph`; `strategy` is positional or permissive (sets of actions)."""
    region = frozenset(region or ())
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for i in range(game.num_states):
        attrs = [f"label={_quote(game.state_name(i))}", f"shape={_shape(game.owner[i])}"]
        if i in final:
            attrs.append("peripheries=2")
        if i in shaded:
            attrs += ["style=filled", "fillcolor=\"#f4c7c3\"", "color=red"]
        elif i in region:
            attrs += ["style=filled", "fillcolor=\"#d9ead3\""]
        if i == game.initial:
            attrs.append("penwidth=2")
        lines.append(f"  {i} [{', '.join(attrs)}];")
    chosen = {}
    if strategy is not None:
        table = getattr(strategy, "choice", None) or getattr(strategy, "actions", {})
        for s, acts in table.items():
            chosen[s] = acts if isinstance(acts, frozenset) else frozenset({acts})
    for s, row in enumerate(game.edges):
        for a, t in row:
            style = ", style=dashed, color=red" if a in chosen.get(s, ()) else ""
            lines.append(f"  {s} -> {t} [label={_quote(game.action_names[a])}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def product_dot(game, analysis=None, strategy=None) -> str:
    region = analysis.region(P1) if analysis is not None else ()
    return game_dot(game, strategy, region=region, final=game.final, name="product")


def hypergame_dot(hg, result=None) -> str:
    strategy = result.strategy if result is not None else None
    region = result.region if result is not None else ()
    return game_dot(hg, strategy, region=region, shaded=hg.divergent, final=hg.target, name="hypergame")
