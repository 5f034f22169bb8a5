"""Finite-prefix verdicts for co-safe formulas, computed directly on the AST.

This module deliberately shares no code with progression: it evaluates the
formula over word positions with a three-valued logic where positions past
the end of the word are unknown.  It is used as an oracle for the DFA.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .logic import And, Atom, Const, Formula, Next, Not, Or, Until

GOOD, NOT_YET, DEAD = "good-prefix", "not-yet", "dead"

# Kleene truth values
T, F, U = 1, 0, None


def _and(values) -> int | None:
    out = T
    for v in values:
        if v == F:
            return F
        if v is U:
            out = U
    return out


def _or(values) -> int | None:
    out = F
    for v in values:
        if v == T:
            return T
        if v is U:
            out = U
    return out


def _beyond(f: Formula) -> int | None:
    """Value of `f` at a position past the end of the word."""
    match f:
        case Const(v):
            return T if v else F
        case Atom(_) | Not(_):
            return U
        case And(cs):
            return _and(_beyond(c) for c in cs)
        case Or(cs):
            return _or(_beyond(c) for c in cs)
        case Next(c):
            return _beyond(c)
        case Until(l, r):
            return _or([_beyond(r), _and([_beyond(l), U])])
    raise TypeError(f"not a formula: {f!r}")


def evaluate(f: Formula, word: Sequence[frozenset[str]]) -> int | None:
    """Three-valued truth of `f` at position 0 of every infinite extension of `word`."""
    n = len(word)

    @lru_cache(maxsize=None)
    def ev(g: Formula, i: int):
        if i >= n:
            return _beyond(g)
        match g:
            case Const(v):
                return T if v else F
            case Atom(name):
                return T if name in word[i] else F
            case Not(Atom(name)):
                return F if name in word[i] else T
            case And(cs):
                return _and(ev(c, i) for c in cs)
            case Or(cs):
                return _or(ev(c, i) for c in cs)
            case Next(c):
                return ev(c, i + 1)
            case Until(l, r):
                # a witness j inside the word, or the left side holding up to
                # the end with the rest of the obligation undecided
                options = []
                for j in range(i, n):
                    options.append(_and([ev(r, j)] + [ev(l, k) for k in range(i, j)]))
                options.append(_and([ev(l, k) for k in range(i, n)] + [_beyond(g)]))
                return _or(options)
        raise TypeError(f"not a formula: {g!r}")

    return ev(f, 0)


def semantics_oracle(f: Formula, word: Sequence) -> str:
    value = evaluate(f, [frozenset(letter) for letter in word])
    if value == T:
        return GOOD
    if value == F:
        return DEAD
    return NOT_YET
