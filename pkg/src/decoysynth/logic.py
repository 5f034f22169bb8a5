"""Co-safe LTL: syntax, parsing, formula progression and DFA translation.

Formulas are kept in negation normal form over the constructors
``true false p !p && || X U`` (``F g`` is ``true U g``).  Every formula is
built through the smart constructors below, so structurally equal formulas
are semantically equal under three-valued (Kleene) evaluation; that equality
is what identifies DFA states.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as cartesian
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import CapExceeded, CoSafetyError, DfaError, ModelError, ParseError

MAX_AP = 16
DEFAULT_DFA_CAP = 1_000_000


class Formula:
    __slots__ = ()

    def __str__(self):
        return render(self)

    def __lt__(self, other):
        return sort_key(self) < sort_key(other)


@dataclass(frozen=True, repr=False)
class Const(Formula):
    value: bool

    def __repr__(self):
        return "TRUE" if self.value else "FALSE"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    atom: Atom


@dataclass(frozen=True)
class And(Formula):
    children: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    children: tuple[Formula, ...]


@dataclass(frozen=True)
class Next(Formula):
    child: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


# -- smart constructors --------------------------------------------------

@lru_cache(maxsize=None)
def sort_key(f: Formula) -> str:
    return render(f)


def neg_atom(name: str) -> Not:
    return Not(Atom(name))


def _absorbs(small: Formula, big: Formula, inner: type) -> bool:
    """True when `big` (an `inner` node) contains every conjunct/disjunct of `small`."""
    if not isinstance(big, inner) or small == big:
        return False
    parts = small.children if isinstance(small, inner) else (small,)
    return set(parts) <= set(big.children)


def _junction(kind, unit: Const, zero: Const, args: Iterable[Formula]) -> Formula:
    dual = Or if kind is And else And
    flat = set()
    for f in args:
        if f == zero:
            return zero
        if f == unit:
            continue
        if isinstance(f, kind):
            flat.update(f.children)
        else:
            flat.add(f)
    # absorption: g && (g || h) = g, g || (g && h) = g
    kept = [f for f in flat if not any(_absorbs(g, f, dual) for g in flat)]
    if not kept:
        return unit
    if len(kept) == 1:
        return kept[0]
    return kind(tuple(sorted(kept, key=sort_key)))


def mk_and(*args: Formula) -> Formula:
    return _junction(And, TRUE, FALSE, args)


def mk_or(*args: Formula) -> Formula:
    return _junction(Or, FALSE, TRUE, args)


def mk_next(f: Formula) -> Formula:
    return f if isinstance(f, Const) else Next(f)


def mk_until(left: Formula, right: Formula) -> Formula:
    if isinstance(right, Const):
        return right
    if left == FALSE:
        return right
    return Until(left, right)


def eventually(f: Formula) -> Formula:
    return mk_until(TRUE, f)


def atoms(f: Formula) -> frozenset[str]:
    match f:
        case Atom(name) | Not(Atom(name)):
            return frozenset({name})
        case And(cs) | Or(cs):
            return frozenset().union(*(atoms(c) for c in cs))
        case Next(c):
            return atoms(c)
        case Until(l, r):
            return atoms(l) | atoms(r)
    return frozenset()


def size(f: Formula) -> int:
    match f:
        case Not(_):
            return 2
        case And(cs) | Or(cs):
            return 1 + sum(size(c) for c in cs)
        case Next(c):
            return 1 + size(c)
        case Until(l, r):
            return 1 + size(l) + size(r)
    return 1


@lru_cache(maxsize=None)
def render(f: Formula) -> str:
    match f:
        case Const(v):
            return "true" if v else "false"
        case Atom(name):
            return name
        case Not(Atom(name)):
            return "!" + name
        case And(cs):
            return "(" + " && ".join(render(c) for c in cs) + ")"
        case Or(cs):
            return "(" + " || ".join(render(c) for c in cs) + ")"
        case Next(c):
            return "X " + render(c)
        case Until(Const(True), r):
            return "F " + render(r)
        case Until(l, r):
            return "(" + render(l) + " U " + render(r) + ")"
    raise TypeError(f"not a formula: {f!r}")


# -- parser ---------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<op>&&|\|\||!|\(|\))|(?P<word>[A-Za-z_][A-Za-z0-9_]*(?:\([A-Za-z0-9_]*\))?))"
)
_KEYWORDS = {"true", "false", "X", "U", "F", "G", "R", "W"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        start = m.start("op") if m.group("op") else m.start("word")
        tok = m.group("op") or m.group("word")
        if m.group("word") and "(" in tok and tok.split("(")[0] in _KEYWORDS:
            # `F(x)` is an operator applied to a parenthesized name, not an atom
            kw = tok.split("(")[0]
            tokens.append((kw, start))
            tokens.append(("(", start + len(kw)))
            inner = tok[len(kw) + 1:-1]
            if inner:
                tokens.append((inner, start + len(kw) + 1))
            tokens.append((")", start + len(tok) - 1))
        else:
            tokens.append((tok, start))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    """Precedence climbing: unary > U (right assoc) > && > ||."""

    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def take(self, expected=None):
        tok, pos = self.tokens[self.i]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok

    def parse(self):
        tree = self.disjunction()
        tok, pos = self.tokens[self.i]
        if tok != "<end>":
            raise ParseError(f"unexpected token {tok!r}", pos)
        return tree

    def disjunction(self):
        parts = [self.conjunction()]
        while self.peek() == "||":
            self.take()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else ("or", parts)

    def conjunction(self):
        parts = [self.until()]
        while self.peek() == "&&":
            self.take()
            parts.append(self.until())
        return parts[0] if len(parts) == 1 else ("and", parts)

    def until(self):
        left = self.unary()
        if self.peek() == "U":
            self.take()
            return ("U", left, self.until())
        if self.peek() in ("R", "W"):
            raise CoSafetyError(f"operator {self.peek()} is outside the co-safe fragment")
        return left

    def unary(self):
        tok, pos = self.tokens[self.i]
        if tok == "!":
            self.take()
            return ("not", self.unary())
        if tok in ("X", "F"):
            self.take()
            return (tok, self.unary())
        if tok == "G":
            raise CoSafetyError("G (always) is outside the co-safe fragment")
        if tok == "(":
            self.take()
            inner = self.disjunction()
            self.take(")")
            return inner
        if tok in ("true", "false"):
            self.take()
            return ("const", tok == "true")
        if tok in ("<end>", ")", "&&", "||", "U", "R", "W"):
            raise ParseError(f"unexpected token {tok!r}", pos)
        self.take()
        return ("atom", tok)


def _nnf(tree, negated: bool) -> Formula:
    tag = tree[0]
    if tag == "const":
        return Const(tree[1] != negated)
    if tag == "atom":
        return neg_atom(tree[1]) if negated else Atom(tree[1])
    if tag == "not":
        return _nnf(tree[1], not negated)
    if tag in ("and", "or"):
        children = [_nnf(c, negated) for c in tree[1]]
        conj = (tag == "and") != negated
        return mk_and(*children) if conj else mk_or(*children)
    if tag == "X":
        return mk_next(_nnf(tree[1], negated))
    if negated:
        op = "U" if tag == "U" else "F"
        raise CoSafetyError(f"negated {op} requires Release/Always and is not co-safe")
    if tag == "F":
        return eventually(_nnf(tree[1], False))
    return mk_until(_nnf(tree[1], False), _nnf(tree[2], False))


def parse_scltl(text: str) -> Formula:
    """Parse a co-safe LTL formula into normalized negation normal form.

    >>> str(parse_scltl("F (h2 && F h3)"))
    'F (h2 && F h3)'
    """
    return _nnf(_Parser(text).parse(), False)


# -- progression ----------------------------------------------------------

@lru_cache(maxsize=1 << 20)
def progress(f: Formula, letter: frozenset[str]) -> Formula:
    match f:
        case Const(_):
            return f
        case Atom(name):
            return TRUE if name in letter else FALSE
        case Not(Atom(name)):
            return FALSE if name in letter else TRUE
        case And(cs):
            return mk_and(*(progress(c, letter) for c in cs))
        case Or(cs):
            return mk_or(*(progress(c, letter) for c in cs))
        case Next(c):
            return c
        case Until(l, r):
            return mk_or(progress(r, letter), mk_and(progress(l, letter), f))
    raise TypeError(f"not a formula: {f!r}")


# -- DFA ------------------------------------------------------------------

def letter_key(letter: Iterable[str]) -> str:
    return "{" + ",".join(sorted(letter)) + "}"


def parse_letter_key(key: str) -> frozenset[str]:
    body = key.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise DfaError(f"malformed letter {key!r}")
    body = body[1:-1].strip()
    return frozenset(p.strip() for p in body.split(",")) if body else frozenset()


@dataclass(frozen=True)
class Dfa:
    """DFA over the powerset of `ap`; letters are indexed by bitmask over `ap`."""

    ap: tuple[str, ...]
    states: tuple[str, ...]
    delta: tuple[tuple[int, ...], ...]
    initial: int
    finals: frozenset[int]
    formulas: tuple[Formula, ...] | None = None
    _bit: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_bit", {p: 1 << i for i, p in enumerate(self.ap)})

    def mask(self, letter: Iterable[str]) -> int:
        bit = self._bit
        return sum(bit[p] for p in set(letter) if p in bit)

    def letter(self, mask: int) -> frozenset[str]:
        return frozenset(p for i, p in enumerate(self.ap) if mask >> i & 1)

    def step(self, q: int, letter: Iterable[str]) -> int:
        return self.delta[q][self.mask(letter)]

    def run(self, word: Sequence[Iterable[str]], start: int | None = None) -> int:
        q = self.initial if start is None else start
        for letter in word:
            q = self.step(q, letter)
        return q

    def accepts(self, word) -> bool:
        return self.run(word) in self.finals

    @property
    def sink(self) -> int | None:
        """The FALSE state when it is reachable (translated DFAs only)."""
        if self.formulas is None:
            return None
        for i, f in enumerate(self.formulas):
            if f == FALSE:
                return i
        return None

    def index(self, name) -> int:
        if isinstance(name, int):
            return name
        return self.states.index(name)

    def to_dict(self) -> dict:
        doc = {
            "ap": list(self.ap),
            "states": list(self.states),
            "initial": self.states[self.initial],
            "finals": [self.states[q] for q in sorted(self.finals)],
            "transitions": {
                self.states[q]: {
                    letter_key(self.letter(m)): self.states[t] for m, t in enumerate(row)
                }
                for q, row in enumerate(self.delta)
            },
        }
        if self.formulas is not None:
            doc["formulas"] = {self.states[q]: render(f) for q, f in enumerate(self.formulas)}
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Dfa":
        """Load an explicit DFA, bypassing translation."""
        allowed = {"ap", "states", "initial", "finals", "transitions", "formulas"}
        unknown = set(doc) - allowed
        if unknown:
            raise DfaError(f"unknown DFA keys: {sorted(unknown)}")
        try:
            ap = tuple(sorted(doc["ap"]))
            states = tuple(doc["states"])
            index = {s: i for i, s in enumerate(states)}
            bit = {p: 1 << i for i, p in enumerate(ap)}
            delta = []
            for s in states:
                row = [None] * (1 << len(ap))
                for key, dst in doc["transitions"][s].items():
                    letter = parse_letter_key(key)
                    if not letter <= set(ap):
                        raise DfaError(f"letter {key} uses undeclared propositions")
                    row[sum(bit[p] for p in letter)] = index[dst]
                if None in row:
                    raise DfaError(f"transition function is not total at state {s!r}")
                delta.append(tuple(row))
            dfa = cls(ap, states, tuple(delta), index[doc["initial"]],
                      frozenset(index[s] for s in doc["finals"]))
        except KeyError as exc:
            raise DfaError(f"malformed DFA document: missing {exc}") from None
        for q in dfa.finals:
            if any(t not in dfa.finals for t in dfa.delta[q]):
                raise DfaError(f"final state {states[q]!r} is not absorbing")
        return dfa


def load_dfa(path) -> Dfa:
    with open(path, encoding="utf-8") as fh:
        return Dfa.from_dict(json.load(fh))


def _dnf(f: Formula) -> frozenset[frozenset[Formula]]:
    match f:
        case Const(v):
            return frozenset({frozenset()}) if v else frozenset()
        case And(cs):
            terms = frozenset({frozenset()})
            for c in cs:
                terms = frozenset(t | u for t in terms for u in _dnf(c))
            return terms
        case Or(cs):
            return frozenset().union(*(_dnf(c) for c in cs))
    return frozenset({frozenset({f})})


@lru_cache(maxsize=1 << 16)
def canonical(f: Formula) -> Formula:
    """Minimal monotone DNF over the elementary (atomic, X, U) subformulas.

    Progression only ever produces positive boolean combinations of a fixed
    finite set of elementary formulas, and the minimal DNF of a monotone
    function is unique, so the closure under progress-then-canonical is finite.
    Distribution and absorption are sound in three-valued logic too.
    """
    terms = _dnf(f)
    minimal = [t for t in terms if not any(u < t for u in terms)]
    return mk_or(*(mk_and(*t) for t in minimal))


def translate_to_dfa(f: Formula, ap: Iterable[str] | None = None, cap: int = DEFAULT_DFA_CAP) -> Dfa:
    """Closure of `f` under progression; the only accepting state is `true`."""
    ap = tuple(sorted(atoms(f) if ap is None else set(ap)))
    missing = atoms(f) - set(ap)
    if missing:
        raise ModelError(f"formula mentions propositions outside the alphabet: {sorted(missing)}")
    if len(ap) > MAX_AP:
        raise ModelError(f"alphabet has {len(ap)} propositions; at most {MAX_AP} are supported")
    letters = [frozenset(p for i, p in enumerate(ap) if m >> i & 1) for m in range(1 << len(ap))]
    f = canonical(f)
    index = {f: 0}
    formulas = [f]
    delta = []
    i = 0
    while i < len(formulas):
        row = []
        for letter in letters:
            g = canonical(progress(formulas[i], letter))
            if g not in index:
                if len(formulas) >= cap:
                    raise CapExceeded(f"DFA closure exceeds {cap} states")
                index[g] = len(formulas)
                formulas.append(g)
            row.append(index[g])
        delta.append(tuple(row))
        i += 1
    return Dfa(
        ap=ap,
        states=tuple(f"q{k}" for k in range(len(formulas))),
        delta=tuple(delta),
        initial=0,
        finals=frozenset(k for k, g in enumerate(formulas) if g == TRUE),
        formulas=tuple(formulas),
    )


def save_dfa(dfa: Dfa, path) -> None:
    Path(path).write_text(json.dumps(dfa.to_dict(), indent=1) + "\n", encoding="utf-8")


def all_letters(ap: Sequence[str]) -> list[frozenset[str]]:
    return [frozenset(c for c, keep in zip(ap, bits) if keep)
            for bits in cartesian((False, True), repeat=len(ap))]
