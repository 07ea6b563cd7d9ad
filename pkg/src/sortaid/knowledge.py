"""Fact store with provenance, unification, and the KB file loader.

Facts are ground terms tagged with where they came from (the provenance
tags also appear verbatim in explanation traces).  The store has set
semantics on the term: re-asserting an existing term is a no-op and the
first provenance wins, which keeps traces deterministic.

Stores are immutable once built; ``extended`` returns a new store.
Unification and queries are pure, so everything here can be shared
freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import KBError, UnknownSourceTag
from .terms import (
    Atom,
    Compound,
    Term,
    Variable,
    format_term,
    is_ground,
    parse_term,
)

__all__ = [
    "SOURCE_GIVEN",
    "SOURCE_CONCEPTNET",
    "SOURCE_CALENDAR",
    "SOURCE_GIVEN_PREFERENCE",
    "SOURCE_GIVEN_KNOWLEDGE",
    "SOURCE_RULE_FIRED",
    "KB_SOURCES",
    "ALL_SOURCES",
    "Bindings",
    "Fact",
    "FactStore",
    "walk",
    "substitute",
    "unify",
    "query",
    "load_kb",
    "loads_kb",
    "normalize_triple",
]

SOURCE_GIVEN = "Given"
SOURCE_CONCEPTNET = "ConceptNet"
SOURCE_CALENDAR = "calendar"
SOURCE_GIVEN_PREFERENCE = "Given preference"
SOURCE_GIVEN_KNOWLEDGE = "Given knowledge"
SOURCE_RULE_FIRED = "Rule fired"

# Tags allowed in KB files; "Rule fired" only ever comes from the engine.
KB_SOURCES = (
    SOURCE_GIVEN,
    SOURCE_CONCEPTNET,
    SOURCE_CALENDAR,
    SOURCE_GIVEN_PREFERENCE,
    SOURCE_GIVEN_KNOWLEDGE,
)
ALL_SOURCES = KB_SOURCES + (SOURCE_RULE_FIRED,)

# Relation names the loader recognizes when normalizing infix triples
# like (Friday IsA 'business day') into prefix form.
KNOWN_RELATIONS = frozenset(
    {
        "IsA",
        "isa",
        "AtLocation",
        "PartOf",
        "HasA",
        "UsedFor",
        "CapableOf",
        "HasProperty",
        "MadeOf",
        "RelatedTo",
        "Causes",
        "onDate",
        "onDay",
        "atTime",
        "beforeTime",
        "prefers",
    }
)

# Variable name -> term.  Treated as immutable: extension copies.
Bindings = dict[str, Term]


def walk(term: Term, env: Bindings) -> Term:
    while isinstance(term, Variable) and term.name in env:
        term = env[term.name]
    return term


def substitute(term: Term, env: Bindings) -> Term:
    """Resolve a term fully under env (idempotent)."""
    term = walk(term, env)
    if isinstance(term, Compound):
        return Compound(term.functor, tuple(substitute(a, env) for a in term.args))
    return term


def _occurs(name: str, term: Term, env: Bindings) -> bool:
    term = walk(term, env)
    if isinstance(term, Variable):
        return term.name == name
    if isinstance(term, Compound):
        return any(_occurs(name, a, env) for a in term.args)
    return False


def _bind(var: Variable, value: Term, env: Bindings) -> Optional[Bindings]:
    if _occurs(var.name, value, env):
        return None
    extended = dict(env)
    extended[var.name] = value
    return extended


def unify(a: Term, b: Term, env: Optional[Bindings] = None) -> Optional[Bindings]:
    """Most general unifier extending env, or None.  env is not mutated."""
    env = {} if env is None else env
    a = walk(a, env)
    b = walk(b, env)
    if a == b:
        return env
    if isinstance(a, Variable):
        return _bind(a, b, env)
    if isinstance(b, Variable):
        return _bind(b, a, env)
    if isinstance(a, Compound) and isinstance(b, Compound):
        if a.functor != b.functor or len(a.args) != len(b.args):
            return None
        for x, y in zip(a.args, b.args):
            result = unify(x, y, env)
            if result is None:
                return None
            env = result
        return env
    return None


@dataclass(frozen=True)
class Fact:
    """A ground term plus its provenance.

    ``premises`` and ``rule_id`` are set exactly when the fact was
    produced by a fired rule.
    """

    term: Term
    source: str
    premises: tuple["Fact", ...] = ()
    rule_id: Optional[str] = None

    def __post_init__(self) -> None:
        if not is_ground(self.term):
            raise ValueError(f"fact must be ground: {format_term(self.term)}")
        if self.source not in ALL_SOURCES:
            raise ValueError(f"unknown source tag: {self.source!r}")
        if (self.source == SOURCE_RULE_FIRED) != bool(self.premises):
            raise ValueError("premises are present iff source is 'Rule fired'")

    def trace_line(self) -> str:
        return f"[{format_term(self.term)}, '{self.source}']"


class FactStore:
    """Insertion-ordered set of facts, indexed by functor/arity."""

    __slots__ = ("_facts", "_by_term", "_index")

    def __init__(self, facts: Iterable[Fact] = ()):
        self._facts: list[Fact] = []
        self._by_term: dict[Term, Fact] = {}
        self._index: dict[tuple[str, int], list[Fact]] = {}
        for fact in facts:
            self._insert(fact)

    def _insert(self, fact: Fact) -> bool:
        if fact.term in self._by_term:
            return False
        self._facts.append(fact)
        self._by_term[fact.term] = fact
        if isinstance(fact.term, Compound):
            key = (fact.term.functor, len(fact.term.args))
            self._index.setdefault(key, []).append(fact)
        return True

    def __len__(self) -> int:
        return len(self._facts)

    def __iter__(self) -> Iterator[Fact]:
        return iter(self._facts)

    def __contains__(self, term: Term) -> bool:
        return term in self._by_term

    def get(self, term: Term) -> Optional[Fact]:
        return self._by_term.get(term)

    def candidates(self, pattern: Term) -> list[Fact]:
        """Facts that could unify with pattern, in insertion order."""
        if isinstance(pattern, Compound):
            return self._index.get((pattern.functor, len(pattern.args)), [])
        if isinstance(pattern, Variable):
            return self._facts
        fact = self._by_term.get(pattern)
        return [fact] if fact is not None else []

    def extended(self, facts: Iterable[Fact]) -> "FactStore":
        new = FactStore()
        new._facts = list(self._facts)
        new._by_term = dict(self._by_term)
        new._index = {k: list(v) for k, v in self._index.items()}
        for fact in facts:
            new._insert(fact)
        return new


def query(store: FactStore, pattern: Term, env: Optional[Bindings] = None) -> list[Bindings]:
    """One Bindings per stored fact unifying with pattern, insertion order."""
    env = {} if env is None else env
    results = []
    for fact in store.candidates(substitute(pattern, env)):
        unified = unify(pattern, fact.term, env)
        if unified is not None:
            results.append(unified)
    return results


def normalize_triple(term: Term) -> Term:
    """Rewrite an infix triple (subject Relation object) to prefix form."""
    if (
        isinstance(term, Compound)
        and len(term.args) == 2
        and term.functor not in KNOWN_RELATIONS
        and isinstance(term.args[0], Atom)
        and term.args[0].name in KNOWN_RELATIONS
    ):
        return Compound(term.args[0].name, (Atom(term.functor), term.args[1]))
    return term


def loads_kb(text: str) -> FactStore:
    """Parse KB text: one ``SOURCE_TAG | s-expression`` entry per line."""
    store = FactStore()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "|" not in line:
            raise KBError("expected 'SOURCE_TAG | s-expression'", line=lineno)
        tag, _, expr = line.partition("|")
        tag = tag.strip()
        if tag not in KB_SOURCES:
            raise UnknownSourceTag(f"unknown source tag {tag!r}", line=lineno)
        try:
            term = parse_term(expr.strip())
        except Exception as exc:
            raise KBError(str(exc), line=lineno) from exc
        term = normalize_triple(term)
        if not is_ground(term):
            raise KBError(f"KB facts must be ground: {format_term(term)}", line=lineno)
        store._insert(Fact(term=term, source=tag))
    return store


def load_kb(path: str) -> FactStore:
    with open(path, encoding="utf-8") as handle:
        return loads_kb(handle.read())
