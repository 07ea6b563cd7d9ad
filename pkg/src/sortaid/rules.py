"""Horn-style rules with builtin arithmetic, evaluated by forward chaining.

Rules are written in the same s-expression syntax as terms, with the
convention (taken from the domain's rule notation) that any bare token
which is not a declared constant is a variable.  ``?name`` tokens are
always variables, so rule files can mix both styles:

    rule before-activity: (beforeActivity pill day slot activity) <-
        (activityAt activity day slotX)
        (isa pill med)
        (medicationBeforeActivityBy med distance)
        (difference slotX slot distance)

Evaluation is naive bottom-up to a fixpoint: each round instantiates
every rule body against the current store and asserts new ground heads
with source "Rule fired".  Rule sets here are tiny, so determinism and
traceability outrank speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Union

from .errors import (
    DepthExceeded,
    InsufficientlyGround,
    RangeRestrictionViolation,
    RuleParseError,
)
from .knowledge import (
    SOURCE_RULE_FIRED,
    Bindings,
    Fact,
    FactStore,
    substitute,
    unify,
    walk,
)
from .terms import (
    Atom,
    Compound,
    Integer,
    Term,
    Variable,
    format_term,
    is_ground,
    parse_term,
    parse_terms,
    term_variables,
)

__all__ = [
    "Pattern",
    "BuiltinCall",
    "Literal",
    "Rule",
    "Derivation",
    "BUILTINS",
    "eval_difference",
    "parse_rule",
    "loads_rules",
    "load_rules",
    "forward_chain",
    "solve_body",
]

DEFAULT_FACT_CAP = 100_000


@dataclass(frozen=True)
class Pattern:
    term: Term


@dataclass(frozen=True)
class BuiltinCall:
    name: str
    args: tuple[Term, ...]


Literal = Union[Pattern, BuiltinCall]


@dataclass(frozen=True)
class Rule:
    id: str
    head: Term
    body: tuple[Literal, ...]


@dataclass(frozen=True)
class Derivation:
    conclusion: Fact
    rule_id: str
    premises: tuple[Fact, ...]


def eval_difference(a: Term, b: Term, d: Term, env: Bindings) -> list[Bindings]:
    """Relation ``a - b = d`` over integers; solves one unbound argument."""
    resolved = [walk(t, env) for t in (a, b, d)]
    unbound = [i for i, t in enumerate(resolved) if isinstance(t, Variable)]
    if len(unbound) >= 2:
        raise InsufficientlyGround(
            "difference needs at least two ground arguments"
        )
    if any(not isinstance(t, (Integer, Variable)) for t in resolved):
        return []
    if not unbound:
        av, bv, dv = (t.value for t in resolved)  # type: ignore[union-attr]
        return [env] if av - bv == dv else []
    values: list[Optional[int]] = [
        t.value if isinstance(t, Integer) else None for t in resolved
    ]
    index = unbound[0]
    if index == 0:
        solved = values[2] + values[1]  # type: ignore[operator]
    elif index == 1:
        solved = values[0] - values[2]  # type: ignore[operator]
    else:
        solved = values[0] - values[1]  # type: ignore[operator]
    extended = dict(env)
    extended[resolved[index].name] = Integer(solved)  # type: ignore[union-attr]
    return [extended]


# name -> (arity, evaluator taking resolved arg terms and env)
BUILTINS: dict[str, tuple[int, Callable[..., list[Bindings]]]] = {
    "difference": (3, eval_difference),
}


def _normalize_vars(term: Term, constants: frozenset[str]) -> Term:
    if isinstance(term, Atom) and term.name not in constants:
        return Variable(term.name)
    if isinstance(term, Compound):
        return Compound(
            term.functor, tuple(_normalize_vars(a, constants) for a in term.args)
        )
    return term


def _as_literal(term: Term) -> Literal:
    if isinstance(term, Compound) and term.functor in BUILTINS:
        arity, _ = BUILTINS[term.functor]
        if len(term.args) != arity:
            raise RuleParseError(
                f"builtin {term.functor} takes {arity} arguments,"
                f" got {len(term.args)}"
            )
        return BuiltinCall(term.functor, term.args)
    return Pattern(term)


def _literal_vars(literal: Literal) -> set[str]:
    term = literal.term if isinstance(literal, Pattern) else Compound("_", literal.args)
    return set(term_variables(term))


def parse_rule(
    text: str,
    rule_id: str = "rule",
    constants: frozenset[str] = frozenset(),
    require_range_restriction: bool = True,
) -> Rule:
    """Parse ``head <- literal literal ...``.

    Bare tokens not in ``constants`` become variables.  Raises
    RangeRestrictionViolation when a head variable does not occur in the
    body (waived for goal-directed decomposition rules, whose heads are
    bound by the query), and RuleParseError when a builtin could be
    reached with more than one of its arguments still unbound.
    """
    if "<-" not in text:
        raise RuleParseError("rule must contain '<-'")
    head_text, _, body_text = text.partition("<-")
    try:
        head = _normalize_vars(parse_term(head_text.strip()), constants)
        body_terms = parse_terms(body_text.strip())
    except Exception as exc:
        raise RuleParseError(str(exc)) from exc
    if not body_terms:
        raise RuleParseError("rule body is empty")
    if isinstance(head, Compound) and head.functor in BUILTINS:
        raise RuleParseError(f"builtin {head.functor} cannot be a rule head")
    body = tuple(
        _as_literal(_normalize_vars(t, constants)) for t in body_terms
    )

    body_vars: set[str] = set()
    for literal in body:
        body_vars |= _literal_vars(literal)
    missing = set(term_variables(head)) - body_vars
    if missing and require_range_restriction:
        raise RangeRestrictionViolation(
            f"head variables not bound by body: {', '.join(sorted(missing))}"
        )

    # Builtins must be reachable with at most one unbound argument.
    bound: set[str] = set()
    for literal in body:
        if isinstance(literal, BuiltinCall):
            free = _literal_vars(literal) - bound
            if len(free) > 1:
                raise RuleParseError(
                    f"builtin {literal.name} reached with unbound"
                    f" {', '.join(sorted(free))}"
                )
        bound |= _literal_vars(literal)
    return Rule(id=rule_id, head=head, body=body)


def loads_rules(text: str, require_range_restriction: bool = True) -> list[Rule]:
    """Parse a rule file: ``rule <id>: ...`` entries separated by blank lines.

    An optional ``constants: tok tok ...`` block declares scenario
    constants that stay atoms inside the rules that follow.
    """
    blocks: list[list[str]] = [[]]
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            if blocks[-1]:
                blocks.append([])
            continue
        blocks[-1].append(line.strip())

    rules: list[Rule] = []
    constants: frozenset[str] = frozenset()
    for block in blocks:
        if not block:
            continue
        entry = " ".join(block)
        if entry.startswith("constants:"):
            constants = constants | frozenset(entry[len("constants:"):].split())
            continue
        if not entry.startswith("rule "):
            raise RuleParseError(f"expected 'rule <id>: ...', got {entry!r}")
        header, _, rest = entry[len("rule "):].partition(":")
        rule_id = header.strip()
        if not rule_id or not rest.strip():
            raise RuleParseError(f"malformed rule entry {entry!r}")
        rules.append(
            parse_rule(
                rest.strip(),
                rule_id=rule_id,
                constants=constants,
                require_range_restriction=require_range_restriction,
            )
        )
    return rules


def load_rules(path: str) -> list[Rule]:
    with open(path, encoding="utf-8") as handle:
        return loads_rules(handle.read())


def solve_body(
    literals: tuple[Literal, ...],
    store: FactStore,
    env: Bindings,
    premises: tuple[Fact, ...] = (),
) -> Iterator[tuple[Bindings, tuple[Fact, ...]]]:
    """All ways to satisfy the body literals against the store,
    yielding the final bindings and the facts matched by patterns."""
    if not literals:
        yield env, premises
        return
    first, rest = literals[0], literals[1:]
    if isinstance(first, Pattern):
        for fact in store.candidates(substitute(first.term, env)):
            extended = unify(first.term, fact.term, env)
            if extended is not None:
                yield from solve_body(rest, store, extended, premises + (fact,))
    else:
        _, evaluator = BUILTINS[first.name]
        for extended in evaluator(*first.args, env):
            yield from solve_body(rest, store, extended, premises)


def forward_chain(
    store: FactStore,
    rules: Iterable[Rule],
    cap: int = DEFAULT_FACT_CAP,
) -> tuple[FactStore, list[Derivation]]:
    """Least fixpoint of the rules over the store.

    New facts carry source "Rule fired" plus the premises they were
    derived from.  Facts derived in one round become visible in the
    next; the cap guards against runaway rule sets.
    """
    rules = list(rules)
    work = store
    derivations: list[Derivation] = []
    derived = 0
    while True:
        additions: list[Fact] = []
        seen_this_round: set[Term] = set()
        for rule in rules:
            for env, premises in solve_body(rule.body, work, {}, ()):
                head = substitute(rule.head, env)
                if not is_ground(head):  # range restriction makes this unreachable
                    raise RuleParseError(
                        f"derived non-ground head {format_term(head)}"
                    )
                if head in work or head in seen_this_round:
                    continue
                fact = Fact(
                    term=head,
                    source=SOURCE_RULE_FIRED,
                    premises=premises,
                    rule_id=rule.id,
                )
                additions.append(fact)
                seen_this_round.add(head)
                derivations.append(Derivation(fact, rule.id, premises))
                derived += 1
                if derived > cap:
                    raise DepthExceeded(f"derived more than {cap} facts")
        if not additions:
            return work, derivations
        work = work.extended(additions)
