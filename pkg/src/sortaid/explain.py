"""Why-question answering: aggregation, constraint checking, synthesis.

The pipeline has three stages.  A question is parsed into a ground
query such as ``(onDate Levodopa Wednesday)`` and mined for concepts
(its argument atoms plus their class generalizations).  Facts
mentioning those concepts are aggregated from the scenario, the
preference store, the calendar and the commonsense KB, each tagged with
its provenance; the calendar contributes whole activity bundles so that
an activity pulled in by its day also brings its kind and clock.  The
tagged facts are then forward chained against the constraint rules, and
finally a goal tree is grown from the query: a goal is satisfied either
by a fact directly or through a bundled decomposition mapping it to
subgoals.  Among satisfying trees the smallest wins, with ties broken
by source priority and then by printed form, which makes synthesis
fully deterministic.

The resulting justification is the terminal subgoal pair, and the chain
lists the base facts supporting every fired rule in the tree, in trace
order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from typing import Iterator, Optional, Sequence

from .errors import NoContext, UnrecognizedQuestion
from .hint import AssistiveAction
from .knowledge import (
    SOURCE_CALENDAR,
    SOURCE_CONCEPTNET,
    SOURCE_GIVEN,
    SOURCE_GIVEN_KNOWLEDGE,
    SOURCE_GIVEN_PREFERENCE,
    SOURCE_RULE_FIRED,
    Fact,
    FactStore,
    loads_kb,
    unify,
)
from .rules import Derivation, Rule, forward_chain, loads_rules, solve_body
from .scenario import (
    DAY_NAMES,
    PERIOD_NAMES,
    Activity,
    BeforeActivity,
    FixedSlot,
    TaskState,
    clock_ampm,
    time_to_slot,
)
from .terms import Atom, Compound, Term, Text, format_term, is_ground, term_atoms

__all__ = [
    "Query",
    "TaggedFactSet",
    "GoalNode",
    "Explanation",
    "TRACE_SOURCE_ORDER",
    "TIEBREAK_SOURCE_ORDER",
    "parse_question",
    "extract_concepts",
    "scenario_given_facts",
    "activity_bundle",
    "gather_facts",
    "check_constraints",
    "synthesize",
    "render_nl",
    "explain_question",
    "default_kb",
    "default_rules",
    "default_decompositions",
    "loads_decompositions",
]

# Order facts appear in the trace: aggregation results first (scenario
# givens, then KB hits), then the constraint-checking context, then
# whatever the rules derived.
TRACE_SOURCE_ORDER = (
    SOURCE_GIVEN,
    SOURCE_CONCEPTNET,
    SOURCE_GIVEN_PREFERENCE,
    SOURCE_GIVEN_KNOWLEDGE,
    SOURCE_CALENDAR,
    SOURCE_RULE_FIRED,
)

# Priority used to break ties between candidate explanation trees.
TIEBREAK_SOURCE_ORDER = (
    SOURCE_GIVEN,
    SOURCE_GIVEN_PREFERENCE,
    SOURCE_CALENDAR,
    SOURCE_GIVEN_KNOWLEDGE,
    SOURCE_RULE_FIRED,
    SOURCE_CONCEPTNET,
)


@dataclass(frozen=True)
class Query:
    term: Term
    origin: Optional[str] = None

    def __post_init__(self) -> None:
        if not is_ground(self.term):
            raise ValueError(f"query must be ground: {format_term(self.term)}")


class TaggedFactSet:
    """Deterministically ordered facts plus derivations for rule-fired ones."""

    def __init__(
        self,
        facts: Sequence[Fact] = (),
        derivations: Optional[dict[Term, Derivation]] = None,
    ):
        self.facts: list[Fact] = []
        self._pos: dict[Term, int] = {}
        for fact in facts:
            if fact.term not in self._pos:
                self._pos[fact.term] = len(self.facts)
                self.facts.append(fact)
        self.derivations: dict[Term, Derivation] = dict(derivations or {})

    def __iter__(self) -> Iterator[Fact]:
        return iter(self.facts)

    def __len__(self) -> int:
        return len(self.facts)

    def get(self, term: Term) -> Optional[Fact]:
        index = self._pos.get(term)
        return None if index is None else self.facts[index]

    def position(self, term: Term) -> int:
        return self._pos.get(term, len(self.facts))

    def store(self) -> FactStore:
        return FactStore(self.facts)

    def trace_lines(self) -> list[str]:
        return [fact.trace_line() for fact in self.facts]


def parse_question(
    question: str,
    context: Optional[AssistiveAction],
    state: TaskState,
) -> Query:
    """Turn a why-question into a ground ``(onDate med Day)`` query.

    A bare "Why?" interrogates the last operator-bearing assistive
    action; otherwise the question must name a medication and a day.
    """
    stripped = re.sub(r"[?!.]+\s*$", "", question.strip()).strip()
    if stripped.lower() in ("", "why"):
        if context is None or context.operator is None:
            raise NoContext("bare 'why' needs a prior assistive action")
        op = context.operator
        return Query(
            term=Compound("onDate", (Atom(op.med), Atom(DAY_NAMES[op.day]))),
            origin=context.utterance,
        )
    tokens = re.findall(r"[A-Za-z0-9']+", stripped.lower())
    med = next(
        (m.name for m in state.medications if m.name.lower() in tokens), None
    )
    day = next((d for d in DAY_NAMES if d.lower() in tokens), None)
    if med is None or day is None:
        raise UnrecognizedQuestion(
            f"could not find a medication and a day in {question!r}"
        )
    return Query(term=Compound("onDate", (Atom(med), Atom(day))), origin=question)


def scenario_given_facts(state: TaskState) -> list[Fact]:
    """Scenario knowledge stated up front: medication classes and fixed
    times of day."""
    facts: list[Fact] = []
    for med in state.medications:
        facts.append(
            Fact(
                term=Compound("IsA", (Atom(med.name), Atom("pill"))),
                source=SOURCE_GIVEN,
            )
        )
        if isinstance(med.constraint, FixedSlot):
            facts.append(
                Fact(
                    term=Compound(
                        "atTime",
                        (Atom(med.name), Atom(PERIOD_NAMES[med.constraint.slot])),
                    ),
                    source=SOURCE_GIVEN,
                )
            )
    return facts


def activity_bundle(state: TaskState, activity: Activity) -> tuple[Fact, list[Fact]]:
    """An activity's kind (Given knowledge) and its calendar facts."""
    clock = Text(clock_ampm(activity.clock))
    period = Atom(PERIOD_NAMES[time_to_slot(state, activity.clock)])
    kind = Fact(
        term=Compound("IsA", (Atom(activity.name), Atom("activity"))),
        source=SOURCE_GIVEN_KNOWLEDGE,
    )
    calendar = [
        Fact(
            term=Compound("atTime", (Atom(activity.name), clock)),
            source=SOURCE_CALENDAR,
        ),
        Fact(
            term=Compound("onDay", (Atom(activity.name), Atom(DAY_NAMES[activity.day]))),
            source=SOURCE_CALENDAR,
        ),
        Fact(term=Compound("IsA", (clock, period)), source=SOURCE_CALENDAR),
    ]
    return kind, calendar


def extract_concepts(query: Query, state: TaskState) -> list[str]:
    """Query argument atoms plus their class generalizations from the
    scenario's own facts."""
    term = query.term
    args = term.args if isinstance(term, Compound) else (term,)
    given = scenario_given_facts(state)
    concepts: list[str] = []

    def add(name: str) -> None:
        if name not in concepts:
            concepts.append(name)

    for arg in args:
        if isinstance(arg, Atom):
            name = arg.name
        elif isinstance(arg, Text):
            name = arg.value
        else:
            continue
        add(name)
        for fact in given:
            t = fact.term
            if (
                isinstance(t, Compound)
                and t.functor in ("IsA", "isa")
                and len(t.args) == 2
                and t.args[0] == Atom(name)
                and isinstance(t.args[1], Atom)
            ):
                add(t.args[1].name)
    return concepts


def _mentions(term: Term, concepts: set[str]) -> bool:
    return any(name in concepts for name in term_atoms(term))


def gather_facts(
    concepts: Sequence[str],
    state: TaskState,
    kb: FactStore,
) -> TaggedFactSet:
    """Every source fact touching a concept, tagged with its provenance.

    Calendar activities come as whole bundles: if any fact of the bundle
    mentions a concept (typically the activity's day), the bundle's kind
    and calendar facts are all included.
    """
    wanted = set(concepts)
    given = [f for f in scenario_given_facts(state) if _mentions(f.term, wanted)]
    conceptnet = [f for f in kb if _mentions(f.term, wanted)]
    prefs = [
        Fact(term=p.term, source=SOURCE_GIVEN_PREFERENCE)
        for p in state.preferences
        if _mentions(p.term, wanted)
    ]
    knowledge: list[Fact] = []
    calendar: list[Fact] = []
    for activity in state.calendar:
        kind, cal = activity_bundle(state, activity)
        if any(_mentions(f.term, wanted) for f in [kind, *cal]):
            knowledge.append(kind)
            calendar.extend(cal)
    return TaggedFactSet(given + conceptnet + prefs + knowledge + calendar)


def check_constraints(facts: TaggedFactSet, rules: Sequence[Rule]) -> TaggedFactSet:
    """Forward chain the constraint rules; derived facts are appended
    with their derivations retained."""
    _, derivations = forward_chain(facts.store(), rules)
    derived = [d.conclusion for d in derivations]
    merged = dict(facts.derivations)
    for derivation in derivations:
        merged[derivation.conclusion.term] = derivation
    return TaggedFactSet(list(facts) + derived, derivations=merged)


@dataclass(frozen=True)
class GoalNode:
    """Goal tree node: the root is the query, leaves are supporting
    facts, internal fact nodes are fired rules expanded into their
    premises."""

    term: Term
    fact: Optional[Fact] = None
    rule_id: Optional[str] = None
    children: tuple["GoalNode", ...] = ()

    def size(self) -> int:
        return 1 + sum(child.size() for child in self.children)

    def walk(self) -> Iterator["GoalNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class Explanation:
    query: Query
    justification: tuple[Term, ...]
    chain: tuple[Term, ...]
    tree: GoalNode
    text: str
    trace: TaggedFactSet


def _expand(fact: Fact, facts: TaggedFactSet) -> GoalNode:
    derivation = facts.derivations.get(fact.term)
    if fact.source == SOURCE_RULE_FIRED and derivation is not None:
        children = tuple(_expand(p, facts) for p in derivation.premises)
        return GoalNode(
            term=fact.term, fact=fact, rule_id=derivation.rule_id, children=children
        )
    return GoalNode(term=fact.term, fact=fact)


def _tree_key(node: GoalNode, facts: TaggedFactSet) -> tuple:
    ranks = tuple(
        TIEBREAK_SOURCE_ORDER.index(n.fact.source)
        for n in node.walk()
        if n.fact is not None
    )
    printed = tuple(format_term(n.term) for n in node.walk())
    return (node.size(), ranks, printed)


def synthesize(
    query: Query,
    facts: TaggedFactSet,
    decompositions: Sequence[Rule],
) -> Optional[Explanation]:
    """Grow candidate goal trees for the query and keep the best one.

    Returns None when nothing satisfies the query (a NoExplanation
    outcome, not an error).  ``text`` is left empty; render it against a
    state with ``render_nl``.
    """
    store = facts.store()
    candidates: list[GoalNode] = []

    direct = facts.get(query.term)
    if direct is not None:
        candidates.append(
            GoalNode(term=query.term, children=(_expand(direct, facts),))
        )

    for rule in decompositions:
        env = unify(rule.head, query.term, {})
        if env is None:
            continue
        for solution, premises in solve_body(rule.body, store, env, ()):
            del solution
            children = tuple(_expand(p, facts) for p in premises)
            candidates.append(
                GoalNode(term=query.term, rule_id=rule.id, children=children)
            )

    if not candidates:
        return None
    best = min(candidates, key=lambda node: _tree_key(node, facts))

    subgoals = tuple(child.term for child in best.children)
    justification = subgoals[-2:] if len(subgoals) >= 2 else subgoals

    chain_terms: list[Term] = []
    for node in best.walk():
        if node.fact is not None and node.children:  # a fired rule
            for leaf in node.walk():
                if leaf.fact is not None and not leaf.children:
                    if leaf.term not in chain_terms:
                        chain_terms.append(leaf.term)
    if not chain_terms:
        chain_terms = [t for t in subgoals]
    chain_terms.sort(key=facts.position)

    return Explanation(
        query=query,
        justification=justification,
        chain=tuple(chain_terms),
        tree=best,
        text="",
        trace=facts,
    )


def _activity_in_tree(tree: GoalNode, state: TaskState) -> Optional[Activity]:
    for node in tree.walk():
        t = node.term
        if (
            isinstance(t, Compound)
            and t.functor in ("onDay", "atTime")
            and isinstance(t.args[0], Atom)
        ):
            activity = state.activity(t.args[0].name)
            if activity is not None:
                return activity
    return None


def render_nl(explanation: Explanation, state: TaskState) -> str:
    """Render the explanation as prose.

    Before-activity medications get the full appointment sentence;
    fixed-slot medications get the one-line habit form.
    """
    term = explanation.query.term
    med_name = (
        term.args[0].name
        if isinstance(term, Compound) and isinstance(term.args[0], Atom)
        else format_term(term)
    )
    constraint = (
        state.medication(med_name).constraint
        if state.has_medication(med_name)
        else None
    )
    if isinstance(constraint, FixedSlot):
        return f"You take {med_name} every {PERIOD_NAMES[constraint.slot]}."

    activity = _activity_in_tree(explanation.tree, state)
    if activity is not None and isinstance(constraint, BeforeActivity):
        distance = state.distance_for(med_name)
        if distance is None:
            distance = 0
        slot = max(0, time_to_slot(state, activity.clock) - distance)
        phrase = (
            "immediately before activity"
            if distance == 0
            else "a few hours before activity"
        )
        return (
            f"{med_name} needs to be taken before any physical activity, and"
            f" you have a {activity.display} at {clock_ampm(activity.clock)}"
            f" on {DAY_NAMES[activity.day]}. Since you prefer to take it"
            f" {phrase}, you should take it in the {PERIOD_NAMES[slot]}."
        )

    first = explanation.tree.children[0] if explanation.tree.children else None
    if first is not None and first.fact is not None:
        return f"Because {format_term(first.term)} ({first.fact.source})."
    return f"Because {format_term(term)} holds."


def explain_question(
    question: str,
    context: Optional[AssistiveAction],
    state: TaskState,
    kb: Optional[FactStore] = None,
    rules: Optional[Sequence[Rule]] = None,
    decompositions: Optional[Sequence[Rule]] = None,
) -> Optional[Explanation]:
    """Full pipeline from question text to rendered Explanation.

    Returns None for the NoExplanation outcome; raises NoContext or
    UnrecognizedQuestion when the question itself cannot be handled.
    """
    kb = default_kb() if kb is None else kb
    rules = default_rules() if rules is None else rules
    decompositions = (
        default_decompositions() if decompositions is None else decompositions
    )
    query = parse_question(question, context, state)
    concepts = extract_concepts(query, state)
    gathered = gather_facts(concepts, state, kb)
    closed = check_constraints(gathered, rules)
    explanation = synthesize(query, closed, decompositions)
    if explanation is None:
        return None
    return replace(explanation, text=render_nl(explanation, state))


def loads_decompositions(text: str) -> list[Rule]:
    """Decomposition rules use the rule syntax but are goal-directed, so
    head variables need not occur in the body (the query binds them)."""
    return loads_rules(text, require_range_restriction=False)


def _data_text(name: str) -> str:
    return resources.files("sortaid").joinpath("data", name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def default_kb() -> FactStore:
    return loads_kb(_data_text("mini_kb.txt"))


@lru_cache(maxsize=None)
def default_rules() -> tuple[Rule, ...]:
    return tuple(loads_rules(_data_text("constraints.rules")))


@lru_cache(maxsize=None)
def default_decompositions() -> tuple[Rule, ...]:
    return tuple(loads_decompositions(_data_text("decompositions.rules")))
