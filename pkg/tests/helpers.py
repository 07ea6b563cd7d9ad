"""Shared generators and brute-force oracles for the property suites.

Everything here is deliberately independent of the engine's own
algorithms: the closure oracle enumerates ground instantiations from
the constant pool, the goal oracle walks all 28 cells and re-derives
each requirement from the constraint definitions, and the slot oracle
counts boundaries with a plain loop.
"""

from __future__ import annotations

import random
from itertools import product

from sortaid.knowledge import substitute
from sortaid.rules import Pattern, Rule
from sortaid.scenario import (
    Activity,
    BeforeActivity,
    FixedSlot,
    Grid,
    Medication,
    Preference,
    TaskState,
    Unconstrained,
)
from sortaid.terms import (
    Atom,
    Compound,
    Integer,
    Term,
    Text,
    Variable,
    term_variables,
)
from sortaid.terms import parse_term

# --- random terms -----------------------------------------------------------

_ATOM_ALPHA = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
_ATOM_REST = _ATOM_ALPHA + "0123456789-_."
_TEXT_ALPHA = _ATOM_REST + " '\\,:!"


def random_atom_name(rng: random.Random) -> str:
    length = rng.randint(1, 8)
    return rng.choice(_ATOM_ALPHA) + "".join(
        rng.choice(_ATOM_REST) for _ in range(length - 1)
    )


def random_term(rng: random.Random, depth: int = 0, ground: bool = False) -> Term:
    kinds = ["atom", "int", "text"]
    if not ground:
        kinds.append("var")
    if depth < 5:
        kinds.extend(["compound"] * 2)
    kind = rng.choice(kinds)
    if kind == "atom":
        return Atom(random_atom_name(rng))
    if kind == "var":
        return Variable(random_atom_name(rng))
    if kind == "int":
        return Integer(rng.randint(-999, 999))
    if kind == "text":
        length = rng.randint(0, 10)
        return Text("".join(rng.choice(_TEXT_ALPHA) for _ in range(length)))
    args = tuple(
        random_term(rng, depth + 1, ground) for _ in range(rng.randint(1, 3))
    )
    return Compound(random_atom_name(rng), args)


# --- random builtin-free rule sets and their closure oracle ------------------

_PREDICATES = (("p", 1), ("q", 2), ("r", 2), ("s", 1))
_CONSTANTS = tuple(Atom(name) for name in "abcde")
_VARS = ("X", "Y", "Z")


def random_ground_fact(rng: random.Random) -> Term:
    functor, arity = rng.choice(_PREDICATES)
    return Compound(functor, tuple(rng.choice(_CONSTANTS) for _ in range(arity)))


def random_rule(rng: random.Random, rule_id: str) -> Rule:
    body = []
    bound: list[str] = []
    for _ in range(rng.randint(1, 3)):
        functor, arity = rng.choice(_PREDICATES)
        args = []
        for _ in range(arity):
            if rng.random() < 0.6:
                name = rng.choice(_VARS)
                args.append(Variable(name))
                bound.append(name)
            else:
                args.append(rng.choice(_CONSTANTS))
        body.append(Pattern(Compound(functor, tuple(args))))
    functor, arity = rng.choice(_PREDICATES)
    head_args = []
    for _ in range(arity):
        if bound and rng.random() < 0.7:
            head_args.append(Variable(rng.choice(bound)))
        else:
            head_args.append(rng.choice(_CONSTANTS))
    return Rule(id=rule_id, head=Compound(functor, tuple(head_args)), body=tuple(body))


def closure_oracle(fact_terms: set[Term], rules: list[Rule]) -> set[Term]:
    """Brute-force closure: every round, try every assignment of pool
    constants to each rule's variables and fire the ones whose whole
    body is present."""
    terms = set(fact_terms)
    while True:
        added: set[Term] = set()
        pool: set[Term] = set()
        for term in terms:
            if isinstance(term, Compound):
                pool.update(term.args)
        pool_list = sorted(pool, key=str)
        for rule in rules:
            names = sorted(
                set(term_variables(rule.head))
                | {v for lit in rule.body for v in term_variables(lit.term)}
            )
            for values in product(pool_list, repeat=len(names)):
                env = dict(zip(names, values))
                if all(substitute(lit.term, env) in terms for lit in rule.body):
                    head = substitute(rule.head, env)
                    if head not in terms:
                        added.add(head)
        if not added:
            return terms
        terms |= added


# --- random scenarios ---------------------------------------------------------

def _slot_of(clock: int, boundaries=(660, 960, 1200)) -> int:
    slot = 0
    for boundary in boundaries:
        if clock >= boundary:
            slot += 1
    return slot


def random_scenario(rng: random.Random, ident: str = "rand") -> TaskState:
    """Scenario with <= 3 medications, <= 2 activities, and a random
    partial grid.  Constructed so the goal is always feasible (no slot
    underflow, daily maxima and supplies ample)."""
    calendar = tuple(
        Activity(
            name=f"act{i}",
            day=rng.randrange(7),
            clock=rng.randrange(0, 1440),
            display=f"activity {i}",
        )
        for i in range(rng.randint(0, 2))
    )
    min_slot = min((_slot_of(a.clock) for a in calendar), default=0)

    meds = []
    prefs = []
    for i in range(rng.randint(1, 3)):
        name = f"Med{i}"
        roll = rng.random()
        if roll < 0.4:
            constraint = FixedSlot(rng.randrange(4))
        elif roll < 0.8:
            constraint = BeforeActivity()
        else:
            constraint = Unconstrained()
        meds.append(
            Medication(
                name=name,
                max_per_day=rng.randint(2, 4),
                constraint=constraint,
                weekly_supply=40,
            )
        )
        if isinstance(constraint, BeforeActivity) and calendar and rng.random() < 0.8:
            distance = rng.randint(0, min_slot)
            prefs.append(
                Preference(
                    parse_term(
                        f"(prefers user (medicationBeforeActivityBy {name} {distance}))"
                    )
                )
            )
    if rng.random() < 0.3:
        order = rng.choice(["byMedication", "byDay"])
        prefs.append(Preference(parse_term(f"(prefers user (sortOrder {order}))")))

    cells: dict[tuple[int, int], dict[str, int]] = {}
    for _ in range(rng.randint(0, 10)):
        med = rng.choice(meds)
        day, slot = rng.randrange(7), rng.randrange(4)
        cells.setdefault((day, slot), {})
        cells[(day, slot)][med.name] = cells[(day, slot)].get(med.name, 0) + 1

    return TaskState(
        id=ident,
        grid=Grid(cells),
        medications=tuple(meds),
        calendar=calendar,
        preferences=tuple(prefs),
    )


def goal_oracle(state: TaskState) -> dict[tuple[int, int], dict[str, int]]:
    """Re-derive the goal by walking all 28 cells and asking, per
    medication, how many pills the constraint puts there."""
    goal: dict[tuple[int, int], dict[str, int]] = {}
    for day in range(7):
        for slot in range(4):
            for med in state.medications:
                count = 0
                if isinstance(med.constraint, FixedSlot):
                    if slot == med.constraint.slot:
                        count = 1
                elif isinstance(med.constraint, BeforeActivity):
                    distance = 0
                    for pref in state.preferences:
                        if pref.kind == "beforeActivityBy" and pref.med == med.name:
                            distance = pref.distance
                    for act in state.calendar:
                        if act.day == day and _slot_of(
                            act.clock, state.slot_boundaries
                        ) - distance == slot:
                            count += 1
                if count:
                    goal.setdefault((day, slot), {})
                    goal[(day, slot)][med.name] = count
    return goal


def subset_in_order(needles: list[str], haystack: list[str]) -> bool:
    it = iter(haystack)
    return all(any(line == needle for line in it) for needle in needles)
