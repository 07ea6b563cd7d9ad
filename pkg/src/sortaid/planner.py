"""Task decomposition into addPill/removePill plans.

The task hierarchy (sort all pills -> sort one medication -> sort one
day -> operators) is acyclic and conflict-free at this scale, so it is
realized as a deterministic decomposition over the grid diff rather
than backtracking search.  Step order is fixed: medications in
declaration order (or days outermost under the byDay sort order), days
ascending, and within a day each wrong-time pill emits its removePill
then addPill pair before plain additions and removals.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .errors import DuplicateContext, SortAidError, UnsatisfiableSupply
from .scenario import (
    BeforeActivity,
    GridDiff,
    PlacePill,
    Preference,
    RemovePill,
    TaskState,
    apply_action,
    diff_grid,
    goal_placements,
)
from .terms import Atom, Compound, Integer

__all__ = [
    "Operator",
    "Plan",
    "CounterfactualPlan",
    "AlternativePlanSet",
    "PlanCheck",
    "plan_for",
    "alternative_plans",
    "check_plan",
    "plan_paper_form",
    "steps_paper_form",
    "alternative_paper_form",
]


@dataclass(frozen=True)
class Operator:
    kind: str  # "addPill" | "removePill"
    med: str
    day: int
    slot: int

    def paper_form(self) -> str:
        return f"({self.kind} {self.med} {self.day} {self.slot})"


@dataclass(frozen=True)
class Plan:
    state_id: str
    preference_context: tuple[tuple[str, int], ...]
    steps: tuple[Operator, ...]


@dataclass(frozen=True)
class CounterfactualPlan:
    context: tuple[tuple[str, int], ...]
    plan: Optional[Plan] = None
    error: Optional[SortAidError] = None


@dataclass(frozen=True)
class AlternativePlanSet:
    entries: tuple[CounterfactualPlan, ...]


@dataclass(frozen=True)
class PlanCheck:
    ok: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def _context_for(state: TaskState, override: Optional[int] = None) -> tuple[tuple[str, int], ...]:
    """One (beforeActivity, distance) entry per before-activity medication."""
    context = []
    for med in state.medications:
        if isinstance(med.constraint, BeforeActivity):
            if override is not None:
                distance = override
            else:
                distance = state.distance_for(med.name)
                if distance is None:
                    distance = 0
            context.append(("beforeActivity", distance))
    return tuple(context)


def _per_day_steps(diff: GridDiff, med: str, day: int) -> list[Operator]:
    # Surplus removals come first: on a day already over max_per_day,
    # adding a moved pill before clearing the extras would break the
    # daily maximum mid-plan.
    steps: list[Operator] = []
    for name, d, slot in diff.extra:
        if name == med and d == day:
            steps.append(Operator("removePill", med, d, slot))
    for name, (fd, fs), (td, ts) in diff.moves:
        if name == med and fd == day:
            steps.append(Operator("removePill", med, fd, fs))
            steps.append(Operator("addPill", med, td, ts))
    for name, d, slot in diff.missing:
        if name == med and d == day:
            steps.append(Operator("addPill", med, d, slot))
    return steps


def plan_for(state: TaskState) -> Plan:
    """Plan that moves the grid to the goal under the current preferences."""
    goal = goal_placements(state)
    for med in state.medications:
        needed = sum(meds.get(med.name, 0) for meds in goal.values())
        if needed > med.weekly_supply:
            raise UnsatisfiableSupply(
                f"{med.name}: goal needs {needed} pills,"
                f" weekly supply is {med.weekly_supply}"
            )
    diff = diff_grid(state)
    steps: list[Operator] = []
    if state.sort_order() == "byDay":
        for day in range(7):
            for med in state.medications:
                steps.extend(_per_day_steps(diff, med.name, day))
    else:
        for med in state.medications:
            for day in range(7):
                steps.extend(_per_day_steps(diff, med.name, day))
    return Plan(
        state_id=state.id,
        preference_context=_context_for(state),
        steps=tuple(steps),
    )


def _with_distance(state: TaskState, distance: int) -> TaskState:
    """Copy of the state with every before-activity distance replaced."""
    body_term = lambda med: Compound(  # noqa: E731
        "prefers",
        (
            Atom("user"),
            Compound("medicationBeforeActivityBy", (Atom(med), Integer(distance))),
        ),
    )
    kept = tuple(p for p in state.preferences if p.kind != "beforeActivityBy")
    added = tuple(
        Preference(body_term(med.name))
        for med in state.medications
        if isinstance(med.constraint, BeforeActivity)
    )
    return replace(state, preferences=kept + added)


def alternative_plans(
    state: TaskState, counterfactuals: Iterable[int]
) -> AlternativePlanSet:
    """Plan under each hypothetical distance; the actual state is untouched.

    Errors (a counterfactual equal to the stated preference, or one
    whose goal is infeasible) are recorded per entry without aborting
    the rest.
    """
    actual = _context_for(state)
    entries: list[CounterfactualPlan] = []
    for distance in counterfactuals:
        context = _context_for(state, override=distance)
        if context == actual:
            entries.append(
                CounterfactualPlan(
                    context=context,
                    error=DuplicateContext(
                        f"counterfactual distance {distance} equals the stated preference"
                    ),
                )
            )
            continue
        try:
            plan = plan_for(_with_distance(state, distance))
        except SortAidError as exc:
            entries.append(CounterfactualPlan(context=context, error=exc))
            continue
        entries.append(CounterfactualPlan(context=context, plan=plan))
    return AlternativePlanSet(entries=tuple(entries))


def check_plan(state: TaskState, plan: Plan) -> PlanCheck:
    """Simulate the plan; true iff every step's precondition held and the
    final grid matches the goal."""
    reasons: list[str] = []
    current = state
    for step in plan.steps:
        med = current.medication(step.med)
        if step.kind == "addPill":
            if current.grid.day_total(step.med, step.day) + 1 > med.max_per_day:
                reasons.append(
                    f"{step.paper_form()}: exceeds max_per_day {med.max_per_day}"
                )
            try:
                current = apply_action(current, PlacePill(step.med, step.day, step.slot))
            except SortAidError as exc:
                reasons.append(f"{step.paper_form()}: {exc}")
        elif step.kind == "removePill":
            try:
                current = apply_action(current, RemovePill(step.med, step.day, step.slot))
            except SortAidError as exc:
                reasons.append(f"{step.paper_form()}: {exc}")
        else:
            reasons.append(f"unknown operator kind {step.kind!r}")
    try:
        final = diff_grid(current)
        if not final.empty:
            reasons.append(f"plan leaves {final.step_count} steps of diff")
    except SortAidError as exc:
        reasons.append(str(exc))
    return PlanCheck(ok=not reasons, reasons=tuple(reasons))


def _context_paper_form(context: tuple[tuple[str, int], ...]) -> str:
    inner = " ".join(f"(preference {name} {value})" for name, value in context)
    return f"({inner})"


def steps_paper_form(plan: Plan) -> str:
    return " ".join(step.paper_form() for step in plan.steps)


def plan_paper_form(plan: Plan) -> str:
    return (
        f"(planFor {plan.state_id} "
        f"{_context_paper_form(plan.preference_context)} "
        f"({steps_paper_form(plan)}))"
    )


def alternative_paper_form(state_id: str, entry: CounterfactualPlan) -> str:
    if entry.plan is None:
        raise ValueError("no plan for this counterfactual")
    return (
        f"(alternativePlanFor {state_id} "
        f"{_context_paper_form(entry.context)} "
        f"({steps_paper_form(entry.plan)}))"
    )
