import random

import pytest

from helpers import random_scenario
from sortaid.errors import DuplicateContext, SlotUnderflow, UnsatisfiableSupply
from sortaid.planner import (
    Operator,
    Plan,
    alternative_paper_form,
    alternative_plans,
    check_plan,
    plan_for,
    plan_paper_form,
    steps_paper_form,
)
from sortaid.scenario import (
    Preference,
    StatePreference,
    apply_action,
    diff_grid,
    loads_scenario,
)
from sortaid.terms import parse_term

GOLDEN_STEPS = "(removePill Levodopa 3 1) (addPill Levodopa 3 0) (addPill Levodopa 5 2)"
GOLDEN_PLAN = f"(planFor state8 ((preference beforeActivity 1)) ({GOLDEN_STEPS}))"
GOLDEN_ALTERNATIVE = "(alternativePlanFor state8 ((preference beforeActivity 0)) ((addPill Levodopa 5 3)))"


def test_golden_plan_exact(golden_state):
    plan = plan_for(golden_state)
    assert steps_paper_form(plan) == GOLDEN_STEPS
    assert plan_paper_form(plan) == GOLDEN_PLAN


def test_solved_state_empty_plan(golden_state):
    solved = golden_state
    for step in plan_for(golden_state).steps:
        from sortaid.scenario import PlacePill, RemovePill

        action = (
            PlacePill(step.med, step.day, step.slot)
            if step.kind == "addPill"
            else RemovePill(step.med, step.day, step.slot)
        )
        solved = apply_action(solved, action)
    assert plan_for(solved).steps == ()


def test_fixed_slot_plan_days_ascending():
    state = loads_scenario("[meds]\nVitaminD 1 fixed:0 7\n")
    plan = plan_for(state)
    # brute-force diff over the empty 7x4 grid: one morning add per day
    expected = tuple(
        Operator("addPill", "VitaminD", day, 0) for day in range(7)
    )
    assert plan.steps == expected


def test_by_day_ordering():
    text = """
[meds]
A 1 fixed:0 7
B 1 fixed:1 7
[prefs]
(prefers user (sortOrder byDay))
"""
    plan = plan_for(loads_scenario(text))
    kinds = [(op.med, op.day) for op in plan.steps]
    assert kinds[:4] == [("A", 0), ("B", 0), ("A", 1), ("B", 1)]


def test_by_medication_ordering():
    text = """
[meds]
A 1 fixed:0 7
B 1 fixed:1 7
"""
    plan = plan_for(loads_scenario(text))
    meds = [op.med for op in plan.steps]
    assert meds == ["A"] * 7 + ["B"] * 7


def test_unsatisfiable_supply():
    state = loads_scenario("[meds]\nVitaminD 1 fixed:0 3\n")
    with pytest.raises(UnsatisfiableSupply):
        plan_for(state)


# --- alternatives ------------------------------------------------------------

def test_golden_counterfactual(golden_state):
    alts = alternative_plans(golden_state, (0,))
    assert len(alts.entries) == 1
    entry = alts.entries[0]
    assert entry.error is None
    assert steps_paper_form(entry.plan) == "(addPill Levodopa 5 3)"
    assert alternative_paper_form("state8", entry) == GOLDEN_ALTERNATIVE


def test_counterfactual_equal_to_actual_rejected(golden_state):
    alts = alternative_plans(golden_state, (1,))
    assert isinstance(alts.entries[0].error, DuplicateContext)


def test_counterfactual_underflow_recorded_not_raised(golden_state):
    alts = alternative_plans(golden_state, (2, 0))
    assert isinstance(alts.entries[0].error, SlotUnderflow)
    assert alts.entries[1].plan is not None


def test_counterfactuals_leave_state_unchanged(golden_state):
    before = plan_paper_form(plan_for(golden_state))
    alternative_plans(golden_state, (0, 2))
    assert plan_paper_form(plan_for(golden_state)) == before
    assert golden_state.distance_for("Levodopa") == 1


# --- check_plan ----------------------------------------------------------------

def test_golden_plan_checks(golden_state):
    assert check_plan(golden_state, plan_for(golden_state))


def test_reordered_plan_violates_daily_max(golden_state):
    # addPill before the removePill overfills Wednesday (max_per_day 1)
    plan = plan_for(golden_state)
    reordered = Plan(
        state_id=plan.state_id,
        preference_context=plan.preference_context,
        steps=(plan.steps[1], plan.steps[0], plan.steps[2]),
    )
    result = check_plan(golden_state, reordered)
    assert not result
    assert any("max_per_day" in reason for reason in result.reasons)


def test_empty_plan_on_solved_state():
    state = loads_scenario("[meds]\n[grid]\n")
    assert check_plan(state, Plan(state_id="s", preference_context=(), steps=()))


# --- properties ------------------------------------------------------------------

def test_soundness_and_step_count_1000_random():
    rng = random.Random(4242)
    for i in range(1000):
        state = random_scenario(rng, ident=f"p{i}")
        plan = plan_for(state)
        diff = diff_grid(state)
        assert len(plan.steps) == len(diff.missing) + len(diff.extra) + 2 * len(diff.moves)
        assert check_plan(state, plan)


def test_no_add_and_remove_on_same_cell():
    rng = random.Random(31337)
    for i in range(300):
        state = random_scenario(rng, ident=f"m{i}")
        plan = plan_for(state)
        adds = {(s.med, s.day, s.slot) for s in plan.steps if s.kind == "addPill"}
        removes = {(s.med, s.day, s.slot) for s in plan.steps if s.kind == "removePill"}
        assert not (adds & removes)


def test_determinism(golden_state):
    first = plan_for(golden_state)
    second = plan_for(golden_state)
    assert first == second
