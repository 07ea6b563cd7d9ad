import random

from sortaid.hint import (
    ENCOURAGEMENT,
    AssistanceModel,
    NeedModel,
    TaskError,
    TaskProgress,
    render_utterance,
    select_assistance,
    update_need,
)
from sortaid.planner import Operator, Plan, plan_for
from sortaid.scenario import Hesitate, Utterance


def plan_of(*steps):
    return Plan(state_id="s", preference_context=(), steps=steps)


# --- update_need ----------------------------------------------------------------

def test_error_then_hesitation_arithmetic():
    model = NeedModel()
    model = update_need(model, TaskError())
    assert model.level == 0.4
    model = update_need(model, Hesitate(6))
    assert model.level == 0.7


def test_why_question_does_not_change_need():
    model = NeedModel(level=0.3)
    assert update_need(model, Utterance("Why?")).level == 0.3


def test_help_request_saturates():
    model = update_need(NeedModel(), Utterance("I need help with this"))
    assert model.level == 1.0


def test_error_clamps_at_one():
    model = update_need(NeedModel(level=1.0), TaskError())
    assert model.level == 1.0


def test_short_hesitation_ignored():
    assert update_need(NeedModel(), Hesitate(3)).level == 0.0


def test_progress_decays():
    assert update_need(NeedModel(level=1.0), TaskProgress()).level == 0.5


def test_level_clamped_over_10k_random_streams():
    rng = random.Random(60601)
    events = [
        lambda: TaskError(),
        lambda: TaskProgress(),
        lambda: Hesitate(rng.uniform(0, 12)),
        lambda: Utterance(rng.choice(["help me", "why is that", "hello", "so stuck"])),
    ]
    for _ in range(10_000):
        model = NeedModel(level=rng.random())
        for _ in range(rng.randint(1, 8)):
            model = update_need(model, rng.choice(events)())
            assert 0.0 <= model.level <= 1.0


# --- selection --------------------------------------------------------------------

REMOVE = Operator("removePill", "Levodopa", 3, 1)
ADD = Operator("addPill", "Levodopa", 3, 0)


def test_direct_assistance_at_high_need(golden_state):
    action = select_assistance(plan_for(golden_state), NeedModel(level=0.9))
    assert action.level == 4
    assert action.utterance == "Try removing a Levodopa from Wednesday."
    assert action.operator == REMOVE


def test_below_threshold_none():
    assert select_assistance(plan_of(REMOVE), NeedModel(level=0.3)) is None


def test_empty_plan_none():
    assert select_assistance(plan_of(), NeedModel(level=1.0)) is None


def test_band_boundaries():
    assert select_assistance(plan_of(ADD), NeedModel(level=0.5)).level == 1
    assert select_assistance(plan_of(ADD), NeedModel(level=0.625)).level == 2
    assert select_assistance(plan_of(ADD), NeedModel(level=0.75)).level == 3
    assert select_assistance(plan_of(ADD), NeedModel(level=0.875)).level == 4
    assert select_assistance(plan_of(ADD), NeedModel(level=1.0)).level == 4


def test_l1_has_no_operator():
    action = select_assistance(plan_of(ADD), NeedModel(level=0.55))
    assert action.operator is None
    assert action.utterance == ENCOURAGEMENT


def test_monotone_in_need():
    rng = random.Random(8)
    for _ in range(500):
        low = rng.random()
        high = min(1.0, low + rng.random())
        a = select_assistance(plan_of(ADD), NeedModel(level=low))
        b = select_assistance(plan_of(ADD), NeedModel(level=high))
        assert (0 if a is None else a.level) <= (0 if b is None else b.level)


# --- rendering --------------------------------------------------------------------

def test_l4_add_matches_dialogue():
    assert (
        render_utterance(ADD, 4)
        == "Try placing a Levodopa pill in the morning on Wednesday."
    )


def test_l4_remove_matches_dialogue():
    assert render_utterance(REMOVE, 4) == "Try removing a Levodopa from Wednesday."


def test_l2_template():
    assert render_utterance(Operator("addPill", "VitaminD", 0, 0), 2) == (
        "Let's work on the VitaminD pills."
    )


def test_l3_template():
    assert render_utterance(Operator("addPill", "VitaminD", 5, 2), 3) == (
        "Look at Friday for VitaminD."
    )


def test_l4_injective_up_to_removal_slot():
    # The direct-removal wording names only the medication and the day,
    # so removals differing solely in slot render alike by design; every
    # other operator pair renders distinctly.
    meds = ("A", "B")
    ops = [
        Operator(kind, med, day, slot)
        for kind in ("addPill", "removePill")
        for med in meds
        for day in range(7)
        for slot in range(4)
    ]
    seen = {}
    for op in ops:
        text = render_utterance(op, 4)
        if text in seen:
            other = seen[text]
            assert op.kind == other.kind == "removePill"
            assert (op.med, op.day) == (other.med, other.day)
        else:
            seen[text] = op
