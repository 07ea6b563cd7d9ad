import pytest

from helpers import subset_in_order
from sortaid.errors import NoContext, UnrecognizedQuestion
from sortaid.explain import (
    check_constraints,
    default_decompositions,
    default_kb,
    default_rules,
    explain_question,
    extract_concepts,
    gather_facts,
    parse_question,
    render_nl,
    synthesize,
)
from sortaid.hint import AssistiveAction
from sortaid.knowledge import SOURCE_RULE_FIRED, Fact, FactStore
from sortaid.planner import Operator
from sortaid.scenario import Preference, StatePreference, apply_action, loads_scenario
from sortaid.session import explanation_to_json
from sortaid.terms import format_term, parse_term

GOLDEN_HINT = AssistiveAction(
    level=4,
    operator=Operator("removePill", "Levodopa", 3, 1),
    utterance="Try removing a Levodopa from Wednesday.",
)

GOLDEN_TRACE_LINES = [
    "[(IsA Levodopa pill), 'Given']",
    "[(AtLocation pill cabinet), 'ConceptNet']",
    "[(IsA Wednesday weekday), 'ConceptNet']",
    "[(IsA Wednesday day), 'ConceptNet']",
    "[(prefers user (before pill activity)), 'Given preference']",
    "[(IsA appt activity), 'Given knowledge']",
    "[(atTime appt '1pm'), 'calendar']",
    "[(onDay appt Wednesday), 'calendar']",
    "[(atTime appt afternoon), 'Rule fired']",
]

GOLDEN_CHAIN = (
    "(prefers user (before pill activity)) (IsA appt activity)"
    " (atTime appt '1pm') (onDay appt Wednesday) (IsA '1pm' afternoon)"
)

DIALOG_DISTANCE_1 = (
    "Levodopa needs to be taken before any physical activity, and you have a"
    " physical therapy appointment at 1pm on Wednesday. Since you prefer to"
    " take it a few hours before activity, you should take it in the morning."
)


# --- question parsing --------------------------------------------------------

def test_bare_why_uses_context(golden_state):
    query = parse_question("Why?", GOLDEN_HINT, golden_state)
    assert format_term(query.term) == "(onDate Levodopa Wednesday)"


def test_bare_why_without_context(golden_state):
    with pytest.raises(NoContext):
        parse_question("Why?", None, golden_state)


def test_keyword_question(golden_state):
    query = parse_question("why levodopa friday", None, golden_state)
    assert format_term(query.term) == "(onDate Levodopa Friday)"


def test_unrecognized_question(golden_state):
    with pytest.raises(UnrecognizedQuestion):
        parse_question("why is the sky blue", None, golden_state)


# --- concepts ----------------------------------------------------------------

def test_concepts_with_isa_expansion(golden_state):
    from sortaid.explain import Query

    query = Query(parse_term("(onDate Levodopa Wednesday)"))
    assert extract_concepts(query, golden_state) == ["Levodopa", "pill", "Wednesday"]


def test_concepts_infix_triple_query(golden_state):
    from sortaid.explain import Query
    from sortaid.knowledge import normalize_triple

    query = Query(normalize_triple(parse_term("(pill onDate Friday)")))
    assert extract_concepts(query, golden_state) == ["pill", "Friday"]


def test_concepts_unknown_arguments(golden_state):
    from sortaid.explain import Query

    query = Query(parse_term("(onDate Mystery Blursday)"))
    assert extract_concepts(query, golden_state) == ["Mystery", "Blursday"]


# --- gathering ------------------------------------------------------------------

def test_gather_golden_facts(golden_state):
    facts = gather_facts(["Levodopa", "pill", "Wednesday"], golden_state, default_kb())
    lines = [f.trace_line() for f in facts]
    assert "[(IsA Levodopa pill), 'Given']" in lines
    assert "[(AtLocation pill cabinet), 'ConceptNet']" in lines
    assert "[(IsA Wednesday weekday), 'ConceptNet']" in lines
    assert "[(onDay appt Wednesday), 'calendar']" in lines
    # the friday dance is not connected to these concepts
    assert not any("dance" in line for line in lines)


def test_gather_empty_concepts(golden_state):
    assert len(gather_facts([], golden_state, default_kb())) == 0


def test_gather_unknown_concept(golden_state):
    assert len(gather_facts(["Blursday"], golden_state, default_kb())) == 0


# --- constraint checking ----------------------------------------------------------

def test_check_constraints_adds_rule_fired(golden_state):
    gathered = gather_facts(
        ["Levodopa", "pill", "Wednesday"], golden_state, default_kb()
    )
    closed = check_constraints(gathered, default_rules())
    coarse = closed.get(parse_term("(atTime appt afternoon)"))
    assert coarse is not None and coarse.source == SOURCE_RULE_FIRED
    derived = closed.get(parse_term("(beforeTime pill afternoon)"))
    assert derived is not None and derived.source == SOURCE_RULE_FIRED
    assert closed.derivations[derived.term].rule_id == "before-time"


def test_check_constraints_no_rules_is_identity(golden_state):
    gathered = gather_facts(["pill"], golden_state, default_kb())
    closed = check_constraints(gathered, ())
    assert [f.term for f in closed] == [f.term for f in gathered]


# --- synthesis --------------------------------------------------------------------

def golden_explanation(state, question="Why?", context=GOLDEN_HINT):
    return explain_question(question, context, state)


def test_golden_justification_and_chain(golden_state):
    explanation = golden_explanation(golden_state)
    assert (
        " ".join(map(format_term, explanation.justification))
        == "(onDay pill Wednesday) (beforeTime pill afternoon)"
    )
    assert " ".join(map(format_term, explanation.chain)) == GOLDEN_CHAIN


def test_golden_trace_subset_in_order(golden_state):
    explanation = golden_explanation(golden_state)
    assert subset_in_order(GOLDEN_TRACE_LINES, explanation.trace.trace_lines())


def test_golden_text_distance_1(golden_state):
    assert golden_explanation(golden_state).text == DIALOG_DISTANCE_1


def test_golden_text_distance_0(golden_state):
    state = apply_action(
        golden_state,
        StatePreference(
            Preference(parse_term("(prefers user (medicationBeforeActivityBy Levodopa 0))"))
        ),
    )
    text = golden_explanation(state).text
    assert text.endswith(
        "Since you prefer to take it immediately before activity,"
        " you should take it in the afternoon."
    )
    assert text.startswith(
        "Levodopa needs to be taken before any physical activity,"
        " and you have a physical therapy appointment at 1pm on Wednesday."
    )


def test_direct_fact_single_leaf(golden_state):
    from sortaid.explain import Query

    gathered = gather_facts(["Levodopa", "pill"], golden_state, default_kb())
    query = Query(parse_term("(IsA Levodopa pill)"))
    explanation = synthesize(query, gathered, default_decompositions())
    assert explanation is not None
    assert len(explanation.tree.children) == 1
    assert explanation.chain == (query.term,)
    assert explanation.justification == (query.term,)


def test_no_explanation_outcome():
    state = loads_scenario(
        "[meds]\nMystery 1 none 7\n", scenario_id="bare"
    )
    assert explain_question("why mystery tuesday", None, state) is None


def test_fixed_slot_explanation(golden_state):
    explanation = explain_question("why vitamind wednesday", None, golden_state)
    assert explanation is not None
    assert explanation.text == "You take VitaminD every morning."
    # smallest tree wins: the fixed-time decomposition beats the
    # before-activity chain that also happens to satisfy the query
    assert explanation.tree.rule_id == "fixed-time"


def test_friday_question_uses_dance(golden_state):
    explanation = explain_question("why levodopa friday", None, golden_state)
    assert explanation is not None
    assert "dance class at 8pm on Friday" in explanation.text
    assert "(onDay pill Friday)" in map(format_term, explanation.justification)


def test_every_cited_triple_is_in_closed_set(golden_state):
    explanation = golden_explanation(golden_state)
    terms = {format_term(f.term) for f in explanation.trace}
    for triple in explanation.justification + explanation.chain:
        assert format_term(triple) in terms


def test_rule_fired_nodes_have_premise_children(golden_state):
    explanation = golden_explanation(golden_state)
    for node in explanation.tree.walk():
        if node.fact is not None and node.fact.source == SOURCE_RULE_FIRED:
            assert node.children
            premises = explanation.trace.derivations[node.term].premises
            assert tuple(c.term for c in node.children) == tuple(
                p.term for p in premises
            )


def test_synthesis_deterministic(golden_state):
    first = explanation_to_json(golden_explanation(golden_state))
    second = explanation_to_json(golden_explanation(golden_state))
    assert first == second
