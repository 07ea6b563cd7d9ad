"""Knowledge-driven assistive planning engine for a medication-sorting task.

The engine keeps a symbolic model of a weekly pill-sorting task and the
user's preferences, plans the remaining work as addPill/removePill
steps, grades how much help to offer, and answers "why?" with a
provenance-tagged explanation chain.
"""

from .errors import SortAidError
from .explain import (
    Explanation,
    Query,
    explain_question,
    extract_concepts,
    gather_facts,
    check_constraints,
    parse_question,
    render_nl,
    synthesize,
)
from .hint import (
    AssistanceModel,
    AssistiveAction,
    NeedConfig,
    NeedModel,
    render_utterance,
    select_assistance,
    update_need,
)
from .knowledge import (
    Fact,
    FactStore,
    load_kb,
    loads_kb,
    query,
    unify,
)
from .planner import (
    AlternativePlanSet,
    Operator,
    Plan,
    alternative_plans,
    check_plan,
    plan_for,
    plan_paper_form,
    steps_paper_form,
)
from .rules import Rule, eval_difference, forward_chain, load_rules, parse_rule
from .scenario import (
    Activity,
    Grid,
    Medication,
    Preference,
    TaskState,
    apply_action,
    diff_grid,
    goal_placements,
    load_scenario,
    loads_scenario,
    time_to_slot,
)
from .session import EngineSession
from .terms import Term, format_term, parse_term

__version__ = "0.1.0"
