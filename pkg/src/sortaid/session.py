"""One user's interaction with the engine, plus JSON snapshots.

The session glues the modules together: it applies user actions,
classifies pill placements as progress or mistakes by comparing grid
diffs, keeps the need level, offers assistance when the need crosses
the threshold, remembers the last assistive action as context for bare
"Why?" questions, and replans after preference changes.

Loading a scenario whose grid already contains wrong-time or extra
pills counts as one observed mistake, so a freshly loaded flawed state
starts with a nonzero need level.

Snapshots are whole-state JSON; restoring one reproduces the state
byte-for-byte (event timestamps are logical ticks, not wall clock).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from .errors import CorruptSnapshot, ScenarioError, SortAidError, StorageUnavailable
from .explain import Explanation, explain_question
from .hint import (
    AssistanceModel,
    AssistiveAction,
    NeedModel,
    TaskError,
    TaskProgress,
    select_assistance,
    update_need,
)
from .planner import (
    AlternativePlanSet,
    Operator,
    Plan,
    alternative_plans,
    plan_for,
)
from .scenario import (
    Activity,
    BeforeActivity,
    FixedSlot,
    Grid,
    GridDiff,
    Hesitate,
    Medication,
    PlacePill,
    Preference,
    RemovePill,
    StatePreference,
    TaskState,
    Unconstrained,
    UserAction,
    Utterance,
    apply_action,
    diff_grid,
    load_scenario,
    loads_scenario,
)
from .terms import format_term, parse_term

__all__ = [
    "ActResult",
    "PreferenceChange",
    "EngineSession",
    "state_to_json",
    "state_from_json",
    "action_to_json",
    "action_from_json",
    "diff_to_json",
    "assistance_to_json",
    "plan_to_json",
    "explanation_to_json",
]


# --- JSON codecs ------------------------------------------------------------

def _constraint_to_json(constraint: Any) -> dict[str, Any]:
    if isinstance(constraint, FixedSlot):
        return {"kind": "fixed", "slot": constraint.slot}
    if isinstance(constraint, BeforeActivity):
        return {"kind": "beforeActivity"}
    return {"kind": "none"}


def _constraint_from_json(data: dict[str, Any]) -> Any:
    if data["kind"] == "fixed":
        return FixedSlot(data["slot"])
    if data["kind"] == "beforeActivity":
        return BeforeActivity()
    return Unconstrained()


def action_to_json(action: UserAction) -> dict[str, Any]:
    if isinstance(action, PlacePill):
        return {"type": "place", "med": action.med, "day": action.day, "slot": action.slot}
    if isinstance(action, RemovePill):
        return {"type": "remove", "med": action.med, "day": action.day, "slot": action.slot}
    if isinstance(action, Utterance):
        return {"type": "utterance", "text": action.text}
    if isinstance(action, Hesitate):
        return {"type": "hesitate", "seconds": action.seconds}
    if isinstance(action, StatePreference):
        return {"type": "preference", "pref": format_term(action.preference.term)}
    raise ScenarioError(f"unknown action {action!r}")


def action_from_json(data: dict[str, Any]) -> UserAction:
    kind = data.get("type")
    if kind == "place":
        return PlacePill(data["med"], int(data["day"]), int(data["slot"]))
    if kind == "remove":
        return RemovePill(data["med"], int(data["day"]), int(data["slot"]))
    if kind == "utterance":
        return Utterance(str(data["text"]))
    if kind == "hesitate":
        return Hesitate(float(data["seconds"]))
    if kind == "preference":
        return StatePreference(Preference(parse_term(data["pref"])))
    raise ScenarioError(f"unknown action type {kind!r}")


def state_to_json(state: TaskState) -> dict[str, Any]:
    return {
        "id": state.id,
        "grid": [list(entry) for entry in state.grid.cells()],
        "medications": [
            {
                "name": med.name,
                "max_per_day": med.max_per_day,
                "constraint": _constraint_to_json(med.constraint),
                "weekly_supply": med.weekly_supply,
            }
            for med in state.medications
        ],
        "calendar": [
            {"name": act.name, "day": act.day, "clock": act.clock, "display": act.display}
            for act in state.calendar
        ],
        "preferences": [format_term(p.term) for p in state.preferences],
        "slot_boundaries": list(state.slot_boundaries),
        "events": [[tick, action_to_json(action)] for tick, action in state.events],
    }


def state_from_json(data: dict[str, Any]) -> TaskState:
    cells: dict[tuple[int, int], dict[str, int]] = {}
    for day, slot, med, count in data["grid"]:
        cells.setdefault((day, slot), {})
        cells[(day, slot)][med] = count
    return TaskState(
        id=data["id"],
        grid=Grid(cells),
        medications=tuple(
            Medication(
                name=m["name"],
                max_per_day=m["max_per_day"],
                constraint=_constraint_from_json(m["constraint"]),
                weekly_supply=m["weekly_supply"],
            )
            for m in data["medications"]
        ),
        calendar=tuple(
            Activity(name=a["name"], day=a["day"], clock=a["clock"], display=a["display"])
            for a in data["calendar"]
        ),
        preferences=tuple(Preference(parse_term(p)) for p in data["preferences"]),
        slot_boundaries=tuple(data["slot_boundaries"]),  # type: ignore[arg-type]
        events=tuple(
            (tick, action_from_json(action)) for tick, action in data["events"]
        ),
    )


def diff_to_json(diff: Optional[GridDiff]) -> Optional[dict[str, Any]]:
    if diff is None:
        return None
    return {
        "missing": [list(entry) for entry in diff.missing],
        "extra": [list(entry) for entry in diff.extra],
        "moves": [
            [med, list(src), list(dst)] for med, src, dst in diff.moves
        ],
        "empty": diff.empty,
        "step_count": diff.step_count,
    }


def _operator_to_json(op: Optional[Operator]) -> Optional[dict[str, Any]]:
    if op is None:
        return None
    return {"kind": op.kind, "med": op.med, "day": op.day, "slot": op.slot}


def assistance_to_json(action: Optional[AssistiveAction]) -> Optional[dict[str, Any]]:
    if action is None:
        return None
    return {
        "level": action.level,
        "operator": _operator_to_json(action.operator),
        "utterance": action.utterance,
    }


def _assistance_from_json(data: Optional[dict[str, Any]]) -> Optional[AssistiveAction]:
    if data is None:
        return None
    op = data.get("operator")
    return AssistiveAction(
        level=data["level"],
        operator=None
        if op is None
        else Operator(op["kind"], op["med"], op["day"], op["slot"]),
        utterance=data["utterance"],
    )


def plan_to_json(plan: Plan) -> dict[str, Any]:
    from .planner import plan_paper_form

    return {
        "state_id": plan.state_id,
        "preference_context": [list(entry) for entry in plan.preference_context],
        "steps": [_operator_to_json(step) for step in plan.steps],
        "paper_form": plan_paper_form(plan),
    }


def _tree_to_json(node: Any) -> dict[str, Any]:
    return {
        "term": format_term(node.term),
        "source": node.fact.source if node.fact is not None else None,
        "rule_id": node.rule_id,
        "children": [_tree_to_json(child) for child in node.children],
    }


def explanation_to_json(explanation: Explanation) -> dict[str, Any]:
    return {
        "query": format_term(explanation.query.term),
        "justification": [format_term(t) for t in explanation.justification],
        "chain": [format_term(t) for t in explanation.chain],
        "text": explanation.text,
        "trace": [
            {"triple": format_term(f.term), "source": f.source}
            for f in explanation.trace
        ],
        "trace_lines": explanation.trace.trace_lines(),
        "tree": _tree_to_json(explanation.tree),
    }


# --- the session ------------------------------------------------------------

@dataclass(frozen=True)
class ActResult:
    state: TaskState
    diff: Optional[GridDiff]
    need: float
    assistance: Optional[AssistiveAction]


@dataclass(frozen=True)
class PreferenceChange:
    preference: Preference
    replaced: tuple[Preference, ...]
    plan: Plan


class EngineSession:
    """Single-user engine facade; one instance per scenario run."""

    def __init__(
        self,
        state: TaskState,
        session_id: Optional[str] = None,
        created_at: float = 0.0,
        need: Optional[NeedModel] = None,
        last_action: Optional[AssistiveAction] = None,
        assess_initial_need: bool = True,
    ):
        self.id = session_id or state.id
        self.state = state
        self.created_at = created_at
        self.need = need if need is not None else NeedModel()
        self.last_action = last_action
        self.last_explanation: Optional[Explanation] = None
        self.assistance_model = AssistanceModel()
        if need is None and assess_initial_need:
            diff = self._diff_or_none()
            if diff is not None and (diff.moves or diff.extra):
                self.need = update_need(self.need, TaskError())

    @classmethod
    def from_scenario_path(cls, path: str, session_id: Optional[str] = None) -> "EngineSession":
        return cls(load_scenario(path), session_id=session_id)

    @classmethod
    def from_scenario_text(
        cls, text: str, scenario_id: str = "state", session_id: Optional[str] = None
    ) -> "EngineSession":
        return cls(loads_scenario(text, scenario_id=scenario_id), session_id=session_id)

    def _diff_or_none(self) -> Optional[GridDiff]:
        try:
            return diff_grid(self.state)
        except SortAidError:
            return None

    def _offer_assistance(self) -> Optional[AssistiveAction]:
        try:
            plan = plan_for(self.state)
        except SortAidError:
            return None
        action = select_assistance(plan, self.need, self.assistance_model)
        if action is not None:
            self.last_action = action
        return action

    def act(self, action: UserAction) -> ActResult:
        """Apply a user action, update the need level, and offer
        assistance when warranted."""
        if isinstance(action, (PlacePill, RemovePill)):
            before = self._diff_or_none()
            self.state = apply_action(self.state, action)
            after = self._diff_or_none()
            if before is not None and after is not None:
                if after.step_count > before.step_count:
                    self.need = update_need(self.need, TaskError())
                elif after.step_count < before.step_count:
                    self.need = update_need(self.need, TaskProgress())
        else:
            self.state = apply_action(self.state, action)
            self.need = update_need(self.need, action)
        return ActResult(
            state=self.state,
            diff=self._diff_or_none(),
            need=self.need.level,
            assistance=self._offer_assistance(),
        )

    def hint(self) -> Optional[AssistiveAction]:
        return self._offer_assistance()

    def plan(self, counterfactuals: tuple[int, ...] = ()) -> tuple[Plan, AlternativePlanSet]:
        plan = plan_for(self.state)
        alternatives = alternative_plans(self.state, counterfactuals)
        return plan, alternatives

    def why(self, question: str = "Why?") -> Optional[Explanation]:
        explanation = explain_question(question, self.last_action, self.state)
        if explanation is not None:
            self.last_explanation = explanation
        return explanation

    def set_preference(self, pref: str | Preference) -> PreferenceChange:
        """Replace a preference and replan.

        Validates against a trial state first: a preference whose goal is
        infeasible (e.g. slot underflow) raises without touching the
        session.
        """
        preference = pref if isinstance(pref, Preference) else Preference(parse_term(pref))
        trial = apply_action(self.state, StatePreference(preference))
        plan = plan_for(trial)
        replaced = tuple(
            p
            for p in self.state.preferences
            if p.kind == preference.kind
            and (p.kind != "beforeActivityBy" or p.med == preference.med)
        )
        self.act(StatePreference(preference))
        return PreferenceChange(preference=preference, replaced=replaced, plan=plan)

    # --- snapshots ---------------------------------------------------------

    def to_snapshot(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "created_at": self.created_at,
            "need_level": self.need.level,
            "last_action": assistance_to_json(self.last_action),
            "state": state_to_json(self.state),
        }

    @classmethod
    def from_snapshot(cls, data: dict[str, Any]) -> "EngineSession":
        try:
            return cls(
                state=state_from_json(data["state"]),
                session_id=data["id"],
                created_at=data["created_at"],
                need=NeedModel(level=data["need_level"]),
                last_action=_assistance_from_json(data.get("last_action")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptSnapshot(f"bad snapshot: {exc}") from exc

    def save(self, directory: str | Path) -> Path:
        directory = Path(directory)
        try:
            directory.mkdir(parents=True, exist_ok=True)
            path = directory / f"{self.id}.json"
            path.write_text(json.dumps(self.to_snapshot()), encoding="utf-8")
        except OSError as exc:
            raise StorageUnavailable(str(exc)) from exc
        return path

    @classmethod
    def restore(cls, directory: str | Path, session_id: str) -> "EngineSession":
        path = Path(directory) / f"{session_id}.json"
        if not path.exists():
            raise FileNotFoundError(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CorruptSnapshot(str(exc)) from exc
        return cls.from_snapshot(data)
