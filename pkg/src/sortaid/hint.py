"""Need tracking and graded assistive utterances.

A scalar need level in [0,1] moves with task progress and social cues:
help requests saturate it, hesitation and mistakes bump it, progress
decays it.  Above the assistance threshold the level maps to one of
four bands, from encouragement (L1) to a direct instruction naming the
plan's first operator (L4).  All numeric parameters are configurable;
the defaults make a misplaced pill plus two long hesitations cross into
direct assistance.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

from .planner import Operator, Plan
from .scenario import (
    DAY_NAMES,
    SLOT_NAMES,
    Hesitate,
    PlacePill,
    RemovePill,
    StatePreference,
    Utterance,
)

__all__ = [
    "NeedConfig",
    "NeedModel",
    "TaskError",
    "TaskProgress",
    "AssistanceModel",
    "AssistiveAction",
    "NeedEvent",
    "update_need",
    "select_assistance",
    "render_utterance",
    "is_help_request",
    "is_why_question",
    "ENCOURAGEMENT",
]

ENCOURAGEMENT = "You're doing great. Keep it up!"

_HELP_MARKERS = ("help", "hint", "stuck", "lost", "what now", "what do i do")


@dataclass(frozen=True)
class NeedConfig:
    request_set: float = 1.0
    hesitation_threshold_s: float = 5.0
    hesitation_bump: float = 0.3
    error_bump: float = 0.4
    success_decay: float = 0.5
    assist_threshold: float = 0.5


@dataclass(frozen=True)
class NeedModel:
    level: float = 0.0
    config: NeedConfig = NeedConfig()


@dataclass(frozen=True)
class TaskError:
    """Engine event: a user action increased the remaining work."""


@dataclass(frozen=True)
class TaskProgress:
    """Engine event: a user action reduced the remaining work."""


NeedEvent = Union[Utterance, Hesitate, PlacePill, RemovePill, StatePreference, TaskError, TaskProgress]


def is_why_question(text: str) -> bool:
    return text.strip().lower().startswith("why")


def is_help_request(text: str) -> bool:
    lowered = text.lower()
    if is_why_question(text):
        return False
    return any(marker in lowered for marker in _HELP_MARKERS)


def _clamp(level: float) -> float:
    # Rounding keeps 0.1-granular bump arithmetic exact (0.4 + 0.3 is
    # 0.7, not 0.7000000000000001), which keeps snapshots byte-stable.
    return max(0.0, min(1.0, round(level, 9)))


def update_need(model: NeedModel, event: NeedEvent) -> NeedModel:
    """Fold one event into the need level (clamped to [0,1]).

    Why-questions route to the explanation pipeline and leave the level
    alone; so do preference statements and raw pill actions, whose
    effect arrives as a TaskError/TaskProgress event once the session
    has compared diffs.
    """
    cfg = model.config
    level = model.level
    if isinstance(event, Utterance):
        if is_help_request(event.text):
            level = cfg.request_set
    elif isinstance(event, Hesitate):
        if event.seconds >= cfg.hesitation_threshold_s:
            level += cfg.hesitation_bump
    elif isinstance(event, TaskError):
        level += cfg.error_bump
    elif isinstance(event, TaskProgress):
        level *= cfg.success_decay
    return replace(model, level=_clamp(level))


@dataclass(frozen=True)
class AssistanceModel:
    """Maps need bands to assistance levels L1..L4.

    Bands partition [assist_threshold, 1]: [.5,.625) L1, [.625,.75) L2,
    [.75,.875) L3, [.875,1] L4.
    """

    bands: tuple[tuple[float, int], ...] = (
        (0.875, 4),
        (0.75, 3),
        (0.625, 2),
        (0.5, 1),
    )

    def level_for(self, need: float) -> Optional[int]:
        for lower, level in self.bands:
            if need >= lower:
                return level
        return None


@dataclass(frozen=True)
class AssistiveAction:
    level: int  # 1..4
    operator: Optional[Operator]  # absent for L1 encouragement
    utterance: str


def render_utterance(op: Operator, level: int) -> str:
    """Template rendering for levels L2..L4."""
    day = DAY_NAMES[op.day]
    if level == 2:
        return f"Let's work on the {op.med} pills."
    if level == 3:
        return f"Look at {day} for {op.med}."
    if level == 4:
        if op.kind == "addPill":
            return f"Try placing a {op.med} pill in the {SLOT_NAMES[op.slot]} on {day}."
        return f"Try removing a {op.med} from {day}."
    raise ValueError(f"no utterance template for level {level}")


def select_assistance(
    plan: Plan,
    model: NeedModel,
    assistance: AssistanceModel = AssistanceModel(),
) -> Optional[AssistiveAction]:
    """Assistive action for the plan's first operator, or None below the
    threshold (or with nothing left to do)."""
    if model.level < model.config.assist_threshold or not plan.steps:
        return None
    level = assistance.level_for(model.level)
    if level is None:
        return None
    first = plan.steps[0]
    if level == 1:
        return AssistiveAction(level=1, operator=None, utterance=ENCOURAGEMENT)
    return AssistiveAction(
        level=level, operator=first, utterance=render_utterance(first, level)
    )
