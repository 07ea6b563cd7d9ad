"""The task world: sorting grid, medications, calendar, preferences.

The grid has one column per day (Sunday = 0 through Saturday = 6) and
four time-of-day slots (0 = morning, 1 = noon, 2 = evening, 3 = bedtime).
Day indexing starts at Sunday so that Wednesday = 3 and Friday = 5 match
the plan operators the engine emits.

TaskState is a value: ``apply_action`` returns a new state and appends
the action to the event log.  Event timestamps are logical ticks, which
keeps snapshots and replays byte-stable.
"""

from __future__ import annotations

import logging
import re
from bisect import bisect_right
from dataclasses import dataclass, replace
from typing import Optional, Union

from .errors import (
    ConflictingPreferences,
    GoalExceedsDailyMax,
    InvalidDay,
    InvalidSlot,
    NoSuchPillAtCell,
    ScenarioError,
    ScenarioParseError,
    SlotUnderflow,
    SupplyExhausted,
    UnknownMedication,
)
from .terms import Atom, Compound, Integer, Term, format_term, is_ground, parse_term

logger = logging.getLogger(__name__)

__all__ = [
    "DAY_NAMES",
    "SLOT_NAMES",
    "PERIOD_NAMES",
    "DEFAULT_SLOT_BOUNDARIES",
    "FixedSlot",
    "BeforeActivity",
    "Unconstrained",
    "Medication",
    "Activity",
    "Preference",
    "Grid",
    "TaskState",
    "PlacePill",
    "RemovePill",
    "Utterance",
    "Hesitate",
    "StatePreference",
    "UserAction",
    "GridDiff",
    "load_scenario",
    "loads_scenario",
    "time_to_slot",
    "goal_placements",
    "apply_action",
    "diff_grid",
    "clock_ampm",
    "parse_clock",
]

DAY_NAMES = (
    "Sunday",
    "Monday",
    "Tuesday",
    "Wednesday",
    "Thursday",
    "Friday",
    "Saturday",
)
SLOT_NAMES = ("morning", "noon", "evening", "bedtime")
# Wording used when explaining; slot 1 reads "afternoon" in prose even
# though the grid label is "noon".
PERIOD_NAMES = ("morning", "afternoon", "evening", "bedtime")

DEFAULT_SLOT_BOUNDARIES = (11 * 60, 16 * 60, 20 * 60)


@dataclass(frozen=True)
class FixedSlot:
    slot: int


@dataclass(frozen=True)
class BeforeActivity:
    pass


@dataclass(frozen=True)
class Unconstrained:
    pass


Constraint = Union[FixedSlot, BeforeActivity, Unconstrained]


@dataclass(frozen=True)
class Medication:
    name: str
    max_per_day: int
    constraint: Constraint
    weekly_supply: int

    def __post_init__(self) -> None:
        if self.max_per_day < 1:
            raise ScenarioError(f"{self.name}: max_per_day must be >= 1")
        if self.weekly_supply < 0:
            raise ScenarioError(f"{self.name}: weekly_supply must be >= 0")


@dataclass(frozen=True)
class Activity:
    name: str  # symbolic id used in facts, e.g. "appt"
    day: int
    clock: int  # minutes since midnight
    display: str = ""  # prose name, e.g. "physical therapy appointment"

    def __post_init__(self) -> None:
        if not 0 <= self.day <= 6:
            raise InvalidDay(f"activity {self.name}: day {self.day}")
        if not 0 <= self.clock < 1440:
            raise ScenarioError(f"activity {self.name}: clock {self.clock}")
        if not self.display:
            object.__setattr__(self, "display", self.name)


@dataclass(frozen=True)
class Preference:
    """A ground term rooted at ``prefers`` with subject ``user``.

    Recognized bodies are (medicationBeforeActivityBy med distance) and
    (sortOrder byMedication|byDay); anything else is stored untouched and
    ignored by the planner.
    """

    term: Term

    def __post_init__(self) -> None:
        t = self.term
        if not (
            isinstance(t, Compound)
            and t.functor == "prefers"
            and len(t.args) == 2
            and t.args[0] == Atom("user")
            and is_ground(t)
        ):
            raise ScenarioError(
                f"preference must be ground (prefers user ...): {format_term(t)}"
            )

    @property
    def body(self) -> Term:
        return self.term.args[1]  # type: ignore[union-attr]

    @property
    def kind(self) -> str:
        body = self.body
        if isinstance(body, Compound):
            if body.functor == "medicationBeforeActivityBy" and len(body.args) == 2:
                return "beforeActivityBy"
            if body.functor == "sortOrder" and len(body.args) == 1:
                return "sortOrder"
        return "other"

    @property
    def med(self) -> Optional[str]:
        if self.kind == "beforeActivityBy" and isinstance(self.body.args[0], Atom):
            return self.body.args[0].name
        return None

    @property
    def distance(self) -> Optional[int]:
        if self.kind == "beforeActivityBy" and isinstance(self.body.args[1], Integer):
            return self.body.args[1].value
        return None

    @property
    def order(self) -> Optional[str]:
        if self.kind == "sortOrder" and isinstance(self.body.args[0], Atom):
            return self.body.args[0].name
        return None


def _check_cell(day: int, slot: int) -> None:
    if not 0 <= day <= 6:
        raise InvalidDay(f"day {day} out of range 0..6")
    if not 0 <= slot <= 3:
        raise InvalidSlot(f"slot {slot} out of range 0..3")


class Grid:
    """7x4 grid of medication multisets.  Value semantics, copy on write."""

    __slots__ = ("_cells",)

    def __init__(self, cells: Optional[dict[tuple[int, int], dict[str, int]]] = None):
        self._cells: dict[tuple[int, int], dict[str, int]] = {}
        if cells:
            for (day, slot), meds in cells.items():
                _check_cell(day, slot)
                kept = {m: c for m, c in meds.items() if c > 0}
                if any(c < 0 for c in meds.values()):
                    raise ScenarioError("negative pill count")
                if kept:
                    self._cells[(day, slot)] = dict(kept)

    def count(self, med: str, day: int, slot: int) -> int:
        return self._cells.get((day, slot), {}).get(med, 0)

    def day_total(self, med: str, day: int) -> int:
        return sum(self.count(med, day, slot) for slot in range(4))

    def total(self, med: str) -> int:
        return sum(meds.get(med, 0) for meds in self._cells.values())

    def cells(self) -> list[tuple[int, int, str, int]]:
        """Sorted (day, slot, med, count) for every occupied cell entry."""
        out = []
        for (day, slot), meds in self._cells.items():
            for med, count in meds.items():
                out.append((day, slot, med, count))
        return sorted(out)

    def with_pill(self, med: str, day: int, slot: int) -> "Grid":
        _check_cell(day, slot)
        cells = {key: dict(val) for key, val in self._cells.items()}
        cells.setdefault((day, slot), {})
        cells[(day, slot)][med] = cells[(day, slot)].get(med, 0) + 1
        return Grid(cells)

    def without_pill(self, med: str, day: int, slot: int) -> "Grid":
        _check_cell(day, slot)
        if self.count(med, day, slot) < 1:
            raise NoSuchPillAtCell(f"no {med} at ({day},{slot})")
        cells = {key: dict(val) for key, val in self._cells.items()}
        cells[(day, slot)][med] -= 1
        return Grid(cells)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Grid) and self.cells() == other.cells()

    def __repr__(self) -> str:
        return f"Grid({self._cells!r})"


@dataclass(frozen=True)
class PlacePill:
    med: str
    day: int
    slot: int


@dataclass(frozen=True)
class RemovePill:
    med: str
    day: int
    slot: int


@dataclass(frozen=True)
class Utterance:
    text: str


@dataclass(frozen=True)
class Hesitate:
    seconds: float

    def __post_init__(self) -> None:
        # normalize so snapshots serialize the same regardless of the
        # caller passing 6 or 6.0
        object.__setattr__(self, "seconds", float(self.seconds))


@dataclass(frozen=True)
class StatePreference:
    preference: Preference


UserAction = Union[PlacePill, RemovePill, Utterance, Hesitate, StatePreference]


@dataclass(frozen=True)
class TaskState:
    id: str
    grid: Grid
    medications: tuple[Medication, ...]
    calendar: tuple[Activity, ...]
    preferences: tuple[Preference, ...]
    slot_boundaries: tuple[int, int, int] = DEFAULT_SLOT_BOUNDARIES
    events: tuple[tuple[int, UserAction], ...] = ()

    def __post_init__(self) -> None:
        if not all(a < b for a, b in zip(self.slot_boundaries, self.slot_boundaries[1:])):
            raise ScenarioError("slot boundaries must be strictly increasing")

    def medication(self, name: str) -> Medication:
        for med in self.medications:
            if med.name == name:
                return med
        raise UnknownMedication(name)

    def has_medication(self, name: str) -> bool:
        return any(med.name == name for med in self.medications)

    def activity(self, name: str) -> Optional[Activity]:
        for act in self.calendar:
            if act.name == name:
                return act
        return None

    def distance_for(self, med: str) -> Optional[int]:
        """Stated before-activity distance for a medication, if any."""
        found = None
        for pref in self.preferences:
            if pref.kind == "beforeActivityBy" and pref.med == med:
                if found is not None:
                    raise ConflictingPreferences(
                        f"multiple before-activity distances for {med}"
                    )
                found = pref.distance
        return found

    def sort_order(self) -> str:
        for pref in self.preferences:
            if pref.kind == "sortOrder" and pref.order in ("byMedication", "byDay"):
                return pref.order  # type: ignore[return-value]
        return "byMedication"


def time_to_slot(state: TaskState, clock: int) -> int:
    """Slot containing a clock value; a boundary belongs to the later slot."""
    return bisect_right(state.slot_boundaries, clock)


def clock_ampm(minutes: int) -> str:
    """740 -> '12:20pm', 780 -> '1pm', 0 -> '12am'."""
    hour, minute = divmod(minutes, 60)
    suffix = "am" if hour < 12 else "pm"
    display_hour = hour % 12 or 12
    if minute:
        return f"{display_hour}:{minute:02d}{suffix}"
    return f"{display_hour}{suffix}"


def parse_clock(text: str) -> int:
    match = re.fullmatch(r"(\d{1,2}):(\d{2})", text.strip())
    if not match:
        raise ScenarioParseError(f"bad clock {text!r}, expected HH:MM")
    hour, minute = int(match.group(1)), int(match.group(2))
    if not (0 <= hour < 24 and 0 <= minute < 60):
        raise ScenarioParseError(f"clock {text!r} out of range")
    return hour * 60 + minute


def goal_placements(state: TaskState) -> dict[tuple[int, int], dict[str, int]]:
    """Required pills per cell under the medication constraints and
    the stated preferences.

    A before-activity medication is due ``distance`` slots before each
    calendar activity (distance defaults to 0 with no stated
    preference); slots never wrap to the previous day.
    """
    goal: dict[tuple[int, int], dict[str, int]] = {}

    def require(med: str, day: int, slot: int) -> None:
        goal.setdefault((day, slot), {})
        goal[(day, slot)][med] = goal[(day, slot)].get(med, 0) + 1

    for med in state.medications:
        if isinstance(med.constraint, FixedSlot):
            if not 0 <= med.constraint.slot <= 3:
                raise InvalidSlot(f"{med.name}: fixed slot {med.constraint.slot}")
            for day in range(7):
                require(med.name, day, med.constraint.slot)
        elif isinstance(med.constraint, BeforeActivity):
            distance = state.distance_for(med.name)
            if distance is None:
                distance = 0
            for act in state.calendar:
                slot = time_to_slot(state, act.clock) - distance
                if slot < 0:
                    raise SlotUnderflow(
                        f"{med.name} due {distance} slots before {act.name}"
                        f" ({DAY_NAMES[act.day]} {clock_ampm(act.clock)})"
                        " falls before the first slot"
                    )
                require(med.name, act.day, slot)

    for pref in state.preferences:
        if pref.kind == "other":
            logger.debug("ignoring unrecognized preference %s", format_term(pref.term))

    for med in state.medications:
        for day in range(7):
            demanded = sum(
                goal.get((day, slot), {}).get(med.name, 0) for slot in range(4)
            )
            if demanded > med.max_per_day:
                raise GoalExceedsDailyMax(
                    f"{med.name} needs {demanded} pills on {DAY_NAMES[day]}"
                    f" but max_per_day is {med.max_per_day}"
                )
    return goal


@dataclass(frozen=True)
class GridDiff:
    """Difference between the grid and the goal.

    Entries are deterministically sorted; an entry may repeat when a
    cell is short (or over) by more than one pill.
    """

    missing: tuple[tuple[str, int, int], ...]
    extra: tuple[tuple[str, int, int], ...]
    moves: tuple[tuple[str, tuple[int, int], tuple[int, int]], ...]

    @property
    def empty(self) -> bool:
        return not (self.missing or self.extra or self.moves)

    @property
    def step_count(self) -> int:
        return len(self.missing) + len(self.extra) + 2 * len(self.moves)


def diff_grid(state: TaskState) -> GridDiff:
    """Missing, extra, and wrong-time pills relative to the goal.

    A surplus and a deficit of the same medication on the same day pair
    into a move; unconstrained medications only contribute extras beyond
    their daily maximum.
    """
    goal = goal_placements(state)
    missing: list[tuple[str, int, int]] = []
    extra: list[tuple[str, int, int]] = []
    moves: list[tuple[str, tuple[int, int], tuple[int, int]]] = []

    for med in state.medications:
        if isinstance(med.constraint, Unconstrained):
            for day in range(7):
                over = state.grid.day_total(med.name, day) - med.max_per_day
                for slot in range(3, -1, -1):
                    count = state.grid.count(med.name, day, slot)
                    while over > 0 and count > 0:
                        extra.append((med.name, day, slot))
                        over -= 1
                        count -= 1
            continue
        for day in range(7):
            deficits: list[int] = []
            surpluses: list[int] = []
            for slot in range(4):
                want = goal.get((day, slot), {}).get(med.name, 0)
                have = state.grid.count(med.name, day, slot)
                deficits.extend([slot] * max(0, want - have))
                surpluses.extend([slot] * max(0, have - want))
            paired = min(len(deficits), len(surpluses))
            for i in range(paired):
                moves.append((med.name, (day, surpluses[i]), (day, deficits[i])))
            missing.extend((med.name, day, slot) for slot in deficits[paired:])
            extra.extend((med.name, day, slot) for slot in surpluses[paired:])

    return GridDiff(
        missing=tuple(sorted(missing)),
        extra=tuple(sorted(extra)),
        moves=tuple(sorted(moves)),
    )


def apply_action(state: TaskState, action: UserAction) -> TaskState:
    """Apply one user action, returning a new state with the event logged."""
    tick = len(state.events)
    events = state.events + ((tick, action),)

    if isinstance(action, PlacePill):
        med = state.medication(action.med)
        if state.grid.total(med.name) + 1 > med.weekly_supply:
            raise SupplyExhausted(
                f"only {med.weekly_supply} {med.name} available this week"
            )
        grid = state.grid.with_pill(action.med, action.day, action.slot)
        return replace(state, grid=grid, events=events)

    if isinstance(action, RemovePill):
        state.medication(action.med)
        grid = state.grid.without_pill(action.med, action.day, action.slot)
        return replace(state, grid=grid, events=events)

    if isinstance(action, StatePreference):
        pref = action.preference
        if pref.kind == "beforeActivityBy":
            if pref.med is None or not state.has_medication(pref.med):
                raise UnknownMedication(
                    f"preference references unknown medication: {pref.med}"
                )
            kept = tuple(
                p
                for p in state.preferences
                if not (p.kind == "beforeActivityBy" and p.med == pref.med)
            )
        elif pref.kind == "sortOrder":
            kept = tuple(p for p in state.preferences if p.kind != "sortOrder")
        else:
            body = pref.body
            kept = tuple(
                p
                for p in state.preferences
                if not (
                    p.kind == "other"
                    and isinstance(p.body, Compound)
                    and isinstance(body, Compound)
                    and p.body.functor == body.functor
                    and p.body.args[:1] == body.args[:1]
                )
            )
        return replace(state, preferences=kept + (pref,), events=events)

    # Utterance / Hesitate leave the grid untouched.
    return replace(state, events=events)


# --- scenario files ---------------------------------------------------------

_SECTIONS = ("id", "meds", "grid", "calendar", "prefs", "slots")


def _parse_constraint(token: str) -> Constraint:
    if token == "beforeActivity":
        return BeforeActivity()
    if token == "none":
        return Unconstrained()
    match = re.fullmatch(r"fixed:(\d+)", token)
    if match:
        slot = int(match.group(1))
        if not 0 <= slot <= 3:
            raise InvalidSlot(f"fixed slot {slot} out of range 0..3")
        return FixedSlot(slot)
    raise ScenarioParseError(f"bad constraint {token!r}")


def loads_scenario(text: str, scenario_id: str = "state") -> TaskState:
    """Parse the sectioned ``.scn`` format.

    Sections: [id] [meds] [grid] [calendar] [prefs] [slots]; ``#``
    starts a comment line.  A trailing quoted field on a calendar line
    is the activity's prose name.
    """
    section = None
    meds: list[Medication] = []
    med_names: set[str] = set()
    cells: dict[tuple[int, int], dict[str, int]] = {}
    calendar: list[Activity] = []
    preferences: list[Preference] = []
    boundaries = DEFAULT_SLOT_BOUNDARIES
    sid = scenario_id

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ScenarioParseError(f"unknown section [{section}]", line=lineno)
            continue
        if section is None:
            raise ScenarioParseError("content before first section", line=lineno)
        try:
            if section == "id":
                sid = line
            elif section == "meds":
                parts = line.split()
                if len(parts) != 4:
                    raise ScenarioParseError(
                        "expected: name max_per_day constraint supply", line=lineno
                    )
                name, max_per_day, constraint, supply = parts
                meds.append(
                    Medication(
                        name=name,
                        max_per_day=int(max_per_day),
                        constraint=_parse_constraint(constraint),
                        weekly_supply=int(supply),
                    )
                )
                med_names.add(name)
            elif section == "grid":
                parts = line.split()
                if len(parts) != 4:
                    raise ScenarioParseError(
                        "expected: med day slot count", line=lineno
                    )
                med, day, slot, count = parts[0], int(parts[1]), int(parts[2]), int(parts[3])
                if med not in med_names:
                    raise UnknownMedication(med)
                _check_cell(day, slot)
                cells.setdefault((day, slot), {})
                cells[(day, slot)][med] = cells[(day, slot)].get(med, 0) + count
            elif section == "calendar":
                parts = line.split(None, 3)
                if len(parts) < 3:
                    raise ScenarioParseError(
                        "expected: name day HH:MM ['prose name']", line=lineno
                    )
                display = ""
                if len(parts) == 4:
                    display = parts[3].strip().strip("'")
                calendar.append(
                    Activity(
                        name=parts[0],
                        day=int(parts[1]),
                        clock=parse_clock(parts[2]),
                        display=display,
                    )
                )
            elif section == "prefs":
                pref = Preference(parse_term(line))
                if pref.kind == "beforeActivityBy" and pref.med not in med_names:
                    raise UnknownMedication(
                        f"preference references unknown medication: {pref.med}"
                    )
                preferences.append(pref)
            elif section == "slots":
                parts = line.split()
                if len(parts) != 3:
                    raise ScenarioParseError(
                        "expected three HH:MM boundaries", line=lineno
                    )
                boundaries = tuple(parse_clock(p) for p in parts)  # type: ignore[assignment]
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioParseError(str(exc), line=lineno) from exc

    return TaskState(
        id=sid,
        grid=Grid(cells),
        medications=tuple(meds),
        calendar=tuple(calendar),
        preferences=tuple(preferences),
        slot_boundaries=boundaries,
    )


def load_scenario(path: str) -> TaskState:
    from pathlib import Path

    p = Path(path)
    with open(p, encoding="utf-8") as handle:
        return loads_scenario(handle.read(), scenario_id=p.stem)
