"""Exception hierarchy for the engine.

Every error that can cross a module boundary has a distinct class so
callers (CLI, HTTP service) can map it to a stable machine code.  The
``code`` attribute is that machine token.
"""

from __future__ import annotations

import re


def _default_code(name: str) -> str:
    return re.sub(r"(?<!^)(?=[A-Z])", "_", name).upper()


class SortAidError(Exception):
    """Base class for all engine errors."""

    @property
    def code(self) -> str:
        return _default_code(type(self).__name__)


# --- term syntax ---------------------------------------------------------

class TermError(SortAidError):
    pass


class UnbalancedParens(TermError):
    pass


class EmptyExpression(TermError):
    pass


class DanglingInput(TermError):
    pass


class UnterminatedString(TermError):
    pass


# --- knowledge base files -------------------------------------------------

class KBError(SortAidError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class UnknownSourceTag(KBError):
    pass


# --- rules ----------------------------------------------------------------

class RuleError(SortAidError):
    pass


class RuleParseError(RuleError):
    pass


class RangeRestrictionViolation(RuleError):
    pass


class InsufficientlyGround(RuleError):
    pass


class DepthExceeded(RuleError):
    pass


# --- scenario -------------------------------------------------------------

class ScenarioError(SortAidError):
    pass


class ScenarioParseError(ScenarioError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class UnknownScenario(ScenarioError):
    pass


class InvalidDay(ScenarioError):
    pass


class InvalidSlot(ScenarioError):
    pass


class UnknownMedication(ScenarioError):
    pass


class SlotUnderflow(ScenarioError):
    pass


class ConflictingPreferences(ScenarioError):
    pass


class GoalExceedsDailyMax(ScenarioError):
    pass


class NoSuchPillAtCell(ScenarioError):
    pass


class SupplyExhausted(ScenarioError):
    pass


# --- planning -------------------------------------------------------------

class PlanError(SortAidError):
    pass


class UnsatisfiableSupply(PlanError):
    pass


class DuplicateContext(PlanError):
    pass


# --- why-questions ----------------------------------------------------------

class QuestionError(SortAidError):
    pass


class NoContext(QuestionError):
    pass


class UnrecognizedQuestion(QuestionError):
    pass


# --- CLI scripts & persistence ---------------------------------------------

class ScriptError(SortAidError):
    pass


class SnapshotError(SortAidError):
    pass


class StorageUnavailable(SnapshotError):
    pass


class CorruptSnapshot(SnapshotError):
    pass
