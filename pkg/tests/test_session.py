import json

import pytest

from sortaid.cli import resolve_scenario
from sortaid.errors import CorruptSnapshot, NoContext, UnknownMedication
from sortaid.scenario import Hesitate, PlacePill, RemovePill, Utterance
from sortaid.session import EngineSession, state_from_json, state_to_json


def golden_session():
    return EngineSession.from_scenario_path(str(resolve_scenario("state8")))


def test_initial_need_reflects_existing_misplacement():
    session = golden_session()
    assert session.need.level == 0.4


def test_clean_scenario_starts_at_zero():
    session = EngineSession.from_scenario_text(
        "[meds]\nVitaminD 1 fixed:0 7\n", scenario_id="fresh"
    )
    assert session.need.level == 0.0


def test_two_hesitations_reach_direct_assistance():
    session = golden_session()
    session.act(Hesitate(6))
    result = session.act(Hesitate(6))
    assert result.need == 1.0
    assert result.assistance.level == 4
    assert result.assistance.utterance == "Try removing a Levodopa from Wednesday."


def test_error_and_progress_classification():
    session = golden_session()
    # a second wrong-time pill increases remaining work
    session.act(PlacePill("Levodopa", 0, 0))
    assert session.need.level == pytest.approx(0.8)
    # undoing it reduces remaining work
    session.act(RemovePill("Levodopa", 0, 0))
    assert session.need.level == pytest.approx(0.4)


def test_why_uses_last_assistance_context():
    session = golden_session()
    session.act(Hesitate(6))
    session.act(Hesitate(6))
    explanation = session.why("Why?")
    assert explanation is not None
    assert "you should take it in the morning" in explanation.text


def test_why_without_context_raises():
    session = golden_session()
    with pytest.raises(NoContext):
        session.why("Why?")


def test_set_preference_replans():
    session = golden_session()
    change = session.set_preference(
        "(prefers user (medicationBeforeActivityBy Levodopa 0))"
    )
    assert len(change.replaced) == 1
    assert [f"({s.kind} {s.med} {s.day} {s.slot})" for s in change.plan.steps] == [
        "(addPill Levodopa 5 3)"
    ]


def test_set_preference_unknown_med():
    session = golden_session()
    with pytest.raises(UnknownMedication):
        session.set_preference("(prefers user (medicationBeforeActivityBy Nothing 1))")


def test_utterance_event_logged():
    session = golden_session()
    session.act(Utterance("hello"))
    ticks = [tick for tick, _ in session.state.events]
    assert ticks == [0]


# --- snapshots ---------------------------------------------------------------

def test_state_json_round_trip(golden_state):
    data = state_to_json(golden_state)
    assert state_from_json(data) == golden_state
    assert json.dumps(state_to_json(state_from_json(data))) == json.dumps(data)


def test_snapshot_round_trip(tmp_path):
    session = golden_session()
    session.act(Hesitate(6))
    session.act(Hesitate(6))
    session.why("Why?")
    session.save(tmp_path)
    restored = EngineSession.restore(tmp_path, session.id)
    assert json.dumps(restored.to_snapshot()) == json.dumps(session.to_snapshot())
    # restored context still answers bare why identically
    assert restored.why("Why?").text == session.why("Why?").text


def test_restore_unknown_id(tmp_path):
    with pytest.raises(FileNotFoundError):
        EngineSession.restore(tmp_path, "nope")


def test_corrupt_snapshot(tmp_path):
    (tmp_path / "bad.json").write_text("{}", encoding="utf-8")
    with pytest.raises(CorruptSnapshot):
        EngineSession.restore(tmp_path, "bad")


def test_replayed_session_trace_identical(tmp_path):
    first = golden_session()
    first.act(Hesitate(6))
    first.act(Hesitate(6))
    explanation = first.why("Why?")
    first.save(tmp_path)
    replayed = EngineSession.restore(tmp_path, first.id)
    again = replayed.why("Why?")
    assert again.trace.trace_lines() == explanation.trace.trace_lines()
