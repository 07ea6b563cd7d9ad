"""Interactive REPL and scripted batch runner over the engine.

The CLI embeds the engine directly, no service needed.  Commands:

    place <med> <day> <slot>     remove <med> <day> <slot>
    hesitate <seconds>           say <text...>
    hint                         plan [counterfactual...]
    why [text...]                pref <s-expression>
    state                        trace
    quit

Batch scripts hold ``> command`` lines, each followed by its expected
output up to a blank line; ``run_batch`` exits 0 iff every block
matches.  REPL and batch share one executor, so their outputs are
identical for identical command sequences.
"""

from __future__ import annotations

import argparse
import difflib
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .errors import ScriptError, SortAidError
from .planner import alternative_paper_form, plan_paper_form
from .scenario import Hesitate, PlacePill, RemovePill, Utterance
from .session import EngineSession

__all__ = ["main", "run_repl", "run_batch", "execute_command", "parse_script"]

_COMMANDS = (
    "place",
    "remove",
    "hesitate",
    "say",
    "hint",
    "plan",
    "why",
    "pref",
    "state",
    "trace",
    "quit",
)

_USAGE = (
    "commands: place <med> <day> <slot> | remove <med> <day> <slot>"
    " | hesitate <s> | say <text> | hint | plan [counterfactual...]"
    " | why [text] | pref <s-expression> | state | trace | quit"
)


def resolve_scenario(name: str) -> Path:
    """Accept a filesystem path or the name of a bundled scenario."""
    path = Path(name)
    if path.exists():
        return path
    stem = name[:-4] if name.endswith(".scn") else name
    bundled = resources.files("sortaid").joinpath("data", f"{stem}.scn")
    with resources.as_file(bundled) as concrete:
        if concrete.exists():
            return concrete
    raise FileNotFoundError(f"no scenario file or bundled scenario named {name!r}")


def _assistance_lines(result) -> list[str]:
    if result.assistance is None:
        return []
    return [f"[L{result.assistance.level}] {result.assistance.utterance}"]


def execute_command(session: EngineSession, line: str) -> tuple[list[str], bool]:
    """Run one command; returns (output lines, keep_going)."""
    parts = line.split()
    if not parts:
        return [], True
    command, args = parts[0], parts[1:]
    try:
        if command == "quit":
            return [], False
        if command == "place" or command == "remove":
            if len(args) != 3:
                return [f"usage: {command} <med> <day> <slot>"], True
            med, day, slot = args[0], int(args[1]), int(args[2])
            action = (PlacePill if command == "place" else RemovePill)(med, day, slot)
            result = session.act(action)
            verb = "placed" if command == "place" else "removed"
            link = "at" if command == "place" else "from"
            lines = [f"{verb} {med} {link} ({day},{slot}); need {result.need:.2f}"]
            return lines + _assistance_lines(result), True
        if command == "hesitate":
            if len(args) != 1:
                return ["usage: hesitate <seconds>"], True
            result = session.act(Hesitate(float(args[0])))
            return [f"need {result.need:.2f}"] + _assistance_lines(result), True
        if command == "say":
            result = session.act(Utterance(" ".join(args)))
            return [f"need {result.need:.2f}"] + _assistance_lines(result), True
        if command == "hint":
            action = session.hint()
            if action is None:
                return [f"no assistance needed (need {session.need.level:.2f})"], True
            return [f"[L{action.level}] {action.utterance}"], True
        if command == "plan":
            counterfactuals = tuple(int(a) for a in args)
            plan, alternatives = session.plan(counterfactuals)
            lines = [plan_paper_form(plan)]
            for entry in alternatives.entries:
                if entry.plan is not None:
                    lines.append(alternative_paper_form(plan.state_id, entry))
                else:
                    distance = entry.context[0][1] if entry.context else "?"
                    lines.append(
                        f"counterfactual {distance}: {entry.error.code}: {entry.error}"
                    )
            return lines, True
        if command == "why":
            question = " ".join(args) if args else "Why?"
            explanation = session.why(question)
            if explanation is None:
                return ["no explanation found"], True
            lines = [
                "justification: "
                + " ".join(str(t) for t in explanation.justification),
                "chain: " + " ".join(str(t) for t in explanation.chain),
                explanation.text,
            ]
            return lines, True
        if command == "pref":
            change = session.set_preference(" ".join(args))
            return [
                f"preference set: {change.preference.term}",
                plan_paper_form(change.plan),
            ], True
        if command == "state":
            state = session.state
            diff = session._diff_or_none()
            lines = [
                f"state {state.id}; need {session.need.level:.2f};"
                f" order {state.sort_order()}"
            ]
            for pref in state.preferences:
                lines.append(f"  pref {pref.term}")
            for day, slot, med, count in state.grid.cells():
                lines.append(f"  ({day},{slot}) {med} x{count}")
            if diff is not None:
                lines.append(
                    f"diff: {len(diff.missing)} missing, {len(diff.extra)} extra,"
                    f" {len(diff.moves)} moves"
                )
            return lines, True
        if command == "trace":
            if session.last_explanation is None:
                return ["no explanation yet"], True
            return session.last_explanation.trace.trace_lines(), True
        return [f"unknown command: {command}", _USAGE], True
    except SortAidError as exc:
        return [f"error: {exc.code}: {exc}"], True
    except ValueError as exc:
        return [f"error: BAD_ARGUMENT: {exc}"], True


def _emit(lines: list[str], command: str, fmt: str, out) -> None:
    if fmt == "json":
        print(json.dumps({"command": command, "lines": lines}), file=out)
    else:
        for line in lines:
            print(line, file=out)


def run_repl(scenario_path: str, fmt: str = "text", stdin=None, stdout=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    session = EngineSession.from_scenario_path(str(resolve_scenario(scenario_path)))
    print(f"loaded {session.state.id}; {_USAGE}", file=stdout)
    for raw in stdin:
        line = raw.strip()
        if not line:
            continue
        lines, keep_going = execute_command(session, line)
        _emit(lines, line, fmt, stdout)
        if not keep_going:
            break
    return 0


@dataclass(frozen=True)
class ScriptEntry:
    command: str
    expected: tuple[str, ...]


def parse_script(text: str) -> list[ScriptEntry]:
    """Parse ``> command`` blocks; validates command names up front."""
    entries: list[ScriptEntry] = []
    command: Optional[str] = None
    expected: list[str] = []
    for lineno, raw in enumerate(text.splitlines() + [""], start=1):
        line = raw.rstrip("\n")
        if command is None and line.startswith("#"):
            continue
        if line.startswith("> "):
            if command is not None:
                entries.append(ScriptEntry(command, tuple(expected)))
            command, expected = line[2:].strip(), []
            name = command.split()[0] if command.split() else ""
            if name not in _COMMANDS:
                raise ScriptError(f"line {lineno}: unknown command {name!r}")
        elif not line.strip():
            if command is not None:
                entries.append(ScriptEntry(command, tuple(expected)))
                command, expected = None, []
        else:
            if command is None:
                raise ScriptError(f"line {lineno}: output outside a command block")
            expected.append(line)
    return entries


def run_batch(
    script_path: str, scenario_path: str, fmt: str = "text", stdout=None
) -> int:
    """Execute a script, diffing outputs against the expected blocks.

    Exit 0 on full match, 1 with a diff at the first mismatch, 2 when
    the script itself does not parse.
    """
    stdout = stdout if stdout is not None else sys.stdout
    try:
        entries = parse_script(Path(script_path).read_text(encoding="utf-8"))
    except (OSError, ScriptError) as exc:
        print(f"script error: {exc}", file=stdout)
        return 2
    session = EngineSession.from_scenario_path(str(resolve_scenario(scenario_path)))
    for entry in entries:
        lines, keep_going = execute_command(session, entry.command)
        if tuple(lines) != entry.expected:
            print(f"mismatch at command: {entry.command}", file=stdout)
            diff = difflib.unified_diff(
                list(entry.expected), lines, "expected", "actual", lineterm=""
            )
            for line in diff:
                print(line, file=stdout)
            return 1
        if fmt == "json":
            _emit(lines, entry.command, fmt, stdout)
        if not keep_going:
            break
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sortaid",
        description="Assistive planning engine for a medication-sorting task",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    repl = sub.add_parser("repl", help="interactive session")
    repl.add_argument("scenario", help="scenario file or bundled name (e.g. state8)")
    repl.add_argument("--format", choices=("text", "json"), default="text")

    batch = sub.add_parser("batch", help="run a golden script")
    batch.add_argument("script", help="script file")
    batch.add_argument("--scenario", required=True, help="scenario file or bundled name")
    batch.add_argument("--format", choices=("text", "json"), default="text")

    report = sub.add_parser("report", help="render grid figure and CSV files")
    report.add_argument("scenario", help="scenario file or bundled name")
    report.add_argument("--out", default="report", help="output directory")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--storage-dir", default=None)
    serve.add_argument("--scenario-dir", default=None)

    args = parser.parse_args(argv)

    if args.mode == "repl":
        return run_repl(args.scenario, fmt=args.format)
    if args.mode == "batch":
        return run_batch(args.script, args.scenario, fmt=args.format)
    if args.mode == "report":
        from .report import write_report

        paths = write_report(str(resolve_scenario(args.scenario)), args.out)
        for path in paths:
            print(path)
        return 0
    if args.mode == "serve":
        import uvicorn

        from .service import create_app

        app = create_app(scenario_dir=args.scenario_dir, storage_dir=args.storage_dir)
        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
