"""Render a scenario as a sorting-grid figure plus delimited files.

``write_report`` draws the 7x4 grid with the placed pills, marks cells
the goal still wants (hollow) and pills that are extra or at the wrong
time (flagged), and writes the current plan and diff as CSV next to the
figure.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

from .planner import plan_for
from .scenario import (
    DAY_NAMES,
    SLOT_NAMES,
    TaskState,
    diff_grid,
    goal_placements,
    load_scenario,
)

__all__ = ["render_grid_png", "write_plan_csv", "write_diff_csv", "write_report"]


def render_grid_png(state: TaskState, path: str | Path) -> Path:
    path = Path(path)
    diff = diff_grid(state)
    goal = goal_placements(state)
    wrong = {(med, day, slot) for med, day, slot in diff.extra}
    wrong |= {(med, src[0], src[1]) for med, src, _ in diff.moves}
    missing = {(med, day, slot) for med, day, slot in diff.missing}
    missing |= {(med, dst[0], dst[1]) for med, _, dst in diff.moves}

    fig, ax = plt.subplots(figsize=(10, 4))
    for day in range(7):
        for slot in range(4):
            ax.add_patch(
                Rectangle((day, 3 - slot), 1, 1, fill=False, edgecolor="0.6", lw=0.8)
            )
    for day, slot, med, count in state.grid.cells():
        label = med if count == 1 else f"{med} x{count}"
        flagged = (med, day, slot) in wrong
        ax.text(
            day + 0.5,
            3 - slot + 0.62,
            label,
            ha="center",
            va="center",
            fontsize=8,
            color="firebrick" if flagged else "black",
            fontweight="bold" if flagged else "normal",
        )
    for (day, slot), meds in sorted(goal.items()):
        for med in sorted(meds):
            if (med, day, slot) in missing:
                ax.text(
                    day + 0.5,
                    3 - slot + 0.28,
                    f"({med})",
                    ha="center",
                    va="center",
                    fontsize=8,
                    color="0.5",
                    style="italic",
                )
    ax.set_xlim(0, 7)
    ax.set_ylim(0, 4)
    ax.set_xticks([d + 0.5 for d in range(7)])
    ax.set_xticklabels(DAY_NAMES, fontsize=8)
    ax.set_yticks([3 - s + 0.5 for s in range(4)])
    ax.set_yticklabels(SLOT_NAMES, fontsize=8)
    ax.tick_params(length=0)
    for spine in ax.spines.values():
        spine.set_visible(False)
    ax.set_title(
        f"{state.id}: sorting grid"
        f" (flagged pills in red, still-needed pills in parentheses)",
        fontsize=10,
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def write_plan_csv(state: TaskState, path: str | Path) -> Path:
    path = Path(path)
    plan = plan_for(state)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "kind", "med", "day", "slot"])
        for index, op in enumerate(plan.steps, start=1):
            writer.writerow([index, op.kind, op.med, op.day, op.slot])
    return path


def write_diff_csv(state: TaskState, path: str | Path) -> Path:
    path = Path(path)
    diff = diff_grid(state)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["category", "med", "day", "slot", "to_day", "to_slot"])
        for med, day, slot in diff.missing:
            writer.writerow(["missing", med, day, slot, "", ""])
        for med, day, slot in diff.extra:
            writer.writerow(["extra", med, day, slot, "", ""])
        for med, (day, slot), (to_day, to_slot) in diff.moves:
            writer.writerow(["move", med, day, slot, to_day, to_slot])
    return path


def write_report(scenario_path: str, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    state = load_scenario(scenario_path)
    return [
        render_grid_png(state, out / f"{state.id}_grid.png"),
        write_plan_csv(state, out / f"{state.id}_plan.csv"),
        write_diff_csv(state, out / f"{state.id}_diff.csv"),
    ]
