// DOM rendering.  Every panel is rebuilt from the ViewState; handlers
// are injected so the smoke tests can render without wiring a service.

import type { AlternativeJson, TreeNodeJson } from "./api.js";
import {
  PROVENANCE_COLORS,
  ViewState,
  cellContents,
  inventory,
  sourceClass,
  whyAvailable,
} from "./state.js";

export const DAY_NAMES = [
  "Sunday",
  "Monday",
  "Tuesday",
  "Wednesday",
  "Thursday",
  "Friday",
  "Saturday",
];
export const SLOT_NAMES = ["morning", "noon", "evening", "bedtime"];

export interface Handlers {
  onCellClick(day: number, slot: number): void;
  onChipClick(med: string, day: number, slot: number): void;
  onSelectMed(med: string): void;
  onHint(): void;
  onWhy(): void;
  onHesitate(): void;
  onPreference(pref: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderBoard(doc: Document, view: ViewState, handlers: Handlers): HTMLElement {
  const board = el(doc, "div", "board");
  board.dataset.testid = "board";
  if (!view.state) return board;

  const table = el(doc, "table", "grid");
  const header = el(doc, "tr");
  header.appendChild(el(doc, "th", "corner", ""));
  for (const day of DAY_NAMES) {
    header.appendChild(el(doc, "th", "day-name", day));
  }
  table.appendChild(header);

  for (let slot = 0; slot < 4; slot++) {
    const row = el(doc, "tr");
    row.appendChild(el(doc, "th", "slot-name", SLOT_NAMES[slot]));
    for (let day = 0; day < 7; day++) {
      const cell = el(doc, "td", "cell");
      cell.dataset.testid = `cell-${day}-${slot}`;
      for (const [med, count] of cellContents(view.state, day, slot)) {
        for (let i = 0; i < count; i++) {
          const chip = el(doc, "span", `chip chip-${med}`, med);
          chip.addEventListener("click", (event) => {
            event.stopPropagation();
            handlers.onChipClick(med, day, slot);
          });
          cell.appendChild(chip);
        }
      }
      cell.addEventListener("click", () => handlers.onCellClick(day, slot));
      row.appendChild(cell);
    }
    table.appendChild(row);
  }
  board.appendChild(table);
  return board;
}

export function renderInventory(doc: Document, view: ViewState, handlers: Handlers): HTMLElement {
  const panel = el(doc, "div", "inventory");
  panel.dataset.testid = "inventory";
  if (!view.state) return panel;
  for (const [med, count] of Object.entries(inventory(view.state))) {
    const button = el(doc, "button", "med-select", `${med} (${count} left)`);
    button.dataset.med = med;
    if (view.selectedMed === med) button.classList.add("selected");
    button.addEventListener("click", () => handlers.onSelectMed(med));
    panel.appendChild(button);
  }
  return panel;
}

export function renderNeedGauge(doc: Document, view: ViewState): HTMLElement {
  const gauge = el(doc, "div", "need-gauge");
  gauge.dataset.testid = "need-gauge";
  const fill = el(doc, "div", "need-fill");
  fill.style.width = `${Math.round(view.need * 100)}%`;
  gauge.appendChild(fill);
  gauge.appendChild(el(doc, "span", "need-label", `need ${view.need.toFixed(2)}`));
  return gauge;
}

export function renderTranscript(doc: Document, view: ViewState, handlers: Handlers): HTMLElement {
  const panel = el(doc, "div", "transcript");
  panel.dataset.testid = "transcript";
  for (const turn of view.transcript) {
    const line = el(doc, "div", `turn turn-${turn.speaker}`);
    const label = turn.speaker === "robot" ? "Robot" : "You";
    line.appendChild(el(doc, "span", "speaker", `${label}: `));
    line.appendChild(el(doc, "span", "text", turn.text));
    panel.appendChild(line);
  }
  const controls = el(doc, "div", "controls");
  const hint = el(doc, "button", "hint-button", "Ask for a hint");
  hint.addEventListener("click", () => handlers.onHint());
  controls.appendChild(hint);

  const why = el(doc, "button", "why-button", "Why?");
  why.dataset.testid = "why-button";
  why.disabled = !whyAvailable(view);
  why.addEventListener("click", () => handlers.onWhy());
  controls.appendChild(why);

  const hesitate = el(doc, "button", "hesitate-button", "Hesitate (6s)");
  hesitate.addEventListener("click", () => handlers.onHesitate());
  controls.appendChild(hesitate);

  panel.appendChild(controls);
  return panel;
}

function renderAlternative(doc: Document, entry: AlternativeJson): HTMLElement {
  if (entry.error) {
    const label = entry.context.map(([name, value]) => `${name}=${value}`).join(", ");
    return el(
      doc,
      "div",
      "alternative alternative-error",
      `${label}: ${entry.error.code}`,
    );
  }
  return el(doc, "div", "alternative", entry.paper_form ?? "");
}

export function renderPlanPanel(doc: Document, view: ViewState): HTMLElement {
  const panel = el(doc, "div", "plan-panel");
  panel.dataset.testid = "plan-panel";
  if (!view.plan) return panel;
  panel.appendChild(el(doc, "div", "paper-form", view.plan.paper_form));
  const list = el(doc, "ol", "plan-steps");
  for (const step of view.plan.plan.steps) {
    const wording =
      step.kind === "addPill"
        ? `add ${step.med} to ${DAY_NAMES[step.day]} ${SLOT_NAMES[step.slot]}`
        : `remove ${step.med} from ${DAY_NAMES[step.day]} ${SLOT_NAMES[step.slot]}`;
    list.appendChild(el(doc, "li", "plan-step", wording));
  }
  panel.appendChild(list);
  for (const entry of view.plan.alternatives) {
    panel.appendChild(renderAlternative(doc, entry));
  }
  return panel;
}

function renderTreeNode(doc: Document, node: TreeNodeJson): HTMLElement {
  const item = el(doc, "li", "tree-node");
  const label = el(
    doc,
    "span",
    node.source ? `tree-term ${sourceClass(node.source)}` : "tree-term tree-goal",
    node.term,
  );
  item.appendChild(label);
  if (node.rule_id) {
    item.appendChild(el(doc, "span", "rule-id", ` [${node.rule_id}]`));
  }
  if (node.children.length) {
    const children = el(doc, "ul", "tree-children");
    for (const child of node.children) {
      children.appendChild(renderTreeNode(doc, child));
    }
    item.appendChild(children);
  }
  return item;
}

export function renderExplanationPanel(doc: Document, view: ViewState): HTMLElement {
  const panel = el(doc, "div", "explanation-panel");
  panel.dataset.testid = "explanation-panel";

  const legend = el(doc, "div", "legend");
  legend.dataset.testid = "legend";
  for (const [source, cls] of Object.entries(PROVENANCE_COLORS)) {
    legend.appendChild(el(doc, "span", `legend-entry ${cls}`, source));
  }
  panel.appendChild(legend);

  if (!view.explanation) return panel;
  const explanation = view.explanation;

  panel.appendChild(el(doc, "div", "why-text", explanation.text));
  panel.appendChild(
    el(doc, "div", "justification", `justification: ${explanation.justification.join(" ")}`),
  );
  panel.appendChild(el(doc, "div", "chain", `chain: ${explanation.chain.join(" ")}`));

  const tree = el(doc, "ul", "goal-tree");
  tree.dataset.testid = "goal-tree";
  tree.appendChild(renderTreeNode(doc, explanation.tree));
  panel.appendChild(tree);

  const trace = el(doc, "div", "trace");
  trace.dataset.testid = "trace";
  for (const entry of explanation.trace) {
    const line = el(doc, "div", `trace-line ${sourceClass(entry.source)}`);
    line.appendChild(el(doc, "span", "triple", entry.triple));
    line.appendChild(el(doc, "span", "source", ` ${entry.source}`));
    trace.appendChild(line);
  }
  panel.appendChild(trace);
  return panel;
}

export function renderPreferenceEditor(
  doc: Document,
  view: ViewState,
  handlers: Handlers,
): HTMLElement {
  const panel = el(doc, "div", "pref-editor");
  panel.dataset.testid = "pref-editor";
  if (!view.state) return panel;

  if (view.banner) {
    const banner = el(doc, "div", "banner warning", view.banner);
    banner.dataset.testid = "banner";
    panel.appendChild(banner);
  }

  const current = el(doc, "ul", "pref-list");
  for (const pref of view.state.preferences) {
    current.appendChild(el(doc, "li", "pref", pref));
  }
  panel.appendChild(current);

  for (const med of view.state.medications) {
    if (med.constraint.kind !== "beforeActivity") continue;
    const row = el(doc, "div", "pref-row");
    row.appendChild(el(doc, "label", "pref-label", `${med.name} slots before activity:`));
    const input = el(doc, "input", "distance-input") as HTMLInputElement;
    input.type = "number";
    input.min = "0";
    input.max = "3";
    input.value = "0";
    input.dataset.testid = `distance-${med.name}`;
    const apply = el(doc, "button", "apply-pref", "Apply");
    apply.dataset.testid = `apply-${med.name}`;
    apply.addEventListener("click", () =>
      handlers.onPreference(
        `(prefers user (medicationBeforeActivityBy ${med.name} ${input.value}))`,
      ),
    );
    row.appendChild(input);
    row.appendChild(apply);
    panel.appendChild(row);
  }
  return panel;
}

export function renderApp(doc: Document, root: HTMLElement, view: ViewState, handlers: Handlers): void {
  root.replaceChildren();
  const left = el(doc, "div", "column column-left");
  left.appendChild(renderInventory(doc, view, handlers));
  left.appendChild(renderBoard(doc, view, handlers));
  left.appendChild(renderNeedGauge(doc, view));
  left.appendChild(renderPreferenceEditor(doc, view, handlers));

  const right = el(doc, "div", "column column-right");
  right.appendChild(renderTranscript(doc, view, handlers));
  right.appendChild(renderPlanPanel(doc, view));
  right.appendChild(renderExplanationPanel(doc, view));

  root.appendChild(left);
  root.appendChild(right);
}
