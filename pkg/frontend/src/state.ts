// ViewState: a pure projection of the last service responses.  All the
// reducers here are plain functions so the smoke tests can drive them
// without a browser session.

import type {
  ActionResponse,
  AssistanceJson,
  DiffJson,
  ExplanationJson,
  PlanResponse,
  PreferenceResponse,
  StateJson,
  StateResponse,
} from "./api.js";

export interface Turn {
  speaker: "user" | "robot";
  text: string;
  level?: number; // assistance level for robot hint turns
}

export interface ViewState {
  sessionId: string;
  state: StateJson | null;
  diff: DiffJson | null;
  need: number;
  transcript: Turn[];
  plan: PlanResponse | null;
  explanation: ExplanationJson | null;
  lastAssistance: AssistanceJson | null;
  selectedMed: string | null;
  banner: string | null;
}

export const PROVENANCE_COLORS: Record<string, string> = {
  Given: "source-given",
  "Given preference": "source-given-preference",
  calendar: "source-calendar",
  "Given knowledge": "source-given-knowledge",
  "Rule fired": "source-rule-fired",
  ConceptNet: "source-conceptnet",
};

export function sourceClass(source: string): string {
  return PROVENANCE_COLORS[source] ?? "source-unknown";
}

export function initialView(sessionId: string): ViewState {
  return {
    sessionId,
    state: null,
    diff: null,
    need: 0,
    transcript: [],
    plan: null,
    explanation: null,
    lastAssistance: null,
    selectedMed: null,
    banner: null,
  };
}

function withAssistanceTurn(view: ViewState, assistance: AssistanceJson | null): ViewState {
  if (assistance === null) {
    return view;
  }
  const last = view.transcript[view.transcript.length - 1];
  if (last && last.speaker === "robot" && last.text === assistance.utterance) {
    return { ...view, lastAssistance: assistance };
  }
  return {
    ...view,
    lastAssistance: assistance,
    transcript: [
      ...view.transcript,
      { speaker: "robot", text: assistance.utterance, level: assistance.level },
    ],
  };
}

export function applyStateResponse(view: ViewState, response: StateResponse): ViewState {
  return {
    ...view,
    state: response.state,
    diff: response.diff,
    need: response.need,
    lastAssistance: response.last_assistance,
  };
}

export function applyActionResponse(view: ViewState, response: ActionResponse): ViewState {
  const next = {
    ...view,
    state: response.state,
    diff: response.diff,
    need: response.need,
    banner: null,
  };
  return withAssistanceTurn(next, response.assistance);
}

export function applyHint(view: ViewState, need: number, assistance: AssistanceJson | null): ViewState {
  const next = { ...view, need };
  if (assistance === null) {
    return {
      ...next,
      transcript: [
        ...next.transcript,
        { speaker: "robot", text: "You don't seem to need help right now." },
      ],
    };
  }
  return withAssistanceTurn(next, assistance);
}

export function applyPlan(view: ViewState, plan: PlanResponse): ViewState {
  return { ...view, plan };
}

export function applyExplanation(view: ViewState, explanation: ExplanationJson): ViewState {
  return {
    ...view,
    explanation,
    transcript: [...view.transcript, { speaker: "robot", text: explanation.text }],
  };
}

export function applyNoExplanation(view: ViewState): ViewState {
  return {
    ...view,
    transcript: [
      ...view.transcript,
      { speaker: "robot", text: "I don't have an explanation for that." },
    ],
  };
}

export function applyPreference(view: ViewState, response: PreferenceResponse): ViewState {
  return {
    ...view,
    banner: null,
    transcript: [
      ...view.transcript,
      { speaker: "robot", text: `Noted. I'll plan around ${response.preference}.` },
    ],
  };
}

export function applyBanner(view: ViewState, message: string): ViewState {
  return { ...view, banner: message };
}

export function addUserTurn(view: ViewState, text: string): ViewState {
  return { ...view, transcript: [...view.transcript, { speaker: "user", text }] };
}

// Pills still in the bottle: weekly supply minus what the grid holds.
export function inventory(state: StateJson): Record<string, number> {
  const placed: Record<string, number> = {};
  for (const [, , med, count] of state.grid) {
    placed[med] = (placed[med] ?? 0) + count;
  }
  const counts: Record<string, number> = {};
  for (const med of state.medications) {
    counts[med.name] = med.weekly_supply - (placed[med.name] ?? 0);
  }
  return counts;
}

export function cellContents(state: StateJson, day: number, slot: number): [string, number][] {
  return state.grid
    .filter(([d, s]) => d === day && s === slot)
    .map(([, , med, count]) => [med, count] as [string, number]);
}

// The why button is enabled once some robot turn carried an operator.
export function whyAvailable(view: ViewState): boolean {
  return view.lastAssistance !== null && view.lastAssistance.operator !== null;
}
