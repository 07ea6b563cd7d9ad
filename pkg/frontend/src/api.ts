// Typed client for the sortaid session service.  The UI renders strictly
// from these response shapes; no engine logic lives client-side.

export interface MedicationJson {
  name: string;
  max_per_day: number;
  constraint: { kind: string; slot?: number };
  weekly_supply: number;
}

export interface ActivityJson {
  name: string;
  day: number;
  clock: number;
  display: string;
}

export interface StateJson {
  id: string;
  grid: [number, number, string, number][];
  medications: MedicationJson[];
  calendar: ActivityJson[];
  preferences: string[];
  slot_boundaries: number[];
  events: [number, Record<string, unknown>][];
}

export interface DiffJson {
  missing: [string, number, number][];
  extra: [string, number, number][];
  moves: [string, [number, number], [number, number]][];
  empty: boolean;
  step_count: number;
}

export interface OperatorJson {
  kind: string;
  med: string;
  day: number;
  slot: number;
}

export interface AssistanceJson {
  level: number;
  operator: OperatorJson | null;
  utterance: string;
}

export interface PlanJson {
  state_id: string;
  preference_context: [string, number][];
  steps: OperatorJson[];
  paper_form: string;
}

export interface AlternativeJson {
  context: [string, number][];
  plan?: PlanJson;
  paper_form?: string;
  error?: { code: string; message: string };
}

export interface PlanResponse {
  plan: PlanJson;
  paper_form: string;
  alternatives: AlternativeJson[];
}

export interface TraceEntryJson {
  triple: string;
  source: string;
}

export interface TreeNodeJson {
  term: string;
  source: string | null;
  rule_id: string | null;
  children: TreeNodeJson[];
}

export interface ExplanationJson {
  query: string;
  justification: string[];
  chain: string[];
  text: string;
  trace: TraceEntryJson[];
  trace_lines: string[];
  tree: TreeNodeJson;
}

export interface WhyResponse {
  result: "explanation" | "no_explanation";
  explanation?: ExplanationJson;
}

export interface StateResponse {
  id: string;
  state: StateJson;
  diff: DiffJson | null;
  need: number;
  last_assistance: AssistanceJson | null;
}

export interface ActionResponse {
  state: StateJson;
  diff: DiffJson | null;
  need: number;
  assistance: AssistanceJson | null;
}

export interface HintResponse {
  need: number;
  assistance: AssistanceJson | null;
}

export interface PreferenceResponse {
  preference: string;
  replaced: string[];
  plan: PlanJson;
  paper_form: string;
}

export type ActionJson =
  | { type: "place"; med: string; day: number; slot: number }
  | { type: "remove"; med: string; day: number; slot: number }
  | { type: "utterance"; text: string }
  | { type: "hesitate"; seconds: number }
  | { type: "preference"; pref: string };

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const error = body?.error ?? {};
    throw new ApiError(
      error.code ?? `HTTP_${response.status}`,
      error.message ?? response.statusText,
      response.status,
    );
  }
  return body as T;
}

export class SortAidClient {
  constructor(public readonly baseUrl: string) {}

  createSession(scenarioName: string, id?: string): Promise<{ id: string; state: StateJson }> {
    return request(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: JSON.stringify({ scenario_name: scenarioName, id }),
    });
  }

  getState(sessionId: string): Promise<StateResponse> {
    return request(`${this.baseUrl}/sessions/${sessionId}/state`);
  }

  postAction(sessionId: string, action: ActionJson): Promise<ActionResponse> {
    return request(`${this.baseUrl}/sessions/${sessionId}/actions`, {
      method: "POST",
      body: JSON.stringify({ action }),
    });
  }

  getHint(sessionId: string): Promise<HintResponse> {
    return request(`${this.baseUrl}/sessions/${sessionId}/hint`);
  }

  getPlan(sessionId: string, counterfactuals: number[] = []): Promise<PlanResponse> {
    const query = counterfactuals.length
      ? `?counterfactuals=${counterfactuals.join(",")}`
      : "";
    return request(`${this.baseUrl}/sessions/${sessionId}/plan${query}`);
  }

  postWhy(sessionId: string, question = "Why?"): Promise<WhyResponse> {
    return request(`${this.baseUrl}/sessions/${sessionId}/why`, {
      method: "POST",
      body: JSON.stringify({ question }),
    });
  }

  postPreference(sessionId: string, pref: string): Promise<PreferenceResponse> {
    return request(`${this.baseUrl}/sessions/${sessionId}/preferences`, {
      method: "POST",
      body: JSON.stringify({ pref }),
    });
  }
}
