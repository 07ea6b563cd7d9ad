// Wiring: user gestures -> service calls -> ViewState -> re-render.
// Requests are serialized client-side; after every action the app polls
// fresh state and the current plan.

import { ApiError, SortAidClient } from "./api.js";
import type { Handlers } from "./render.js";
import { renderApp } from "./render.js";
import {
  ViewState,
  addUserTurn,
  applyActionResponse,
  applyBanner,
  applyExplanation,
  applyHint,
  applyNoExplanation,
  applyPlan,
  applyPreference,
  applyStateResponse,
  initialView,
} from "./state.js";

export class App {
  private view: ViewState;
  private queue: Promise<void> = Promise.resolve();

  constructor(
    private readonly client: SortAidClient,
    private readonly doc: Document,
    private readonly root: HTMLElement,
    sessionId: string,
  ) {
    this.view = initialView(sessionId);
  }

  static async start(
    client: SortAidClient,
    doc: Document,
    root: HTMLElement,
    scenarioName = "state8",
    sessionId?: string,
  ): Promise<App> {
    // restore an existing session when one is named; otherwise create
    let id = sessionId;
    if (id) {
      try {
        await client.getState(id);
      } catch {
        id = undefined;
      }
    }
    if (!id) {
      const created = await client.createSession(scenarioName, sessionId);
      id = created.id;
    }
    const app = new App(client, doc, root, id);
    await app.refresh();
    return app;
  }

  get state(): ViewState {
    return this.view;
  }

  private update(view: ViewState): void {
    this.view = view;
    renderApp(this.doc, this.root, this.view, this.handlers());
  }

  private enqueue(work: () => Promise<void>): void {
    this.queue = this.queue.then(work).catch((error) => {
      const message =
        error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
      this.update(applyBanner(this.view, message));
    });
  }

  async refresh(): Promise<void> {
    const state = await this.client.getState(this.view.sessionId);
    let view = applyStateResponse(this.view, state);
    const plan = await this.client.getPlan(this.view.sessionId, [0]);
    view = applyPlan(view, plan);
    this.update(view);
  }

  private handlers(): Handlers {
    return {
      onSelectMed: (med) => {
        this.update({ ...this.view, selectedMed: med });
      },
      onCellClick: (day, slot) => {
        const med = this.view.selectedMed;
        if (!med) {
          this.update(applyBanner(this.view, "Pick a medication first."));
          return;
        }
        this.enqueue(async () => {
          const response = await this.client.postAction(this.view.sessionId, {
            type: "place",
            med,
            day,
            slot,
          });
          this.update(applyActionResponse(this.view, response));
          await this.refresh();
        });
      },
      onChipClick: (med, day, slot) => {
        this.enqueue(async () => {
          const response = await this.client.postAction(this.view.sessionId, {
            type: "remove",
            med,
            day,
            slot,
          });
          this.update(applyActionResponse(this.view, response));
          await this.refresh();
        });
      },
      onHesitate: () => {
        this.enqueue(async () => {
          const response = await this.client.postAction(this.view.sessionId, {
            type: "hesitate",
            seconds: 6,
          });
          this.update(applyActionResponse(this.view, response));
        });
      },
      onHint: () => {
        this.enqueue(async () => {
          const hint = await this.client.getHint(this.view.sessionId);
          this.update(applyHint(this.view, hint.need, hint.assistance));
        });
      },
      onWhy: () => {
        this.enqueue(async () => {
          this.update(addUserTurn(this.view, "Why?"));
          const response = await this.client.postWhy(this.view.sessionId);
          if (response.result === "explanation" && response.explanation) {
            this.update(applyExplanation(this.view, response.explanation));
          } else {
            this.update(applyNoExplanation(this.view));
          }
        });
      },
      onPreference: (pref) => {
        this.enqueue(async () => {
          this.update(addUserTurn(this.view, pref));
          const response = await this.client.postPreference(this.view.sessionId, pref);
          this.update(applyPreference(this.view, response));
          await this.refresh();
        });
      },
    };
  }
}
