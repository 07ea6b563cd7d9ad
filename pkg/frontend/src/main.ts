// Bootstrap: read config from the URL, start (or restore) the session,
// and keep its id in localStorage so a reload reproduces the same view.

import { SortAidClient } from "./api.js";
import { App } from "./app.js";

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "http://127.0.0.1:8000";
const scenario = params.get("scenario") ?? "state8";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app root element");
}

const client = new SortAidClient(apiBase);
const storageKey = `sortaid-session-${scenario}`;
const remembered = window.localStorage.getItem(storageKey) ?? undefined;

App.start(client, document, root, scenario, remembered)
  .then((app) => {
    window.localStorage.setItem(storageKey, app.state.sessionId);
  })
  .catch((error) => {
    root.textContent = `Could not reach the sortaid service at ${apiBase}: ${error}`;
  });
