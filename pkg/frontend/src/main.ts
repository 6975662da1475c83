// Entry point: create a session against the hosting service and wire the
// store, transport, and DOM together. One WebSocket per tab; UI updates are
// serialized through the store's subscription.

import { ApiError, SessionClient } from "./client";
import { RoundStore } from "./state";
import { findElements, render } from "./ui";

const baseUrl = import.meta.env?.VITE_SERVICE_URL ?? window.location.origin;

async function start(): Promise<void> {
  const el = findElements(document);
  const store = new RoundStore();
  const client = new SessionClient(baseUrl);
  store.subscribe(() => render(store, el));
  render(store, el);

  const created = await client.createSession({});
  const sessionId = created.session_id;
  const player = created.human_player;
  store.applyView(created.view);

  await client.connect(sessionId, (message) => store.apply(message), () => {
    // reconnect by re-reading the current view; the server is the source of
    // truth for whatever phase we are in now
    client.view(sessionId, player)
      .then((view) => store.applyView(view))
      .catch((err) => store.setError(String(err)));
  });

  el.grid.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>(".cell");
    if (!target?.dataset.cell) return;
    store.select(Number(target.dataset.cell));
  });

  el.submitButton.addEventListener("click", async () => {
    if (!store.canSubmit || store.selected === null) return;
    store.markSubmitting();
    try {
      await client.submitBaseline(sessionId, player, store.selected);
    } catch (err) {
      store.submitFailed(err instanceof ApiError ? err.message : String(err));
    }
  });

  el.advanceButton.addEventListener("click", async () => {
    if (!store.canAdvance) return;
    try {
      const out = await client.advance(sessionId, store.followSuggestion);
      if (out.result) store.apply({ type: "round_result", payload: out.result });
      if (out.summary) store.apply({ type: "summary", payload: out.summary });
      store.applyView(out.view);
    } catch (err) {
      store.setError(err instanceof ApiError ? err.message : String(err));
    }
  });

  el.followToggle.addEventListener("change", () => {
    store.toggleFollow(el.followToggle.checked);
  });
}

start().catch((err) => {
  const banner = document.querySelector("#error-banner");
  if (banner) {
    (banner as HTMLElement).hidden = false;
    banner.textContent = String(err);
  }
});
