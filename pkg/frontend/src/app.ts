import { ReviewApi } from "./api.js";
import { Controller } from "./controller.js";
import { actionForKey, isTypingTarget } from "./keyboard.js";
import { currentCase, initialState, Store, toggleGold, toggleThink } from "./state.js";
import { render, ViewHandlers } from "./view.js";

const STATS_POLL_MS = 2500;

export function annotatorFromQuery(search: string): string {
  const annotator = new URLSearchParams(search).get("annotator");
  return annotator && annotator.trim() ? annotator.trim() : "anonymous";
}

export function start(root: HTMLElement): void {
  const store = new Store(initialState(annotatorFromQuery(window.location.search)));
  const api = new ReviewApi("");
  const controller = new Controller(store, api);

  const handlers: ViewHandlers = {
    onDecision: (decision) => void controller.submit(decision),
    onMove: (delta) => void controller.move(delta),
    onToggleGold: () => store.update(toggleGold),
    onToggleThink: () => store.update(toggleThink),
  };

  store.subscribe((state) => render(state, root, handlers));

  window.addEventListener("keydown", (event) => {
    if (isTypingTarget(event.target)) return;
    const caseView = currentCase(store.state);
    const action = actionForKey(event.key, caseView?.label_set ?? [], {
      ctrl: event.ctrlKey,
      meta: event.metaKey,
      alt: event.altKey,
    });
    if (!action) return;
    event.preventDefault();
    if (action.kind === "decision") handlers.onDecision(action.decision);
    else if (action.kind === "next") handlers.onMove(1);
    else if (action.kind === "prev") handlers.onMove(-1);
    else if (action.kind === "toggle_gold") handlers.onToggleGold();
    else if (action.kind === "toggle_think") handlers.onToggleThink();
  });

  void controller.loadPage(0);
  void controller.refreshStats();
  window.setInterval(() => void controller.refreshStats(), STATS_POLL_MS);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start(document.getElementById("app") as HTMLElement);
}
