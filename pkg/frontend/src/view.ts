import type { AppState } from "./state.js";
import { currentCase, pageCount } from "./state.js";
import type { CaseView, Decision } from "./types.js";

export interface ViewHandlers {
  onDecision: (decision: Decision) => void;
  onMove: (delta: number) => void;
  onToggleGold: () => void;
  onToggleThink: () => void;
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function labelText(caseView: CaseView): string {
  const label = caseView.label;
  if (!label) return "unlabeled";
  if (label.decision === "gold_label") return `labeled: ${label.gold_label}`;
  return label.decision === "no_definitive" ? "excluded: no definitive answer" : "excluded: multiple labels";
}

function renderStats(state: AppState, root: HTMLElement): void {
  const stats = state.stats;
  const bar = el("div", "stats");
  if (!stats) {
    bar.textContent = "stats: loading";
  } else {
    // displayed numbers come straight from the server, no recomputation
    const pct = (x: number) => `${(x * 100).toFixed(1)}%`;
    bar.append(
      el("span", "stat", `labeled ${stats.labeled}/${stats.total_cases}`),
      el("span", "stat", `excluded ${stats.excluded}`),
      el("span", "stat stat-rule", `rule agreement ${pct(stats.rule_agreement)}`),
      el("span", "stat stat-regen", `regen agreement ${pct(stats.regen_agreement)}`),
    );
  }
  root.append(bar);
}

function renderAnswers(caseView: CaseView, root: HTMLElement): void {
  // identical prominence for the two candidates: same component, same styling
  const row = el("div", "answers");
  const candidates = [
    { tag: `rule (${caseView.rule_method})`, value: caseView.rule_answer },
    { tag: "regeneration", value: caseView.regen_answer },
  ];
  for (const { tag, value } of candidates) {
    const box = el("div", "answer-box");
    box.append(el("div", "answer-tag", tag), el("div", "answer-value", value ?? "N/A"));
    row.append(box);
  }
  root.append(row);
}

function renderResponse(state: AppState, caseView: CaseView, root: HTMLElement, handlers: ViewHandlers): void {
  const section = el("section", "response");
  const think = el("details", "think") as HTMLDetailsElement;
  think.open = state.thinkOpen;
  think.addEventListener("toggle", () => {
    if (think.open !== state.thinkOpen) handlers.onToggleThink();
  });
  const summary = el(
    "summary",
    "think-summary",
    caseView.thinking_complete ? "think segment" : "think segment (never closed)",
  );
  think.append(summary, el("pre", "think-text", caseView.think_text));
  section.append(think);
  section.append(el("pre", "post-think", caseView.post_think_text || "(no text after think)"));
  root.append(section);
}

function renderLabelControls(caseView: CaseView, root: HTMLElement, handlers: ViewHandlers): void {
  const controls = el("div", "controls");
  for (const label of caseView.label_set) {
    const button = el("button", "label-btn", label) as HTMLButtonElement;
    if (caseView.label?.gold_label === label) button.classList.add("active");
    button.addEventListener("click", () =>
      handlers.onDecision({ kind: "gold_label", label }),
    );
    controls.append(button);
  }
  const noDef = el("button", "label-btn excl", "no definitive (0)") as HTMLButtonElement;
  noDef.addEventListener("click", () => handlers.onDecision({ kind: "no_definitive" }));
  const multi = el("button", "label-btn excl", "multiple (M)") as HTMLButtonElement;
  multi.addEventListener("click", () => handlers.onDecision({ kind: "multiple_labels" }));
  controls.append(noDef, multi);
  root.append(controls);
}

export function render(state: AppState, root: HTMLElement, handlers: ViewHandlers): void {
  root.replaceChildren();
  renderStats(state, root);

  const caseView = currentCase(state);
  if (caseView === null) {
    root.append(el("p", "empty", "No disagreement cases to review."));
    return;
  }

  const header = el("div", "case-header");
  const position = state.offset + state.index + 1;
  header.append(
    el("span", "case-id", caseView.case_id),
    el(
      "span",
      "progress",
      `case ${position} of ${state.total} (page ${Math.floor(state.offset / 50) + 1}/${pageCount(state.total)})`,
    ),
    el("span", "status", labelText(caseView)),
  );
  root.append(header);

  const question = el("section", "question");
  question.append(el("h2", "question-text", caseView.question));
  if (caseView.choices.length > 0) {
    const list = el("ul", "choices");
    for (const choice of caseView.choices) {
      list.append(el("li", "choice", `(${choice.label}) ${choice.text}`));
    }
    question.append(list);
  }
  root.append(question);

  renderResponse(state, caseView, root, handlers);
  renderAnswers(caseView, root);
  renderLabelControls(caseView, root, handlers);

  const goldRow = el("div", "gold-row");
  const goldBtn = el("button", "gold-btn", state.revealGold ? "hide benchmark gold (G)" : "reveal benchmark gold (G)");
  goldBtn.addEventListener("click", handlers.onToggleGold);
  goldRow.append(goldBtn);
  if (state.revealGold) {
    goldRow.append(el("span", "gold-value", `benchmark gold: ${caseView.gold}`));
  }
  root.append(goldRow);

  const nav = el("div", "nav");
  const prev = el("button", "nav-btn", "prev (P)");
  prev.addEventListener("click", () => handlers.onMove(-1));
  const next = el("button", "nav-btn", "next (N)");
  next.addEventListener("click", () => handlers.onMove(1));
  nav.append(prev, next);
  root.append(nav);

  if (state.toast) {
    root.append(el("div", "toast", state.toast));
  }
}
