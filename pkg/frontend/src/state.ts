import type { CaseLabel, CasePage, CaseView, Decision, Stats } from "./types.js";
import { PAGE_SIZE } from "./types.js";

export interface AppState {
  cases: CaseView[];
  total: number;
  offset: number;
  index: number; // position within the loaded page
  stats: Stats | null;
  annotator: string;
  revealGold: boolean;
  thinkOpen: boolean;
  toast: string | null;
}

export function initialState(annotator: string): AppState {
  return {
    cases: [],
    total: 0,
    offset: 0,
    index: 0,
    stats: null,
    annotator,
    revealGold: false,
    thinkOpen: false,
    toast: null,
  };
}

export function pageCount(total: number, pageSize: number = PAGE_SIZE): number {
  return Math.ceil(total / pageSize);
}

export function currentCase(state: AppState): CaseView | null {
  return state.cases[state.index] ?? null;
}

/** Valid decisions for one case: its label set plus the two exclusions. */
export function decisionAllowed(caseView: CaseView, decision: Decision): boolean {
  if (decision.kind !== "gold_label") return true;
  if (caseView.label_set.length === 0) return decision.label.trim().length > 0;
  return caseView.label_set.includes(decision.label);
}

export function labelFromDecision(decision: Decision, annotator: string): CaseLabel {
  return {
    decision: decision.kind,
    gold_label: decision.kind === "gold_label" ? decision.label : null,
    annotator,
  };
}

// -- transitions (pure: state in, state out) ---------------------------------

export function casesLoaded(state: AppState, page: CasePage): AppState {
  const index = Math.min(state.index, Math.max(page.cases.length - 1, 0));
  return { ...state, cases: page.cases, total: page.total, offset: page.offset, index };
}

export function statsLoaded(state: AppState, stats: Stats): AppState {
  return { ...state, stats };
}

/** Move selection; returns the offset of a page to fetch when crossing it. */
export function moveSelection(
  state: AppState,
  delta: number,
): { state: AppState; fetchOffset: number | null } {
  const position = state.offset + state.index + delta;
  if (position < 0 || position >= Math.max(state.total, state.cases.length)) {
    return { state, fetchOffset: null };
  }
  const within = state.index + delta;
  if (within >= 0 && within < state.cases.length) {
    return { state: { ...state, index: within, thinkOpen: false, revealGold: false }, fetchOffset: null };
  }
  const offset = Math.floor(position / PAGE_SIZE) * PAGE_SIZE;
  return {
    state: { ...state, offset, index: position - offset, thinkOpen: false, revealGold: false },
    fetchOffset: offset,
  };
}

export function applyLabel(state: AppState, caseId: string, label: CaseLabel | null): AppState {
  const cases = state.cases.map((c) => (c.case_id === caseId ? { ...c, label } : c));
  return { ...state, cases };
}

export function withToast(state: AppState, toast: string | null): AppState {
  return { ...state, toast };
}

export function toggleGold(state: AppState): AppState {
  return { ...state, revealGold: !state.revealGold };
}

export function toggleThink(state: AppState): AppState {
  return { ...state, thinkOpen: !state.thinkOpen };
}

/** Observable wrapper so the DOM layer re-renders after each transition. */
export class Store {
  private listeners: Array<(state: AppState) => void> = [];

  constructor(public state: AppState) {}

  subscribe(listener: (state: AppState) => void): void {
    this.listeners.push(listener);
  }

  set(next: AppState): void {
    this.state = next;
    for (const listener of this.listeners) listener(next);
  }

  update(fn: (state: AppState) => AppState): void {
    this.set(fn(this.state));
  }
}
