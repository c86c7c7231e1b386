import { ApiError, ReviewApi } from "./api.js";
import {
  applyLabel,
  casesLoaded,
  currentCase,
  decisionAllowed,
  labelFromDecision,
  moveSelection,
  statsLoaded,
  Store,
  withToast,
} from "./state.js";
import type { Decision } from "./types.js";
import { PAGE_SIZE } from "./types.js";

/** Orchestrates API calls and state transitions; the DOM layer only renders. */
export class Controller {
  constructor(
    private store: Store,
    private api: ReviewApi,
  ) {}

  async loadPage(offset: number = this.store.state.offset): Promise<void> {
    const page = await this.api.listCases(offset, PAGE_SIZE);
    this.store.update((s) => casesLoaded(s, page));
  }

  async refreshStats(): Promise<void> {
    const stats = await this.api.getStats();
    this.store.update((s) => statsLoaded(s, stats));
  }

  async move(delta: number): Promise<void> {
    const { state, fetchOffset } = moveSelection(this.store.state, delta);
    this.store.set(state);
    if (fetchOffset !== null) {
      await this.loadPage(fetchOffset);
    }
  }

  /**
   * Submit a decision for the current case: optimistic update, rollback
   * with a toast on rejection. Labels outside the case's label set never
   * reach the server.
   */
  async submit(decision: Decision): Promise<boolean> {
    const state = this.store.state;
    const caseView = currentCase(state);
    if (caseView === null) return false;
    if (!decisionAllowed(caseView, decision)) {
      this.store.update((s) =>
        withToast(s, `"${decision.kind === "gold_label" ? decision.label : decision.kind}" is not a valid label here`),
      );
      return false;
    }
    const previous = caseView.label;
    const optimistic = labelFromDecision(decision, state.annotator);
    this.store.update((s) => withToast(applyLabel(s, caseView.case_id, optimistic), null));
    try {
      const result = await this.api.submitLabel(caseView.case_id, decision, state.annotator);
      this.store.update((s) => applyLabel(s, caseView.case_id, result.case.label));
      await this.refreshStats();
      return true;
    } catch (error) {
      this.store.update((s) =>
        withToast(
          applyLabel(s, caseView.case_id, previous),
          error instanceof ApiError ? `rejected: ${error.message}` : "request failed",
        ),
      );
      return false;
    }
  }
}
