import { describe, expect, it, vi } from "vitest";

import { ApiError, ReviewApi } from "../src/api.js";
import { Controller } from "../src/controller.js";
import { casesLoaded, initialState, Store } from "../src/state.js";
import type { CasePage, CaseView, Stats } from "../src/types.js";

function makeCase(i: number): CaseView {
  return {
    case_id: `case/${i}`,
    question: `Q${i}?`,
    choices: [],
    label_set: ["A", "B", "C", "D"],
    response_text: "",
    think_text: "",
    post_think_text: "",
    thinking_complete: true,
    rule_method: "m",
    rule_answer: "A",
    regen_answer: "B",
    gold: "B",
    label: null,
  };
}

const STATS: Stats = {
  total_cases: 2,
  labeled: 1,
  excluded: 0,
  rule_agreement: 0.5,
  regen_agreement: 0.5,
};

function makeApi(overrides: Partial<ReviewApi> = {}): ReviewApi {
  const api = {
    listCases: vi.fn(async (offset = 0): Promise<CasePage> => ({
      total: 2,
      labeled: 0,
      offset,
      cases: [makeCase(0), makeCase(1)],
    })),
    getCase: vi.fn(),
    submitLabel: vi.fn(async (caseId: string) => ({
      ok: true,
      case: {
        ...makeCase(0),
        case_id: caseId,
        label: { decision: "gold_label", gold_label: "C", annotator: "a" },
      },
    })),
    getStats: vi.fn(async () => STATS),
    ...overrides,
  };
  return api as unknown as ReviewApi;
}

function makeStore(): Store {
  const store = new Store(initialState("a"));
  store.set(
    casesLoaded(store.state, { total: 2, labeled: 0, offset: 0, cases: [makeCase(0), makeCase(1)] }),
  );
  return store;
}

describe("controller.submit", () => {
  it("optimistically applies, then confirms from the server response", async () => {
    const api = makeApi();
    const store = makeStore();
    const controller = new Controller(store, api);
    const ok = await controller.submit({ kind: "gold_label", label: "C" });
    expect(ok).toBe(true);
    expect(store.state.cases[0].label?.gold_label).toBe("C");
    expect(api.submitLabel).toHaveBeenCalledWith("case/0", { kind: "gold_label", label: "C" }, "a");
    expect(api.getStats).toHaveBeenCalled();
    expect(store.state.stats).toEqual(STATS);
  });

  it("rolls back and shows a toast on server rejection", async () => {
    const api = makeApi({
      submitLabel: vi.fn(async () => {
        throw new ApiError(400, "label 'Z' outside case label set");
      }) as unknown as ReviewApi["submitLabel"],
    });
    const store = makeStore();
    const controller = new Controller(store, api);
    const ok = await controller.submit({ kind: "gold_label", label: "C" });
    expect(ok).toBe(false);
    expect(store.state.cases[0].label).toBeNull();
    expect(store.state.toast).toContain("rejected");
  });

  it("rejects out-of-set labels client side, before any request", async () => {
    const api = makeApi();
    const store = makeStore();
    const controller = new Controller(store, api);
    const ok = await controller.submit({ kind: "gold_label", label: "Z" });
    expect(ok).toBe(false);
    expect(api.submitLabel).not.toHaveBeenCalled();
    expect(store.state.toast).toContain("not a valid label");
  });

  it("move crossing a page boundary triggers a fetch", async () => {
    const api = makeApi();
    const store = makeStore();
    store.set({ ...store.state, total: 120, index: 1 });
    const controller = new Controller(store, api);
    await controller.move(49); // to absolute position 50
    expect(api.listCases).toHaveBeenCalledWith(50, 50);
  });
});
