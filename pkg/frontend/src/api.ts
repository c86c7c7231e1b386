import type { CasePage, CaseView, Decision, Stats } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

/** Thin client for the review service; every view reads through this. */
export class ReviewApi {
  constructor(private baseUrl: string = "") {}

  listCases(offset = 0, limit = 50): Promise<CasePage> {
    return fetch(`${this.baseUrl}/api/cases?offset=${offset}&limit=${limit}`).then((r) =>
      asJson<CasePage>(r),
    );
  }

  getCase(caseId: string): Promise<CaseView> {
    return fetch(`${this.baseUrl}/api/cases/${caseId}`).then((r) => asJson<CaseView>(r));
  }

  submitLabel(
    caseId: string,
    decision: Decision,
    annotator: string,
  ): Promise<{ ok: boolean; case: CaseView }> {
    const body: Record<string, unknown> = { annotator };
    if (decision.kind === "gold_label") body.gold_label = decision.label;
    if (decision.kind === "no_definitive") body.no_definitive = true;
    if (decision.kind === "multiple_labels") body.multiple_labels = true;
    return fetch(`${this.baseUrl}/api/cases/${caseId}/label`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => asJson(r));
  }

  getStats(): Promise<Stats> {
    return fetch(`${this.baseUrl}/api/stats`).then((r) => asJson<Stats>(r));
  }
}
