export interface Choice {
  label: string;
  text: string;
}

export interface CaseLabel {
  decision: "gold_label" | "no_definitive" | "multiple_labels";
  gold_label: string | null;
  annotator: string | null;
}

export interface CaseView {
  case_id: string;
  question: string;
  choices: Choice[];
  label_set: string[];
  response_text: string;
  think_text: string;
  post_think_text: string;
  thinking_complete: boolean;
  rule_method: string;
  rule_answer: string | null;
  regen_answer: string | null;
  gold: string;
  label: CaseLabel | null;
}

export interface CasePage {
  total: number;
  labeled: number;
  offset: number;
  cases: CaseView[];
}

export interface Stats {
  total_cases: number;
  labeled: number;
  excluded: number;
  rule_agreement: number;
  regen_agreement: number;
}

/** What the annotator decided for one case. */
export type Decision =
  | { kind: "gold_label"; label: string }
  | { kind: "no_definitive" }
  | { kind: "multiple_labels" };

export const PAGE_SIZE = 50;
