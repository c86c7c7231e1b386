import type { Decision } from "./types.js";

export type Action =
  | { kind: "decision"; decision: Decision }
  | { kind: "next" }
  | { kind: "prev" }
  | { kind: "toggle_gold" }
  | { kind: "toggle_think" }
  | null;

/**
 * Keyboard-only labeling path:
 *   A-J         label the current case
 *   0           no definitive answer
 *   M           multiple labels given
 *   ArrowRight / N   next case
 *   ArrowLeft / P    previous case
 *   G           reveal/hide benchmark gold
 *   T           expand/collapse think segment
 */
export function actionForKey(
  key: string,
  labelSet: string[],
  modifiers: { ctrl?: boolean; meta?: boolean; alt?: boolean } = {},
): Action {
  if (modifiers.ctrl || modifiers.meta || modifiers.alt) return null;
  const upper = key.length === 1 ? key.toUpperCase() : key;
  if (labelSet.includes(upper)) {
    return { kind: "decision", decision: { kind: "gold_label", label: upper } };
  }
  switch (upper) {
    case "0":
      return { kind: "decision", decision: { kind: "no_definitive" } };
    case "M":
      return { kind: "decision", decision: { kind: "multiple_labels" } };
    case "ArrowRight":
    case "N":
      return { kind: "next" };
    case "ArrowLeft":
    case "P":
      return { kind: "prev" };
    case "G":
      return { kind: "toggle_gold" };
    case "T":
      return { kind: "toggle_think" };
    default:
      return null;
  }
}

export function isTypingTarget(target: EventTarget | null): boolean {
  return (
    typeof HTMLInputElement !== "undefined" &&
    (target instanceof HTMLInputElement || target instanceof HTMLTextAreaElement)
  );
}
