"""Judging answers against gold and aggregating run-level metrics."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .datasets import BenchmarkItem
from .normalize import canonical_label, normalize_answer, numeric_equal, quasi_exact
from .thinking import SegmentedResponse

OUTCOMES = ("correct", "incorrect", "invalid")

NOT_FOUND_BUCKET = "N/A"
OTHER_BUCKET = "other"


@dataclass(frozen=True)
class Verdict:
    outcome: str  # correct | incorrect | invalid
    method_source: str  # extraction method id or "regen"
    item_id: str

    @property
    def correct(self) -> bool:
        return self.outcome == "correct"


def judge(answer: Optional[str], item: BenchmarkItem, method_source: str = "rule") -> Verdict:
    """Judge one answer. None or empty means the answer was never found."""
    if answer is None or answer == "":
        return Verdict("invalid", method_source, item.id)
    outcome = "correct" if answers_match(answer, item.gold, item) else "incorrect"
    return Verdict(outcome, method_source, item.id)


def answers_match(answer: str, gold: str, item: BenchmarkItem) -> bool:
    kind = item.kind
    if kind == "option_label":
        return normalize_answer(answer, kind) == normalize_answer(gold, kind)
    if kind == "numeric":
        a = normalize_answer(answer, kind)
        b = normalize_answer(gold, kind)
        return a is not None and b is not None and numeric_equal(a, b)
    candidates = set(item.gold_aliases) | {gold}
    normalized = quasi_exact(answer)
    return any(normalized == quasi_exact(alias) for alias in candidates)


def answers_agree(a: Optional[str], b: Optional[str], item: BenchmarkItem) -> bool:
    """Whether two final answers are the same answer (None = no answer)."""
    if not a or not b:
        return bool(not a and not b)
    if item.kind == "numeric":
        na, nb = normalize_answer(a, "numeric"), normalize_answer(b, "numeric")
        return na is not None and nb is not None and numeric_equal(na, nb)
    if item.kind == "option_label":
        return normalize_answer(a, "option_label") == normalize_answer(b, "option_label")
    return quasi_exact(a) == quasi_exact(b)


def accuracy(verdicts: Sequence[Verdict]) -> float:
    """Fraction correct; invalid verdicts count against the denominator."""
    if not verdicts:
        raise ValueError("accuracy of an empty verdict list is undefined")
    return sum(v.correct for v in verdicts) / len(verdicts)


def answer_distribution(
    answers: Iterable[Optional[str]], label_set: Sequence[str]
) -> dict[str, int]:
    """Histogram over label set plus "N/A" (nothing found) and "other" buckets."""
    counts: Counter[str] = Counter()
    labels = set(label_set)
    for answer in answers:
        if answer is None or answer == "":
            counts[NOT_FOUND_BUCKET] += 1
            continue
        label = canonical_label(answer)
        if label is not None and label in labels:
            counts[label] += 1
        else:
            counts[OTHER_BUCKET] += 1
    ordered = {label: counts.get(label, 0) for label in label_set}
    ordered[NOT_FOUND_BUCKET] = counts.get(NOT_FOUND_BUCKET, 0)
    ordered[OTHER_BUCKET] = counts.get(OTHER_BUCKET, 0)
    return ordered


@dataclass(frozen=True)
class ConfusionCounts:
    both_correct: int
    rule_only_correct: int
    regen_only_correct: int
    neither_correct: int
    identical_answers: int
    disagreement_ids: tuple[str, ...]

    @property
    def total(self) -> int:
        return (
            self.both_correct
            + self.rule_only_correct
            + self.regen_only_correct
            + self.neither_correct
        )

    def to_record(self) -> dict:
        return {
            "rule_correct_regen_correct": self.both_correct,
            "rule_correct_regen_incorrect": self.rule_only_correct,
            "rule_incorrect_regen_correct": self.regen_only_correct,
            "rule_incorrect_regen_incorrect": self.neither_correct,
            "identical_answers": self.identical_answers,
            "disagreements": len(self.disagreement_ids),
        }


def method_confusion(
    rule: Mapping[str, tuple[Optional[str], Verdict]],
    regen: Mapping[str, tuple[Optional[str], Verdict]],
    items: Sequence[BenchmarkItem],
) -> ConfusionCounts:
    """2x2 correctness counts plus the list of answer disagreements.

    ``rule`` and ``regen`` map item id to (final answer, verdict) and must
    cover the same item set.
    """
    ids = {item.id for item in items}
    if set(rule) != ids or set(regen) != ids:
        raise ValueError("rule and regen records must cover the same item set")
    cells = Counter()
    identical = 0
    disagreements = []
    for item in items:
        rule_answer, rule_verdict = rule[item.id]
        regen_answer, regen_verdict = regen[item.id]
        cells[(rule_verdict.correct, regen_verdict.correct)] += 1
        if answers_agree(rule_answer, regen_answer, item):
            identical += 1
        else:
            disagreements.append(item.id)
    return ConfusionCounts(
        both_correct=cells[(True, True)],
        rule_only_correct=cells[(True, False)],
        regen_only_correct=cells[(False, True)],
        neither_correct=cells[(False, False)],
        identical_answers=identical,
        disagreement_ids=tuple(disagreements),
    )


@dataclass(frozen=True)
class IncompleteStats:
    fraction_incomplete: float
    outcome_percentages: dict[str, float]  # over the incomplete subset, sums to 100

    def to_record(self) -> dict:
        return {
            "fraction_incomplete": self.fraction_incomplete,
            "outcome_percentages": self.outcome_percentages,
        }


def incomplete_breakdown(
    responses: Mapping[str, SegmentedResponse],
    verdicts: Mapping[str, Verdict],
) -> IncompleteStats:
    """Share of never-closed thinking, and outcome percentages on that subset."""
    total = len(responses)
    incomplete_ids = [iid for iid, seg in responses.items() if not seg.thinking_complete]
    if total == 0 or not incomplete_ids:
        return IncompleteStats(0.0, {})
    outcome_counts = Counter(verdicts[iid].outcome for iid in incomplete_ids)
    n = len(incomplete_ids)
    percentages = {
        outcome: 100.0 * outcome_counts.get(outcome, 0) / n for outcome in OUTCOMES
    }
    return IncompleteStats(fraction_incomplete=n / total, outcome_percentages=percentages)
