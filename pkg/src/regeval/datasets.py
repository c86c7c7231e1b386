"""Benchmark loading: MMLU-style CSV and JSONL item files."""

from __future__ import annotations

import csv
import json
import string
from dataclasses import dataclass
from pathlib import Path

from .normalize import AnswerKind

TASKS = ("mmlu", "mmlu_pro", "gsm8k", "triviaqa")

KIND_FOR_TASK: dict[str, AnswerKind] = {
    "mmlu": "option_label",
    "mmlu_pro": "option_label",
    "gsm8k": "numeric",
    "triviaqa": "free_text",
}


class DatasetError(ValueError):
    """Raised for unknown tasks, schema mismatches, and malformed rows."""


@dataclass(frozen=True)
class BenchmarkItem:
    id: str
    task: str
    subject: str
    question: str
    choices: tuple[tuple[str, str], ...]  # (label, text) pairs, empty for free-text
    gold: str
    gold_aliases: tuple[str, ...] = ()

    @property
    def kind(self) -> AnswerKind:
        return KIND_FOR_TASK[self.task]

    @property
    def label_set(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.choices)


def _validate(item: BenchmarkItem, where: str) -> BenchmarkItem:
    if item.task not in TASKS:
        raise DatasetError(f"{where}: unknown task {item.task!r}")
    labels = item.label_set
    if item.task == "mmlu" and labels != ("A", "B", "C", "D"):
        raise DatasetError(f"{where}: mmlu items need exactly 4 choices labeled A-D, got {labels}")
    if item.task == "mmlu_pro":
        n = len(labels)
        if not 4 <= n <= 10:
            raise DatasetError(f"{where}: mmlu_pro items need 4-10 choices, got {n}")
        expected = tuple(string.ascii_uppercase[:n])
        if labels != expected:
            raise DatasetError(f"{where}: choice labels must run consecutively from A, got {labels}")
    if item.task in ("gsm8k", "triviaqa") and labels:
        raise DatasetError(f"{where}: {item.task} items must not carry choices")
    if labels and item.gold not in labels:
        raise DatasetError(f"{where}: gold {item.gold!r} not in label set {labels}")
    if not item.question.strip():
        raise DatasetError(f"{where}: empty question")
    if item.task == "triviaqa" and item.gold not in item.gold_aliases:
        raise DatasetError(f"{where}: gold {item.gold!r} missing from gold_aliases")
    return item


def _item_from_record(record: dict, task: str, where: str) -> BenchmarkItem:
    try:
        choices = tuple((c["label"], c["text"]) for c in record.get("choices", []))
        item = BenchmarkItem(
            id=str(record["id"]),
            task=record.get("task", task),
            subject=record.get("subject", ""),
            question=record["question"],
            choices=choices,
            gold=str(record["gold"]),
            gold_aliases=tuple(record.get("gold_aliases", ())),
        )
    except (KeyError, TypeError) as exc:
        raise DatasetError(f"{where}: malformed record ({exc})") from exc
    return _validate(item, where)


def _load_jsonl(path: Path, task: str) -> list[BenchmarkItem]:
    items = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path.name}:{lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{where}: invalid JSON ({exc})") from exc
            items.append(_item_from_record(record, task, where))
    return items


def _load_mmlu_csv(path: Path, task: str) -> list[BenchmarkItem]:
    """Classic MMLU CSV: question, four option texts, answer letter. No header."""
    subject = path.stem.removesuffix("_test").removesuffix("_val").removesuffix("_dev")
    items = []
    with path.open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            where = f"{path.name}:{lineno}"
            if len(row) != 6:
                raise DatasetError(f"{where}: expected 6 columns, got {len(row)}")
            question, *options, answer = row
            choices = tuple(zip("ABCD", options))
            items.append(
                _validate(
                    BenchmarkItem(
                        id=f"{task}/{subject}/{lineno - 1}",
                        task=task,
                        subject=subject,
                        question=question,
                        choices=choices,
                        gold=answer.strip().upper(),
                    ),
                    where,
                )
            )
    return items


def load_dataset(task: str, path: str | Path) -> list[BenchmarkItem]:
    """Load benchmark items from a file or a directory of per-subject files.

    JSONL rows use the documented item schema; ``.csv`` files use the
    MMLU column layout. Duplicate ids and invariant violations raise
    DatasetError with the offending row named.
    """
    if task not in TASKS:
        raise DatasetError(f"unknown task {task!r}")
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"dataset path does not exist: {path}")
    files = sorted(p for p in path.iterdir() if p.suffix in (".csv", ".jsonl")) if path.is_dir() else [path]
    if not files:
        raise DatasetError(f"no dataset files under {path}")
    items: list[BenchmarkItem] = []
    for file in files:
        if file.suffix == ".csv":
            items.extend(_load_mmlu_csv(file, task))
        else:
            items.extend(_load_jsonl(file, task))
    seen: set[str] = set()
    for item in items:
        if item.id in seen:
            raise DatasetError(f"duplicate item id {item.id!r}")
        seen.add(item.id)
    return items


def item_to_record(item: BenchmarkItem) -> dict:
    record = {
        "id": item.id,
        "task": item.task,
        "subject": item.subject,
        "question": item.question,
        "choices": [{"label": label, "text": text} for label, text in item.choices],
        "gold": item.gold,
    }
    if item.gold_aliases:
        record["gold_aliases"] = list(item.gold_aliases)
    return record


def save_items(items: list[BenchmarkItem], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(item_to_record(item), ensure_ascii=False) + "\n")
