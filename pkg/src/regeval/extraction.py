"""The five rule-based answer extractors.

Each extractor is a pure function over a segmented response. All patterns
are expressed with plain capture groups (no lookaround) so the same
semantics port to linear-time regex engines; equivalence with the
reference lookaround formulations is pinned by the golden fixture corpus
in the test suite.

Search regions:

- ``flexible_extract``, ``last_extract``, ``answer_is_correct`` and
  ``instructed_format`` scan the full raw text, think segment included,
  and select the last match. Reasoning models often state their final
  answer mid-thought, and the last statement wins after self-correction.
- ``strict_match`` targets the explicitly formatted final answer, so it
  scans only the text after a closed think block; when the response has
  no closed think block there is nothing to exclude and the whole text
  is searched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Optional

from .normalize import AnswerKind, basic_clean, normalize_answer
from .thinking import SegmentedResponse

MethodId = Literal[
    "strict_match",
    "flexible_extract",
    "instructed_format",
    "answer_is_correct",
    "last_extract",
]

METHOD_IDS: tuple[str, ...] = (
    "strict_match",
    "flexible_extract",
    "instructed_format",
    "answer_is_correct",
    "last_extract",
)


@dataclass(frozen=True)
class ExtractionMethod:
    """One extraction rule bound to a task's option labels (empty for free-text)."""

    id: str
    label_set: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.id not in METHOD_IDS:
            raise ValueError(f"unknown extraction method: {self.id!r}")
        if len(set(self.label_set)) != len(self.label_set):
            raise ValueError("label_set must be unique")
        for label in self.label_set:
            if len(label) != 1 or not label.isupper():
                raise ValueError(f"labels must be single uppercase tokens: {label!r}")


@dataclass(frozen=True)
class Extraction:
    """One rule's verdict on one response."""

    method: str
    status: Literal["found", "not_found"]
    matched_span: Optional[tuple[int, int]] = None  # byte offsets in raw_text
    raw_match: Optional[str] = None
    normalized: Optional[str] = None

    @property
    def found(self) -> bool:
        return self.status == "found"


_NOT_FOUND = {m: Extraction(method=m, status="not_found") for m in METHOD_IDS}

_STRICT_CUES = ("The answer is ", "answer is ", "The answer: ", "The final answer: ")

# lm-evaluation-harness style "last number" pattern used for numeric tasks.
_FLEXIBLE_NUMERIC = re.compile(r"(-?[$0-9.,]{2,})|(-?[0-9]+)")

_NUMBERISH = r"\$?-?\d[\d,.]*"


def _label_class(label_set: tuple[str, ...]) -> str:
    return "[" + "".join(re.escape(c) for c in label_set) + "]"


@lru_cache(maxsize=64)
def _label_patterns(label_set: tuple[str, ...]) -> dict[str, re.Pattern]:
    lab = _label_class(label_set)
    group = rf"(\(?{lab}\)?)"
    answer_is = "|".join(
        [
            rf"\**[Aa]nswer:\**\s*{group}",
            rf"\**[Aa]nswer\**:\s*{group}",
            rf"[Aa]nswer is \**{group}\**",
            rf"[Aa]nswer should be \**{group}\**",
            rf"[Aa]nswer:\s+\**{group}\**",
            rf"correct answer is \**{group}\**",
            rf"correct answer:\s+\**{group}\**",
            rf"\**{group}\** is correct",
            rf"\**{group}\** is the correct",
            rf"\**{group}\** is the answer",
            rf"\**{group}\** should be the answer",
        ]
    )
    # The closing quote right after the label is what keeps this format strict:
    # bare "Answer: B" or "**Answer:** (B)" deliberately do not qualify.
    field = rf'[Aa]nswer\**"?\s*:\s*"?\**\(?({lab})"'
    return {
        "flexible": re.compile(rf"\({lab}\)"),
        "answer_is": re.compile(answer_is),
        "field": re.compile(field),
    }


@lru_cache(maxsize=8)
def _freeform_answer_is(kind: str) -> re.Pattern:
    cues = r"(?:\**[Aa]nswer\**\s*:|[Aa]nswer is|[Aa]nswer should be|correct answer is|correct answer:)"
    if kind == "numeric":
        return re.compile(rf"{cues}\s*\**({_NUMBERISH})\**")
    # A bold span wins; otherwise capture up to the sentence or line end.
    return re.compile(rf"{cues}\s*(?:\*\*([^\n*]+?)\*\*|([^\n.]+))")


def _is_ascii_alnum(ch: str) -> bool:
    return ch.isascii() and ch.isalnum()


def _last_group(m: re.Match) -> tuple[str, int, int]:
    """The value and span of the matched alternative's capture group."""
    for i, g in enumerate(m.groups(), start=1):
        if g is not None:
            return g, m.start(i), m.end(i)
    return m.group(0), m.start(), m.end()


def _iter_boxed(text: str):
    """Yield (payload, start, end) for every brace-balanced \\boxed{...}."""
    marker = "\\boxed"
    i = 0
    while True:
        start = text.find(marker, i)
        if start == -1:
            return
        j = start + len(marker)
        while j < len(text) and text[j].isspace():
            j += 1
        if j >= len(text) or text[j] != "{":
            i = start + len(marker)
            continue
        depth = 1
        k = j + 1
        while k < len(text) and depth > 0:
            if text[k] == "{":
                depth += 1
            elif text[k] == "}":
                depth -= 1
            k += 1
        if depth != 0:
            return
        yield text[j + 1 : k - 1], j + 1, k - 1
        i = k


def _strict(text: str) -> Optional[tuple[str, int, int]]:
    """Cue-phrase capture to the last period on the line (or line end).

    Matches are non-overlapping in scan order, mirroring finditer over the
    lookbehind formulation: a capture consumes its span, so cues inside an
    earlier capture do not start a new match. The last match wins.
    """
    starts: set[int] = set()
    for cue in _STRICT_CUES:
        at = text.find(cue)
        while at != -1:
            starts.add(at + len(cue))
            at = text.find(cue, at + 1)
    best: Optional[tuple[str, int, int]] = None
    consumed = 0
    for start in sorted(starts):
        if start < consumed:
            continue
        nl = text.find("\n", start)
        line_end = nl if nl != -1 else len(text)
        rest = text[start:line_end]
        dot = rest.rfind(".")
        capture = rest[:dot] if dot != -1 else rest
        if capture:
            best = (capture, start, start + len(capture))
            consumed = start + len(capture)
    return best


def _last_of(pattern: re.Pattern, text: str) -> Optional[re.Match]:
    last = None
    for m in pattern.finditer(text):
        last = m
    return last


def _extract_strict(text: str, kind: AnswerKind) -> Optional[tuple[str, str, int, int]]:
    hit = _strict(text)
    if hit is None:
        return None
    capture, start, end = hit
    normalized = normalize_answer(capture, kind)
    if not normalized:
        return None
    return capture, normalized, start, end


def _extract_flexible(
    text: str, label_set: tuple[str, ...], kind: AnswerKind
) -> Optional[tuple[str, str, int, int]]:
    if kind == "option_label":
        m = _last_of(_label_patterns(label_set)["flexible"], text)
        if m is None:
            return None
        raw = m.group(0)
        return raw, basic_clean(raw), m.start(), m.end()
    if kind == "numeric":
        m = _last_of(_FLEXIBLE_NUMERIC, text)
        if m is None:
            return None
        raw, start, end = _last_group(m)
        normalized = normalize_answer(raw, "numeric")
        if not normalized:
            return None
        return raw, normalized, start, end
    return None


def _extract_instructed(
    text: str, label_set: tuple[str, ...], kind: AnswerKind
) -> Optional[tuple[str, str, int, int]]:
    if label_set:
        m = _last_of(_label_patterns(label_set)["field"], text)
        if m is not None:
            raw = m.group(1)
            normalized = normalize_answer(raw, kind)
            if normalized:
                return raw, normalized, m.start(1), m.end(1)
    last_boxed = None
    for payload, start, end in _iter_boxed(text):
        if payload.strip():
            last_boxed = (payload, start, end)
    if last_boxed is None:
        return None
    payload, start, end = last_boxed
    normalized = normalize_answer(payload, kind)
    if not normalized:
        return None
    return payload, normalized, start, end


def _extract_answer_is(
    text: str, label_set: tuple[str, ...], kind: AnswerKind
) -> Optional[tuple[str, str, int, int]]:
    if kind == "option_label":
        pattern = _label_patterns(label_set)["answer_is"]
    else:
        pattern = _freeform_answer_is(kind)
    m = _last_of(pattern, text)
    if m is None:
        return None
    raw, start, end = _last_group(m)
    normalized = normalize_answer(raw, kind)
    if not normalized:
        return None
    return raw, normalized, start, end


def _extract_last(
    text: str, label_set: tuple[str, ...], kind: AnswerKind
) -> Optional[tuple[str, str, int, int]]:
    if kind != "option_label":
        return None
    labels = set(label_set)
    best = None
    for i in range(1, len(text) - 1):
        ch = text[i]
        if ch in labels and not _is_ascii_alnum(text[i - 1]) and not _is_ascii_alnum(text[i + 1]):
            best = (ch, i, i + 1)
    if best is None:
        return None
    raw, start, end = best
    normalized = normalize_answer(raw, kind)
    if not normalized:
        return None
    return raw, normalized, start, end


def _byte_span(raw_text: str, start: int, end: int) -> tuple[int, int]:
    return (
        len(raw_text[:start].encode("utf-8")),
        len(raw_text[:end].encode("utf-8")),
    )


def extract_answer(
    method: ExtractionMethod, response: SegmentedResponse, kind: AnswerKind
) -> Extraction:
    """Run one extraction rule. Total: no match means status "not_found"."""
    if kind == "option_label" and not method.label_set:
        raise ValueError("option_label extraction requires a nonempty label_set")
    raw_text = response.raw_text
    offset = 0
    if method.id == "strict_match" and response.thinking_complete:
        offset = len(raw_text) - len(response.post_think_text)
        region = response.post_think_text
    else:
        region = raw_text

    if method.id == "strict_match":
        hit = _extract_strict(region, kind)
    elif method.id == "flexible_extract":
        hit = _extract_flexible(region, method.label_set, kind)
    elif method.id == "instructed_format":
        hit = _extract_instructed(region, method.label_set, kind)
    elif method.id == "answer_is_correct":
        hit = _extract_answer_is(region, method.label_set, kind)
    else:
        hit = _extract_last(region, method.label_set, kind)

    if hit is None:
        return _NOT_FOUND[method.id]
    raw, normalized, start, end = hit
    return Extraction(
        method=method.id,
        status="found",
        matched_span=_byte_span(raw_text, offset + start, offset + end),
        raw_match=raw,
        normalized=normalized,
    )


def run_all_extractors(
    response: SegmentedResponse, label_set: tuple[str, ...], kind: AnswerKind
) -> dict[str, Extraction]:
    """Apply every registered method to one response."""
    return {
        mid: extract_answer(ExtractionMethod(mid, label_set), response, kind)
        for mid in METHOD_IDS
    }
