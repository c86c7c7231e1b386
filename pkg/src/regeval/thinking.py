"""Splitting reasoning-model output into think and post-think segments."""

from __future__ import annotations

from dataclasses import dataclass

OPEN_TAG = "<think>"
CLOSE_TAG = "</think>"


@dataclass(frozen=True)
class SegmentedResponse:
    """A raw model output split at the first closing think tag.

    ``thinking_complete`` is true iff the raw text contains "</think>".
    When the thinking never closes, everything after the opening tag (or
    the whole text when there is no tag) counts as think text and
    ``post_think_text`` is empty.
    """

    raw_text: str
    think_text: str
    post_think_text: str
    thinking_complete: bool


def segment_response(raw_text: str) -> SegmentedResponse:
    """Segment ``raw_text`` on the literal tags, case-sensitively.

    Only the first "</think>" splits; later occurrences stay in the
    post-think segment.
    """
    close = raw_text.find(CLOSE_TAG)
    if close == -1:
        think = raw_text
        if think.startswith(OPEN_TAG):
            think = think[len(OPEN_TAG) :]
        return SegmentedResponse(raw_text, think, "", False)
    left = raw_text[:close]
    post = raw_text[close + len(CLOSE_TAG) :]
    if left.startswith(OPEN_TAG):
        left = left[len(OPEN_TAG) :]
    return SegmentedResponse(raw_text, left, post, True)
