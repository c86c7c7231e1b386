"""Prompt rendering for zero-shot chain-of-thought evaluation."""

from __future__ import annotations

from dataclasses import dataclass

from .datasets import BenchmarkItem

MC_HEADER = "The following are multiple choice questions (with answers) about {subject}."
OPEN_HEADER = "The following are questions (with answers) about {subject}."

INSTRUCTED_SUFFIX = (
    'Please show your choice in the answer field with only the choice letter, '
    'e.g., "answer": "C".'
)

ANSWER_CUE = "Answer:"


@dataclass(frozen=True)
class PromptTemplate:
    instructed: bool = False
    think_mode: bool = True
    options_on_one_line: bool = True

    @property
    def instructed_suffix(self) -> str:
        return INSTRUCTED_SUFFIX if self.instructed else ""


def _spaced_subject(subject: str) -> str:
    return subject.replace("_", " ").strip()


def render_prompt(item: BenchmarkItem, template: PromptTemplate) -> str:
    """Render one item: header, question, options, optional instruction, answer cue."""
    if item.task in ("mmlu", "mmlu_pro") and not item.choices:
        raise ValueError(f"choice task item {item.id} has no choices")
    header = MC_HEADER if item.choices else OPEN_HEADER
    blocks = [header.format(subject=_spaced_subject(item.subject) or "various topics")]
    blocks.append(f"Q: {item.question}")
    if item.choices:
        rendered = [f"({label}) {text}" for label, text in item.choices]
        blocks.append(" ".join(rendered) if template.options_on_one_line else "\n".join(rendered))
    if template.instructed:
        if not item.choices:
            raise ValueError("instructed format requires a choice task")
        blocks.append(template.instructed_suffix)
    blocks.append(ANSWER_CUE)
    return "\n\n".join(blocks)
