"""Answer regeneration: one extra non-reasoning inference to finalize an answer.

The regeneration payload is the original prompt, the model's full prior
output verbatim (complete or not), a newline, and the literal prefix
"Answer:". Choice tasks are answered by scoring each option label as a
continuation and taking the argmax, so the result is always a member of
the label set. Free-form tasks generate a short answer and normalize it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal, Optional

from .client import GenerationParams, ModelClient
from .datasets import BenchmarkItem
from .normalize import normalize_answer
from .prompts import PromptTemplate, render_prompt

ANSWER_PREFIX = "Answer:"

CandidateForm = Literal["bare_label", "parenthesized_label", "option_text"]

FREE_GENERATION_TOKENS = 64


@dataclass(frozen=True)
class RegenRequest:
    item: BenchmarkItem
    prior_output: str
    mode: Literal["choice_logprob", "free_generate"]
    regen_model: Optional[str] = None  # defaults to the reasoning model
    candidate_form: CandidateForm = "bare_label"
    candidate_separator: str = " "

    def __post_init__(self) -> None:
        if self.mode == "choice_logprob" and not self.item.choices:
            raise ValueError("choice_logprob mode requires an item with choices")


@dataclass(frozen=True)
class RegenResult:
    item_id: str
    mode: str
    final_answer: str
    chosen_label: Optional[str] = None
    per_choice_logprob: Optional[dict[str, float]] = None
    generated_text: Optional[str] = None

    def to_record(self) -> dict:
        record = {"item_id": self.item_id, "mode": self.mode, "final_answer": self.final_answer}
        if self.chosen_label is not None:
            record["chosen_label"] = self.chosen_label
        if self.per_choice_logprob is not None:
            record["per_choice_logprob"] = self.per_choice_logprob
        if self.generated_text is not None:
            record["generated_text"] = self.generated_text
        return record


def build_regen_prompt(item: BenchmarkItem, prior_output: str, template: PromptTemplate) -> str:
    """Original rendered prompt + prior output verbatim + newline + "Answer:"."""
    if not prior_output:
        raise ValueError("prior_output must be nonempty")
    return render_prompt(item, template) + prior_output + "\n" + ANSWER_PREFIX


def candidate_continuation(req: RegenRequest, label: str, text: str) -> str:
    if req.candidate_form == "bare_label":
        body = label
    elif req.candidate_form == "parenthesized_label":
        body = f"({label})"
    else:
        body = text
    return req.candidate_separator + body


def _client_for(req: RegenRequest, client: ModelClient) -> ModelClient:
    if req.regen_model and req.regen_model != client.model:
        return client.with_model(req.regen_model)
    return client


def regenerate_choice(
    req: RegenRequest, client: ModelClient, template: PromptTemplate
) -> RegenResult:
    """Probability-based answering over the item's choices. Never returns N/A."""
    assert req.mode == "choice_logprob"
    client = _client_for(req, client)
    prompt = build_regen_prompt(req.item, req.prior_output, template)
    scores: dict[str, float] = {}
    for label, text in req.item.choices:
        scores[label] = client.score_continuation(prompt, candidate_continuation(req, label, text))
    # Ties break toward the earlier label in benchmark order.
    chosen = max(scores, key=lambda lab: (scores[lab], -req.item.label_set.index(lab)))
    return RegenResult(
        item_id=req.item.id,
        mode=req.mode,
        final_answer=chosen,
        chosen_label=chosen,
        per_choice_logprob=scores,
    )


def simplify_generation(text: str) -> str:
    """Reduce a regenerated answer to its first line, minus any echoed prefix."""
    s = text
    if s.lstrip().startswith(ANSWER_PREFIX):
        s = s.lstrip()[len(ANSWER_PREFIX) :]
    s = s.split("\n", 1)[0]
    return s.strip()


def regenerate_free(
    req: RegenRequest,
    client: ModelClient,
    template: PromptTemplate,
    params: Optional[GenerationParams] = None,
) -> RegenResult:
    """One bounded non-reasoning generation, simplified and normalized."""
    assert req.mode == "free_generate"
    client = _client_for(req, client)
    prompt = build_regen_prompt(req.item, req.prior_output, template)
    if params is None:
        params = GenerationParams(max_tokens=FREE_GENERATION_TOKENS)
    else:
        params = replace(params, max_tokens=min(params.max_tokens, FREE_GENERATION_TOKENS))
    response = client.generate(prompt, params, think_mode=False)
    simplified = simplify_generation(response.text)
    normalized = normalize_answer(simplified, req.item.kind) if simplified else None
    return RegenResult(
        item_id=req.item.id,
        mode=req.mode,
        final_answer=normalized or "",
        generated_text=response.text,
    )
