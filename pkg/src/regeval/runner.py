"""End-to-end evaluation runs and their on-disk artifacts.

A run directory contains config.json, responses.jsonl, extractions.jsonl,
regen.jsonl, verdicts.jsonl, report.json, and (after sampling)
disagreements.jsonl. Files are written in item order from a single
thread, so a rerun against a warm cache reproduces every artifact
byte for byte.
"""

from __future__ import annotations

import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .client import EndpointConfig, GenerationParams, ModelClient, TransportError
from .datasets import BenchmarkItem, load_dataset
from .extraction import METHOD_IDS, run_all_extractors
from .prompts import PromptTemplate, render_prompt
from .regen import RegenRequest, RegenResult, regenerate_choice, regenerate_free
from .scoring import (
    Verdict,
    accuracy,
    answer_distribution,
    incomplete_breakdown,
    judge,
    method_confusion,
)
from .thinking import SegmentedResponse, segment_response

log = logging.getLogger(__name__)

ARTIFACTS = (
    "config.json",
    "responses.jsonl",
    "extractions.jsonl",
    "regen.jsonl",
    "verdicts.jsonl",
    "report.json",
)

@dataclass
class RunConfig:
    dataset: str
    task: str
    model: str
    endpoint_url: str
    out_dir: str
    regen_model: Optional[str] = None
    methods: tuple[str, ...] = METHOD_IDS
    instructed: bool = False
    think_mode: bool = True
    baseline_loglikelihood: bool = False
    params: GenerationParams = field(default_factory=GenerationParams)
    seed: int = 0
    cache_dir: Optional[str] = None
    concurrency: int = 4
    endpoint_kind: str = "completions"
    candidate_form: str = "bare_label"
    rule_method: Optional[str] = None  # override best-method selection in reports

    def __post_init__(self) -> None:
        for mid in self.methods:
            if mid not in METHOD_IDS:
                raise ValueError(f"unknown extraction method {mid!r}")
        if self.rule_method is not None and self.rule_method not in self.methods:
            raise ValueError("rule_method must be one of the configured methods")

    def to_json(self) -> dict:
        data = asdict(self)
        data["methods"] = list(self.methods)
        data["params"]["stop"] = list(self.params.stop)
        return data

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        params = data.pop("params", {})
        params["stop"] = tuple(params.get("stop", ()))
        data["methods"] = tuple(data.get("methods", METHOD_IDS))
        return cls(params=GenerationParams(**params), **data)

class RunStore:
    """Paths and serialization helpers for one run directory."""

    def __init__(self, run_dir: str | Path) -> None:
        self.dir = Path(run_dir)

    def path(self, name: str) -> Path:
        return self.dir / name

    def write_json(self, name: str, payload: dict) -> None:
        self.dir.mkdir(parents=True, exist_ok=True)
        with self.path(name).open("w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2, ensure_ascii=False)
            fh.write("\n")

    def write_jsonl(self, name: str, records: list[dict]) -> None:
        self.dir.mkdir(parents=True, exist_ok=True)
        with self.path(name).open("w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")

    def read_json(self, name: str) -> dict:
        with self.path(name).open(encoding="utf-8") as fh:
            return json.load(fh)

    def read_jsonl(self, name: str) -> list[dict]:
        records = []
        with self.path(name).open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    records.append(json.loads(line))
        return records

@dataclass
class ItemResult:
    item: BenchmarkItem
    prompt: str = ""
    response_record: Optional[dict] = None
    segmented: Optional[SegmentedResponse] = None
    extractions: Optional[dict] = None
    regen: Optional[RegenResult] = None
    error: Optional[str] = None

def _make_client(config: RunConfig) -> ModelClient:
    endpoint = EndpointConfig.from_env(base_url=config.endpoint_url, kind=config.endpoint_kind)
    return ModelClient(
        endpoint,
        config.model,
        cache_dir=config.cache_dir,
        concurrency=config.concurrency,
    )

def _evaluate_item(
    item: BenchmarkItem, config: RunConfig, client: ModelClient, template: PromptTemplate
) -> ItemResult:
    result = ItemResult(item=item)
    try:
        result.prompt = render_prompt(item, template)
        response = client.generate(result.prompt, config.params, think_mode=config.think_mode)
        result.response_record = response.to_record()
        result.segmented = segment_response(response.text)
        result.extractions = {
            mid: ext
            for mid, ext in run_all_extractors(
                result.segmented, item.label_set, item.kind
            ).items()
            if mid in config.methods
        }
        request = RegenRequest(
            item=item,
            prior_output=response.text or " ",
            mode="choice_logprob" if item.choices else "free_generate",
            regen_model=config.regen_model,
            candidate_form=config.candidate_form,  # type: ignore[arg-type]
        )
        if request.mode == "choice_logprob":
            result.regen = regenerate_choice(request, client, template)
        else:
            result.regen = regenerate_free(request, client, template, config.params)
    except TransportError as exc:
        result.error = str(exc)
        log.warning("item %s failed: %s", item.id, exc)
    return result

def _best_method(method_verdicts: dict[str, list[Verdict]], config: RunConfig) -> str:
    if config.rule_method:
        return config.rule_method
    return max(config.methods, key=lambda mid: accuracy(method_verdicts[mid]))

def build_report(
    items: list[BenchmarkItem],
    results: list[ItemResult],
    config: RunConfig,
) -> dict:
    ok = [r for r in results if r.error is None]
    ok_items = [r.item for r in ok]
    method_verdicts: dict[str, list[Verdict]] = {mid: [] for mid in config.methods}
    method_answers: dict[str, dict[str, Optional[str]]] = {mid: {} for mid in config.methods}
    regen_verdicts: list[Verdict] = []
    regen_by_id: dict[str, tuple[Optional[str], Verdict]] = {}
    segmented_by_id: dict[str, SegmentedResponse] = {}

    for r in ok:
        segmented_by_id[r.item.id] = r.segmented
        for mid in config.methods:
            ext = r.extractions[mid]
            answer = ext.normalized if ext.found else None
            method_answers[mid][r.item.id] = answer
            method_verdicts[mid].append(judge(answer, r.item, method_source=mid))
        regen_answer = r.regen.final_answer or None
        verdict = judge(regen_answer, r.item, method_source="regen")
        regen_verdicts.append(verdict)
        regen_by_id[r.item.id] = (regen_answer, verdict)

    report: dict = {
        "task": config.task,
        "model": config.model,
        "items": len(items),
        "evaluated_items": len(ok),
        "failed_items": len(results) - len(ok),
        "failed_item_ids": sorted(r.item.id for r in results if r.error is not None),
    }
    if not ok:
        return report

    report["method_accuracy"] = {
        mid: accuracy(method_verdicts[mid]) for mid in config.methods
    }
    report["regen_accuracy"] = accuracy(regen_verdicts)

    label_set = ok_items[0].label_set if ok_items else ()
    report["answer_distribution"] = {
        mid: answer_distribution(
            [method_answers[mid][item.id] for item in ok_items], label_set
        )
        for mid in config.methods
    }

    best = _best_method(method_verdicts, config)
    report["rule_best_method"] = best
    rule_by_id = {
        item.id: (method_answers[best][item.id], verdict)
        for item, verdict in zip(ok_items, method_verdicts[best])
    }
    confusion = method_confusion(rule_by_id, regen_by_id, ok_items)
    report["confusion"] = confusion.to_record()
    report["disagreement_ids"] = list(confusion.disagreement_ids)

    rule_verdict_by_id = {v.item_id: v for v in method_verdicts[best]}
    regen_verdict_by_id = {v.item_id: v for v in regen_verdicts}
    report["incomplete"] = {
        "rule_best": incomplete_breakdown(segmented_by_id, rule_verdict_by_id).to_record(),
        "regen": incomplete_breakdown(segmented_by_id, regen_verdict_by_id).to_record(),
    }
    return report

def run_evaluation(config: RunConfig, client: Optional[ModelClient] = None) -> RunStore:
    """Execute a full run and persist every artifact under the run directory."""
    store = RunStore(config.out_dir)
    store.write_json("config.json", config.to_json())
    items = load_dataset(config.task, config.dataset)
    owns_client = client is None
    if client is None:
        client = _make_client(config)
    try:
        if config.baseline_loglikelihood:
            report = score_loglikelihood(items, client, config)
            store.write_json("report.json", report)
            return store
        if any(item.choices for item in items):
            # choice regeneration needs continuation scoring; fail fast, not per item
            client.probe_logprob_support()
        template = PromptTemplate(instructed=config.instructed, think_mode=config.think_mode)
        with ThreadPoolExecutor(max_workers=config.concurrency) as pool:
            results = list(
                pool.map(lambda item: _evaluate_item(item, config, client, template), items)
            )
    finally:
        if owns_client:
            client.close()

    responses, extractions, regens, verdict_rows = [], [], [], []
    for r in results:
        if r.error is not None:
            responses.append({"item_id": r.item.id, "error": r.error})
            continue
        responses.append(
            {
                "item_id": r.item.id,
                "prompt": r.prompt,
                "thinking_complete": r.segmented.thinking_complete,
                **r.response_record,
            }
        )
        extractions.append(
            {
                "item_id": r.item.id,
                "extractions": {
                    mid: {
                        "status": ext.status,
                        "raw_match": ext.raw_match,
                        "normalized": ext.normalized,
                        "span": list(ext.matched_span) if ext.matched_span else None,
                    }
                    for mid, ext in r.extractions.items()
                },
            }
        )
        regens.append(r.regen.to_record())
        row = {"item_id": r.item.id, "gold": r.item.gold, "results": {}}
        for mid in config.methods:
            ext = r.extractions[mid]
            answer = ext.normalized if ext.found else None
            row["results"][mid] = {
                "answer": answer,
                "outcome": judge(answer, r.item, mid).outcome,
            }
        regen_answer = r.regen.final_answer or None
        row["results"]["regen"] = {
            "answer": regen_answer,
            "outcome": judge(regen_answer, r.item, "regen").outcome,
        }
        verdict_rows.append(row)

    store.write_jsonl("responses.jsonl", responses)
    store.write_jsonl("extractions.jsonl", extractions)
    store.write_jsonl("regen.jsonl", regens)
    store.write_jsonl("verdicts.jsonl", verdict_rows)
    store.write_json("report.json", build_report(items, results, config))
    return store

def score_loglikelihood(
    items: list[BenchmarkItem], client: ModelClient, config: RunConfig
) -> dict:
    """Non-reasoning baseline: argmax over per-choice continuation logprobs."""
    if not items:
        raise ValueError("empty item list")
    for item in items:
        if not item.choices:
            raise ValueError(f"loglikelihood scoring requires choice tasks, item {item.id}")
    client.probe_logprob_support()
    template = PromptTemplate(instructed=False, think_mode=False)
    verdicts = []
    per_item = []
    for item in items:
        prompt = render_prompt(item, template)
        scores = {
            label: client.score_continuation(prompt, " " + label)
            for label, _ in item.choices
        }
        chosen = max(scores, key=lambda lab: scores[lab])
        verdicts.append(judge(chosen, item, method_source="loglikelihood"))
        per_item.append({"item_id": item.id, "chosen": chosen, "scores": scores})
    return {
        "task": config.task,
        "model": config.model,
        "items": len(items),
        "evaluated_items": len(items),
        "failed_items": 0,
        "loglikelihood_accuracy": accuracy(verdicts),
        "per_item": per_item,
    }

def disagreement_pool(store: RunStore) -> list[dict]:
    """Join run artifacts into adjudication cases for every disagreement."""
    report = store.read_json("report.json")
    if "confusion" not in report:
        raise ValueError("run has no regeneration records to compare against")
    best = report["rule_best_method"]
    config = RunConfig.from_json(store.read_json("config.json"))
    items = {item.id: item for item in load_dataset(config.task, config.dataset)}
    responses = {r["item_id"]: r for r in store.read_jsonl("responses.jsonl")}
    verdicts = {r["item_id"]: r for r in store.read_jsonl("verdicts.jsonl")}
    regens = {r["item_id"]: r for r in store.read_jsonl("regen.jsonl")}
    cases = []
    for item_id in report["disagreement_ids"]:
        item = items[item_id]
        segmented = segment_response(responses[item_id]["text"])
        cases.append(
            {
                "case_id": item_id,
                "question": item.question,
                "choices": [{"label": label, "text": text} for label, text in item.choices],
                "label_set": list(item.label_set),
                "response_text": responses[item_id]["text"],
                "think_text": segmented.think_text,
                "post_think_text": segmented.post_think_text,
                "thinking_complete": segmented.thinking_complete,
                "rule_method": best,
                "rule_answer": verdicts[item_id]["results"][best]["answer"],
                "regen_answer": regens[item_id]["final_answer"] or None,
                "gold": item.gold,
            }
        )
    return cases

def sample_disagreements(pool: list[dict], n: int, seed: int) -> list[dict]:
    """Uniform, seeded sample without replacement; the whole pool when n exceeds it."""
    if n >= len(pool):
        return list(pool)
    return random.Random(seed).sample(pool, n)

def write_disagreements(store: RunStore, n: int, seed: int) -> list[dict]:
    sample = sample_disagreements(disagreement_pool(store), n, seed)
    store.write_jsonl("disagreements.jsonl", sample)
    return sample
