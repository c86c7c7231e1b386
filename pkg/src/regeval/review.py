"""Adjudication service for rule-vs-regeneration disagreement cases.

Serves the sampled disagreement cases, records human labels to an
append-only labels.jsonl (last write per case wins, full audit trail
kept), and reports live agreement statistics. Cases marked
"no definitive answer" or "multiple labels" are excluded from the
agreement denominators.
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles

from .normalize import canonical_label
from .runner import RunStore

EXCLUSION_DECISIONS = ("no_definitive", "multiple_labels")


class LabelStore:
    """Append-only label log with last-write-wins resolution per case."""

    def __init__(self, path: Path) -> None:
        self.path = path
        self._lock = threading.Lock()
        self._effective: dict[str, dict] = {}
        if path.exists():
            with path.open(encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        record = json.loads(line)
                        self._effective[record["case_id"]] = record

    def append(self, record: dict) -> None:
        with self._lock:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
            self._effective[record["case_id"]] = record

    def effective(self) -> dict[str, dict]:
        with self._lock:
            return dict(self._effective)


def _decision_of(payload: dict) -> tuple[str, Optional[str]]:
    """Validate a label payload into (decision, gold_label)."""
    picked = [k for k in ("gold_label", "no_definitive", "multiple_labels") if payload.get(k)]
    if len(picked) != 1:
        raise HTTPException(
            status_code=400,
            detail="exactly one of gold_label, no_definitive, multiple_labels is required",
        )
    if picked[0] == "gold_label":
        return "gold_label", str(payload["gold_label"])
    return picked[0], None


def _answers_agree_label(answer: Optional[str], label: str) -> bool:
    if not answer:
        return False
    a = canonical_label(answer) or answer.strip()
    b = canonical_label(label) or label.strip()
    return a == b


def compute_stats(cases: list[dict], effective_labels: dict[str, dict]) -> dict:
    """Agreement of rule and regen answers with the human gold labels."""
    labeled = 0
    excluded = 0
    definitive = 0
    rule_hits = 0
    regen_hits = 0
    by_id = {case["case_id"]: case for case in cases}
    for case_id, record in effective_labels.items():
        case = by_id.get(case_id)
        if case is None:
            continue
        labeled += 1
        if record["decision"] in EXCLUSION_DECISIONS:
            excluded += 1
            continue
        definitive += 1
        label = record["gold_label"]
        rule_hits += _answers_agree_label(case.get("rule_answer"), label)
        regen_hits += _answers_agree_label(case.get("regen_answer"), label)
    return {
        "total_cases": len(cases),
        "labeled": labeled,
        "excluded": excluded,
        "rule_agreement": rule_hits / definitive if definitive else 0.0,
        "regen_agreement": regen_hits / definitive if definitive else 0.0,
    }


def create_app(run_dir: str | Path, ui_dir: Optional[str | Path] = None) -> FastAPI:
    store = RunStore(run_dir)
    cases_path = store.path("disagreements.jsonl")
    if not cases_path.exists():
        raise FileNotFoundError(f"no disagreements.jsonl under {run_dir}; sample first")
    cases = store.read_jsonl("disagreements.jsonl")
    by_id = {case["case_id"]: case for case in cases}
    labels = LabelStore(store.path("labels.jsonl"))

    app = FastAPI(title="regeval review")

    def case_view(case: dict) -> dict:
        effective = labels.effective().get(case["case_id"])
        view = dict(case)
        view["label"] = (
            None
            if effective is None
            else {
                "decision": effective["decision"],
                "gold_label": effective.get("gold_label"),
                "annotator": effective.get("annotator"),
            }
        )
        return view

    @app.get("/api/cases")
    def list_cases(offset: int = 0, limit: int = 50) -> dict:
        effective = labels.effective()
        unlabeled = [c for c in cases if c["case_id"] not in effective]
        labeled = [c for c in cases if c["case_id"] in effective]
        ordered = unlabeled + labeled
        page = ordered[offset : offset + limit]
        return {
            "total": len(cases),
            "labeled": len(labeled),
            "offset": offset,
            "cases": [case_view(c) for c in page],
        }

    @app.get("/api/cases/{case_id:path}")
    def get_case(case_id: str) -> dict:
        case = by_id.get(case_id)
        if case is None:
            raise HTTPException(status_code=404, detail=f"unknown case {case_id}")
        return case_view(case)

    @app.post("/api/cases/{case_id:path}/label")
    def submit_label(case_id: str, payload: dict) -> dict:
        case = by_id.get(case_id)
        if case is None:
            raise HTTPException(status_code=404, detail=f"unknown case {case_id}")
        decision, gold_label = _decision_of(payload)
        if decision == "gold_label":
            label_set = case.get("label_set") or []
            if label_set and gold_label not in label_set:
                raise HTTPException(
                    status_code=400,
                    detail=f"label {gold_label!r} outside case label set {label_set}",
                )
        record = {
            "case_id": case_id,
            "decision": decision,
            "annotator": str(payload.get("annotator", "anonymous")),
            "timestamp": time.time(),
        }
        if gold_label is not None:
            record["gold_label"] = gold_label
        labels.append(record)
        return {"ok": True, "case": case_view(case)}

    @app.get("/api/stats")
    def stats() -> dict:
        return compute_stats(cases, labels.effective())

    if ui_dir is not None and Path(ui_dir).is_dir():
        ui_path = Path(ui_dir)

        @app.get("/")
        def index() -> FileResponse:
            return FileResponse(ui_path / "index.html")

        app.mount("/", StaticFiles(directory=ui_path), name="ui")

    return app


def serve(run_dir: str | Path, bind: str = "127.0.0.1:8765", ui_dir: Optional[str] = None) -> None:
    import uvicorn

    host, _, port = bind.partition(":")
    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = str(candidate) if candidate.is_dir() else None
    app = create_app(run_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8765), log_level="info")
