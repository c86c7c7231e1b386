"""regeval: evaluation harness for reasoning LLMs.

Rule-based answer extraction, answer regeneration, sensitivity metrics,
and human adjudication of disagreement cases.
"""

from .client import EndpointConfig, GenerationParams, ModelClient, ModelResponse
from .datasets import BenchmarkItem, DatasetError, load_dataset
from .extraction import (
    METHOD_IDS,
    Extraction,
    ExtractionMethod,
    extract_answer,
    run_all_extractors,
)
from .normalize import AnswerKind, normalize_answer, quasi_exact
from .prompts import PromptTemplate, render_prompt
from .regen import RegenRequest, RegenResult, build_regen_prompt, regenerate_choice, regenerate_free
from .runner import RunConfig, RunStore, run_evaluation, sample_disagreements
from .scoring import Verdict, accuracy, answer_distribution, incomplete_breakdown, judge, method_confusion
from .thinking import SegmentedResponse, segment_response

__version__ = "0.1.0"

__all__ = [
    "AnswerKind",
    "BenchmarkItem",
    "DatasetError",
    "EndpointConfig",
    "Extraction",
    "ExtractionMethod",
    "GenerationParams",
    "METHOD_IDS",
    "ModelClient",
    "ModelResponse",
    "PromptTemplate",
    "RegenRequest",
    "RegenResult",
    "RunConfig",
    "RunStore",
    "SegmentedResponse",
    "Verdict",
    "accuracy",
    "answer_distribution",
    "build_regen_prompt",
    "extract_answer",
    "incomplete_breakdown",
    "judge",
    "load_dataset",
    "method_confusion",
    "normalize_answer",
    "quasi_exact",
    "regenerate_choice",
    "regenerate_free",
    "render_prompt",
    "run_all_extractors",
    "run_evaluation",
    "sample_disagreements",
    "segment_response",
]
