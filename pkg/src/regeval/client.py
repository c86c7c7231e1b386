"""OpenAI-compatible endpoint client: generation and continuation scoring.

Responses are cached on disk keyed by a digest of (endpoint, model,
payload, params) so reruns never re-infer. Transient failures (HTTP
429/5xx, timeouts) retry with exponential backoff; a shared semaphore
bounds in-flight requests across threads.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional

import httpx

log = logging.getLogger(__name__)

RETRYABLE_STATUSES = {429, 500, 502, 503, 504}


class ClientError(RuntimeError):
    pass


class TransportError(ClientError):
    """Endpoint unreachable or still failing after all retries."""


class ProtocolError(ClientError):
    """Endpoint answered with a payload we cannot interpret."""


class CapabilityError(ClientError):
    """Endpoint lacks a required facility (e.g. echoed logprobs)."""


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.6
    top_p: float = 0.95
    top_k: int = 20
    max_tokens: int = 4096
    stop: tuple[str, ...] = ()
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.top_k < 0:
            raise ValueError("top_k must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")

    def to_payload(self) -> dict:
        payload: dict[str, Any] = {
            "temperature": self.temperature,
            "top_p": self.top_p,
            "top_k": self.top_k,
            "max_tokens": self.max_tokens,
        }
        if self.stop:
            payload["stop"] = list(self.stop)
        if self.seed is not None:
            payload["seed"] = self.seed
        return payload


@dataclass(frozen=True)
class ModelResponse:
    text: str
    finish_reason: str  # stop | length | error
    prompt_tokens: int = 0
    completion_tokens: int = 0
    latency_ms: int = 0
    cached: bool = False

    def to_record(self) -> dict:
        # The cached flag is transient run state, not part of the stored response.
        return {
            "text": self.text,
            "finish_reason": self.finish_reason,
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
            "latency_ms": self.latency_ms,
        }

    @classmethod
    def from_record(cls, record: dict, cached: bool = False) -> "ModelResponse":
        return cls(
            text=record["text"],
            finish_reason=record["finish_reason"],
            prompt_tokens=record.get("prompt_tokens", 0),
            completion_tokens=record.get("completion_tokens", 0),
            latency_ms=record.get("latency_ms", 0),
            cached=cached,
        )


def cache_key(endpoint: str, model: str, op: str, payload: Any, params: Optional[dict]) -> str:
    blob = json.dumps(
        {"endpoint": endpoint, "model": model, "op": op, "payload": payload, "params": params},
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class ResponseCache:
    """Content-addressed response store: <dir>/<model>/<first-2-hex>/<digest>.json."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    def _path(self, model: str, key: str) -> Path:
        safe_model = model.replace("/", "_") or "_"
        return self.root / safe_model / key[:2] / f"{key}.json"

    def get(self, model: str, key: str) -> Optional[dict]:
        path = self._path(model, key)
        try:
            raw = path.read_bytes()
        except FileNotFoundError:
            return None
        try:
            return json.loads(raw)
        except json.JSONDecodeError:
            log.warning("evicting corrupt cache entry %s", path)
            path.unlink(missing_ok=True)
            return None

    def put(self, model: str, key: str, record: dict) -> None:
        path = self._path(model, key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(record, fh, sort_keys=True, ensure_ascii=False)
            os.replace(tmp, path)  # atomic: concurrent writers race to one winner
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)


@dataclass
class EndpointConfig:
    base_url: str
    api_key: str = ""
    kind: str = "completions"  # completions | chat
    timeout_s: float = 120.0
    max_retries: int = 3
    backoff_s: float = 0.5

    @classmethod
    def from_env(cls, base_url: Optional[str] = None, **kwargs) -> "EndpointConfig":
        return cls(
            base_url=base_url or os.environ.get("OPENAI_BASE_URL", "http://localhost:8000/v1"),
            api_key=os.environ.get("OPENAI_API_KEY", ""),
            **kwargs,
        )


class ModelClient:
    """Thread-safe client for one endpoint/model pair."""

    def __init__(
        self,
        endpoint: EndpointConfig,
        model: str,
        cache_dir: Optional[str | Path] = None,
        concurrency: int = 4,
        no_think_directive: Optional[dict] = None,
    ) -> None:
        self.endpoint = endpoint
        self.model = model
        self.cache = ResponseCache(cache_dir) if cache_dir else None
        self._semaphore = threading.BoundedSemaphore(concurrency)
        self._concurrency = concurrency
        self.no_think_directive = no_think_directive or {}
        self._http = httpx.Client(
            base_url=endpoint.base_url,
            timeout=endpoint.timeout_s,
            headers={"Authorization": f"Bearer {endpoint.api_key}"} if endpoint.api_key else {},
        )

    def with_model(self, model: str) -> "ModelClient":
        """A client for another model sharing endpoint, cache dir, and bound."""
        clone = object.__new__(ModelClient)
        clone.__dict__.update(self.__dict__)
        clone.model = model
        return clone

    def close(self) -> None:
        self._http.close()

    # -- transport ---------------------------------------------------------

    def _post(self, path: str, body: dict) -> dict:
        last_exc: Optional[Exception] = None
        for attempt in range(self.endpoint.max_retries + 1):
            if attempt:
                time.sleep(self.endpoint.backoff_s * 2 ** (attempt - 1))
            try:
                with self._semaphore:
                    resp = self._http.post(path, json=body)
            except httpx.TransportError as exc:
                last_exc = exc
                continue
            if resp.status_code in RETRYABLE_STATUSES:
                last_exc = TransportError(f"HTTP {resp.status_code} from {path}")
                continue
            if resp.status_code != 200:
                raise TransportError(f"HTTP {resp.status_code} from {path}: {resp.text[:200]}")
            try:
                return resp.json()
            except json.JSONDecodeError as exc:
                raise ProtocolError(f"non-JSON response from {path}") from exc
        raise TransportError(f"retries exhausted for {path}: {last_exc}")

    # -- generation --------------------------------------------------------

    def generate(
        self,
        payload: str,
        params: GenerationParams,
        *,
        think_mode: bool = True,
    ) -> ModelResponse:
        """Generate a completion for a plain-text payload.

        Uses /v1/completions for "completions" endpoints, otherwise a
        single user message on /v1/chat/completions. ``think_mode=False``
        applies the endpoint's no-think directive from the model config.
        """
        request: dict[str, Any] = {"model": self.model, **params.to_payload()}
        if self.endpoint.kind == "chat":
            request["messages"] = [{"role": "user", "content": payload}]
            if not think_mode:
                request.setdefault("chat_template_kwargs", {})["enable_thinking"] = False
            path = "/chat/completions"
        else:
            text_payload = payload
            if not think_mode and self.no_think_directive.get("prefill"):
                text_payload = payload + self.no_think_directive["prefill"]
            request["prompt"] = text_payload
            path = "/completions"

        key = cache_key(self.endpoint.base_url, self.model, "generate", request, None)
        if self.cache is not None:
            stored = self.cache.get(self.model, key)
            if stored is not None:
                return ModelResponse.from_record(stored, cached=True)

        started = time.monotonic()
        data = self._post(path, request)
        latency_ms = int((time.monotonic() - started) * 1000)
        try:
            choice = data["choices"][0]
            text = choice["message"]["content"] if self.endpoint.kind == "chat" else choice["text"]
            finish = choice.get("finish_reason") or "stop"
            usage = data.get("usage", {})
        except (KeyError, IndexError, TypeError) as exc:
            raise ProtocolError(f"malformed completion response: {exc}") from exc
        response = ModelResponse(
            text=text,
            finish_reason=finish,
            prompt_tokens=usage.get("prompt_tokens", 0),
            completion_tokens=usage.get("completion_tokens", 0),
            latency_ms=latency_ms,
        )
        if self.cache is not None:
            self.cache.put(self.model, key, response.to_record())
        return response

    # -- continuation scoring ----------------------------------------------

    def score_continuation(
        self, prompt: str, continuation: str, *, length_normalized: bool = False
    ) -> float:
        """Sum of the continuation tokens' log-probabilities.

        Issues an echoed, zero-new-token completion for prompt+continuation
        and sums log-probabilities over the tokens covering the
        continuation. The continuation must start exactly at a token
        boundary; a straddling tokenization raises ProtocolError rather
        than silently misscoring.

        ``length_normalized`` divides by the continuation token count;
        raw sums are the default and what the evaluation paths use.
        """
        if continuation == "":
            return 0.0
        request = {
            "model": self.model,
            "prompt": prompt + continuation,
            "max_tokens": 0,
            "echo": True,
            "logprobs": 1,
            "temperature": 0.0,
        }
        key = cache_key(self.endpoint.base_url, self.model, "score", request, None)
        stored = self.cache.get(self.model, key) if self.cache is not None else None
        if stored is not None:
            total, count = stored["logprob_sum"], stored["token_count"]
        else:
            data = self._post("/completions", request)
            try:
                lp = data["choices"][0]["logprobs"]
                offsets = lp["text_offset"]
                token_logprobs = lp["token_logprobs"]
            except (KeyError, IndexError, TypeError) as exc:
                raise CapabilityError("endpoint did not return echoed logprobs") from exc
            boundary = len(prompt)
            if boundary not in offsets:
                raise ProtocolError(
                    "continuation does not start at a token boundary; "
                    f"prompt length {boundary} not in text offsets"
                )
            total, count = 0.0, 0
            for offset, logprob in zip(offsets, token_logprobs):
                if offset >= boundary:
                    if logprob is None:
                        raise ProtocolError("missing logprob for a continuation token")
                    total += logprob
                    count += 1
            if self.cache is not None:
                self.cache.put(self.model, key, {"logprob_sum": total, "token_count": count})
        if length_normalized and count:
            return total / count
        return total

    def probe_logprob_support(self) -> None:
        """Fail fast at run setup when the endpoint cannot score continuations."""
        try:
            self.score_continuation("capability probe:", " ok")
        except CapabilityError:
            raise
        except ProtocolError as exc:
            raise CapabilityError(f"logprob probe failed: {exc}") from exc
