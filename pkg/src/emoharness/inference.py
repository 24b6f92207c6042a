"""Chat-completions client with retries, plus completion-to-label parsing.

The client speaks the common chat-completions HTTP shape (single user
message, first choice's content). A deterministic mock can stand in for
the endpoint so end-to-end runs need no network.
"""

from __future__ import annotations

import json
import logging
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import requests

from .corpus import LABEL_RANGES, TRACKS
from .errors import ConfigError, ProtocolError, TransportError

log = logging.getLogger(__name__)

_BACKOFF_BASE_SECONDS = 1.0
_ASCII_DIGITS = "0123456789"


@dataclass(frozen=True)
class EndpointConfig:
    """Connection settings. Only the API key's env var *name* is stored;
    the value is read from the environment per request and never lands in
    any snapshot, log, or report."""

    base_url: str = "http://localhost:8000/v1"
    model_name: str = "mock"
    temperature: float = 0.0
    max_tokens: int = 8
    timeout: float = 30.0
    max_retries: int = 3
    concurrency_limit: int = 4
    api_key_env: str = "EMOHARNESS_API_KEY"

    def __post_init__(self):
        if self.temperature < 0:
            raise ConfigError(f"temperature must be >= 0, got {self.temperature}")
        if self.max_tokens < 1:
            raise ConfigError(f"max_tokens must be >= 1, got {self.max_tokens}")
        if self.timeout <= 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout}")
        if self.max_retries < 0:
            raise ConfigError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.concurrency_limit < 1:
            raise ConfigError(f"concurrency_limit must be >= 1, got {self.concurrency_limit}")

    def as_dict(self) -> dict:
        return {
            "base_url": self.base_url,
            "model_name": self.model_name,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "timeout": self.timeout,
            "max_retries": self.max_retries,
            "concurrency_limit": self.concurrency_limit,
            "api_key_env": self.api_key_env,
        }


@dataclass(frozen=True)
class CompletionRequest:
    snippet_id: str
    emotion: str
    prompt: str


@dataclass
class RawCompletion:
    snippet_id: str
    emotion: str
    prompt: str
    raw_text: str
    latency: float
    attempt_count: int


@dataclass
class PredictionRecord:
    snippet_id: str
    emotion: str
    track: str
    raw_text: str
    parsed: int | None

    @property
    def label_or_zero(self) -> int:
        """Effective label: parse failures count as 0 (emotion absent)."""
        return 0 if self.parsed is None else self.parsed

    def as_dict(self) -> dict:
        return {
            "snippet_id": self.snippet_id,
            "emotion": self.emotion,
            "track": self.track,
            "raw_text": self.raw_text,
            "parsed": self.parsed,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "PredictionRecord":
        return cls(
            snippet_id=payload["snippet_id"],
            emotion=payload["emotion"],
            track=payload["track"],
            raw_text=payload["raw_text"],
            parsed=payload["parsed"],
        )


def parse_label(raw_text: str, track: str) -> int | None:
    """Extract a label from model output; None marks a parse failure.

    The first ASCII digit in the text decides: in range for the track it
    is the label, out of range it is a failure. Non-ASCII digits do not
    count. Failures are data, not errors; scoring resolves them to 0.
    """
    if track not in TRACKS:
        raise ValueError(f"unknown track {track!r}")
    lo, hi = LABEL_RANGES[track]
    for ch in raw_text:
        if ch in _ASCII_DIGITS:
            value = int(ch)
            return value if lo <= value <= hi else None
    return None


def _requests_transport(url: str, payload: dict, headers: dict, timeout: float) -> tuple[int, str]:
    try:
        resp = requests.post(url, json=payload, headers=headers, timeout=timeout)
    except requests.RequestException as exc:
        raise TransportError(f"request to {url} failed: {exc}") from exc
    return resp.status_code, resp.text


def _is_retryable_status(status: int) -> bool:
    return status == 429 or 500 <= status <= 599


@dataclass
class CompletionClient:
    """Issues completions against the endpoint or an in-process mock.

    ``transport``, ``sleep``, and ``rng`` exist for tests; production use
    leaves the defaults in place.
    """

    config: EndpointConfig
    mock: object | None = None
    transport: object = _requests_transport
    sleep: object = time.sleep
    rng: random.Random = field(default_factory=random.Random)

    def complete(self, request: CompletionRequest) -> RawCompletion:
        start = time.monotonic()
        if self.mock is not None:
            raw_text = self.mock.respond(request.prompt)
            attempts = 1
        else:
            raw_text, attempts = self._complete_http(request.prompt)
        return RawCompletion(
            snippet_id=request.snippet_id,
            emotion=request.emotion,
            prompt=request.prompt,
            raw_text=raw_text,
            latency=time.monotonic() - start,
            attempt_count=attempts,
        )

    def complete_all(self, requests_: list[CompletionRequest]) -> list[RawCompletion]:
        """Run requests concurrently; results come back in input order."""
        if not requests_:
            return []
        workers = min(self.config.concurrency_limit, len(requests_))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(self.complete, requests_))

    def _complete_http(self, prompt: str) -> tuple[str, int]:
        url = self.config.base_url.rstrip("/") + "/chat/completions"
        payload = {
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.config.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        attempts_allowed = self.config.max_retries + 1
        last_failure: TransportError | None = None
        for attempt in range(1, attempts_allowed + 1):
            try:
                status, body = self.transport(url, payload, headers, self.config.timeout)
            except TransportError as exc:
                last_failure = exc
            else:
                if status == 200:
                    return self._extract_content(body), attempt
                last_failure = TransportError(f"endpoint returned HTTP {status}", status=status)
                if not _is_retryable_status(status):
                    raise last_failure
            if attempt < attempts_allowed:
                delay = _BACKOFF_BASE_SECONDS * (2 ** (attempt - 1))
                delay += self.rng.uniform(0.0, 0.5 * delay)
                log.warning(
                    "completion attempt %d/%d failed (%s); retrying in %.1fs",
                    attempt,
                    attempts_allowed,
                    last_failure,
                    delay,
                )
                self.sleep(delay)
        raise TransportError(
            f"retries exhausted after {attempts_allowed} attempts: {last_failure}",
            status=last_failure.status if last_failure else None,
        )

    @staticmethod
    def _extract_content(body: str) -> str:
        try:
            parsed = json.loads(body)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"response body is not JSON: {body[:200]!r}") from exc
        try:
            content = parsed["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProtocolError(f"response missing choices[0].message.content: {body[:200]!r}") from exc
        if not isinstance(content, str):
            raise ProtocolError(f"message content is not text: {content!r}")
        return content
