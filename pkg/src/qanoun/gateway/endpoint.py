"""Inference endpoint configuration and chat clients.

Provider specifics stay behind one `complete(prompt) -> str` interface; a
scripted stub and a replay client keep the rest of the toolkit testable
offline.  The HTTP client speaks a chat-completions style API with bearer
auth sourced from an environment variable.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import httpx

from ..errors import ConfigurationError, TransportError


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_seconds: float = 0.5  # doubled per attempt

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ConfigurationError("retry policy needs max_attempts >= 1")


@dataclass(frozen=True)
class InferenceEndpoint:
    base_url: str
    model_name: str
    auth_env_var: str = "QANOUN_API_TOKEN"
    timeout_seconds: float = 60.0
    max_in_flight: int = 4
    retry: RetryPolicy = field(default_factory=RetryPolicy)

    def __post_init__(self):
        if self.timeout_seconds <= 0:
            raise ConfigurationError("timeout must be positive")
        if self.max_in_flight < 1:
            raise ConfigurationError("max_in_flight must be >= 1")

    def auth_token(self) -> str | None:
        return os.environ.get(self.auth_env_var)


class ChatClient(Protocol):
    """Minimal completion interface every backend implements."""

    def complete(self, prompt: str) -> str: ...


class HttpChatClient:
    """Chat-completions client with retry/backoff and optional replay logging."""

    def __init__(self, endpoint: InferenceEndpoint, replay_log: str | Path | None = None):
        self.endpoint = endpoint
        self.replay_log = Path(replay_log) if replay_log else None
        self._lock = threading.Lock()

    def complete(self, prompt: str) -> str:
        ep = self.endpoint
        headers = {"Content-Type": "application/json"}
        token = ep.auth_token()
        if token:
            headers["Authorization"] = f"Bearer {token}"
        payload = {
            "model": ep.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        last_error: Exception | None = None
        for attempt in range(ep.retry.max_attempts):
            if attempt:
                time.sleep(ep.retry.backoff_seconds * 2 ** (attempt - 1))
            try:
                resp = httpx.post(
                    f"{ep.base_url.rstrip('/')}/chat/completions",
                    json=payload,
                    headers=headers,
                    timeout=ep.timeout_seconds,
                )
                resp.raise_for_status()
                text = resp.json()["choices"][0]["message"]["content"]
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                last_error = exc
                continue
            self._log(prompt, text)
            return text
        raise TransportError(
            f"endpoint {ep.base_url} failed after {ep.retry.max_attempts} attempts: "
            f"{last_error}"
        )

    def _log(self, prompt: str, response: str) -> None:
        if self.replay_log is None:
            return
        with self._lock, open(self.replay_log, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"prompt": prompt, "response": response}) + "\n")


class ScriptedClient:
    """Deterministic stub: answers from a queue or a prompt-keyed mapping.

    A response that is an Exception instance is raised instead of returned,
    which lets tests script transport failures.
    """

    def __init__(self, responses=None, by_prompt: dict[str, str] | None = None):
        self._responses = list(responses or [])
        self._by_prompt = by_prompt or {}
        self.calls: list[str] = []
        self._lock = threading.Lock()

    def complete(self, prompt: str) -> str:
        with self._lock:
            self.calls.append(prompt)
            if prompt in self._by_prompt:
                return self._by_prompt[prompt]
            if not self._responses:
                raise TransportError("scripted client exhausted")
            item = self._responses.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


class ReplayClient:
    """Replays responses recorded by HttpChatClient's replay log."""

    def __init__(self, replay_log: str | Path):
        self._by_prompt: dict[str, str] = {}
        with open(replay_log, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    obj = json.loads(line)
                    self._by_prompt[obj["prompt"]] = obj["response"]

    def complete(self, prompt: str) -> str:
        try:
            return self._by_prompt[prompt]
        except KeyError:
            raise TransportError("prompt not present in replay log") from None
