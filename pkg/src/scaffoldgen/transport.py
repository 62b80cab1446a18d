"""Transports that turn an assembled prompt into raw response text.

Two modes: a live HTTP endpoint (chat-completions style) and a recorded
fixture store keyed by the SHA-256 of the prompt body.  Fixture replay is
byte-exact, which makes whole pipeline runs deterministic offline.
"""

from __future__ import annotations

import hashlib
import os
import time
from pathlib import Path
from typing import Protocol

import requests

from .prompts import PromptText

API_KEY_ENV = "SCAFFOLDGEN_API_KEY"
DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"
DEFAULT_MODEL = "gpt-4o"


class TransportError(RuntimeError):
    """Transport failed after exhausting its retry budget."""

    def __init__(self, message: str, attempts: int = 1):
        super().__init__(message)
        self.attempts = attempts


class FixtureMissError(TransportError):
    """Offline mode had no recorded response for a prompt."""

    def __init__(self, prompt_hash: str, directory: Path):
        super().__init__(
            f"no fixture for prompt hash {prompt_hash} under {directory}", attempts=1
        )
        self.prompt_hash = prompt_hash


class LLMTransport(Protocol):
    def send(self, prompt: PromptText) -> str:
        """Return the raw response text for an assembled prompt."""
        ...


def prompt_key(prompt: PromptText) -> str:
    return hashlib.sha256(prompt.body.encode("utf-8")).hexdigest()


class FixtureTransport:
    """Replays recorded responses from ``<directory>/<prompt-hash>.txt``."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        if not self.directory.is_dir():
            raise TransportError(f"fixture directory {self.directory} does not exist")

    def send(self, prompt: PromptText) -> str:
        key = prompt_key(prompt)
        path = self.directory / f"{key}.txt"
        if not path.is_file():
            raise FixtureMissError(key, self.directory)
        return path.read_text(encoding="utf-8")


class RecordingTransport:
    """Wraps another transport and records its responses as fixtures."""

    def __init__(self, inner: LLMTransport, directory: str | Path):
        self.inner = inner
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def send(self, prompt: PromptText) -> str:
        text = self.inner.send(prompt)
        path = self.directory / f"{prompt_key(prompt)}.txt"
        path.write_text(text, encoding="utf-8")
        return text


class LiveTransport:
    """Chat-completions endpoint client with bounded retries.

    The API key comes from the environment, never from config files.
    Generation parameters default to deterministic-leaning settings since
    downstream stages must parse the output.
    """

    def __init__(
        self,
        endpoint: str = DEFAULT_ENDPOINT,
        model: str = DEFAULT_MODEL,
        api_key_env: str = API_KEY_ENV,
        temperature: float = 0.0,
        timeout: float = 120.0,
        max_retries: int = 3,
        backoff: float = 1.0,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.temperature = temperature
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff

    def send(self, prompt: PromptText) -> str:
        api_key = os.environ.get(self.api_key_env, "")
        if not api_key:
            raise TransportError(f"missing API key: set {self.api_key_env}")
        payload = {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": prompt.body}],
        }
        last_error: Exception | None = None
        for attempt in range(1, self.max_retries + 1):
            try:
                response = requests.post(
                    self.endpoint,
                    json=payload,
                    headers={"Authorization": f"Bearer {api_key}"},
                    timeout=self.timeout,
                )
                response.raise_for_status()
                data = response.json()
                text = data["choices"][0]["message"]["content"]
                if not text:
                    raise ValueError("empty completion text")
                return text
            except (requests.RequestException, KeyError, ValueError) as error:
                last_error = error
                if attempt < self.max_retries:
                    time.sleep(self.backoff * (2 ** (attempt - 1)))
        raise TransportError(
            f"transport failed after {self.max_retries} attempts: {last_error}",
            attempts=self.max_retries,
        )
