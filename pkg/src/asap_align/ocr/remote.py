"""Client for a hosted OCR service.

Request: POST {"image": "<base64 PNG>"}. Response: JSON list of
{"text": ..., "vertices": [{"x":..,"y":..} x4]}. Vertices are reduced
to an axis-aligned box, which is all destacking needs; this adapter is
the only place the wire shape is known.

Transient failures (connection errors, 429, 5xx) are retried with
capped exponential backoff; other 4xx responses and malformed payloads
fail immediately since retrying cannot fix them. A semaphore bounds
concurrent in-flight requests when the recognizer is shared across
worker threads. The HTTP session and the sleep function are injectable
so the retry ladder is testable without a network.
"""

from __future__ import annotations

import base64
import io
import logging
import os
import threading
import time
from dataclasses import dataclass

import numpy as np
import requests
from PIL import Image

from asap_align.errors import QuotaError, ServiceError, TransportError
from asap_align.model import Roi
from asap_align.ocr import TextBlock

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RemoteConfig:
    url: str
    api_key_env: str | None = None  # env var holding the bearer token, if the service needs one
    timeout_s: float = 10.0
    max_retries: int = 3  # retries after the first attempt
    backoff_s: float = 0.5
    backoff_cap_s: float = 8.0
    max_in_flight: int = 4


def encode_png(image: np.ndarray) -> str:
    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(image), mode="L").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _to_block(entry: dict) -> TextBlock | None:
    text = str(entry["text"])
    if not text:
        return None
    xs = [int(v["x"]) for v in entry["vertices"]]
    ys = [int(v["y"]) for v in entry["vertices"]]
    box = Roi(min(xs), min(ys), max(max(xs) - min(xs), 1), max(max(ys) - min(ys), 1))
    return TextBlock(text=text, box=box)


class RemoteRecognizer:
    def __init__(self, config: RemoteConfig, session=None, sleep_fn=time.sleep):
        self.config = config
        self._session = session if session is not None else requests.Session()
        self._sleep = sleep_fn
        self._gate = threading.BoundedSemaphore(config.max_in_flight)
        self._headers = {}
        if config.api_key_env:
            key = os.environ.get(config.api_key_env)
            if not key:
                raise ServiceError(f"OCR key env var {config.api_key_env} is not set")
            self._headers["Authorization"] = f"Bearer {key}"

    def recognize(self, image: np.ndarray) -> list[TextBlock]:
        payload = {"image": encode_png(image)}
        last_exc: Exception | None = None
        with self._gate:
            for attempt in range(self.config.max_retries + 1):
                if attempt:
                    delay = min(self.config.backoff_s * 2 ** (attempt - 1), self.config.backoff_cap_s)
                    log.debug("retrying OCR request in %.2fs (attempt %d)", delay, attempt + 1)
                    self._sleep(delay)
                try:
                    resp = self._session.post(
                        self.config.url,
                        json=payload,
                        headers=self._headers,
                        timeout=self.config.timeout_s,
                    )
                except requests.RequestException as exc:
                    last_exc = TransportError(f"request failed: {exc}")
                    continue
                if resp.status_code == 429:
                    last_exc = QuotaError("service rate limit (429)")
                    continue
                if resp.status_code >= 500:
                    last_exc = TransportError(f"service error {resp.status_code}")
                    continue
                if resp.status_code != 200:
                    raise ServiceError(f"request rejected with {resp.status_code}")
                try:
                    entries = resp.json()
                    blocks = [_to_block(e) for e in entries]
                except (ValueError, KeyError, TypeError) as exc:
                    raise ServiceError(f"malformed response: {exc}") from exc
                return [b for b in blocks if b is not None]
        assert last_exc is not None
        raise last_exc
