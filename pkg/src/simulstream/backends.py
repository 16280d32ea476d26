"""Pluggable speech-translation and text-to-speech backends.

Three ST backends ship with the package: a deterministic trace-replay
backend for GPU-free runs, a line-delimited-JSON client for an external
model process, and (for tests) whatever implements the two-method protocol.
TTS is a mock with a fixed seconds-per-character rate, the same external
process client, or a thin remote HTTP client keyed by an environment
variable.

Trace files are UTF-8 JSON lines with fields: query_index,
expected_buffer_seconds, expected_prior_text, text, avg_logprob,
no_speech_prob, compute_seconds. Lines starting with '#' are comments.
A trace is only valid for the commit sequence it was recorded under;
the expected_* fields make any divergence a loud error during replay.
"""

from __future__ import annotations

import base64
import json
import os
import subprocess
import threading
import time
import urllib.error
import urllib.request
from dataclasses import asdict, dataclass
from typing import Protocol, Sequence

import numpy as np

from .core import AudioChunk, Hypothesis
from .errors import (
    MalformedTraceError,
    ProtocolError,
    TraceDivergenceError,
    TraceExhaustedError,
    TransportError,
)
from .metrics import normalize_whitespace

BUFFER_SECONDS_TOLERANCE = 0.05

TTS_API_KEY_ENV = "SIMULSTREAM_TTS_API_KEY"


@dataclass(frozen=True)
class TranslationRequest:
    audio: tuple[AudioChunk, ...]  # frame buffer contents, oldest first
    prior_text: str  # committed transcript, used as decoding context
    source_language: str
    request_id: int

    def __post_init__(self):
        if not self.audio:
            raise ValueError("translation request needs at least one chunk")

    @property
    def buffer_seconds(self) -> float:
        return sum(c.duration for c in self.audio)


@dataclass(frozen=True)
class SpeechRequest:
    text: str
    request_id: int

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("speech request text must be non-empty")


@dataclass(frozen=True)
class SpeechResult:
    audio_duration: float  # seconds of synthesized speech
    compute_seconds: float  # wall-clock synthesis cost

    def __post_init__(self):
        if self.audio_duration < 0 or self.compute_seconds < 0:
            raise ValueError("speech result fields must be non-negative")


class STBackend(Protocol):
    def translate(self, req: TranslationRequest) -> Hypothesis: ...

    def close(self) -> None: ...


class TTSBackend(Protocol):
    def speak(self, req: SpeechRequest) -> SpeechResult: ...

    def close(self) -> None: ...


# --- trace replay ---------------------------------------------------------


@dataclass(frozen=True)
class TraceEntry:
    query_index: int
    expected_buffer_seconds: float
    expected_prior_text: str
    text: str
    avg_logprob: float
    no_speech_prob: float
    compute_seconds: float


TRACE_FIELDS = (
    "query_index",
    "expected_buffer_seconds",
    "expected_prior_text",
    "text",
    "avg_logprob",
    "no_speech_prob",
    "compute_seconds",
)


class TraceBackend:
    """Replays a recorded query sequence, validating each request against it."""

    def __init__(self, entries: Sequence[TraceEntry], source: str = "<memory>"):
        self.entries = list(entries)
        self.source = source
        self._served = 0

    def translate(self, req: TranslationRequest) -> Hypothesis:
        if self._served >= len(self.entries):
            raise TraceExhaustedError(
                f"{self.source}: query {self._served} requested but trace has "
                f"only {len(self.entries)} entries"
            )
        entry = self.entries[self._served]
        if abs(req.buffer_seconds - entry.expected_buffer_seconds) > BUFFER_SECONDS_TOLERANCE:
            raise TraceDivergenceError(
                f"{self.source}: query {entry.query_index} got buffer of "
                f"{req.buffer_seconds:.3f}s, trace expects "
                f"{entry.expected_buffer_seconds:.3f}s"
            )
        if normalize_whitespace(req.prior_text) != normalize_whitespace(entry.expected_prior_text):
            raise TraceDivergenceError(
                f"{self.source}: query {entry.query_index} got prior text "
                f"{req.prior_text!r}, trace expects {entry.expected_prior_text!r}"
            )
        self._served += 1
        return Hypothesis(
            text=entry.text,
            avg_logprob=entry.avg_logprob,
            no_speech_prob=entry.no_speech_prob,
            language=req.source_language,
            compute_seconds=entry.compute_seconds,
        )

    def close(self) -> None:
        pass


def trace_load(path) -> TraceBackend:
    """Load a trace file, checking it is well-formed before serving queries."""
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedTraceError(f"{path}:{lineno}: bad JSON: {exc}") from exc
            missing = [f for f in TRACE_FIELDS if f not in obj]
            if missing:
                raise MalformedTraceError(
                    f"{path}:{lineno}: missing fields {missing}"
                )
            try:
                entries.append(
                    TraceEntry(
                        query_index=int(obj["query_index"]),
                        expected_buffer_seconds=float(obj["expected_buffer_seconds"]),
                        expected_prior_text=str(obj["expected_prior_text"]),
                        text=str(obj["text"]),
                        avg_logprob=float(obj["avg_logprob"]),
                        no_speech_prob=float(obj["no_speech_prob"]),
                        compute_seconds=float(obj["compute_seconds"]),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise MalformedTraceError(f"{path}:{lineno}: bad field value: {exc}") from exc
    indices = sorted(e.query_index for e in entries)
    if indices != list(range(len(entries))):
        raise MalformedTraceError(
            f"{path}: query_index values must form a contiguous 0..n-1 "
            f"sequence, got {indices}"
        )
    entries.sort(key=lambda e: e.query_index)
    return TraceBackend(entries, source=str(path))


def trace_filename(utterance_id: str, window_seconds: float, policy_slug: str) -> str:
    """Name under which a recorded trace is stored and later looked up.

    A trace is specific to the (utterance, window, policy) triple because
    the committed context changes the query sequence.
    """
    return f"{utterance_id}__w{window_seconds:g}__{policy_slug}.trace.jsonl"


def write_trace(path, entries: Sequence[TraceEntry], comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        for entry in entries:
            fh.write(json.dumps(asdict(entry), ensure_ascii=False) + "\n")


class RecordingSTBackend:
    """Wraps any ST backend and captures its query/answer pairs as a trace."""

    def __init__(self, inner: STBackend):
        self.inner = inner
        self.entries: list[TraceEntry] = []

    def translate(self, req: TranslationRequest) -> Hypothesis:
        hyp = self.inner.translate(req)
        self.entries.append(
            TraceEntry(
                query_index=len(self.entries),
                expected_buffer_seconds=req.buffer_seconds,
                expected_prior_text=req.prior_text,
                text=hyp.text,
                avg_logprob=hyp.avg_logprob,
                no_speech_prob=hyp.no_speech_prob,
                compute_seconds=hyp.compute_seconds,
            )
        )
        return hyp

    def close(self) -> None:
        self.inner.close()


# --- mock and remote TTS ---------------------------------------------------


class MockTTS:
    """Synthesis stand-in: duration is linear in character count."""

    def __init__(self, rate_seconds_per_char: float = 0.06, compute_seconds: float = 0.0):
        self.rate = rate_seconds_per_char
        self.compute_seconds = compute_seconds

    def speak(self, req: SpeechRequest) -> SpeechResult:
        return SpeechResult(
            audio_duration=len(req.text) * self.rate,
            compute_seconds=self.compute_seconds,
        )

    def close(self) -> None:
        pass


class RemoteTTS:
    """Thin HTTP client for a hosted synthesis service.

    Expects the API key in the environment variable named by
    ``api_key_env`` (default SIMULSTREAM_TTS_API_KEY) and refuses to start
    without it. POSTs {"text": ...} as JSON and expects
    {"audio_duration": seconds, "compute_seconds": seconds} back. Never
    used by the test suite; failures surface as retriable TransportErrors.
    """

    def __init__(self, endpoint: str, api_key_env: str = TTS_API_KEY_ENV, timeout: float = 30.0):
        key = os.environ.get(api_key_env)
        if not key:
            raise TransportError(
                f"remote TTS disabled: set {api_key_env} to enable it"
            )
        self.endpoint = endpoint
        self._key = key
        self.timeout = timeout

    def speak(self, req: SpeechRequest) -> SpeechResult:
        payload = json.dumps({"text": req.text}).encode("utf-8")
        http_req = urllib.request.Request(
            self.endpoint,
            data=payload,
            headers={
                "Content-Type": "application/json",
                "Authorization": f"Bearer {self._key}",
            },
        )
        started = time.monotonic()
        try:
            with urllib.request.urlopen(http_req, timeout=self.timeout) as resp:
                body = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            raise TransportError(f"remote TTS request failed: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"remote TTS returned non-JSON body: {exc}") from exc
        try:
            duration = float(body["audio_duration"])
            compute = float(body.get("compute_seconds", time.monotonic() - started))
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"remote TTS response malformed: {body!r}") from exc
        return SpeechResult(audio_duration=duration, compute_seconds=compute)

    def close(self) -> None:
        pass


# --- external process client -----------------------------------------------


def encode_pcm16(chunks: Sequence[AudioChunk]) -> str:
    """Concatenate chunks into base64 of 16 kHz 16-bit LE PCM."""
    samples = np.concatenate([c.samples for c in chunks])
    pcm = np.round(np.clip(samples, -1.0, 1.0) * 32767.0).astype("<i2")
    return base64.b64encode(pcm.tobytes()).decode("ascii")


class ProcessClient:
    """Line-delimited JSON RPC over a child process's stdin/stdout.

    Requests carry a client-assigned id; responses are matched back by id,
    so a backend that answers out of order still works. One client may be
    shared by several backend wrappers (ids stay globally unique).
    """

    def __init__(self, cmd: Sequence[str]):
        try:
            self.proc = subprocess.Popen(
                list(cmd),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise TransportError(f"could not start backend process {cmd!r}: {exc}") from exc
        self._lock = threading.Lock()
        self._next_id = 0
        self._pending: dict[int, dict] = {}

    def submit(self, payload: dict) -> int:
        """Send one request without waiting for its response; returns its id."""
        with self._lock:
            req_id = self._next_id
            self._next_id += 1
        line = json.dumps({"id": req_id, **payload}, ensure_ascii=False)
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, ValueError, OSError) as exc:
            raise TransportError(f"backend process is gone: {exc}") from exc
        return req_id

    def await_response(self, req_id: int) -> dict:
        """Read responses until the one with ``req_id`` arrives, parking others."""
        while True:
            if req_id in self._pending:
                return self._check(self._pending.pop(req_id))
            line = self.proc.stdout.readline()
            if not line:
                code = self.proc.poll()
                raise TransportError(
                    f"backend process closed its stdout (exit code {code})"
                )
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ProtocolError(f"backend sent non-JSON line {line!r}") from exc
            if not isinstance(obj, dict) or not isinstance(obj.get("id"), int):
                raise ProtocolError(f"backend response lacks an integer id: {line!r}")
            if obj["id"] == req_id:
                return self._check(obj)
            self._pending[obj["id"]] = obj

    @staticmethod
    def _check(obj: dict) -> dict:
        if "error" in obj:
            raise TransportError(f"backend reported an error: {obj['error']}")
        return obj

    def call(self, payload: dict) -> dict:
        return self.await_response(self.submit(payload))

    def close(self) -> None:
        if self.proc.poll() is None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()


class ProcessSTBackend:
    """Speech-translation backend behind a ProcessClient."""

    def __init__(self, client: ProcessClient, owns_client: bool = True):
        self.client = client
        self.owns_client = owns_client

    def translate(self, req: TranslationRequest) -> Hypothesis:
        resp = self.client.call(
            {
                "op": "translate",
                "audio_b64": encode_pcm16(req.audio),
                "prior_text": req.prior_text,
                "language": req.source_language,
            }
        )
        try:
            return Hypothesis(
                text=str(resp["text"]),
                avg_logprob=float(resp["avg_logprob"]),
                no_speech_prob=float(resp["no_speech_prob"]),
                language=req.source_language,
                compute_seconds=float(resp["compute_seconds"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed translate response: {resp!r}") from exc

    def close(self) -> None:
        if self.owns_client:
            self.client.close()


class ProcessTTSBackend:
    """Text-to-speech backend behind a ProcessClient."""

    def __init__(self, client: ProcessClient, owns_client: bool = True):
        self.client = client
        self.owns_client = owns_client

    def speak(self, req: SpeechRequest) -> SpeechResult:
        resp = self.client.call({"op": "speak", "text": req.text})
        try:
            return SpeechResult(
                audio_duration=float(resp["audio_duration"]),
                compute_seconds=float(resp["compute_seconds"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed speak response: {resp!r}") from exc

    def close(self) -> None:
        if self.owns_client:
            self.client.close()
