"""The incremental translation loop.

Source audio is sliced into windows; each consumed window is appended to
the frame buffer, the ST backend is queried over the whole buffer with the
committed transcript as context, and the policy decides: on Speak the text
is committed, handed to the speaker, and the buffer cleared; on Wait the
hypothesis is discarded. Every step is logged with a timestamp so latency
metrics can be derived offline.

Two pacing modes exist. ``realtime`` replays the file at its natural rate
with three workers (pacer, translator, speaker) so the log reflects wall
time. ``unpaced`` runs as fast as the backends allow while a simulated
clock advances by max(window boundary, processing cost); with
``clock="simulated"`` the resulting log is a deterministic function of the
inputs, which is what makes trace replay reproducible. Chunks that arrive
while a slow query is running are batched into the buffer before the next
query; audio is never dropped.
"""

from __future__ import annotations

import json
import logging
import queue
import threading
import time
from collections import deque
from dataclasses import asdict, dataclass
from typing import Callable, Union

from .backends import SpeechRequest, SpeechResult, STBackend, TranslationRequest, TTSBackend
from .core import AudioChunk, AudioStream, FrameBuffer, Transcript, TranscriptSegment
from .errors import IncompleteLogError, TransportError
from .metrics import normalize_whitespace
from .policies import Action, PolicyConfig, PolicyDecision, PolicyInput, decide

logger = logging.getLogger(__name__)

TTS_MAX_ATTEMPTS = 3


@dataclass(frozen=True)
class PipelineConfig:
    window_seconds: float
    policy: PolicyConfig
    pacing: str = "unpaced"  # "realtime" | "unpaced"
    source_language: str = "und"
    clock: str = "simulated"  # "wall" | "simulated"

    def __post_init__(self):
        if self.window_seconds <= 0:
            raise ValueError(f"window_seconds must be positive, got {self.window_seconds}")
        if self.pacing not in ("realtime", "unpaced"):
            raise ValueError(f"unknown pacing {self.pacing!r}")
        if self.clock not in ("wall", "simulated"):
            raise ValueError(f"unknown clock {self.clock!r}")
        if self.clock == "simulated" and self.pacing != "unpaced":
            raise ValueError("the simulated clock requires unpaced pacing")


# --- run log ----------------------------------------------------------------


@dataclass(frozen=True)
class HypothesisSummary:
    text: str
    avg_logprob: float
    no_speech_prob: float
    compute_seconds: float


@dataclass(frozen=True)
class ChunkReceived:
    start_offset: float
    duration: float
    at: float


@dataclass(frozen=True)
class QueryStarted:
    request_id: int
    buffer_seconds: float
    at: float


@dataclass(frozen=True)
class QueryFinished:
    request_id: int
    hypothesis_summary: HypothesisSummary
    at: float


@dataclass(frozen=True)
class Decision:
    request_id: int
    action: str  # "speak" | "wait"
    reason: str
    at: float


@dataclass(frozen=True)
class Emission:
    text: str
    source_consumed: float
    at: float


@dataclass(frozen=True)
class SpeechFinished:
    duration: float
    at: float


@dataclass(frozen=True)
class StreamEnded:
    total_source_seconds: float
    at: float


Event = Union[
    ChunkReceived, QueryStarted, QueryFinished, Decision, Emission, SpeechFinished, StreamEnded
]

_EVENT_KINDS = {
    ChunkReceived: "chunk_received",
    QueryStarted: "query_started",
    QueryFinished: "query_finished",
    Decision: "decision",
    Emission: "emission",
    SpeechFinished: "speech_finished",
    StreamEnded: "stream_ended",
}
_KIND_CLASSES = {v: k for k, v in _EVENT_KINDS.items()}


def _round6(value):
    if isinstance(value, float):
        return round(value, 6)
    if isinstance(value, dict):
        return {k: _round6(v) for k, v in value.items()}
    return value


@dataclass(frozen=True)
class RunLog:
    """Ordered, timestamped record of one pipeline run."""

    events: tuple[Event, ...]

    def has_ended(self) -> bool:
        return any(isinstance(e, StreamEnded) for e in self.events)

    @property
    def total_source_seconds(self) -> float:
        for e in reversed(self.events):
            if isinstance(e, StreamEnded):
                return e.total_source_seconds
        raise IncompleteLogError("run log has no StreamEnded event")

    def emissions(self) -> list[Emission]:
        return [e for e in self.events if isinstance(e, Emission)]

    def to_jsonl(self) -> str:
        lines = []
        for event in self.events:
            obj = {"event": _EVENT_KINDS[type(event)]}
            obj.update(_round6(asdict(event)))
            lines.append(json.dumps(obj, ensure_ascii=False))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "RunLog":
        events = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            kind = obj.pop("event", None)
            if kind not in _KIND_CLASSES:
                raise ValueError(f"line {lineno}: unknown event kind {kind!r}")
            klass = _KIND_CLASSES[kind]
            if klass is QueryFinished:
                obj["hypothesis_summary"] = HypothesisSummary(**obj["hypothesis_summary"])
            events.append(klass(**obj))
        return cls(events=tuple(events))

    @classmethod
    def load(cls, path) -> "RunLog":
        with open(path, encoding="utf-8") as fh:
            return cls.from_jsonl(fh.read())

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_jsonl())

    def validate(self) -> None:
        """Check structural invariants; raises ValueError on violation."""
        last_at = 0.0
        last_decision: Decision | None = None
        chunk_total = 0.0
        for event in self.events:
            if event.at < last_at - 1e-9:
                raise ValueError(
                    f"timestamps go backwards: {last_at} -> {event.at} at {event}"
                )
            last_at = max(last_at, event.at)
            if isinstance(event, ChunkReceived):
                chunk_total += event.duration
            elif isinstance(event, Decision):
                last_decision = event
            elif isinstance(event, Emission):
                if last_decision is None or last_decision.action != Action.SPEAK.value:
                    raise ValueError(f"emission without a preceding speak decision: {event}")
        if self.has_ended() and abs(chunk_total - self.total_source_seconds) > 1e-6:
            raise ValueError(
                f"chunk durations sum to {chunk_total}, StreamEnded says "
                f"{self.total_source_seconds}"
            )


class _LogCollector:
    """Serializes events from all workers into one time-ordered list."""

    def __init__(self, clock: Callable[[], float]):
        self._clock = clock
        self._lock = threading.Lock()
        self.events: list[Event] = []

    def log(self, ctor, **fields) -> Event:
        with self._lock:
            event = ctor(**fields, at=self._clock())
            self.events.append(event)
            return event


# --- slicing ----------------------------------------------------------------


def slice_stream(source: AudioStream, window_seconds: float) -> list[AudioChunk]:
    """Cut a stream into window-sized chunks; the last holds the remainder."""
    if window_seconds <= 0:
        raise ValueError(f"window_seconds must be positive, got {window_seconds}")
    window_samples = max(1, round(window_seconds * source.sample_rate))
    chunks = []
    for start in range(0, len(source.samples), window_samples):
        chunks.append(
            AudioChunk(
                samples=source.samples[start : start + window_samples],
                sample_rate=source.sample_rate,
                start_offset=start / source.sample_rate,
            )
        )
    return chunks


# --- the loop -----------------------------------------------------------------


def run(
    source: AudioStream,
    config: PipelineConfig,
    st: STBackend,
    tts: TTSBackend,
) -> tuple[Transcript, RunLog]:
    """Stream one utterance through the translate/decide/speak loop."""
    chunks = slice_stream(source, config.window_seconds)
    if not chunks:
        log = RunLog(events=(StreamEnded(total_source_seconds=0.0, at=0.0),))
        return Transcript(), log
    if config.pacing == "realtime":
        return _run_realtime(chunks, config, st, tts)
    return _run_unpaced(chunks, config, st, tts)


def _speak_with_retries(tts: TTSBackend, text: str, request_id: int) -> SpeechResult | None:
    last_error = None
    for _ in range(TTS_MAX_ATTEMPTS):
        try:
            return tts.speak(SpeechRequest(text=text, request_id=request_id))
        except TransportError as exc:
            last_error = exc
    logger.warning(
        "TTS failed %d times (%s); committing text with zero speech duration",
        TTS_MAX_ATTEMPTS,
        last_error,
    )
    return None


def _assemble_transcript(records: list[tuple[str, float, float, float]]) -> Transcript:
    transcript = Transcript()
    for text, emitted_at, source_consumed, speech_duration in records:
        transcript = transcript.commit(
            TranscriptSegment(
                text=text,
                emitted_at=emitted_at,
                source_consumed=source_consumed,
                speech_duration=speech_duration,
            )
        )
    return transcript


def _run_unpaced(
    chunks: list[AudioChunk],
    config: PipelineConfig,
    st: STBackend,
    tts: TTSBackend,
) -> tuple[Transcript, RunLog]:
    simulated = config.clock == "simulated"
    t0 = time.monotonic()

    def wall() -> float:
        return time.monotonic() - t0

    events: list[Event] = []
    speech_due: deque[SpeechFinished] = deque()  # simulated speaker track

    def emit(event: Event) -> None:
        while speech_due and speech_due[0].at <= event.at:
            events.append(speech_due.popleft())
        events.append(event)

    total = sum(c.duration for c in chunks)
    pending = deque(chunks)
    arrivals: deque[AudioChunk] = deque()
    sim = 0.0

    def arrive_upto(t: float) -> None:
        while pending and pending[0].end_offset <= t:
            chunk = pending.popleft()
            at = chunk.end_offset if simulated else wall()
            emit(ChunkReceived(start_offset=chunk.start_offset, duration=chunk.duration, at=at))
            arrivals.append(chunk)

    buffer = FrameBuffer()
    committed: list[str] = []
    seg_records: list[tuple[str, float, float, float]] = []
    previous = None
    request_id = 0
    speaker_free = 0.0

    while True:
        if not arrivals:
            if not pending:
                break
            sim = max(sim, pending[0].end_offset)
            arrive_upto(sim)
        while arrivals:
            buffer = buffer.append(arrivals.popleft())
        end_of_stream = not pending

        request = TranslationRequest(
            audio=buffer.chunks,
            prior_text=" ".join(committed),
            source_language=config.source_language,
            request_id=request_id,
        )
        emit(
            QueryStarted(
                request_id=request_id,
                buffer_seconds=buffer.duration(),
                at=sim if simulated else wall(),
            )
        )
        hypothesis = st.translate(request)
        finished = sim + hypothesis.compute_seconds
        arrive_upto(finished)  # chunks that arrived while the query ran
        emit(
            QueryFinished(
                request_id=request_id,
                hypothesis_summary=HypothesisSummary(
                    text=hypothesis.text,
                    avg_logprob=hypothesis.avg_logprob,
                    no_speech_prob=hypothesis.no_speech_prob,
                    compute_seconds=hypothesis.compute_seconds,
                ),
                at=finished if simulated else wall(),
            )
        )
        sim = finished

        decision: PolicyDecision = decide(
            config.policy,
            PolicyInput(
                current=hypothesis,
                previous=previous,
                buffer_duration=buffer.duration(),
                end_of_stream=end_of_stream,
            ),
        )
        emit(
            Decision(
                request_id=request_id,
                action=decision.action.value,
                reason=decision.reason,
                at=sim if simulated else wall(),
            )
        )
        request_id += 1

        if decision.action is Action.SPEAK:
            text = normalize_whitespace(hypothesis.text)
            emitted_at = sim if simulated else wall()
            emit(Emission(text=text, source_consumed=buffer.end_offset, at=emitted_at))
            result = _speak_with_retries(tts, text, request_id - 1)
            duration = 0.0
            if result is not None:
                duration = result.audio_duration
                start = max(sim, speaker_free)
                speaker_free = start + result.compute_seconds + result.audio_duration
                if simulated:
                    speech_due.append(SpeechFinished(duration=duration, at=speaker_free))
                else:
                    emit(SpeechFinished(duration=duration, at=wall()))
            seg_records.append((text, emitted_at, buffer.end_offset, duration))
            committed.append(text)
            buffer = buffer.clear()
            previous = None
        else:
            previous = hypothesis
            if end_of_stream:
                buffer = buffer.clear()  # remaining audio is consumed without output
        if end_of_stream:
            break

    end_at = max(sim, speaker_free) if simulated else wall()
    while speech_due:
        events.append(speech_due.popleft())
    events.append(StreamEnded(total_source_seconds=total, at=end_at))
    return _assemble_transcript(seg_records), RunLog(events=tuple(events))


def _run_realtime(
    chunks: list[AudioChunk],
    config: PipelineConfig,
    st: STBackend,
    tts: TTSBackend,
) -> tuple[Transcript, RunLog]:
    t0 = time.monotonic()
    collector = _LogCollector(lambda: time.monotonic() - t0)
    total = sum(c.duration for c in chunks)

    chunk_queue: queue.SimpleQueue = queue.SimpleQueue()
    speech_queue: queue.SimpleQueue = queue.SimpleQueue()
    speech_durations: dict[int, float] = {}

    def pacer() -> None:
        for chunk in chunks:
            delay = t0 + chunk.end_offset - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            collector.log(
                ChunkReceived, start_offset=chunk.start_offset, duration=chunk.duration
            )
            chunk_queue.put(chunk)
        chunk_queue.put(None)

    def speaker() -> None:
        while True:
            item = speech_queue.get()
            if item is None:
                return
            index, text, request_id = item
            result = _speak_with_retries(tts, text, request_id)
            if result is not None:
                speech_durations[index] = result.audio_duration
                collector.log(SpeechFinished, duration=result.audio_duration)

    pacer_thread = threading.Thread(target=pacer, name="pacer", daemon=True)
    speaker_thread = threading.Thread(target=speaker, name="speaker", daemon=True)
    pacer_thread.start()
    speaker_thread.start()

    buffer = FrameBuffer()
    committed: list[str] = []
    seg_records: list[tuple[str, float, float, float]] = []
    previous = None
    request_id = 0
    ended = False
    try:
        while True:
            fresh: list[AudioChunk] = []
            if not ended:
                item = chunk_queue.get()  # always wait for new audio before re-querying
                if item is None:
                    ended = True
                else:
                    fresh.append(item)
                while not ended:
                    try:
                        item = chunk_queue.get_nowait()
                    except queue.Empty:
                        break
                    if item is None:
                        ended = True
                    else:
                        fresh.append(item)
            for chunk in fresh:
                buffer = buffer.append(chunk)
            if buffer.is_empty():
                break
            end_of_stream = ended

            request = TranslationRequest(
                audio=buffer.chunks,
                prior_text=" ".join(committed),
                source_language=config.source_language,
                request_id=request_id,
            )
            collector.log(
                QueryStarted, request_id=request_id, buffer_seconds=buffer.duration()
            )
            hypothesis = st.translate(request)
            collector.log(
                QueryFinished,
                request_id=request_id,
                hypothesis_summary=HypothesisSummary(
                    text=hypothesis.text,
                    avg_logprob=hypothesis.avg_logprob,
                    no_speech_prob=hypothesis.no_speech_prob,
                    compute_seconds=hypothesis.compute_seconds,
                ),
            )
            decision = decide(
                config.policy,
                PolicyInput(
                    current=hypothesis,
                    previous=previous,
                    buffer_duration=buffer.duration(),
                    end_of_stream=end_of_stream,
                ),
            )
            collector.log(
                Decision,
                request_id=request_id,
                action=decision.action.value,
                reason=decision.reason,
            )
            request_id += 1

            if decision.action is Action.SPEAK:
                text = normalize_whitespace(hypothesis.text)
                event = collector.log(
                    Emission, text=text, source_consumed=buffer.end_offset
                )
                seg_records.append((text, event.at, buffer.end_offset, 0.0))
                speech_queue.put((len(seg_records) - 1, text, request_id - 1))
                committed.append(text)
                buffer = buffer.clear()
                previous = None
            else:
                previous = hypothesis
                if end_of_stream:
                    buffer = buffer.clear()
            if ended and buffer.is_empty():
                break
    finally:
        speech_queue.put(None)
        speaker_thread.join()
        pacer_thread.join()

    collector.log(StreamEnded, total_source_seconds=total)
    seg_records = [
        (text, at, consumed, speech_durations.get(i, 0.0))
        for i, (text, at, consumed, _) in enumerate(seg_records)
    ]
    return _assemble_transcript(seg_records), RunLog(events=tuple(collector.events))
