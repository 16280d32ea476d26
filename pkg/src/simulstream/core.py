"""Domain types for audio streaming, the frame buffer, and the committed transcript.

Audio is mono, float samples in [-1, 1]; the canonical sample rate is 16 kHz.
All timing is in seconds. Types are immutable values: mutating operations
return new instances, so they are safe to pass between workers.
"""

from __future__ import annotations

import wave
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    AudioFormatError,
    ContiguityError,
    EmptySegmentError,
    TranscriptOrderError,
)

CANONICAL_SAMPLE_RATE = 16_000


@dataclass(frozen=True, eq=False)
class AudioChunk:
    """A contiguous span of mono source audio."""

    samples: np.ndarray  # float32, shape (n,), values in [-1, 1]
    sample_rate: int
    start_offset: float  # seconds from utterance start

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise AudioFormatError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.samples.ndim != 1 or len(self.samples) == 0:
            raise AudioFormatError("chunk must hold a non-empty 1-D sample array")
        if self.start_offset < 0:
            raise ValueError(f"start_offset must be non-negative, got {self.start_offset}")

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    @property
    def end_offset(self) -> float:
        return self.start_offset + self.duration


@dataclass(frozen=True)
class FrameBuffer:
    """Unconsumed source audio accumulated since the last emission.

    ``committed_upto`` is the source time already consumed by prior
    emissions; the first chunk of a non-empty buffer starts there.
    """

    chunks: tuple[AudioChunk, ...] = ()
    committed_upto: float = 0.0
    sample_rate: int | None = None  # fixed by the first chunk of the stream

    def duration(self) -> float:
        return sum(c.duration for c in self.chunks)

    @property
    def end_offset(self) -> float:
        if self.chunks:
            return self.chunks[-1].end_offset
        return self.committed_upto

    def is_empty(self) -> bool:
        return not self.chunks

    def append(self, chunk: AudioChunk) -> "FrameBuffer":
        """Return a buffer extended by ``chunk``.

        The chunk must be contiguous with the buffer tail; a tolerance of one
        sample period absorbs floating-point offset drift.
        """
        rate = self.sample_rate
        if rate is None:
            rate = chunk.sample_rate
        elif chunk.sample_rate != rate:
            raise AudioFormatError(
                f"sample rate changed mid-stream: {rate} -> {chunk.sample_rate}"
            )
        if abs(chunk.start_offset - self.end_offset) > 1.0 / rate:
            raise ContiguityError(
                f"chunk starts at {chunk.start_offset:.6f}s but buffer ends at "
                f"{self.end_offset:.6f}s"
            )
        return FrameBuffer(self.chunks + (chunk,), self.committed_upto, rate)

    def clear(self) -> "FrameBuffer":
        """Return an empty buffer with the consumed span folded into committed_upto."""
        return FrameBuffer((), self.committed_upto + self.duration(), self.sample_rate)

    def samples(self) -> np.ndarray:
        """All buffered samples as one array (empty array for an empty buffer)."""
        if not self.chunks:
            return np.zeros(0, dtype=np.float32)
        return np.concatenate([c.samples for c in self.chunks])


@dataclass(frozen=True)
class Hypothesis:
    """One candidate translation returned by the speech-translation backend."""

    text: str
    avg_logprob: float
    no_speech_prob: float
    language: str
    compute_seconds: float

    def __post_init__(self):
        if self.avg_logprob > 0:
            raise ValueError(f"avg_logprob must be <= 0, got {self.avg_logprob}")
        if not 0.0 <= self.no_speech_prob <= 1.0:
            raise ValueError(f"no_speech_prob must be in [0, 1], got {self.no_speech_prob}")
        if self.compute_seconds < 0:
            raise ValueError(f"compute_seconds must be >= 0, got {self.compute_seconds}")


@dataclass(frozen=True)
class TranscriptSegment:
    """One committed piece of spoken output."""

    text: str
    emitted_at: float  # seconds of run time at commit
    source_consumed: float  # source audio consumed at emission
    speech_duration: float = 0.0  # synthesized audio length, 0 if synthesis skipped

    def __post_init__(self):
        if not self.text.strip():
            raise EmptySegmentError("segment text must be non-empty")
        if self.emitted_at < 0 or self.source_consumed < 0 or self.speech_duration < 0:
            raise ValueError("segment times must be non-negative")


@dataclass(frozen=True)
class Transcript:
    """Append-only sequence of committed segments."""

    segments: tuple[TranscriptSegment, ...] = ()

    def commit(self, seg: TranscriptSegment) -> "Transcript":
        if self.segments:
            last = self.segments[-1]
            if seg.emitted_at < last.emitted_at:
                raise TranscriptOrderError(
                    f"segment emitted at {seg.emitted_at:.6f}s before previous "
                    f"{last.emitted_at:.6f}s"
                )
            if seg.source_consumed < last.source_consumed:
                raise TranscriptOrderError(
                    f"source_consumed went backwards: {last.source_consumed:.6f} "
                    f"-> {seg.source_consumed:.6f}"
                )
        # store the trimmed text so full_text() joins deterministically
        seg = replace(seg, text=seg.text.strip())
        return Transcript(self.segments + (seg,))

    def full_text(self) -> str:
        return " ".join(s.text for s in self.segments).strip()

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __getitem__(self, index):
        return self.segments[index]


@dataclass(frozen=True, eq=False)
class AudioStream:
    """A whole source utterance held in memory."""

    samples: np.ndarray  # float32, mono
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise AudioFormatError(f"sample_rate must be positive, got {self.sample_rate}")

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def load_wav(path, target_rate: int = CANONICAL_SAMPLE_RATE) -> AudioStream:
    """Load a RIFF/WAVE file (16-bit signed LE PCM, mono) as normalized floats.

    Inputs at other sample rates are resampled with linear interpolation;
    anything other than mono 16-bit PCM is rejected.
    """
    with wave.open(str(path), "rb") as wf:
        if wf.getnchannels() != 1:
            raise AudioFormatError(f"{path}: expected mono audio, got {wf.getnchannels()} channels")
        if wf.getsampwidth() != 2:
            raise AudioFormatError(f"{path}: expected 16-bit PCM, got {8 * wf.getsampwidth()}-bit")
        rate = wf.getframerate()
        raw = wf.readframes(wf.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float32) / 32767.0
    if rate != target_rate and len(samples) > 0:
        n_out = int(round(len(samples) * target_rate / rate))
        old_t = np.arange(len(samples)) / rate
        new_t = np.arange(n_out) / target_rate
        samples = np.interp(new_t, old_t, samples).astype(np.float32)
        rate = target_rate
    return AudioStream(samples=samples, sample_rate=rate)


def save_wav(path, stream: AudioStream) -> None:
    """Write an AudioStream as 16-bit PCM mono (used by fixtures and demos)."""
    pcm = np.round(np.clip(stream.samples, -1.0, 1.0) * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(stream.sample_rate)
        wf.writeframes(pcm.tobytes())
