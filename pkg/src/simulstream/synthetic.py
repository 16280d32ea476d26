"""Deterministic synthetic corpus for tests and demos.

Real speech-translation models need a GPU; everything here runs without
one. A synthetic utterance places its reference words uniformly along the
audio timeline, and the fake backend translates a buffer span by returning
exactly the words whose timestamps fall inside it. Words close to the
buffer's trailing edge are deliberately garbled until more context arrives,
except on the final query over the whole utterance, which is clean. That
gives the fixtures the shape real systems show: committing early costs
quality, the final flush is as good as offline decoding, and confidence
grows with the amount of buffered speech.

Every quantity is a pure function of the utterance id and the query span,
so a pipeline run, a recorded trace of it, and a later replay all agree
bit for bit.
"""

from __future__ import annotations

import math
import random
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .backends import SpeechRequest, SpeechResult, TranslationRequest
from .core import CANONICAL_SAMPLE_RATE, AudioStream, Hypothesis, save_wav

UNSTABLE_MARGIN_SECONDS = 0.3  # trailing words younger than this come out garbled

_SOURCE_LEXICON = (
    "casa rio luz mesa viento tiempo camino noche puerta cielo "
    "arbol fuego mar piedra voz mano libro calle sol flor "
    "pan agua monte isla nube tren campo perro gato sombra "
    "norte sur este oeste lluvia nieve valle puente torre plaza"
).split()

_TARGET_LEXICON = (
    "house river light table wind time road night door sky "
    "tree fire sea stone voice hand book street sun flower "
    "bread water hill island cloud train field dog cat shadow "
    "north south east west rain snow valley bridge tower square"
).split()


@dataclass(frozen=True)
class SyntheticUtterance:
    id: str
    language: str
    duration: float
    source_text: str
    target_words: tuple[str, ...]

    @property
    def reference(self) -> str:
        return " ".join(self.target_words)

    def word_time(self, index: int) -> float:
        """Moment at which target word ``index`` is fully audible."""
        return (index + 1) * self.duration / len(self.target_words)


def make_utterance(index: int, seed: int = 13) -> SyntheticUtterance:
    rng = random.Random(f"{seed}:{index}")
    duration = round(rng.uniform(6.2, 11.8), 2)
    words_per_second = rng.uniform(1.1, 1.7)
    count = max(4, int(duration * words_per_second))
    picks = [rng.randrange(len(_TARGET_LEXICON)) for _ in range(count)]
    return SyntheticUtterance(
        id=f"utt{index:03d}",
        language="es",
        duration=duration,
        source_text=" ".join(_SOURCE_LEXICON[p] for p in picks),
        target_words=tuple(_TARGET_LEXICON[p] for p in picks),
    )


def make_corpus(size: int = 8, seed: int = 13) -> list[SyntheticUtterance]:
    return [make_utterance(i, seed) for i in range(size)]


def _garble(word: str) -> str:
    tail = "x" if not word.endswith("x") else "z"
    return word[:-1] + tail


def _jitter(utt_id: str, span_start: float, span_end: float, salt: str) -> float:
    rng = random.Random(f"{utt_id}:{salt}:{span_start:.3f}:{span_end:.3f}")
    return rng.random()


def hypothesis_for_span(
    utt: SyntheticUtterance, span_start: float, span_end: float
) -> Hypothesis:
    """What the fake model says for buffered audio covering (start, end]."""
    eps = 1e-9
    final = span_end >= utt.duration - eps
    words = []
    unstable = 0
    for i in range(len(utt.target_words)):
        t = utt.word_time(i)
        if t <= span_start + eps or t > span_end + eps:
            continue
        if not final and t > span_end - UNSTABLE_MARGIN_SECONDS:
            words.append(_garble(utt.target_words[i]))
            unstable += 1
        else:
            words.append(utt.target_words[i])
    text = " ".join(words)
    span = max(span_end - span_start, 0.0)
    no_speech = math.exp(-0.9 * len(words)) * (
        0.9 + 0.2 * _jitter(utt.id, span_start, span_end, "nsp")
    )
    avg_logprob = -0.08 - 0.25 * (unstable / max(len(words), 1)) - 0.02 * _jitter(
        utt.id, span_start, span_end, "lp"
    )
    compute = 0.05 + 0.015 * span + 0.01 * _jitter(utt.id, span_start, span_end, "ct")
    return Hypothesis(
        text=text,
        avg_logprob=round(avg_logprob, 6),
        no_speech_prob=round(min(no_speech, 1.0), 6),
        language=utt.language,
        compute_seconds=round(compute, 6),
    )


class SyntheticSTBackend:
    """ST backend whose answers derive from the utterance's word timeline.

    The buffer span is read off the request's chunk offsets, so this slots
    into the pipeline exactly like a real backend and can be wrapped by the
    trace recorder.
    """

    def __init__(self, utt: SyntheticUtterance):
        self.utt = utt

    def translate(self, req: TranslationRequest) -> Hypothesis:
        span_start = req.audio[0].start_offset
        span_end = req.audio[-1].end_offset
        return hypothesis_for_span(self.utt, span_start, span_end)

    def close(self) -> None:
        pass


class SyntheticTTSBackend:
    """Constant speaking rate, deterministic tiny compute cost."""

    def __init__(self, seconds_per_word: float = 0.32, compute_seconds: float = 0.02):
        self.seconds_per_word = seconds_per_word
        self.compute_seconds = compute_seconds

    def speak(self, req: SpeechRequest) -> SpeechResult:
        n_words = len(req.text.split())
        return SpeechResult(
            audio_duration=round(n_words * self.seconds_per_word, 6),
            compute_seconds=self.compute_seconds,
        )

    def close(self) -> None:
        pass


def synth_wave(utt: SyntheticUtterance) -> AudioStream:
    """Audible stand-in waveform: a hum with a pulse at each word onset."""
    rate = CANONICAL_SAMPLE_RATE
    n = round(utt.duration * rate)
    t = np.arange(n, dtype=np.float32) / rate
    base_hz = 160.0 + 40.0 * (zlib.crc32(utt.id.encode()) % 7)
    wave = 0.15 * np.sin(2 * np.pi * base_hz * t)
    for i in range(len(utt.target_words)):
        onset = utt.word_time(i) - utt.duration / len(utt.target_words)
        idx = round(onset * rate)
        length = min(rate // 10, n - idx)
        if length > 0:
            envelope = np.exp(-np.arange(length, dtype=np.float32) / (rate * 0.02))
            wave[idx : idx + length] += 0.3 * envelope * np.sin(
                2 * np.pi * 2.0 * base_hz * t[idx : idx + length]
            )
    return AudioStream(samples=np.clip(wave, -1.0, 1.0), sample_rate=rate)


def write_dataset(root, corpus: list[SyntheticUtterance]) -> Path:
    """Write wav files plus a manifest; returns the manifest path."""
    root = Path(root)
    audio_dir = root / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = root / "manifest.tsv"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        fh.write(
            "id\taudio_path\tduration_seconds\tsource_text\treference_translation\tlanguage\n"
        )
        for utt in corpus:
            wav_rel = f"audio/{utt.id}.wav"
            save_wav(audio_dir / f"{utt.id}.wav", synth_wave(utt))
            fh.write(
                f"{utt.id}\t{wav_rel}\t{utt.duration}\t{utt.source_text}\t"
                f"{utt.reference}\t{utt.language}\n"
            )
    return manifest_path
