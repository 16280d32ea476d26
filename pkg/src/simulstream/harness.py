"""Dataset manifests, batch evaluation, and report rendering.

A manifest is a TSV with columns id, audio_path, duration_seconds,
source_text, reference_translation, language; audio paths are resolved
against the manifest's directory unless an explicit root is given. A sweep
runs every selected utterance through every (policy, window) cell and
reduces each cell to corpus BLEU plus mean average lagging in source time
and computation-aware form. Backend failures on one utterance are recorded
and skipped; they never abort the whole sweep.
"""

from __future__ import annotations

import csv
import io
import logging
import random
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .backends import (
    RecordingSTBackend,
    STBackend,
    TTSBackend,
    trace_filename,
    trace_load,
    write_trace,
)
from .core import Transcript, load_wav
from .errors import ManifestError, SimulstreamError
from .metrics import average_lagging, corpus_bleu, delays_from_log, tokenize_13a
from .pipeline import PipelineConfig, RunLog, run
from .policies import PolicyConfig

logger = logging.getLogger(__name__)

MANIFEST_COLUMNS = (
    "id",
    "audio_path",
    "duration_seconds",
    "source_text",
    "reference_translation",
    "language",
)

ABSENT_CELL = "—"  # em dash shown for cells with no completed runs


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    audio_path: Path
    duration_seconds: float
    source_text: str
    reference_translation: str
    language: str


STFactory = Callable[[ManifestEntry, float, PolicyConfig], STBackend]
TTSFactory = Callable[[], TTSBackend]


def load_manifest(path, audio_root=None) -> list[ManifestEntry]:
    """Parse a manifest; rows whose audio file is missing are skipped."""
    path = Path(path)
    root = Path(audio_root) if audio_root is not None else path.parent
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    skipped = 0
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        if reader.fieldnames is None:
            raise ManifestError(f"{path}: manifest is empty")
        missing = [c for c in MANIFEST_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise ManifestError(f"{path}: missing columns {missing}")
        for lineno, row in enumerate(reader, 2):
            if any(row.get(c) is None for c in MANIFEST_COLUMNS):
                raise ManifestError(f"{path}:{lineno}: wrong number of fields")
            try:
                duration = float(row["duration_seconds"])
            except ValueError as exc:
                raise ManifestError(
                    f"{path}:{lineno}: bad duration {row['duration_seconds']!r}"
                ) from exc
            if duration <= 0:
                raise ManifestError(f"{path}:{lineno}: duration must be positive")
            if not row["id"]:
                raise ManifestError(f"{path}:{lineno}: empty id")
            if row["id"] in seen:
                raise ManifestError(f"{path}:{lineno}: duplicate id {row['id']!r}")
            if not row["reference_translation"].strip():
                raise ManifestError(f"{path}:{lineno}: empty reference translation")
            audio_path = root / row["audio_path"]
            if not audio_path.is_file():
                logger.warning("%s:%d: audio file %s missing, row skipped", path, lineno, audio_path)
                skipped += 1
                continue
            seen.add(row["id"])
            entries.append(
                ManifestEntry(
                    id=row["id"],
                    audio_path=audio_path,
                    duration_seconds=duration,
                    source_text=row["source_text"],
                    reference_translation=row["reference_translation"],
                    language=row["language"],
                )
            )
    if skipped:
        logger.warning("%s: skipped %d rows with missing audio", path, skipped)
    return entries


def filter_entries(
    entries: Sequence[ManifestEntry],
    min_duration: float = 6.0,
    limit: int | None = 75,
    seed: int | None = None,
) -> list[ManifestEntry]:
    """Length-filter, then deterministically subsample to ``limit``.

    Survivors are sorted by id; a seed shuffles them reproducibly before
    the cap. The result is returned sorted by id again, which makes the
    filter idempotent for fixed parameters.
    """
    if min_duration < 0:
        raise ValueError("min_duration must be non-negative")
    kept = sorted(
        (e for e in entries if e.duration_seconds >= min_duration), key=lambda e: e.id
    )
    if seed is not None:
        random.Random(seed).shuffle(kept)
    if limit is not None:
        if len(kept) < limit:
            logger.warning("only %d utterances survive the filter (wanted %d)", len(kept), limit)
        kept = kept[:limit]
    return sorted(kept, key=lambda e: e.id)


# --- runs -------------------------------------------------------------------


@dataclass(frozen=True)
class RunOutcome:
    entry: ManifestEntry
    transcript: Transcript | None
    log: RunLog | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def run_entry(
    entry: ManifestEntry,
    window_seconds: float,
    policy: PolicyConfig,
    st: STBackend,
    tts: TTSBackend,
    pacing: str = "unpaced",
    clock: str = "simulated",
) -> RunOutcome:
    config = PipelineConfig(
        window_seconds=window_seconds,
        policy=policy,
        pacing=pacing,
        source_language=entry.language,
        clock=clock,
    )
    try:
        source = load_wav(entry.audio_path)
        transcript, log = run(source, config, st, tts)
    except (SimulstreamError, OSError) as exc:
        logger.warning("run failed for %s: %s", entry.id, exc)
        return RunOutcome(entry=entry, transcript=None, log=None, error=str(exc))
    return RunOutcome(entry=entry, transcript=transcript, log=log)


def run_cell(
    entries: Sequence[ManifestEntry],
    window_seconds: float,
    policy: PolicyConfig,
    st_factory: STFactory,
    tts_factory: TTSFactory,
    pacing: str = "unpaced",
    clock: str = "simulated",
) -> list[RunOutcome]:
    """Run every utterance through one (policy, window) configuration."""
    outcomes = []
    for entry in entries:
        st = None
        tts = None
        try:
            st = st_factory(entry, window_seconds, policy)
            tts = tts_factory()
            outcome = run_entry(entry, window_seconds, policy, st, tts, pacing, clock)
        except (SimulstreamError, OSError) as exc:
            logger.warning("run failed for %s: %s", entry.id, exc)
            outcome = RunOutcome(entry=entry, transcript=None, log=None, error=str(exc))
        finally:
            if st is not None:
                st.close()
            if tts is not None:
                tts.close()
        outcomes.append(outcome)
    return outcomes


# --- evaluation ---------------------------------------------------------------


@dataclass(frozen=True)
class CellMetrics:
    """Pooled metrics over the completed runs of one configuration.

    bleu/al/al_ca are None when no run completed, so reports can show the
    cell as absent rather than a misleading zero.
    """

    bleu: float | None
    al: float | None
    al_ca: float | None
    segments: int
    tokens: int
    n_examples: int
    failures: int

    def as_dict(self) -> dict:
        return {
            "bleu": self.bleu,
            "al": self.al,
            "al_ca": self.al_ca,
            "segments": self.segments,
            "tokens": self.tokens,
        }


def evaluate_outcomes(outcomes: Sequence[RunOutcome]) -> CellMetrics:
    ok = [o for o in outcomes if o.ok]
    failures = len(outcomes) - len(ok)
    if not ok:
        return CellMetrics(
            bleu=None, al=None, al_ca=None, segments=0, tokens=0, n_examples=0, failures=failures
        )
    hypotheses = [o.transcript.full_text() for o in ok]
    references = [o.entry.reference_translation for o in ok]
    al_values = []
    al_ca_values = []
    for o in ok:
        reference = o.entry.reference_translation
        al_values.append(average_lagging(delays_from_log(o.log, "source", reference)))
        al_ca_values.append(
            average_lagging(delays_from_log(o.log, "computation_aware", reference))
        )
    return CellMetrics(
        bleu=corpus_bleu(hypotheses, references).score,
        al=statistics.mean(al_values),
        al_ca=statistics.mean(al_ca_values),
        segments=sum(len(o.transcript) for o in ok),
        tokens=sum(len(tokenize_13a(h)) for h in hypotheses),
        n_examples=len(ok),
        failures=failures,
    )


def metrics_from_logs(
    pairs: Sequence[tuple[ManifestEntry, RunLog]],
) -> CellMetrics:
    """Recompute cell metrics from saved run logs alone.

    The committed hypothesis is reassembled from the emission events, so
    this gives the same numbers as evaluating live outcomes.
    """
    if not pairs:
        return CellMetrics(
            bleu=None, al=None, al_ca=None, segments=0, tokens=0, n_examples=0, failures=0
        )
    hypotheses = []
    al_values = []
    al_ca_values = []
    segments = 0
    for entry, log in pairs:
        reference = entry.reference_translation
        emissions = log.emissions()
        hypotheses.append(" ".join(e.text for e in emissions))
        segments += len(emissions)
        al_values.append(average_lagging(delays_from_log(log, "source", reference)))
        al_ca_values.append(
            average_lagging(delays_from_log(log, "computation_aware", reference))
        )
    references = [entry.reference_translation for entry, _ in pairs]
    return CellMetrics(
        bleu=corpus_bleu(hypotheses, references).score,
        al=statistics.mean(al_values),
        al_ca=statistics.mean(al_ca_values),
        segments=segments,
        tokens=sum(len(tokenize_13a(h)) for h in hypotheses),
        n_examples=len(pairs),
        failures=0,
    )


# --- sweeps -------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    windows: tuple[float, ...]
    policies: tuple[PolicyConfig, ...]
    min_duration: float = 6.0
    limit: int = 75
    seed: int | None = None
    pacing: str = "unpaced"
    clock: str = "simulated"

    def __post_init__(self):
        if not self.windows or not self.policies:
            raise ValueError("sweep needs at least one window and one policy")
        if self.limit < 1:
            raise ValueError("limit must be at least 1")


@dataclass(frozen=True)
class ReportRow:
    policy_label: str
    window_seconds: float
    bleu: float | None
    al_seconds: float | None
    al_ca_seconds: float | None
    n_examples: int
    failures: int


def run_sweep(
    entries: Sequence[ManifestEntry],
    spec: SweepSpec,
    st_factory: STFactory,
    tts_factory: TTSFactory,
) -> list[ReportRow]:
    selected = filter_entries(entries, spec.min_duration, spec.limit, spec.seed)
    rows = []
    for policy in spec.policies:
        for window in spec.windows:
            outcomes = run_cell(
                selected, window, policy, st_factory, tts_factory, spec.pacing, spec.clock
            )
            m = evaluate_outcomes(outcomes)
            rows.append(
                ReportRow(
                    policy_label=policy.label(),
                    window_seconds=window,
                    bleu=m.bleu,
                    al_seconds=m.al,
                    al_ca_seconds=m.al_ca,
                    n_examples=m.n_examples,
                    failures=m.failures,
                )
            )
    return rows


# --- trace recording ----------------------------------------------------------


def trace_st_factory(trace_dir) -> STFactory:
    """Factory that replays the trace recorded for each (utterance, cell)."""
    trace_dir = Path(trace_dir)

    def factory(entry: ManifestEntry, window: float, policy: PolicyConfig) -> STBackend:
        return trace_load(trace_dir / trace_filename(entry.id, window, policy.slug()))

    return factory


def record_traces(
    entries: Sequence[ManifestEntry],
    windows: Sequence[float],
    policies: Sequence[PolicyConfig],
    st_factory: STFactory,
    tts_factory: TTSFactory,
    trace_dir,
) -> list[Path]:
    """Run each cell against a live backend and persist the query sequences.

    Recording always uses the deterministic unpaced schedule so a later
    replay drains chunks into the buffer exactly the way the recorder did.
    """
    trace_dir = Path(trace_dir)
    trace_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for policy in policies:
        for window in windows:
            for entry in entries:
                recorder = RecordingSTBackend(st_factory(entry, window, policy))
                tts = tts_factory()
                try:
                    outcome = run_entry(entry, window, policy, recorder, tts)
                finally:
                    recorder.close()
                    tts.close()
                if not outcome.ok:
                    logger.warning(
                        "not writing a trace for %s (w=%g, %s): %s",
                        entry.id,
                        window,
                        policy.slug(),
                        outcome.error,
                    )
                    continue
                path = trace_dir / trace_filename(entry.id, window, policy.slug())
                write_trace(
                    path,
                    recorder.entries,
                    comment=(
                        f"utterance {entry.id}, window {window:g}s, "
                        f"policy {policy.label()}"
                    ),
                )
                written.append(path)
    return written


# --- report rendering ---------------------------------------------------------


def render_csv(rows: Sequence[ReportRow]) -> str:
    """CSV report; floats use repr so parsing the file recovers exact values."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["policy", "window_seconds", "bleu", "al_seconds", "al_ca_seconds", "n_examples", "failures"]
    )
    for row in rows:
        writer.writerow(
            [
                row.policy_label,
                repr(row.window_seconds),
                "" if row.bleu is None else repr(row.bleu),
                "" if row.al_seconds is None else repr(row.al_seconds),
                "" if row.al_ca_seconds is None else repr(row.al_ca_seconds),
                row.n_examples,
                row.failures,
            ]
        )
    return buf.getvalue()


def render_markdown(rows: Sequence[ReportRow]) -> str:
    """Policy-by-window grid; each cell is BLEU with AL_CA in parentheses."""
    windows: list[float] = []
    labels: list[str] = []
    cells: dict[tuple[str, float], str] = {}
    for row in rows:
        if row.window_seconds not in windows:
            windows.append(row.window_seconds)
        if row.policy_label not in labels:
            labels.append(row.policy_label)
        if row.bleu is None or row.al_ca_seconds is None:
            cells[(row.policy_label, row.window_seconds)] = ABSENT_CELL
        else:
            cells[(row.policy_label, row.window_seconds)] = (
                f"{row.bleu:.1f} ({row.al_ca_seconds:.1f})"
            )
    lines = [
        "| Policy | " + " | ".join(f"w={w:g}s" for w in windows) + " |",
        "| --- |" + " --- |" * len(windows),
    ]
    for label in labels:
        values = [cells.get((label, w), ABSENT_CELL) for w in windows]
        lines.append(f"| {label} | " + " | ".join(values) + " |")
    lines.append("")
    lines.append(
        "Cells show BLEU with computation-aware average lagging (seconds, "
        "mean over utterances) in parentheses."
    )
    return "\n".join(lines) + "\n"


def emit_report(rows: Sequence[ReportRow], fmt: str) -> str:
    if not rows:
        raise ValueError("report needs at least one row")
    if fmt == "csv":
        return render_csv(rows)
    if fmt == "markdown":
        return render_markdown(rows)
    raise ValueError(f"unknown report format {fmt!r}")
