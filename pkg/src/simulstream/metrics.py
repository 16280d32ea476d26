"""Quality and latency metrics.

Text quality is corpus BLEU-4 with mteval-13a-style tokenization,
case-sensitive, corpus-pooled clipped counts, exponential brevity penalty
and no smoothing (add-k with k = 0), so scores line up with the standard
sacre-style definition. Latency is Average Lagging over per-token delays,
either in source time or computation-aware (wall/simulated emission time).
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import IncompleteLogError

if TYPE_CHECKING:  # pragma: no cover
    from .pipeline import RunLog

NGRAM_ORDER = 4

_WS_RUN = re.compile(r"\s+")


def normalize_whitespace(s: str) -> str:
    """Trim and collapse internal whitespace runs to single spaces."""
    return _WS_RUN.sub(" ", s.strip())


def levenshtein(a: str, b: str) -> int:
    """Character-level minimal edit count (insert/delete/substitute, unit costs)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        append = cur.append
        for j, cb in enumerate(b, 1):
            append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def normalized_edit_distance(a: str, b: str) -> float:
    """levenshtein(a, b) / max(|a|, |b|); 0 when both strings are empty."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


# --- BLEU ---------------------------------------------------------------

_13A_NONDIGIT_PUNCT = re.compile(r"([^0-9])([\.,])")
_13A_PUNCT_NONDIGIT = re.compile(r"([\.,])([^0-9])")
_13A_SYMBOLS = re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])")
_13A_DIGIT_DASH = re.compile(r"([0-9])(-)")


def tokenize_13a(line: str) -> list[str]:
    """Minimal mteval-v13a-equivalent tokenization (the WMT default)."""
    norm = line.replace("<skipped>", "").replace("-\n", "").replace("\n", " ")
    if "&" in norm:
        norm = (
            norm.replace("&quot;", '"')
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">")
        )
    norm = f" {norm} "
    norm = _13A_SYMBOLS.sub(r" \1 ", norm)
    norm = _13A_NONDIGIT_PUNCT.sub(r"\1 \2 ", norm)
    norm = _13A_PUNCT_NONDIGIT.sub(r" \1 \2", norm)
    norm = _13A_DIGIT_DASH.sub(r"\1 \2 ", norm)
    return norm.split()


def _ngram_counts(tokens: list[str], order: int) -> Counter:
    counts = Counter()
    for n in range(1, order + 1):
        for i in range(len(tokens) - n + 1):
            counts[tuple(tokens[i : i + n])] += 1
    return counts


@dataclass(frozen=True)
class BleuScore:
    """Corpus BLEU with its components; score is on the 0-100 scale."""

    score: float
    ngram_precisions: tuple[float, float, float, float]  # fractions in [0, 1]
    brevity_penalty: float

    def __post_init__(self):
        if all(p > 0 for p in self.ngram_precisions):
            geo = math.exp(sum(math.log(p) for p in self.ngram_precisions) / NGRAM_ORDER)
        else:
            geo = 0.0
        expected = self.brevity_penalty * geo * 100.0
        if abs(expected - self.score) > 1e-6:
            raise ValueError(
                f"inconsistent BLEU components: score {self.score} vs {expected}"
            )


def corpus_bleu(hypotheses: list[str], references: list[str]) -> BleuScore:
    """Corpus-level BLEU-4 of one hypothesis per reference.

    Clipped n-gram counts are pooled over the whole corpus; precisions are
    unsmoothed, so a corpus with zero matches at any order scores 0.
    """
    if len(hypotheses) != len(references):
        raise ValueError(
            f"got {len(hypotheses)} hypotheses for {len(references)} references"
        )
    if not hypotheses:
        raise ValueError("corpus_bleu needs at least one sentence pair")

    correct = [0] * NGRAM_ORDER
    total = [0] * NGRAM_ORDER
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_tokens = tokenize_13a(hyp)
        ref_tokens = tokenize_13a(ref)
        hyp_len += len(hyp_tokens)
        ref_len += len(ref_tokens)
        ref_counts = _ngram_counts(ref_tokens, NGRAM_ORDER)
        for ngram, count in _ngram_counts(hyp_tokens, NGRAM_ORDER).items():
            n = len(ngram)
            total[n - 1] += count
            correct[n - 1] += min(count, ref_counts.get(ngram, 0))

    precisions = tuple(
        (correct[n] / total[n]) if total[n] > 0 else 0.0 for n in range(NGRAM_ORDER)
    )
    if hyp_len == 0:
        bp = 0.0
    elif hyp_len < ref_len:
        bp = math.exp(1.0 - ref_len / hyp_len)
    else:
        bp = 1.0
    if all(p > 0 for p in precisions):
        geo = math.exp(sum(math.log(p) for p in precisions) / NGRAM_ORDER)
        score = bp * geo * 100.0
    else:
        score = 0.0
    return BleuScore(score=score, ngram_precisions=precisions, brevity_penalty=bp)


# --- Average Lagging ----------------------------------------------------


@dataclass(frozen=True)
class DelaySequence:
    """Per-token emission delays for one utterance.

    ``delays[i]`` is when target token i+1 was decided, in seconds; the mode
    that produced it (source time vs. wall/simulated time) is the caller's
    concern. ``source_duration`` may be 0 only for an empty delay list.
    """

    delays: tuple[float, ...]
    source_duration: float
    reference_token_count: int

    def __post_init__(self):
        if self.delays and self.source_duration <= 0:
            raise ValueError("source_duration must be positive")
        if self.source_duration < 0:
            raise ValueError("source_duration must be non-negative")
        if self.reference_token_count <= 0:
            raise ValueError("reference_token_count must be positive")
        if any(d < 0 for d in self.delays):
            raise ValueError("delays must be non-negative")
        if any(b < a for a, b in zip(self.delays, self.delays[1:])):
            raise ValueError("delays must be non-decreasing")


def average_lagging(d: DelaySequence) -> float:
    """Mean excess delay over an evenly paced ideal translator.

    AL = (1/tau) * sum_{i=1..tau} [d_i - (i-1) * T_S / n_ref], where tau is
    the first index whose delay reaches the source duration (all remaining
    tokens were decided after the source ended and carry no information
    about lag). Empty delay lists score 0 by definition.
    """
    if not d.delays:
        return 0.0
    tau = len(d.delays)
    for i, delay in enumerate(d.delays, 1):
        if delay >= d.source_duration:
            tau = i
            break
    step = d.source_duration / d.reference_token_count
    return sum(d.delays[i] - i * step for i in range(tau)) / tau


def delays_from_log(log: "RunLog", mode: str, reference: str) -> DelaySequence:
    """Impute per-token delays from a run log's emission events.

    Emission texts are whitespace-tokenized and every token of a segment
    inherits the segment's delay: ``source_consumed`` in ``"source"`` mode or
    ``emitted_at`` (wall/simulated) in ``"computation_aware"`` mode.
    """
    if mode not in ("source", "computation_aware"):
        raise ValueError(f"unknown delay mode: {mode!r}")
    if not log.has_ended():
        raise IncompleteLogError("run log has no StreamEnded event")
    ref_tokens = reference.split()
    if not ref_tokens:
        raise ValueError("reference must contain at least one token")
    delays: list[float] = []
    for em in log.emissions():
        delay = em.source_consumed if mode == "source" else em.at
        delays.extend(delay for _ in em.text.split())
    return DelaySequence(
        delays=tuple(delays),
        source_duration=log.total_source_seconds,
        reference_token_count=len(ref_tokens),
    )
