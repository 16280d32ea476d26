import itertools
import random
import string

import pytest

from oracles import (
    oracle_average_lagging,
    oracle_corpus_bleu,
    oracle_levenshtein,
    oracle_tokenize,
)
from simulstream import (
    DelaySequence,
    IncompleteLogError,
    average_lagging,
    corpus_bleu,
    delays_from_log,
    levenshtein,
    normalize_whitespace,
    normalized_edit_distance,
    tokenize_13a,
)
from simulstream.metrics import BleuScore
from simulstream.pipeline import Emission, QueryStarted, RunLog, StreamEnded


class TestLevenshtein:
    def test_pure_insertions(self):
        assert levenshtein("", "abc") == 3

    def test_classic_pair(self):
        assert levenshtein("kitten", "sitting") == 3

    def test_identity(self):
        assert levenshtein("abc", "abc") == 0

    def test_exhaustive_short_pairs_match_oracle(self):
        alphabet = "abc"
        strings = [
            "".join(letters)
            for n in range(4)
            for letters in itertools.product(alphabet, repeat=n)
        ]
        for a in strings:
            for b in strings:
                assert levenshtein(a, b) == oracle_levenshtein(a, b)

    def test_random_pairs_match_oracle(self):
        rng = random.Random(3)
        for _ in range(300):
            a = "".join(rng.choice("abc") for _ in range(rng.randrange(7)))
            b = "".join(rng.choice("abc") for _ in range(rng.randrange(7)))
            assert levenshtein(a, b) == oracle_levenshtein(a, b)

    def test_symmetry_and_triangle_inequality(self):
        rng = random.Random(5)
        words = [
            "".join(rng.choice("abcd") for _ in range(rng.randrange(6))) for _ in range(40)
        ]
        for a, b, c in zip(words, words[1:], words[2:]):
            assert levenshtein(a, b) == levenshtein(b, a)
            assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


class TestNormalizedEditDistance:
    def test_both_empty(self):
        assert normalized_edit_distance("", "") == 0.0

    def test_maximal(self):
        assert normalized_edit_distance("abcd", "") == 1.0

    def test_trailing_punctuation(self):
        assert normalized_edit_distance("hello there", "hello there!") == pytest.approx(1 / 12)

    def test_bounded(self):
        rng = random.Random(9)
        for _ in range(100):
            a = "".join(rng.choice("xy z") for _ in range(rng.randrange(8)))
            b = "".join(rng.choice("xy z") for _ in range(rng.randrange(8)))
            assert 0.0 <= normalized_edit_distance(a, b) <= 1.0


class TestNormalizeWhitespace:
    def test_collapses_runs_and_trims(self):
        assert normalize_whitespace("  a \t b\n\nc ") == "a b c"


class TestTokenizer:
    @pytest.mark.parametrize(
        "line,expected",
        [
            ("Hello, world!", ["Hello", ",", "world", "!"]),
            ("3.5 km", ["3.5", "km"]),
            ("a.b", ["a", ".", "b"]),
            ("1,000", ["1,000"]),
            ("end.", ["end", "."]),
            ("(yes)", ["(", "yes", ")"]),
            ("x-1 5-x", ["x-1", "5", "-", "x"]),
            ("", []),
        ],
    )
    def test_hand_cases(self, line, expected):
        assert tokenize_13a(line) == expected

    def test_random_strings_match_character_rule_oracle(self):
        rng = random.Random(17)
        pool = string.ascii_letters + string.digits + ".,!?()-:;/&  "
        for _ in range(500):
            line = "".join(rng.choice(pool) for _ in range(rng.randrange(30)))
            assert tokenize_13a(line) == oracle_tokenize(line), repr(line)


class TestCorpusBleu:
    def test_identity_is_exactly_100(self):
        refs = ["the quick brown fox jumps", "over the lazy dog today"]
        assert corpus_bleu(refs, refs).score == 100.0

    def test_clipped_unigram_counting(self):
        result = corpus_bleu(["the the the the"], ["the cat sat down"])
        assert result.ngram_precisions[0] == pytest.approx(0.25)
        assert result.score == 0.0  # no bigram match, unsmoothed

    def test_matches_bruteforce_oracle_on_mixed_pairs(self):
        hyps = [
            "the cat sat on the mat",
            "a quick brown fox",
            "he went to the market yesterday morning",
            "translation quality varies a lot",
            "this sentence is exactly right",
            "numbers like 3.5 and 1,000 appear here",
            "short one",
            "punctuation, it matters!",
            "the the the the the the",
            "final pair of the evaluation set",
        ]
        refs = [
            "the cat sat on the mat",
            "the quick brown fox jumps",
            "he went to the market this morning",
            "translation quality varies widely",
            "this sentence is exactly wrong",
            "numbers like 3.5 and 1,000 appear often",
            "a short one",
            "punctuation, it matters a lot!",
            "the cat sat down",
            "last pair of the evaluation set",
        ]
        ours = corpus_bleu(hyps, refs).score
        assert ours == pytest.approx(oracle_corpus_bleu(hyps, refs), abs=0.1)

    def test_empty_hypothesis_scores_zero(self):
        assert corpus_bleu([""], ["some reference text here"]).score == 0.0

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            corpus_bleu(["a"], ["a", "b"])

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            corpus_bleu([], [])

    def test_brevity_penalty_applied(self):
        result = corpus_bleu(["the cat sat"], ["the cat sat on the mat"])
        assert result.brevity_penalty < 1.0
        assert result.score == pytest.approx(oracle_corpus_bleu(["the cat sat"], ["the cat sat on the mat"]), abs=0.1)

    def test_score_component_consistency_is_enforced(self):
        with pytest.raises(ValueError):
            BleuScore(score=50.0, ngram_precisions=(1.0, 1.0, 1.0, 1.0), brevity_penalty=1.0)


class TestAverageLagging:
    def test_evenly_paced_tokens(self):
        d = DelaySequence(delays=(1.0, 2.0, 3.0, 4.0), source_duration=4.0, reference_token_count=4)
        assert average_lagging(d) == pytest.approx(1.0)

    def test_single_token_at_source_end(self):
        d = DelaySequence(delays=(5.0,), source_duration=5.0, reference_token_count=1)
        assert average_lagging(d) == pytest.approx(5.0)

    def test_cutoff_at_first_post_source_token(self):
        d = DelaySequence(delays=(4.0, 4.0), source_duration=4.0, reference_token_count=2)
        assert average_lagging(d) == pytest.approx(4.0)

    def test_empty_delays_define_zero(self):
        d = DelaySequence(delays=(), source_duration=0.0, reference_token_count=3)
        assert average_lagging(d) == 0.0

    def test_randomized_sequences_match_direct_sum(self):
        rng = random.Random(23)
        for _ in range(20):
            n = rng.randrange(1, 12)
            source = rng.uniform(2.0, 10.0)
            deltas = [rng.uniform(0.0, 2.0) for _ in range(n)]
            delays = []
            t = rng.uniform(0.0, 1.5)
            for step in deltas:
                delays.append(round(t, 4))
                t += step
            d = DelaySequence(
                delays=tuple(delays),
                source_duration=source,
                reference_token_count=rng.randrange(1, 15),
            )
            expected = oracle_average_lagging(d.delays, d.source_duration, d.reference_token_count)
            assert average_lagging(d) == pytest.approx(expected, abs=1e-9)

    def test_translation_equivariance_below_cutoff(self):
        base = (0.5, 1.0, 1.5)
        shift = 0.75
        d0 = DelaySequence(delays=base, source_duration=10.0, reference_token_count=4)
        d1 = DelaySequence(
            delays=tuple(x + shift for x in base), source_duration=10.0, reference_token_count=4
        )
        assert average_lagging(d1) - average_lagging(d0) == pytest.approx(shift)

    def test_delays_must_be_non_decreasing(self):
        with pytest.raises(ValueError):
            DelaySequence(delays=(2.0, 1.0), source_duration=4.0, reference_token_count=2)

    def test_source_duration_positive_when_delays_exist(self):
        with pytest.raises(ValueError):
            DelaySequence(delays=(1.0,), source_duration=0.0, reference_token_count=2)


def _log(events) -> RunLog:
    return RunLog(events=tuple(events))


class TestDelaysFromLog:
    def test_tokens_inherit_segment_delay(self):
        log = _log(
            [
                Emission(text="hello world", source_consumed=2.0, at=2.3),
                StreamEnded(total_source_seconds=2.0, at=2.3),
            ]
        )
        source = delays_from_log(log, "source", "bonjour le monde")
        ca = delays_from_log(log, "computation_aware", "bonjour le monde")
        assert source.delays == (2.0, 2.0)
        assert ca.delays == (2.3, 2.3)
        assert source.reference_token_count == 3

    def test_multiple_emissions(self):
        log = _log(
            [
                Emission(text="one", source_consumed=1.0, at=1.1),
                Emission(text="two three", source_consumed=3.0, at=3.2),
                StreamEnded(total_source_seconds=3.0, at=3.2),
            ]
        )
        d = delays_from_log(log, "source", "ref tokens here")
        assert d.delays == (1.0, 3.0, 3.0)

    def test_no_emissions_yield_empty_delays(self):
        log = _log([StreamEnded(total_source_seconds=4.0, at=4.0)])
        d = delays_from_log(log, "source", "some ref")
        assert d.delays == ()
        assert average_lagging(d) == 0.0

    def test_incomplete_log_rejected(self):
        log = _log([QueryStarted(request_id=0, buffer_seconds=2.0, at=2.0)])
        with pytest.raises(IncompleteLogError):
            delays_from_log(log, "source", "ref")

    def test_unknown_mode_rejected(self):
        log = _log([StreamEnded(total_source_seconds=4.0, at=4.0)])
        with pytest.raises(ValueError):
            delays_from_log(log, "wall", "ref")

    def test_empty_reference_rejected(self):
        log = _log([StreamEnded(total_source_seconds=4.0, at=4.0)])
        with pytest.raises(ValueError):
            delays_from_log(log, "source", "   ")
