"""Command-line front end.

Four subcommands: ``run`` streams one utterance and prints its transcript
and metrics, ``sweep`` runs the full policy-by-window grid and renders a
report, ``metrics`` recomputes scores from previously saved run logs, and
``record-trace`` drives a live external backend once and saves its query
sequences so later runs need no model at all.
"""

from __future__ import annotations

import argparse
import json
import logging
import shlex
import sys
from pathlib import Path

from .backends import MockTTS, ProcessClient, ProcessSTBackend, ProcessTTSBackend
from .errors import SimulstreamError
from .harness import (
    RunLog,
    SweepSpec,
    emit_report,
    evaluate_outcomes,
    filter_entries,
    load_manifest,
    metrics_from_logs,
    record_traces,
    run_entry,
    run_sweep,
    trace_st_factory,
)
from .policies import parse_policy

logger = logging.getLogger(__name__)

DEFAULT_SWEEP_POLICIES = ("greedy", "offline", "cap:0.9", "cp:0.75")
RUNLOG_SUFFIX = ".runlog.jsonl"


def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--manifest", required=True, help="dataset manifest TSV")
    p.add_argument("--audio-root", default=None, help="base directory for audio paths")
    p.add_argument(
        "--min-duration", type=float, default=6.0, help="shortest utterance kept (seconds)"
    )
    p.add_argument("--limit", type=int, default=75, help="max utterances after filtering")
    p.add_argument("--seed", type=int, default=None, help="seed for utterance subsampling")


def _add_backend_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--backend",
        choices=("trace", "process"),
        default="trace",
        help="speech-translation backend kind",
    )
    p.add_argument("--trace-dir", default=None, help="directory of recorded trace files")
    p.add_argument(
        "--backend-cmd",
        default=None,
        help="command line of the external model process (process backend)",
    )
    p.add_argument(
        "--pace",
        choices=("realtime", "unpaced"),
        default="unpaced",
        help="feed audio at its natural rate, or as fast as possible",
    )


def _add_single_policy_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--policy",
        default="greedy",
        help="greedy | offline | cap[:gamma] | cp[:alpha]",
    )
    p.add_argument("--gamma", type=float, default=None, help="confidence threshold for cap")
    p.add_argument("--alpha", type=float, default=None, help="edit-distance threshold for cp")


def _add_multi_policy_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--policy",
        action="append",
        default=None,
        help="repeatable; greedy | offline | cap:gamma | cp:alpha "
        f"(default: {', '.join(DEFAULT_SWEEP_POLICIES)})",
    )
    p.add_argument("--gamma", type=float, default=None, help="gamma for a bare 'cap'")
    p.add_argument("--alpha", type=float, default=None, help="alpha for a bare 'cp'")


def _pacing_clock(pace: str) -> tuple[str, str]:
    if pace == "realtime":
        return "realtime", "wall"
    return "unpaced", "simulated"


def _make_st(args) -> tuple:
    """Build (st_factory, cleanup callable) from --backend flags."""
    if args.backend == "trace":
        if not args.trace_dir:
            raise SystemExit("--backend trace requires --trace-dir")
        return trace_st_factory(args.trace_dir), lambda: None
    if not args.backend_cmd:
        raise SystemExit("--backend process requires --backend-cmd")
    client = ProcessClient(shlex.split(args.backend_cmd))

    def factory(entry, window, policy):
        return ProcessSTBackend(client, owns_client=False)

    return factory, client.close


def cmd_run(args) -> int:
    entries = load_manifest(args.manifest, args.audio_root)
    if args.id is not None:
        chosen = [e for e in entries if e.id == args.id]
        if not chosen:
            print(f"no manifest entry with id {args.id!r}", file=sys.stderr)
            return 1
        entry = chosen[0]
    else:
        selected = filter_entries(entries, args.min_duration, args.limit, args.seed)
        if not selected:
            print("no utterances survive the filter", file=sys.stderr)
            return 1
        entry = selected[0]
    policy = parse_policy(args.policy, args.gamma, args.alpha)
    pacing, clock = _pacing_clock(args.pace)
    st_factory, cleanup = _make_st(args)
    st = None
    try:
        st = st_factory(entry, args.window, policy)
        outcome = run_entry(entry, args.window, policy, st, MockTTS(), pacing, clock)
    finally:
        if st is not None:
            st.close()
        cleanup()
    if not outcome.ok:
        print(f"run failed for {entry.id}: {outcome.error}", file=sys.stderr)
        return 1
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        outcome.log.save(out_dir / f"{entry.id}{RUNLOG_SUFFIX}")
    print(outcome.transcript.full_text())
    print(json.dumps(evaluate_outcomes([outcome]).as_dict()))
    return 0


def cmd_sweep(args) -> int:
    entries = load_manifest(args.manifest, args.audio_root)
    policy_specs = args.policy or list(DEFAULT_SWEEP_POLICIES)
    policies = tuple(parse_policy(s, args.gamma, args.alpha) for s in policy_specs)
    pacing, clock = _pacing_clock(args.pace)
    spec = SweepSpec(
        windows=tuple(args.window or [1.0, 2.0]),
        policies=policies,
        min_duration=args.min_duration,
        limit=args.limit,
        seed=args.seed,
        pacing=pacing,
        clock=clock,
    )
    st_factory, cleanup = _make_st(args)
    try:
        rows = run_sweep(entries, spec, st_factory, MockTTS)
    finally:
        cleanup()
    text = emit_report(rows, args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_metrics(args) -> int:
    entries = load_manifest(args.manifest, args.audio_root)
    by_id = {e.id: e for e in entries}
    pairs = []
    log_dir = Path(args.logs)
    for path in sorted(log_dir.glob(f"*{RUNLOG_SUFFIX}")):
        utt_id = path.name[: -len(RUNLOG_SUFFIX)]
        entry = by_id.get(utt_id)
        if entry is None:
            logger.warning("%s has no manifest entry, skipped", path.name)
            continue
        pairs.append((entry, RunLog.load(path)))
    if not pairs:
        print(f"no run logs under {log_dir} match the manifest", file=sys.stderr)
        return 1
    print(json.dumps(metrics_from_logs(pairs).as_dict()))
    return 0


def cmd_record_trace(args) -> int:
    entries = load_manifest(args.manifest, args.audio_root)
    selected = filter_entries(entries, args.min_duration, args.limit, args.seed)
    if not selected:
        print("no utterances survive the filter", file=sys.stderr)
        return 1
    policy_specs = args.policy or list(DEFAULT_SWEEP_POLICIES)
    policies = tuple(parse_policy(s, args.gamma, args.alpha) for s in policy_specs)
    windows = tuple(args.window or [1.0, 2.0])
    if not args.backend_cmd:
        raise SystemExit("record-trace requires --backend-cmd")
    client = ProcessClient(shlex.split(args.backend_cmd))

    def st_factory(entry, window, policy):
        return ProcessSTBackend(client, owns_client=False)

    if args.tts == "process":
        tts_factory = lambda: ProcessTTSBackend(client, owns_client=False)  # noqa: E731
    else:
        tts_factory = MockTTS
    try:
        written = record_traces(
            selected, windows, policies, st_factory, tts_factory, args.trace_dir
        )
    finally:
        client.close()
    print(f"wrote {len(written)} trace files to {args.trace_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulstream",
        description="simultaneous speech translation over pluggable backends",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="stream one utterance, print transcript and metrics")
    _add_data_args(p_run)
    _add_backend_args(p_run)
    _add_single_policy_args(p_run)
    p_run.add_argument("--id", default=None, help="utterance id (default: first after filtering)")
    p_run.add_argument("--window", type=float, default=2.0, help="chunk size in seconds")
    p_run.add_argument("--out", default=None, help="directory for <id>.runlog.jsonl")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the policy-by-window grid and report")
    _add_data_args(p_sweep)
    _add_backend_args(p_sweep)
    _add_multi_policy_args(p_sweep)
    p_sweep.add_argument(
        "--window",
        action="append",
        type=float,
        default=None,
        help="repeatable; chunk sizes in seconds (default: 1 and 2)",
    )
    p_sweep.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    p_sweep.add_argument("--out", default=None, help="report file (default: stdout)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_metrics = sub.add_parser("metrics", help="recompute metrics from saved run logs")
    p_metrics.add_argument("--manifest", required=True, help="dataset manifest TSV")
    p_metrics.add_argument("--audio-root", default=None, help="base directory for audio paths")
    p_metrics.add_argument("--logs", required=True, help="directory of <id>.runlog.jsonl files")
    p_metrics.set_defaults(func=cmd_metrics)

    p_rec = sub.add_parser("record-trace", help="capture model responses for offline replay")
    _add_data_args(p_rec)
    _add_multi_policy_args(p_rec)
    p_rec.add_argument(
        "--window",
        action="append",
        type=float,
        default=None,
        help="repeatable; chunk sizes in seconds (default: 1 and 2)",
    )
    p_rec.add_argument("--backend-cmd", required=True, help="external model command line")
    p_rec.add_argument("--trace-dir", required=True, help="output directory for traces")
    p_rec.add_argument("--tts", choices=("mock", "process"), default="mock")
    p_rec.set_defaults(func=cmd_record_trace)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SimulstreamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
