"""Command line interface.

Subcommands: synth (build a forced-replication corpus), eval (pairwise
evaluation of reference vs target sets), stats (sensitivity analysis over a
corpus), report (re-emit formats from a saved run).

Exit codes: 0 success, 2 configuration error, 3 data error, 4 aborted run.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .audio_io import ENGINE_RATE, load_wav
from .errors import AbortedRunError, ConfigurationError, MiraError
from .evaluator import (
    EvaluationConfig,
    EvaluationReport,
    evaluate_pairwise,
    sensitivity_experiment,
)
from .manifests import load_corpus_bundle
from .reporting import REPORT_JSON, load_report, write_report
from .synth import LazyReplicaMap, plan_corpus, save_corpus

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_ABORTED = 4


def _parse_kv(pairs: list[str], cast, flag: str) -> dict:
    out = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigurationError(f"{flag} expects KEY=VALUE, got {item!r}")
        try:
            out[key] = cast(value)
        except ValueError as exc:
            raise ConfigurationError(f"{flag} {item!r}: {exc}") from exc
    return out


def _parse_degrees(text: str) -> list[float]:
    degrees = []
    for part in text.split(","):
        value = float(part)
        if not 0 < value < 100:
            raise ConfigurationError(f"degree {part!r} must be a percentage in (0, 100)")
        degrees.append(value / 100.0)
    return degrees


def _load_dir_clips(directory: Path, rate: int):
    paths = sorted(directory.glob("*.wav"))
    if not paths:
        raise ConfigurationError(f"{directory}: no .wav files found")
    return [load_wav(p, target_rate=rate) for p in paths]


def _cmd_synth(args) -> int:
    rate = args.rate
    references = _load_dir_clips(Path(args.reference), rate)
    mixtures = _load_dir_clips(Path(args.mixture), rate)
    manifest = plan_corpus(
        references,
        mixtures,
        degrees=_parse_degrees(args.degrees),
        replicas_per_song=args.replicas,
        seed=args.seed,
        genre=args.genre,
        crossfade_ms=args.crossfade_ms,
    )
    replica_map = LazyReplicaMap(
        manifest, {c.id: c for c in references}, {c.id: c for c in mixtures}
    )
    ref_paths = {c.id: str(Path(args.reference).resolve() / f"{c.id}.wav") for c in references}
    mix_paths = {c.id: str(Path(args.mixture).resolve() / f"{c.id}.wav") for c in mixtures}
    manifest_path = save_corpus(manifest, replica_map, args.out, ref_paths, mix_paths)
    print(f"wrote {len(replica_map)} replicas and {manifest_path}")
    return EXIT_OK


def _build_eval_config(args) -> EvaluationConfig:
    return EvaluationConfig(
        reference_manifest=Path(args.reference),
        target_manifest=Path(args.target),
        control_manifest=Path(args.control) if args.control else None,
        metrics=tuple(args.metrics.split(",")),
        bindings=_parse_kv(args.binding, str, "--binding"),
        thresholds=_parse_kv(args.threshold, float, "--threshold"),
        include_self_pairs=args.include_self_pairs,
        seed=args.seed,
        workers=args.workers,
        engine_rate=args.rate,
    )


def _print_report_summary(report: EvaluationReport) -> None:
    for set_pair, metrics in sorted(report.global_stats.items()):
        for metric, stats in sorted(metrics.items()):
            print(f"{set_pair} {metric}: mean={stats.mean:.6g} std={stats.std:.6g} n={stats.n}")
    for set_pair, value in sorted(report.global_fad.items()):
        print(f"{set_pair} fad (experimental, set-level): {value:.6g}")
    if report.flags:
        print(f"{len(report.flags)} pair(s) flagged")
    if report.failures:
        print(f"{len(report.failures)} pair evaluation(s) failed", file=sys.stderr)


def _cmd_eval(args) -> int:
    config = _build_eval_config(args)
    report = evaluate_pairwise(config)
    written = write_report(report, args.out, formats=set(args.formats.split(",")))
    _print_report_summary(report)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_stats(args) -> int:
    config = EvaluationConfig(
        reference_manifest=Path(args.corpus),
        target_manifest=Path(args.corpus),
        bindings=_parse_kv(args.binding, str, "--binding"),
        workers=args.workers,
        engine_rate=args.rate,
        seed=args.seed,
    )
    bundle = load_corpus_bundle(args.corpus, engine_rate=args.rate)
    outcome = sensitivity_experiment(bundle, metrics=tuple(args.metrics.split(",")), config=config)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = EvaluationReport(
        per_pair=[],
        set_pairs={},
        global_stats={},
        stats=outcome.stats,
        provenance={"engine_version": __version__, "corpus": str(args.corpus), "metrics": args.metrics},
    )
    write_report(report, out_dir, formats={"json", "svg"})
    for metric, ms in sorted(outcome.stats.metrics.items()):
        kw = ms.kw
        print(f"{metric}: KW H={kw.H:.4f} p={kw.p_value:.3g}" if kw else f"{metric}: (no KW)")
        for label in outcome.group_labels:
            s = ms.groups[label]
            print(f"  {label}: mean={s.mean:.6g} std={s.std:.6g} n={s.n}")
    if outcome.stats.fad_per_degree:
        for label, value in outcome.stats.fad_per_degree.items():
            print(f"fad (experimental) {label}: {value:.6g}")
    return EXIT_OK


def _cmd_report(args) -> int:
    run_dir = Path(args.in_dir)
    report_path = run_dir / REPORT_JSON
    if not report_path.exists():
        raise ConfigurationError(f"{run_dir}: no {REPORT_JSON} found")
    report = load_report(report_path)
    written = write_report(report, run_dir, formats=set(args.formats.split(",")))
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mira", description="Music replication assessment engine")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="build a forced-replication corpus")
    p_synth.add_argument("--reference", required=True, help="directory of reference WAVs")
    p_synth.add_argument("--mixture", required=True, help="directory of mixture WAVs")
    p_synth.add_argument("--degrees", default="5,10,15,25,50", help="replication percentages, comma-separated")
    p_synth.add_argument("--replicas", type=int, default=10, help="replicas per (song, degree)")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--genre", default="unspecified")
    p_synth.add_argument("--crossfade-ms", type=float, default=0.0)
    p_synth.add_argument("--rate", type=int, default=ENGINE_RATE)
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=_cmd_synth)

    p_eval = sub.add_parser("eval", help="pairwise evaluation of reference vs target sets")
    p_eval.add_argument("--reference", required=True, help="reference set manifest")
    p_eval.add_argument("--target", required=True, help="target set manifest")
    p_eval.add_argument("--control", help="optional control set manifest")
    p_eval.add_argument("--metrics", default="coverid,builtin_cos,kl")
    p_eval.add_argument("--binding", action="append", metavar="METRIC=MODEL")
    p_eval.add_argument("--threshold", action="append", metavar="METRIC=VALUE")
    p_eval.add_argument("--include-self-pairs", action="store_true")
    p_eval.add_argument("--workers", type=int, default=1)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--rate", type=int, default=ENGINE_RATE)
    p_eval.add_argument("--formats", default="csv,json")
    p_eval.add_argument("--out", required=True)
    p_eval.set_defaults(func=_cmd_eval)

    p_stats = sub.add_parser("stats", help="sensitivity analysis over a synth corpus")
    p_stats.add_argument("--corpus", required=True, help="corpus.json from mira synth")
    p_stats.add_argument("--metrics", default="coverid,builtin_cos,kl")
    p_stats.add_argument("--binding", action="append", metavar="METRIC=MODEL")
    p_stats.add_argument("--workers", type=int, default=1)
    p_stats.add_argument("--seed", type=int, default=0)
    p_stats.add_argument("--rate", type=int, default=ENGINE_RATE)
    p_stats.add_argument("--out", required=True)
    p_stats.set_defaults(func=_cmd_stats)

    p_report = sub.add_parser("report", help="re-emit report formats from a run directory")
    p_report.add_argument("--in", dest="in_dir", required=True)
    p_report.add_argument("--formats", default="csv,json,svg")
    p_report.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AbortedRunError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ABORTED
    except (MiraError, OSError, json.JSONDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
