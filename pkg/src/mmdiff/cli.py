"""Command-line front end: model diffing and the benchmark harness.

Exit codes: 0 on success (for `bench run`: all cells match the prediction
table), 1 for unreadable or malformed input and IO problems, 2 for violated
engine invariants.
"""

from __future__ import annotations

import argparse
import sys

from mmdiff.benchmark import builtin_scenarios, default_matrix, export_scenarios, run_benchmark
from mmdiff.diff import diff_models, format_script
from mmdiff.errors import DocumentError, EngineError
from mmdiff.matching import EDGE_POLICIES, NAME_SIMS, PIPELINES, MatcherConfig
from mmdiff.model import parse_model
from mmdiff.similarity import load_synonyms


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmdiff",
        description="Structural diff for Ecore-like and BPMN-like model documents.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    diff = sub.add_parser("diff", help="compare two model documents")
    diff.add_argument("old", help="path of the original model document")
    diff.add_argument("new", help="path of the modified model document")
    _add_config_flags(diff)
    diff.add_argument("--format", choices=("text", "json"), default="text")

    bench = sub.add_parser("bench", help="benchmark harness")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)
    bench_run = bench_sub.add_parser("run", help="run the configuration matrix")
    bench_run.add_argument("--format", choices=("text", "json"), default="text")
    bench_export = bench_sub.add_parser("export", help="write scenario fixtures to disk")
    bench_export.add_argument("--dir", required=True, help="output directory")
    bench_sub.add_parser("list", help="list the built-in scenarios")
    return parser


def _add_config_flags(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("--pipeline", choices=PIPELINES, default="twophase")
    cmd.add_argument("--name-sim", choices=NAME_SIMS, default="bigram")
    cmd.add_argument("--threshold", type=float, default=0.6)
    cmd.add_argument("--synonyms", metavar="FILE", default=None,
                     help="synonym dictionary for the semantic similarity")
    cmd.add_argument("--ref-policy", choices=EDGE_POLICIES, default="strict")
    cmd.add_argument("--exact-name-first", action="store_true")


def _config_from(args: argparse.Namespace) -> MatcherConfig:
    synonyms = None
    if args.synonyms is not None:
        with open(args.synonyms, encoding="utf-8") as fh:
            synonyms = load_synonyms(fh.read())
    return MatcherConfig(
        pipeline=args.pipeline,
        name_sim=args.name_sim,
        threshold=args.threshold,
        exact_name_first=args.exact_name_first,
        edge_policy=args.ref_policy,
        synonyms=synonyms,
    )


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _cmd_diff(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    old = parse_model(_read(args.old))
    new = parse_model(_read(args.new))
    script = diff_models(old, new, cfg)
    sys.stdout.write(format_script(script, args.format))
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    if args.bench_command == "run":
        report = run_benchmark(default_matrix(), builtin_scenarios())
        sys.stdout.write(report.to_text() if args.format == "text" else report.to_json())
        return 0 if report.all_match else 1
    if args.bench_command == "export":
        written = export_scenarios(args.dir)
        sys.stdout.write(f"wrote {len(written)} files to {args.dir}\n")
        return 0
    for sc in builtin_scenarios():
        sys.stdout.write(
            f"{sc.id:<4} {sc.flavor:<6} "
            f"{len(sc.old.elements):>2} -> {len(sc.new.elements):>2} elements  "
            f"{sc.description}\n"
        )
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "diff":
            return _cmd_diff(args)
        return _cmd_bench(args)
    except (OSError, DocumentError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    except EngineError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
