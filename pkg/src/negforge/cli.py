"""Command-line entry point.

Subcommands: negate, build-dataset, split, evaluate, sensitivity.
Exit status: 0 success, 1 usage error, 2 data/parse error, 3 adapter
failure. Diagnostics go to stderr; data goes to stdout or files.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence, TextIO

from .conllu import parse_conllu
from .errors import (AdapterError, ConlluParseError, NegforgeError,
                     UnsupportedSentenceError, UnsupportedStructureError)
from .harness import (ALL_KINDS, BUILTIN_ADAPTERS, PerturbationKind,
                      PooledAdapter, ProcessAdapter, evaluate_testset,
                      read_pair_file, sensitivity)
from .negator import NegatorOptions, negate, negate_text
from .parser import ExternalCommandParser
from .pipeline import (build_cannot_wmt, read_pairs, split_dataset,
                       write_bundle, write_pairs)

USAGE_ERROR = 1
DATA_ERROR = 2
ADAPTER_ERROR = 3


class _UsageExit(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageExit(message)


def _add_contraction_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--prefer-contractions", dest="prefer_contractions",
        action="store_true", default=True,
        help="emit contracted negations like \"won't\" (default)",
    )
    group.add_argument(
        "--no-contractions", dest="prefer_contractions",
        action="store_false",
        help="always emit \"not\" as a separate word",
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="negforge", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    negate_cmd = sub.add_parser("negate", help="negate one sentence per input line")
    negate_cmd.add_argument("--parser", choices=("builtin", "conllu", "external-cmd"),
                            default="builtin")
    negate_cmd.add_argument("--external-parser-cmd", metavar="CMD",
                            help="command emitting CoNLL-U for raw input lines")
    _add_contraction_flags(negate_cmd)
    negate_cmd.add_argument("--input", type=Path, help="default: stdin")
    negate_cmd.add_argument("--output", type=Path, help="default: stdout")
    negate_cmd.add_argument("--jobs", type=int, default=1)
    negate_cmd.add_argument("--strict", action="store_true",
                            help="abort on the first unsupported sentence")

    build_cmd = sub.add_parser("build-dataset",
                               help="run the dataset pipeline from a config file")
    build_cmd.add_argument("--config", type=Path, required=True)
    build_cmd.add_argument("--output", type=Path, default=Path("cannot-out"))
    build_cmd.add_argument("--format", choices=("tsv", "csv"), default="tsv")

    split_cmd = sub.add_parser("split", help="split a pair file 80:10:10")
    split_cmd.add_argument("--input", type=Path, required=True)
    split_cmd.add_argument("--output", type=Path, default=Path("splits"))
    split_cmd.add_argument("--seed", type=int, default=0)
    split_cmd.add_argument("--format", choices=("tsv", "csv"), default="tsv")

    eval_cmd = sub.add_parser("evaluate",
                              help="Spearman correlation of a metric on a scored pair file")
    eval_cmd.add_argument("dataset", type=Path)
    eval_cmd.add_argument("--metric-cmd", metavar="CMD",
                          help="external scorer command (wire protocol over stdio)")
    eval_cmd.add_argument("--metric", choices=sorted(BUILTIN_ADAPTERS),
                          help="built-in scorer instead of an external command")
    eval_cmd.add_argument("--timeout", type=float, default=60.0)
    eval_cmd.add_argument("--jobs", type=int, default=1,
                          help="adapter processes scoring disjoint shards")

    sens_cmd = sub.add_parser("sensitivity",
                              help="probe a metric's reaction to graded perturbations")
    sens_cmd.add_argument("corpus", type=Path,
                          help="headered TSV with reference/candidate columns")
    sens_cmd.add_argument("--metric-cmd", metavar="CMD")
    sens_cmd.add_argument("--metric", choices=sorted(BUILTIN_ADAPTERS))
    sens_cmd.add_argument("--perturbation", action="append",
                          choices=[k.value for k in ALL_KINDS],
                          help="repeatable; default: all kinds")
    sens_cmd.add_argument("--degrees", default="1",
                          help="comma-separated impairment degrees, e.g. 1,2,3")
    sens_cmd.add_argument("--seed", type=int, default=0)
    sens_cmd.add_argument("--output", type=Path, help="report CSV (default: stdout)")
    sens_cmd.add_argument("--timeout", type=float, default=60.0)
    sens_cmd.add_argument("--jobs", type=int, default=1,
                          help="adapter processes scoring disjoint shards")
    _add_contraction_flags(sens_cmd)
    return parser


def _open_input(path: Path | None) -> TextIO:
    return open(path, encoding="utf-8") if path else sys.stdin


def _open_output(path: Path | None) -> TextIO:
    return open(path, "w", encoding="utf-8") if path else sys.stdout


def _negate_line_worker(options: NegatorOptions,
                        parse) -> Callable[[str], tuple[bool, str]]:
    def work(line: str) -> tuple[bool, str]:
        try:
            outcome = negate_text(line, parser=parse, options=options) \
                if parse is not None else negate_text(line, options=options)
            return True, outcome.text
        except (NegforgeError, ValueError) as exc:
            stage = getattr(exc, "stage", None)
            label = f"{stage}: " if stage else ""
            return False, f"ERROR:{label}{exc}"
    return work


def _run_negate(args: argparse.Namespace) -> int:
    options = NegatorOptions(prefer_contractions=args.prefer_contractions)
    out = _open_output(args.output)
    failures = 0
    try:
        if args.parser == "conllu":
            source = _open_input(args.input)
            try:
                document = parse_conllu(source.read())
            finally:
                if source is not sys.stdin:
                    source.close()
            for sentence in document.sentences:
                try:
                    print(negate(sentence, options).text, file=out)
                except (NegforgeError, ValueError) as exc:
                    failures += 1
                    if args.strict:
                        print(f"negforge: {exc}", file=sys.stderr)
                        return DATA_ERROR
                    print(f"ERROR:{exc}", file=out)
            return 0

        external: ExternalCommandParser | None = None
        parse = None
        if args.parser == "external-cmd":
            if not args.external_parser_cmd:
                print("negforge: --external-parser-cmd is required with "
                      "--parser external-cmd", file=sys.stderr)
                return USAGE_ERROR
            external = ExternalCommandParser(args.external_parser_cmd)
            parse = external.parse
        worker = _negate_line_worker(options, parse)
        source = _open_input(args.input)
        try:
            lines = [line.rstrip("\n") for line in source]
        finally:
            if source is not sys.stdin:
                source.close()
        try:
            if args.jobs > 1:
                with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                    results = list(pool.map(worker, lines))
            else:
                results = [worker(line) for line in lines]
        finally:
            if external is not None:
                external.close()
        for ok, text in results:
            if not ok:
                failures += 1
                if args.strict:
                    print(f"negforge: {text}", file=sys.stderr)
                    return DATA_ERROR
            print(text, file=out)
        if failures:
            print(f"negforge: {failures} line(s) failed", file=sys.stderr)
        return 0
    finally:
        if out is not sys.stdout:
            out.close()


def _run_build_dataset(args: argparse.Namespace) -> int:
    bundle, report = build_cannot_wmt(args.config)
    delimiter = "," if args.format == "csv" else "\t"
    write_bundle(bundle, args.output, delimiter)
    (args.output / "report.json").write_text(report.to_json(), encoding="utf-8")
    print(f"negforge: wrote {report.split_sizes} to {args.output}",
          file=sys.stderr)
    return 0


def _run_split(args: argparse.Namespace) -> int:
    pairs = read_pairs(args.input)
    train, dev, test = split_dataset(pairs, seed=args.seed)
    args.output.mkdir(parents=True, exist_ok=True)
    delimiter = "," if args.format == "csv" else "\t"
    extension = args.format
    write_pairs(train, args.output / f"train.{extension}", delimiter)
    write_pairs(dev, args.output / f"dev.{extension}", delimiter)
    write_pairs(test, args.output / f"test.{extension}", delimiter)
    print(f"negforge: {len(train)}/{len(dev)}/{len(test)} pairs",
          file=sys.stderr)
    return 0


def _make_adapter(args: argparse.Namespace):
    if args.metric_cmd and args.metric:
        raise _UsageExit("pass either --metric-cmd or --metric, not both")
    jobs = getattr(args, "jobs", 1)
    if jobs < 1:
        raise _UsageExit("--jobs must be >= 1")
    if args.metric_cmd:
        if jobs > 1:
            return PooledAdapter([
                ProcessAdapter(args.metric_cmd, timeout=args.timeout)
                for _ in range(jobs)
            ])
        return ProcessAdapter(args.metric_cmd, timeout=args.timeout)
    if args.metric:
        return BUILTIN_ADAPTERS[args.metric]()
    raise _UsageExit("one of --metric-cmd or --metric is required")


def _run_evaluate(args: argparse.Namespace) -> int:
    with _make_adapter(args) as adapter:
        rho = evaluate_testset(adapter, args.dataset)
    print(f"{rho:.6f}")
    return 0


def _run_sensitivity(args: argparse.Namespace) -> int:
    kinds = args.perturbation or [k.value for k in ALL_KINDS]
    try:
        degrees = [int(d) for d in args.degrees.split(",") if d.strip()]
    except ValueError:
        raise _UsageExit(f"unparseable --degrees {args.degrees!r}") from None
    pairs, _scores = read_pair_file(args.corpus)
    options = NegatorOptions(prefer_contractions=args.prefer_contractions)
    with _make_adapter(args) as adapter:
        report = sensitivity(
            adapter, pairs,
            kinds=[PerturbationKind(k) for k in kinds],
            degrees=degrees, seed=args.seed, negator_options=options,
        )
    if args.output:
        args.output.write_text(report.to_csv(), encoding="utf-8")
    else:
        sys.stdout.write(report.to_csv())
    print(report.summary(), file=sys.stderr)
    return 0


_RUNNERS = {
    "negate": _run_negate,
    "build-dataset": _run_build_dataset,
    "split": _run_split,
    "evaluate": _run_evaluate,
    "sensitivity": _run_sensitivity,
}


def run(argv: Sequence[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _RUNNERS[args.subcommand](args)
    except _UsageExit:
        return USAGE_ERROR
    except AdapterError as exc:
        print(f"negforge: adapter error: {exc}", file=sys.stderr)
        return ADAPTER_ERROR
    except (ConlluParseError, UnsupportedSentenceError,
            UnsupportedStructureError, NegforgeError, OSError,
            ValueError) as exc:
        print(f"negforge: {exc}", file=sys.stderr)
        return DATA_ERROR


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())
