"""Command-line entry point.

Exit status is 0 on success, 2 when an input file is missing or malformed and
3 when a requested metric is undefined for the given inputs.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import harness
from .core import Corpus, ParseError, read_corpus, write_corpus
from .noise import NoiseSpec, apply_noise
from .projection import project_boundaries
from .segmetrics import LengthMismatchError
from .synthetic import generate_corpus

EXIT_OK = 0
EXIT_FORMAT = 2
EXIT_UNDEFINED = 3

logger = logging.getLogger("evalsub")


class _Undefined(Exception):
    pass


def _config(args) -> harness.SuiteConfig:
    return harness.SuiteConfig(mode=args.mode, aggregation=args.aggregation, window=args.window,
                               type_sensitive_prf=args.typed_prf, tokenize=args.tokenize,
                               alpha_source=args.alpha_source)


def _reference(args) -> Corpus:
    if getattr(args, "synthetic", False):
        return generate_corpus(args.synthetic_size, args.synthetic_seed)
    if not args.ref:
        raise SystemExit("error: --ref is required unless --synthetic is given")
    return read_corpus(args.ref, lenient=args.lenient)


def _emit(report: harness.MetricReport, out: str | None) -> None:
    if out:
        tsv, js = report.write(out)
        logger.info("wrote %s and %s", tsv, js)
    else:
        sys.stdout.write(report.to_tsv())


def _check_defined(report: harness.MetricReport) -> None:
    missing = sorted({f"{r.condition}:{r.metric}" for r in report.rows if r.value is None})
    if missing:
        raise _Undefined("undefined: " + ", ".join(missing))


# -- subcommands -----------------------------------------------------------------

def cmd_evaluate(args) -> None:
    ref = _reference(args)
    hyp = read_corpus(args.hyp, lenient=args.lenient)
    report = harness.evaluate(ref, hyp, _config(args))
    _emit(report, args.out)
    _check_defined(report)


def cmd_project(args) -> None:
    ref = _reference(args)
    hyp = read_corpus(args.hyp, lenient=args.lenient)
    if len(ref) != len(hyp):
        raise LengthMismatchError(f"{len(ref)} reference vs {len(hyp)} hypothesis sentences")
    out = []
    for i, (r, h) in enumerate(zip(ref, hyp), start=1):
        res = project_boundaries(r, h, args.granularity)
        if res.flags:
            logger.info("sentence %d: %s", i, ",".join(res.flags))
        out.append(res.ref_proj)
    proj = ref.replace(out)
    if args.out:
        write_corpus(proj, args.out)
    else:
        for s in proj:
            print(s)


def cmd_noise(args) -> None:
    ref = _reference(args)
    specs = [NoiseSpec.parse(label, args.seed) for label in args.spec]
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for spec in specs:
        res = apply_noise(ref, spec)
        write_corpus(res.corpus, outdir / spec.filename)
        d = res.to_dict()
        print(f"{spec.filename}\trequested={d['requested']}\tapplied={d['applied']}"
              f"\tskipped={d['skipped']}")


def cmd_exp1(args) -> None:
    ref = _reference(args)
    grid = (harness.exp1_grid(seeds=tuple(args.seeds)) if not args.spec
            else [NoiseSpec.parse(l, s) for s in args.seeds for l in args.spec])
    report = harness.run_experiment_1(ref, grid, _config(args), args.jobs)
    _emit(report, args.out)


def cmd_exp2(args) -> None:
    ref = _reference(args)
    report = harness.run_experiment_2(ref, args.text_levels, args.seg_levels, args.seed,
                                      _config(args), args.jobs)
    _emit(report, args.out)
    lin = report.extras["linearity"]
    drift = report.extras["sigma_drift"]
    logger.info("stage 1 R^2 %.4f; sigma endpoint drift %s", lin["r2"], drift["end_to_end"])


def cmd_exp3(args) -> None:
    ref = _reference(args)
    if args.hyp:
        systems = {}
        for item in args.hyp:
            name, sep, path = item.partition("=")
            if not sep:
                name, path = Path(item).stem, item
            systems[name] = read_corpus(path, lenient=args.lenient, identifier=name)
        expected = None
    else:
        systems = harness.synthetic_systems(ref, args.seed)
        expected = list(systems)
    report = harness.run_experiment_3(ref, systems, _config(args), args.jobs, expected)
    _emit(report, args.out)


def cmd_correlate(args) -> None:
    report = harness.read_report(args.report)
    matrix = harness.exp1_correlations(report)
    text = matrix.to_tsv()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_synth(args) -> None:
    corpus = generate_corpus(args.synthetic_size, args.synthetic_seed)
    if args.out:
        write_corpus(corpus, args.out)
    else:
        for s in corpus:
            print(s)


# -- parser ----------------------------------------------------------------------

def _levels(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="evalsub",
                                description="Evaluate subtitle segmentation against a reference.")
    sub = p.add_subparsers(dest="command", required=True)

    base = argparse.ArgumentParser(add_help=False)
    base.add_argument("-v", "--verbose", action="count", default=0)

    common = argparse.ArgumentParser(add_help=False, parents=[base])
    common.add_argument("--ref", help="reference file (one sentence per line, <eol>/<eob> tags)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output path or prefix")
    common.add_argument("--lenient", action="store_true",
                        help="drop leading or doubled tags instead of failing")

    suite = argparse.ArgumentParser(add_help=False)
    suite.add_argument("--mode", choices=["agnostic", "block", "line"], default="agnostic")
    suite.add_argument("--aggregation", choices=["pooled", "mean"], default="pooled")
    suite.add_argument("--window", type=int, help="Pk/WindowDiff window (default: from reference)")
    suite.add_argument("--typed-prf", action="store_true",
                       help="precision/recall require matching tag kinds")
    suite.add_argument("--tokenize", choices=["none", "13a"], default="none")
    suite.add_argument("--alpha-source", choices=["reference", "hypothesis"], default="reference")

    synth = argparse.ArgumentParser(add_help=False)
    synth.add_argument("--synthetic", action="store_true",
                       help="use the built-in generated corpus as reference")
    synth.add_argument("--synthetic-size", type=int, default=545)
    synth.add_argument("--synthetic-seed", type=int, default=2022)

    jobs = argparse.ArgumentParser(add_help=False)
    jobs.add_argument("--jobs", type=int, default=1)

    s = sub.add_parser("evaluate", parents=[common, suite, synth], help="full metric suite")
    s.add_argument("--hyp", required=True)
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("project", parents=[common], help="project hypothesis tags onto the reference")
    s.add_argument("--hyp", required=True)
    s.add_argument("--granularity", choices=["line", "block"], default="line")
    s.set_defaults(func=cmd_project)

    s = sub.add_parser("noise", parents=[common, synth], help="write noised copies of a corpus")
    s.add_argument("--spec", action="append", required=True,
                   help="noise label such as shift.1.20, delete.80 or text.30 (repeatable)")
    s.set_defaults(func=cmd_noise)

    s = sub.add_parser("exp1", parents=[common, suite, synth, jobs],
                       help="segmentation noise sweep")
    s.add_argument("--spec", action="append", help="restrict the grid to these labels")
    s.add_argument("--seeds", type=int, nargs="+", default=[0])
    s.set_defaults(func=cmd_exp1)

    s = sub.add_parser("exp2", parents=[common, suite, synth, jobs],
                       help="text noise followed by segmentation noise")
    s.add_argument("--text-levels", type=_levels, default=list(harness.EXP2_TEXT_LEVELS))
    s.add_argument("--seg-levels", type=_levels, default=list(harness.EXP2_SEG_LEVELS))
    s.set_defaults(func=cmd_exp2)

    s = sub.add_parser("exp3", parents=[common, suite, synth, jobs],
                       help="rank system outputs via boundary projection")
    s.add_argument("--hyp", action="append",
                   help="system output as NAME=PATH (repeatable); default: synthetic systems")
    s.set_defaults(func=cmd_exp3)

    s = sub.add_parser("correlate", parents=[base], help="Pearson matrix over an exp1 report")
    s.add_argument("--report", required=True, help="exp1 report (.json or .tsv)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_correlate)

    s = sub.add_parser("synth", parents=[base, synth], help="write the generated corpus")
    s.add_argument("--out")
    s.set_defaults(func=cmd_synth)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except BrokenPipeError:
        # output piped into something like head; not an error
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except (ParseError, LengthMismatchError, OSError, UnicodeDecodeError) as e:
        print(f"evalsub: input error: {e}", file=sys.stderr)
        return EXIT_FORMAT
    except _Undefined as e:
        print(f"evalsub: {e}", file=sys.stderr)
        return EXIT_UNDEFINED
    except ValueError as e:
        # mismatched corpora, bad labels and similar caller mistakes
        print(f"evalsub: {e}", file=sys.stderr)
        return EXIT_FORMAT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
