"""
RSLearn Command-Line Interface

Provides the ``rslearn`` command with five subcommands: ``generate`` random
or packaged graphs, ``sample`` linear Gaussian data from a graph, ``learn``
a skeleton from an oracle or a dataset, ``evaluate`` a learned result
against the truth, and ``bench`` to sweep random instances.

Exit codes: 0 success, 2 invalid flags, 3 malformed input file, 4 unknown
vertex name, 5 learning failure, 6 I/O failure.
"""

import argparse
import csv
import json
import logging
import os
import sys

from .errors import (
    ConfigError,
    DatasetFormatError,
    GraphFormatError,
    LearnAutoExhaustedError,
    NoRemovableFoundError,
    ResultFormatError,
    SizeMismatchError,
    UnknownVertexNameError,
)
from .evaluate import alss, score_sepsets, score_skeleton
from .graph import structure_summary
from .helpers.helpers import _resolve_sample_count
from .io import (
    default_names,
    fixture_path,
    list_fixtures,
    read_dataset,
    read_graph,
    read_result,
    result_to_dict,
    write_dataset,
    write_graph,
    write_result,
)
from .rsl import extract_vstructures
from .run_benchmark import (
    ALGORITHMS,
    BenchConfig,
    _setup_logging,
    _teardown_logging,
    run_benchmark,
    run_learner,
)
from .synth import draw_sem, er_probability, erdos_renyi_dag, sample_sem, split_seed

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "RSLEARN_SEED"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FORMAT = 3
EXIT_UNKNOWN_NAME = 4
EXIT_LEARNING = 5
EXIT_IO = 6

EVAL_COLUMNS = [
    "f1",
    "precision",
    "recall",
    "shd",
    "extra_edges",
    "missing_edges",
    "alss",
    "sepsets_total",
    "sepsets_mistakes",
]


def _default_seed():
    """Seed from ``RSLEARN_SEED``, or 0 when unset."""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}.")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="rslearn",
        description="RSLearn: recursive Bayesian network structure learning.",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    parser.add_argument(
        "--log-file",
        default="rslearn.log",
        help="Path to save the log file (default: rslearn.log).",
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        default=False,
        help="Log at DEBUG level.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    # generate
    gen = sub.add_parser(
        "generate",
        help="Write a random Erdos-Renyi DAG or a packaged fixture.",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    gen.add_argument("--n", type=int, help="Number of vertices.")
    gen.add_argument("--p", type=float, help="Edge probability.")
    gen.add_argument(
        "--exponent",
        type=float,
        help="Edge probability as n**-exponent (default 0.82 when --p is not given).",
    )
    gen.add_argument(
        "--fixture",
        help="Copy a packaged fixture instead of drawing a graph.\n"
             "Available fixtures:\n" + "\n".join(f"  {k}" for k in list_fixtures()),
    )
    gen.add_argument("--seed", type=int, help=f"Random seed (default: ${SEED_ENV_VAR} or 0).")
    gen.add_argument("--output", help="Path of the edge-list file to write.")
    gen.add_argument(
        "--summary",
        action="store_true",
        default=False,
        help="Print structure statistics as JSON on stdout.",
    )

    # sample
    smp = sub.add_parser(
        "sample",
        help="Draw a linear Gaussian SEM over a graph and sample a CSV dataset.",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    smp.add_argument("graph", help="Edge-list graph file.")
    smp.add_argument(
        "--samples",
        required=True,
        help="Number of samples, absolute (1000) or per vertex (50n).",
    )
    smp.add_argument("--seed", type=int, help=f"Random seed (default: ${SEED_ENV_VAR} or 0).")
    smp.add_argument("--output", required=True, help="Path of the CSV dataset to write.")

    # learn
    lrn = sub.add_parser(
        "learn",
        help="Learn a skeleton and separating sets.",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    lrn.add_argument(
        "--alg",
        required=True,
        choices=list(ALGORITHMS),
        help="Learner: rsl-d (diamond-free), rsl-omega (needs --m),\n"
             "rsl-auto (no side information).",
    )
    lrn.add_argument("--m", type=int, help="Clique bound for rsl-omega.")
    source = lrn.add_mutually_exclusive_group(required=True)
    source.add_argument("--oracle", metavar="GRAPH", help="Answer CI queries by d-separation in GRAPH.")
    source.add_argument("--data", metavar="CSV", help="Answer CI queries by Fisher-Z tests on CSV.")
    lrn.add_argument("--alpha", type=float, default=0.01, help="Significance level (default: 0.01).")
    lrn.add_argument(
        "--alpha-mb",
        type=float,
        help="Significance level of Markov boundary discovery (default: 2/n^2).",
    )
    lrn.add_argument("--seed", type=int, help=f"Tie-break seed (default: ${SEED_ENV_VAR} or 0).")
    lrn.add_argument(
        "--order",
        nargs="+",
        help="Explicit tie-break priority, as vertex names or indices.",
    )
    lrn.add_argument("--output", help="Path of the result JSON (default: stdout).")

    # evaluate
    evl = sub.add_parser(
        "evaluate",
        help="Score a result JSON against the true graph.",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    evl.add_argument("truth", help="Edge-list file of the true graph.")
    evl.add_argument("result", help="Result JSON written by 'learn'.")
    evl.add_argument("--output", help="Path of the report JSON.")

    # bench
    bch = sub.add_parser(
        "bench",
        help="Benchmark learners on random Erdos-Renyi graphs.",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    bch.add_argument("--n", nargs="+", type=int, default=[20, 30, 40], help="Vertex counts.")
    bch.add_argument("--exponent", type=float, default=0.82, help="Edge probability n**-exponent.")
    bch.add_argument(
        "--samples",
        nargs="+",
        default=["oracle"],
        help="Sample sizes: 'oracle', absolute counts or multipliers like 50n.",
    )
    bch.add_argument("--repetitions", type=int, default=10, help="Graphs per vertex count.")
    bch.add_argument(
        "--alg",
        nargs="+",
        default=["rsl-d"],
        help="Learners to run:\n" + "\n".join(f"  {k}" for k in ALGORITHMS),
    )
    bch.add_argument("--alpha", nargs="+", type=float, default=[0.01], help="Significance levels.")
    bch.add_argument("--alpha-mb", type=float, help="Significance level of boundary discovery.")
    bch.add_argument("--m", type=int, help="Clique bound for rsl-omega (default: true clique number).")
    bch.add_argument("--seed", type=int, help=f"Seed base (default: ${SEED_ENV_VAR} or 0).")
    bch.add_argument("--workers", type=int, default=1, help="Worker processes.")
    bch.add_argument(
        "--diamond-free-only",
        action="store_true",
        default=False,
        help="Skip learning on graphs that contain a diamond.",
    )
    bch.add_argument(
        "--csv-file",
        default="bench_results.csv",
        help="Path to save the CSV results file\n(default: bench_results.csv).",
    )

    return parser


def _validate_args(args):
    """Return a list of problems with the flag combination."""
    errors = []
    if args.command == "generate":
        if args.fixture is None and args.n is None:
            errors.append("generate needs --n or --fixture.")
        if args.fixture is not None and args.n is not None:
            errors.append("--fixture cannot be combined with --n.")
        if args.p is not None and args.exponent is not None:
            errors.append("--p and --exponent are mutually exclusive.")
        if args.p is not None and not 0.0 <= args.p <= 1.0:
            errors.append("--p must lie in [0, 1].")
        if args.n is not None and args.n < 0:
            errors.append("--n must be non-negative.")
        if args.output is None and not args.summary:
            errors.append("generate needs --output or --summary.")
    elif args.command == "learn":
        if args.alg == "rsl-omega" and args.m is None:
            errors.append("--m is required with --alg rsl-omega.")
        if args.alg != "rsl-omega" and args.m is not None:
            errors.append("--m is only valid with --alg rsl-omega.")
        if args.m is not None and args.m < 1:
            errors.append("--m must be at least 1.")
        for name, value in (("--alpha", args.alpha), ("--alpha-mb", args.alpha_mb)):
            if value is not None and not 0.0 < value < 1.0:
                errors.append(f"{name} must lie in (0, 1).")
    return errors


def _seed(args):
    return args.seed if args.seed is not None else _default_seed()


def _resolve_order(tokens, names):
    if tokens is None:
        return None
    by_name = {name: i for i, name in enumerate(names)}
    order = []
    for token in tokens:
        if token in by_name:
            order.append(by_name[token])
        elif token.isdigit() and int(token) < len(names):
            order.append(int(token))
        else:
            raise UnknownVertexNameError(f"Unknown vertex {token!r} in --order.")
    return order


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_generate(args):
    if args.fixture is not None:
        if args.fixture not in list_fixtures():
            raise ConfigError(
                f"Unknown fixture {args.fixture!r}; available: {', '.join(list_fixtures())}."
            )
        dag, names = read_graph(fixture_path(args.fixture))
    else:
        if args.p is not None:
            p = args.p
        else:
            p = er_probability(args.n, args.exponent if args.exponent is not None else 0.82)
        dag = erdos_renyi_dag(args.n, p, _seed(args))
        names = None
        logger.info(f"Drew an ER DAG with n={args.n}, p={p:.4f}: {len(dag.edges)} edges")
    if args.output is not None:
        write_graph(args.output, dag, None if names == default_names(dag.n) else names)
    if args.summary:
        print(json.dumps(structure_summary(dag)))
    return EXIT_OK


def cmd_sample(args):
    dag, names = read_graph(args.graph)
    count = _resolve_sample_count(args.samples, dag.n)
    streams = split_seed(_seed(args), dag.n, 0)
    model = draw_sem(dag, streams.model)
    dataset = sample_sem(model, count, streams.data)
    write_dataset(args.output, dataset, names)
    logger.info(f"Wrote {count} samples over {dag.n} variables to {args.output}")
    return EXIT_OK


def cmd_learn(args):
    seed = _seed(args)
    if args.oracle is not None:
        dag, names = read_graph(args.oracle)
        dataset = None
    else:
        dataset, names = read_dataset(args.data)
        dag = None
    order = _resolve_order(args.order, names)
    outcome = run_learner(
        args.alg,
        dag=dag,
        dataset=dataset,
        m=args.m,
        alpha=args.alpha,
        alpha_mb=args.alpha_mb,
        order=order,
        seed=seed,
    )
    result = outcome.result
    payload = result_to_dict(
        result,
        algorithm=args.alg,
        mode=outcome.mode,
        names=names,
        seed=seed,
        vstructures=extract_vstructures(result.skeleton, result.sepsets),
    )
    if args.output is not None:
        write_result(args.output, payload)
    else:
        print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_evaluate(args):
    dag, _ = read_graph(args.truth)
    skeleton, sepsets, _ = read_result(args.result)
    report = score_skeleton(dag.skeleton(), skeleton)
    total, mistakes = score_sepsets(dag, sepsets)
    row = report.as_dict()
    row.update(alss=alss(total, mistakes), sepsets_total=total, sepsets_mistakes=mistakes)
    if args.output is not None:
        with open(args.output, "w", encoding="utf-8") as f:
            json.dump(row, f, indent=2)
    writer = csv.DictWriter(sys.stdout, fieldnames=EVAL_COLUMNS, lineterminator="\n")
    writer.writerow(row)
    return EXIT_OK


def cmd_bench(args):
    samples = [None if s == "oracle" else s for s in args.samples]
    config = BenchConfig(
        n_values=args.n,
        exponent=args.exponent,
        samples=samples,
        repetitions=args.repetitions,
        algorithms=args.alg,
        alphas=args.alpha,
        alpha_mb=args.alpha_mb,
        m=args.m,
        seed_base=_seed(args),
        workers=args.workers,
        diamond_free_only=args.diamond_free_only,
        output_csv_file=args.csv_file,
    )
    run_benchmark(config, output_log_file=args.log_file, verbose=args.verbose)
    return EXIT_OK


COMMAND_DISPATCHER = {
    "generate": cmd_generate,
    "sample": cmd_sample,
    "learn": cmd_learn,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
}


def _fail(code, message):
    print(f"Error: {message}", file=sys.stderr)
    return code


def main(argv=None):
    """Entry point for the ``rslearn`` command; returns the exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    errors = _validate_args(args)
    if errors:
        print("Error:", file=sys.stderr)
        for e in errors:
            print(f"  {e}", file=sys.stderr)
        return EXIT_CONFIG

    console = None
    if args.command != "bench":
        console = _setup_logging(args.log_file, args.verbose)
    try:
        return COMMAND_DISPATCHER[args.command](args)
    except ConfigError as e:
        return _fail(EXIT_CONFIG, e)
    except UnknownVertexNameError as e:
        return _fail(EXIT_UNKNOWN_NAME, e)
    except (GraphFormatError, DatasetFormatError, ResultFormatError, SizeMismatchError) as e:
        return _fail(EXIT_FORMAT, e)
    except (NoRemovableFoundError, LearnAutoExhaustedError) as e:
        return _fail(EXIT_LEARNING, e)
    except OSError as e:
        return _fail(EXIT_IO, e)
    finally:
        if console is not None:
            _teardown_logging(console)


if __name__ == "__main__":
    sys.exit(main())
