"""
Learner and Benchmark Runner

Provides ``run_learner`` to run Markov boundary discovery followed by one of
the RSL variants on an oracle or a dataset, and ``run_benchmark`` to sweep
random Erdos-Renyi instances and write one CSV row per run.
"""

import csv
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field

from .ci import CountingTester, FisherZTester, OracleTester
from .errors import ConfigError, LearnAutoExhaustedError, NoRemovableFoundError
from .evaluate import alss, score_sepsets, score_skeleton
from .graph import structure_summary
from .helpers.helpers import _resolve_sample_count
from .mb import compute_mb
from .rsl import BoundedClique, DiamondFree, learn_auto, rsl_learn
from .synth import draw_sem, er_probability, erdos_renyi_dag, sample_sem, split_seed

logger = logging.getLogger(__name__)


def _run_rsl_d(tester, mbs, *, m=None, order=None, seed=None):
    return rsl_learn(tester, mbs, DiamondFree(), order=order, seed=seed)


def _run_rsl_omega(tester, mbs, *, m=None, order=None, seed=None):
    if m is None:
        raise ConfigError("Algorithm 'rsl-omega' needs a clique bound m.")
    return rsl_learn(tester, mbs, BoundedClique(m), order=order, seed=seed)


def _run_rsl_auto(tester, mbs, *, m=None, order=None, seed=None):
    result, _ = learn_auto(lambda: tester, tester.n, mbs=mbs, order=order, seed=seed)
    return result


ALGORITHMS = {
    "rsl-d": _run_rsl_d,
    "rsl-omega": _run_rsl_omega,
    "rsl-auto": _run_rsl_auto,
}

BENCH_COLUMNS = [
    "n",
    "p",
    "repetition",
    "seed",
    "algorithm",
    "mode",
    "samples",
    "alpha",
    "diamond_free",
    "omega",
    "max_in_degree",
    "ci_tests",
    "asc",
    "runtime",
    "f1",
    "precision",
    "recall",
    "shd",
    "alss",
    "m_used",
    "fallback_used",
]


# ---------------------------------------------------------------------------
# Logging helpers
# ---------------------------------------------------------------------------

def _setup_logging(output_log_file=None, verbose=False):
    """Configure file and console logging, returning the console handler."""
    level = logging.DEBUG if verbose else logging.INFO
    if output_log_file is not None:
        logging.basicConfig(
            filename=output_log_file,
            level=level,
            format="%(asctime)s - %(levelname)s - %(message)s",
            filemode="w",
        )
    logging.getLogger().setLevel(level)
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    logging.getLogger().addHandler(console_handler)
    return console_handler


def _teardown_logging(console_handler):
    """Remove the console handler added by ``_setup_logging``."""
    logging.getLogger().removeHandler(console_handler)


# ---------------------------------------------------------------------------
# Single runs
# ---------------------------------------------------------------------------

@dataclass
class RunOutcome:
    """A learner result together with how it was obtained."""

    algorithm: str
    mode: str
    result: object
    wall_time: float


def run_learner(
    algorithm,
    *,
    dag=None,
    dataset=None,
    m=None,
    alpha=0.01,
    alpha_mb=None,
    order=None,
    seed=None,
):
    """Run boundary discovery and one RSL variant.

    Parameters
    ----------
    algorithm : str
        A key of ``ALGORITHMS``.
    dag : Dag, optional
        Ground truth queried through the d-separation oracle.
    dataset : GaussianDataset, optional
        Samples queried through Fisher-Z tests. Exactly one of *dag* and
        *dataset* must be given.
    m : int, optional
        Clique bound for ``rsl-omega``.
    alpha : float, optional
        Significance level of the learning phase.
    alpha_mb : float, optional
        Significance level of boundary discovery, ``2 / n**2`` by default.
    order, seed : optional
        Tie-break controls.

    Returns
    -------
    RunOutcome
    """
    if algorithm not in ALGORITHMS:
        raise ConfigError(
            f"Unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}."
        )
    if (dag is None) == (dataset is None):
        raise ConfigError("Exactly one of an oracle graph and a dataset is required.")

    if dag is not None:
        mode = "oracle"
        backend = OracleTester(dag)
        mb_backend = backend
    else:
        mode = "data"
        n = dataset.n_vars
        if alpha_mb is None:
            alpha_mb = 2.0 / n**2 if n >= 2 else alpha
        backend = FisherZTester(dataset, alpha)
        mb_backend = FisherZTester(dataset, alpha_mb)

    start = time.perf_counter()
    mb_counter = CountingTester(mb_backend)
    mbs = compute_mb(mb_counter, backend.n)
    result = ALGORITHMS[algorithm](backend, mbs, m=m, order=order, seed=seed)
    result.mb_stats = mb_counter.stats
    wall_time = time.perf_counter() - start
    result.wall_time = wall_time
    logger.info(
        f"{algorithm} ({mode}): {len(result.skeleton.edges)} edges, "
        f"{mb_counter.stats.total_tests} boundary tests, "
        f"{result.stats.total_tests} learning tests, {wall_time:.3f}s"
    )
    return RunOutcome(algorithm=algorithm, mode=mode, result=result, wall_time=wall_time)


# ---------------------------------------------------------------------------
# Benchmark sweeps
# ---------------------------------------------------------------------------

@dataclass
class BenchConfig:
    """Parameters of a benchmark sweep.

    ``samples`` lists sample sizes; ``None`` stands for the oracle, an int
    for an absolute count and a string like ``"50n"`` for a multiple of the
    vertex count. When ``m`` is None, ``rsl-omega`` gets the true clique
    number of each drawn graph.
    """

    n_values: list = field(default_factory=lambda: [20, 30, 40])
    exponent: float = 0.82
    samples: list = field(default_factory=lambda: [None])
    repetitions: int = 10
    algorithms: list = field(default_factory=lambda: ["rsl-d"])
    alphas: list = field(default_factory=lambda: [0.01])
    alpha_mb: float = None
    m: int = None
    seed_base: int = 0
    workers: int = 1
    diamond_free_only: bool = False
    output_csv_file: str = None

    def validate(self):
        """Raise ``ConfigError`` on the first invalid field."""
        if not self.n_values or any(int(n) < 1 for n in self.n_values):
            raise ConfigError("Vertex counts must be positive.")
        if self.exponent <= 0:
            raise ConfigError(f"Exponent must be positive, got {self.exponent}.")
        if self.repetitions < 1:
            raise ConfigError(f"Repetitions must be at least 1, got {self.repetitions}.")
        if self.workers < 1:
            raise ConfigError(f"Workers must be at least 1, got {self.workers}.")
        if not self.algorithms:
            raise ConfigError("At least one algorithm is required.")
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise ConfigError(
                    f"Unknown algorithm {alg!r}; choose from {', '.join(ALGORITHMS)}."
                )
        if not self.alphas:
            raise ConfigError("At least one significance level is required.")
        for a in [*self.alphas, *([self.alpha_mb] if self.alpha_mb is not None else [])]:
            if not 0.0 < a < 1.0:
                raise ConfigError(f"Significance levels must lie in (0, 1), got {a}.")
        if self.m is not None and self.m < 1:
            raise ConfigError(f"Clique bound must be at least 1, got {self.m}.")
        if not self.samples:
            raise ConfigError("At least one sample size (or the oracle) is required.")
        for s in self.samples:
            if s is not None:
                for n in self.n_values:
                    _resolve_sample_count(s, n)
        return self


def _empty_metrics(row):
    for column in BENCH_COLUMNS:
        row.setdefault(column, "")
    return row


def _bench_cell(config, n, repetition):
    """Draw one graph and run every (samples, alpha, algorithm) combination on it."""
    streams = split_seed(config.seed_base, n, repetition)
    p = er_probability(n, config.exponent)
    dag = erdos_renyi_dag(n, p, streams.graph)
    summary = structure_summary(dag)
    tiebreak = int(streams.tiebreak.generate_state(1)[0])
    model = None
    rows = []

    for samples in config.samples:
        if samples is None:
            dataset = None
            alphas = [None]
        else:
            if model is None:
                model = draw_sem(dag, streams.model)
            dataset = sample_sem(model, _resolve_sample_count(samples, n), streams.data)
            alphas = config.alphas
        for alpha in alphas:
            for algorithm in config.algorithms:
                row = {
                    "n": n,
                    "p": p,
                    "repetition": repetition,
                    "seed": config.seed_base,
                    "algorithm": algorithm,
                    "mode": "oracle" if dataset is None else "data",
                    "samples": "" if samples is None else samples,
                    "alpha": "" if alpha is None else alpha,
                    "diamond_free": summary["diamond_free"],
                    "omega": summary["omega"],
                    "max_in_degree": summary["max_in_degree"],
                }
                if config.diamond_free_only and not summary["diamond_free"]:
                    rows.append(_empty_metrics(row))
                    continue
                try:
                    outcome = run_learner(
                        algorithm,
                        dag=dag if dataset is None else None,
                        dataset=dataset,
                        m=config.m if config.m is not None else summary["omega"],
                        alpha=alpha if alpha is not None else 0.01,
                        alpha_mb=config.alpha_mb,
                        seed=tiebreak,
                    )
                except (NoRemovableFoundError, LearnAutoExhaustedError) as e:
                    logger.warning(f"{algorithm} failed on n={n}, repetition {repetition}: {e}")
                    rows.append(_empty_metrics(row))
                    continue
                result = outcome.result
                report = score_skeleton(dag.skeleton(), result.skeleton)
                total, mistakes = score_sepsets(dag, result.sepsets)
                row.update(
                    ci_tests=result.stats.total_tests,
                    asc=result.stats.asc,
                    runtime=outcome.wall_time,
                    f1=report.f1,
                    precision=report.precision,
                    recall=report.recall,
                    shd=report.shd,
                    alss=alss(total, mistakes),
                    m_used="" if result.m_used is None else result.m_used,
                    fallback_used=result.fallback_used,
                )
                rows.append(row)
    return rows


def _row_key(row):
    return (row["n"], row["repetition"], row["algorithm"], str(row["alpha"]), str(row["samples"]))


def run_benchmark(config, output_log_file=None, verbose=False):
    """Sweep random instances and score every run.

    Parameters
    ----------
    config : BenchConfig
        The sweep.
    output_log_file : str, optional
        Log file path; console logging is always attached.
    verbose : bool, optional
        Log at DEBUG level.

    Returns
    -------
    list of dict
        One row per (n, repetition, samples, alpha, algorithm) with the keys
        of ``BENCH_COLUMNS``, sorted independently of execution order.
    """
    config.validate()
    console = _setup_logging(output_log_file, verbose)
    try:
        logging.info("--- Starting RSLearn benchmark ---")
        logging.info(
            f"n={config.n_values}, exponent={config.exponent}, "
            f"repetitions={config.repetitions}, algorithms={config.algorithms}"
        )
        cells = [(n, rep) for n in config.n_values for rep in range(config.repetitions)]
        rows = []
        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as executor:
                futures = {
                    executor.submit(_bench_cell, config, n, rep): (n, rep) for n, rep in cells
                }
                for future in as_completed(futures):
                    rows.extend(future.result())
        else:
            for n, rep in cells:
                rows.extend(_bench_cell(config, n, rep))
        rows.sort(key=_row_key)

        if config.output_csv_file is not None:
            _write_csv(rows, config.output_csv_file)
        logging.info("--- Benchmark Complete ---")
    finally:
        _teardown_logging(console)
    return rows


def _write_csv(rows, output_csv_file, fieldnames=None):
    """Write a list of result row dicts to a CSV file."""
    fieldnames = fieldnames or BENCH_COLUMNS
    try:
        with open(output_csv_file, "w", newline="", encoding="utf-8") as csvfile:
            writer = csv.DictWriter(csvfile, fieldnames=fieldnames, extrasaction="ignore")
            writer.writeheader()
            writer.writerows(rows)
        logging.info(f"--- Successfully wrote results to {output_csv_file} ---")
    except OSError as e:
        logging.error(f"Failed to write to CSV file {output_csv_file}: {e}")
        raise
