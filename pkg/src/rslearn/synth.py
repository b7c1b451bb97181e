"""
Random DAGs and linear Gaussian structural equation models.

All randomness flows through ``numpy.random.Generator`` objects built from
the ``seed`` argument, which may be an int, a ``SeedSequence`` or a
``Generator``. ``split_seed`` derives the independent streams one benchmark
repetition needs.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .ci import GaussianDataset
from .graph import Dag

logger = logging.getLogger(__name__)

COEFFICIENT_RANGE = (1.0, 1.5)
NOISE_STD_RANGE = (np.sqrt(0.5), np.sqrt(1.5))


@dataclass(frozen=True)
class SeedStreams:
    """Independent seed streams for one (n, repetition) benchmark cell."""

    graph: np.random.SeedSequence
    model: np.random.SeedSequence
    data: np.random.SeedSequence
    tiebreak: np.random.SeedSequence


def split_seed(seed_base, n, repetition):
    """
    Derive the streams of one benchmark cell.

    The root is ``SeedSequence([seed_base, n, repetition])``, spawned into the
    graph, model, data and tie-break streams in that order.
    """
    root = np.random.SeedSequence([int(seed_base), int(n), int(repetition)])
    return SeedStreams(*root.spawn(4))


@dataclass(frozen=True, eq=False)
class SemModel:
    """
    Linear SEM over a DAG.

    Parameters
    ----------
    dag : Dag
        The structure.
    coefficients : dict
        Edge ``(u, v)`` to its weight.
    noise_stddev : tuple of float
        Per-vertex standard deviation of the Gaussian noise.
    """

    dag: Dag
    coefficients: dict
    noise_stddev: tuple

    def weight_matrix(self):
        """``W[u, v]`` is the weight of ``u -> v``, zero elsewhere."""
        w = np.zeros((self.dag.n, self.dag.n))
        for (u, v), c in self.coefficients.items():
            w[u, v] = c
        return w


def er_probability(n, exponent):
    """Edge probability ``n ** -exponent`` used by the benchmark sweeps."""
    return float(n) ** -float(exponent)


def erdos_renyi_dag(n, p, seed=None):
    """
    Erdos-Renyi DAG.

    A uniformly random topological order is drawn first; each of the
    ``n * (n - 1) / 2`` forward pairs then becomes an edge with probability
    *p*.

    Parameters
    ----------
    n : int
        Vertex count.
    p : float
        Edge probability in ``[0, 1]``.
    seed : optional
        Seed for ``numpy.random.default_rng``.

    Returns
    -------
    Dag
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Edge probability must lie in [0, 1], got {p}.")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    rows, cols = np.triu_indices(n, k=1)
    keep = rng.random(rows.size) < p
    edges = zip(perm[rows[keep]].tolist(), perm[cols[keep]].tolist())
    dag = Dag.from_edges(n, edges)
    logger.debug(f"Drew ER DAG with n={n}, p={p:.4f}: {len(dag.edges)} edges")
    return dag


def draw_sem(dag, seed=None):
    """
    Draw SEM parameters for *dag*.

    Weights have magnitude uniform on ``[1, 1.5]`` and a fair random sign;
    noise standard deviations are uniform on ``[sqrt(0.5), sqrt(1.5)]``.
    """
    rng = np.random.default_rng(seed)
    edges = dag.edges
    magnitudes = rng.uniform(*COEFFICIENT_RANGE, size=len(edges))
    signs = rng.choice([-1.0, 1.0], size=len(edges))
    coefficients = {e: float(s * m) for e, s, m in zip(edges, signs, magnitudes)}
    noise_stddev = tuple(float(s) for s in rng.uniform(*NOISE_STD_RANGE, size=dag.n))
    return SemModel(dag, coefficients, noise_stddev)


def sample_sem(model, n_samples, seed=None):
    """
    Forward-sample *model* in topological order.

    Returns
    -------
    GaussianDataset
        ``n_samples`` rows, one column per vertex.
    """
    if n_samples < 1:
        raise ValueError(f"Need at least one sample, got {n_samples}.")
    rng = np.random.default_rng(seed)
    n = model.dag.n
    w = model.weight_matrix()
    x = rng.standard_normal((n_samples, n)) * np.asarray(model.noise_stddev, dtype=float)
    for v in model.dag.topological_order:
        parents = sorted(model.dag.parents[v])
        if parents:
            x[:, v] += x[:, parents] @ w[parents, v]
    return GaussianDataset(x)
