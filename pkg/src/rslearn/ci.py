"""
Conditional-independence testing.

Every tester exposes ``n`` (the number of variables) and
``test(x, y, s) -> bool`` returning True for independence. Two backends are
provided: a d-separation oracle over a known DAG and the Fisher-Z partial
correlation test over Gaussian samples. ``CountingTester`` wraps either one
with a query cache and per-run accounting.
"""

import logging
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np
from scipy import stats

from .errors import (
    DatasetFormatError,
    InsufficientSamplesError,
    InvalidQueryError,
    SingularSubmatrixError,
)
from .graph import d_separated

logger = logging.getLogger(__name__)

SINGULAR_RCOND = 1e-12
RHO_CLAMP = 1.0 - 1e-12


@dataclass(frozen=True)
class CiQuery:
    """
    A single query ``x ⊥ y | s``.

    Queries are symmetric in ``x`` and ``y``; :meth:`canonical` gives the key
    shared by both orientations.
    """

    x: int
    y: int
    s: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "s", frozenset(int(v) for v in self.s))
        if self.x == self.y:
            raise InvalidQueryError(f"CI query repeats vertex {self.x}.")
        if self.x in self.s or self.y in self.s:
            raise InvalidQueryError(
                f"Query vertices ({self.x}, {self.y}) must not be in the conditioning set."
            )

    def canonical(self):
        """Return ``(min(x, y), max(x, y), sorted s)`` as a hashable tuple."""
        lo, hi = (self.x, self.y) if self.x < self.y else (self.y, self.x)
        return (lo, hi, tuple(sorted(self.s)))

    def validate(self, n):
        """Raise ``InvalidQueryError`` unless every index lies in ``0..n-1``."""
        for v in (self.x, self.y, *self.s):
            if not 0 <= v < n:
                raise InvalidQueryError(f"Vertex {v} is out of range for {n} variables.")


@dataclass
class CiStats:
    """
    Running accounting for one learner run.

    ``total_tests`` counts unique queries actually evaluated; repeats served
    from the cache count as ``dedup_hits``.
    """

    total_tests: int = 0
    dedup_hits: int = 0
    conditioning_size_sum: int = 0
    max_conditioning_size: int = 0
    singular_count: int = 0

    def record(self, size):
        self.total_tests += 1
        self.conditioning_size_sum += size
        self.max_conditioning_size = max(self.max_conditioning_size, size)

    @property
    def asc(self):
        """Average conditioning-set size, 0.0 before any test."""
        if self.total_tests == 0:
            return 0.0
        return self.conditioning_size_sum / self.total_tests

    def merged(self, other):
        """Return the sum of two accountings."""
        return CiStats(
            total_tests=self.total_tests + other.total_tests,
            dedup_hits=self.dedup_hits + other.dedup_hits,
            conditioning_size_sum=self.conditioning_size_sum + other.conditioning_size_sum,
            max_conditioning_size=max(self.max_conditioning_size, other.max_conditioning_size),
            singular_count=self.singular_count + other.singular_count,
        )

    def as_dict(self):
        out = asdict(self)
        out["asc"] = self.asc
        return out


@dataclass(frozen=True, eq=False)
class GaussianDataset:
    """
    Continuous samples, one row per sample and one column per variable.

    The array is stored read-only; the correlation matrix is computed on first
    use and cached.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float, order="F", copy=True)
        if values.ndim != 2:
            raise DatasetFormatError(f"Expected a 2-D sample matrix, got shape {values.shape}.")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_samples(self):
        return self.values.shape[0]

    @property
    def n_vars(self):
        return self.values.shape[1]

    @cached_property
    def correlation(self):
        """Symmetric correlation matrix with an exact unit diagonal."""
        if self.n_samples < 2:
            raise InsufficientSamplesError("A correlation matrix needs at least two samples.")
        if np.any(np.std(self.values, axis=0) == 0):
            raise DatasetFormatError("Dataset contains a constant column.")
        corr = np.corrcoef(self.values, rowvar=False)
        corr = np.atleast_2d((corr + corr.T) / 2.0)
        np.fill_diagonal(corr, 1.0)
        corr.setflags(write=False)
        return corr


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------

def oracle_test(g, q):
    """
    Population-level CI answer read off the DAG *g* by d-separation.

    Parameters
    ----------
    g : Dag
        The ground-truth graph, assumed a perfect map.
    q : CiQuery
        The query.

    Returns
    -------
    bool
        True iff ``q.x`` and ``q.y`` are d-separated by ``q.s``.
    """
    q.validate(g.n)
    return d_separated(g, q.x, q.y, q.s)


def fisher_z_statistic(d, q):
    """
    Fisher-Z statistic and two-sided p-value for the query *q*.

    The partial correlation comes from the ``(|s| + 2)``-dimensional
    correlation submatrix of ``[x, y, *s]``: its inverse's leading 2x2 block
    is obtained with a linear solve.

    Parameters
    ----------
    d : GaussianDataset
        The samples.
    q : CiQuery
        The query.

    Returns
    -------
    tuple of float
        ``(statistic, pvalue)``, the statistic being
        ``sqrt(n_samples - |s| - 3) * |atanh(rho)|``.

    Raises
    ------
    InsufficientSamplesError
        If ``|s| > n_samples - 3``.
    SingularSubmatrixError
        If the reciprocal condition number of the submatrix is below 1e-12.
    """
    q.validate(d.n_vars)
    dof = d.n_samples - len(q.s) - 3
    if dof < 0:
        raise InsufficientSamplesError(
            f"Conditioning set of size {len(q.s)} needs at least {len(q.s) + 3} samples, "
            f"dataset has {d.n_samples}."
        )
    idx = [q.x, q.y, *sorted(q.s)]
    sub = d.correlation[np.ix_(idx, idx)]
    cond = np.linalg.cond(sub)
    if not np.isfinite(cond) or 1.0 / cond < SINGULAR_RCOND:
        raise SingularSubmatrixError(
            f"Correlation submatrix for ({q.x}, {q.y} | {sorted(q.s)}) is singular "
            f"(condition number {cond:.3g})."
        )
    prec = np.linalg.solve(sub, np.eye(len(idx))[:, :2])
    rho = -prec[0, 1] / np.sqrt(prec[0, 0] * prec[1, 1])
    rho = float(np.clip(rho, -RHO_CLAMP, RHO_CLAMP))
    statistic = np.sqrt(dof) * abs(np.arctanh(rho))
    pvalue = 2.0 * stats.norm.sf(statistic)
    return float(statistic), float(pvalue)


def fisher_z_test(d, q, alpha):
    """
    Fisher-Z CI test at significance *alpha*.

    Returns
    -------
    bool
        True (independent) iff the statistic is at most
        ``norm.ppf(1 - alpha / 2)``.
    """
    statistic, _ = fisher_z_statistic(d, q)
    return statistic <= stats.norm.ppf(1.0 - alpha / 2.0)


class OracleTester:
    """d-separation oracle over a known DAG."""

    def __init__(self, dag):
        self.dag = dag
        self.n = dag.n

    def test(self, x, y, s=()):
        return oracle_test(self.dag, CiQuery(x, y, frozenset(s)))


class FisherZTester:
    """Fisher-Z test over a Gaussian dataset at a fixed significance level."""

    def __init__(self, dataset, alpha=0.01):
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"Significance level must lie in (0, 1), got {alpha}.")
        self.dataset = dataset
        self.alpha = alpha
        self.n = dataset.n_vars
        self._threshold = stats.norm.ppf(1.0 - alpha / 2.0)

    def test(self, x, y, s=()):
        statistic, _ = fisher_z_statistic(self.dataset, CiQuery(x, y, frozenset(s)))
        return statistic <= self._threshold


class CountingTester:
    """
    Caching, counting wrapper around another tester.

    Parameters
    ----------
    inner : tester
        The wrapped backend.
    cache : dict, optional
        Answer cache keyed by canonical query. Pass the same dict to several
        wrappers to share answers between them while keeping separate stats.
    """

    def __init__(self, inner, cache=None):
        self.inner = inner
        self.n = inner.n
        self.cache = {} if cache is None else cache
        self.stats = CiStats()

    def test(self, x, y, s=()):
        q = CiQuery(x, y, frozenset(s))
        key = q.canonical()
        if key in self.cache:
            self.stats.dedup_hits += 1
            answer = self.cache[key]
            if isinstance(answer, SingularSubmatrixError):
                raise answer
            return answer
        try:
            answer = self.inner.test(q.x, q.y, q.s)
        except SingularSubmatrixError as e:
            self.stats.record(len(q.s))
            self.stats.singular_count += 1
            self.cache[key] = e
            raise
        # Only answered queries are counted and cached.
        self.stats.record(len(q.s))
        self.cache[key] = answer
        return answer

    def reset_stats(self):
        """Start a fresh accounting; the cache is kept."""
        self.stats = CiStats()


def counting_tester(inner, cache=None):
    """Wrap *inner* in a :class:`CountingTester`."""
    return CountingTester(inner, cache=cache)
