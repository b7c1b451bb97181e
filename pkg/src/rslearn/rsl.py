"""
Recursive structure learning.

The learner repeatedly picks a removable vertex of the active set, finds its
neighbours and the separating sets of its non-neighbours, records them,
repairs the Markov boundaries and drops the vertex. Two removability tests
are provided: one for graphs whose clique number is bounded by a known
``m`` and one for diamond-free graphs. ``learn_auto`` needs neither and
raises the clique bound until the learned skeleton verifies it.
"""

import logging
import time
from dataclasses import dataclass, field, replace
from itertools import combinations

from .ci import CiStats, CountingTester
from .errors import (
    ConfigError,
    LearnAutoExhaustedError,
    MissingSepsetError,
    NoRemovableFoundError,
)
from .graph import Skeleton, clique_number
from .helpers.helpers import _canonical_pair, _is_independent, _tie_break_ranks
from .mb import compute_mb, update_mb

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Side information
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundedClique:
    """The clique number of the true graph is at most ``m``."""

    m: int

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise ConfigError(f"Clique bound must be a positive integer, got {self.m!r}.")


@dataclass(frozen=True)
class DiamondFree:
    """The true graph has no diamond."""


@dataclass(frozen=True)
class Auto:
    """No side information; search over clique bounds."""


SideInfo = BoundedClique | DiamondFree | Auto


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

class SepSetMap:
    """Separating sets keyed by unordered vertex pair."""

    def __init__(self, entries=None):
        self.entries = {}
        for (x, y), s in (entries or {}).items():
            self.set(x, y, s)

    def set(self, x, y, s):
        self.entries[_canonical_pair(x, y)] = frozenset(s)

    def get(self, x, y):
        return self.entries[_canonical_pair(x, y)]

    def __contains__(self, pair):
        x, y = pair
        return _canonical_pair(x, y) in self.entries

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, SepSetMap):
            return NotImplemented
        return self.entries == other.entries

    def items(self):
        return sorted(self.entries.items())

    def as_list(self):
        """Return ``[[x, y, sorted s], ...]`` for serialization."""
        return [[x, y, sorted(s)] for (x, y), s in self.items()]


@dataclass
class LearnResult:
    """
    Output of one learner run.

    ``stats`` covers the learning phase; ``mb_stats`` the Markov boundary
    discovery that preceded it, when it was run by the same call. For
    ``learn_auto`` ``stats`` is cumulative and ``attempt_stats`` holds one
    entry per clique bound tried.
    """

    skeleton: Skeleton
    sepsets: SepSetMap
    stats: CiStats
    removal_order: list
    fallback_used: bool = False
    mb_stats: CiStats = None
    m_used: int = None
    attempt_stats: list = field(default_factory=list)
    wall_time: float = 0.0


# ---------------------------------------------------------------------------
# Bounded clique number
# ---------------------------------------------------------------------------

def _passes_clique_check(x, tester, mb_x, m):
    mb = sorted(mb_x)
    if m == 1:
        return not mb
    for size in range(min(m - 1, len(mb) + 1)):
        for s in combinations(mb, size):
            rest = [v for v in mb if v not in s]
            rest_set = set(rest)
            for i, y in enumerate(rest):
                if _is_independent(tester, x, y, rest_set - {y}):
                    return False
                for z in rest[i + 1:]:
                    if _is_independent(tester, y, z, (rest_set - {y, z}) | {x}):
                        return False
    return True


def _scan_order(active, mbs, ranks):
    return sorted(active, key=lambda v: (len(mbs[v]), ranks.get(v, v), v))


def find_removable_omega(active, tester, mbs, m, *, flags=None, ranks=None):
    """
    Find a removable vertex of a graph with clique number at most ``m``.

    Vertices are scanned by increasing boundary size. ``x`` passes when, for
    every ``S`` in ``Mb(x)`` with ``|S| <= m - 2``:

    - every pair ``Y, Z`` of ``Mb(x) - S`` is dependent given
      ``(Mb(x) | {x}) - ({Y, Z} | S)``, and
    - every ``Y`` of ``Mb(x) - S`` is dependent on ``x`` given
      ``Mb(x) - ({Y} | S)``.

    With ``m == 1`` the graph is edgeless and ``x`` passes iff its boundary
    is empty.

    Parameters
    ----------
    active : iterable of int
        The current vertex set.
    tester : tester
        CI tester.
    mbs : MbMap
        Boundaries of the active vertices.
    m : int
        Clique bound.
    flags : dict, optional
        Recheck flags; vertices flagged False are skipped and a failed check
        clears the flag.
    ranks : dict, optional
        Secondary sort key for equal boundary sizes.

    Returns
    -------
    int
        The first vertex that passes.

    Raises
    ------
    NoRemovableFoundError
        If no candidate passes.
    """
    ranks = ranks or {}
    for x in _scan_order(active, mbs, ranks):
        if flags is not None and not flags.get(x, True):
            continue
        if _passes_clique_check(x, tester, mbs[x], m):
            return x
        if flags is not None:
            flags[x] = False
    raise NoRemovableFoundError(m, sorted(active))


def find_neighbors_omega(x, active, tester, mb_x, m):
    """
    Neighbours and separating sets of ``x`` under clique bound ``m``.

    Vertices outside ``Mb(x)`` are separated by ``Mb(x)``. A member ``y`` of
    the boundary is a co-parent iff some ``S`` of size ``m - 1`` drawn from
    ``Mb(x) - {y}`` makes ``x`` and ``y`` independent given
    ``Mb(x) - ({y} | S)``; that set is recorded. The remaining members are
    neighbours.

    Returns
    -------
    tuple
        ``(neighbors, sepsets)`` with *neighbors* a frozenset and *sepsets* a
        dict from the other vertex to its separating set.
    """
    mb = set(mb_x)
    sepsets = {y: frozenset(mb) for y in sorted(active) if y != x and y not in mb}
    neighbors = set()
    for y in sorted(mb):
        others = sorted(mb - {y})
        witness = None
        for s in combinations(others, m - 1):
            cond = mb - {y} - set(s)
            if _is_independent(tester, x, y, cond):
                witness = cond
                break
        if witness is None:
            neighbors.add(y)
        else:
            sepsets[y] = frozenset(witness)
    return frozenset(neighbors), sepsets


# ---------------------------------------------------------------------------
# Diamond-free graphs
# ---------------------------------------------------------------------------

def _passes_diamond_check(x, tester, mb_x):
    mb = sorted(mb_x)
    closure = set(mb) | {x}
    for y, z in combinations(mb, 2):
        if _is_independent(tester, y, z, closure - {y, z}):
            return False
    return True


def find_removable_d(active, tester, mbs, *, flags=None, ranks=None):
    """
    Find a removable vertex of a diamond-free graph.

    ``x`` passes when every pair ``Y, Z`` of ``Mb(x)`` is dependent given
    ``(Mb(x) | {x}) - {Y, Z}``. If nothing passes the graph is not
    diamond-free; the vertex with the smallest boundary is returned instead
    and flagged as a fallback.

    Returns
    -------
    tuple
        ``(vertex, fallback)``.
    """
    ranks = ranks or {}
    scan = _scan_order(active, mbs, ranks)
    for x in scan:
        if flags is not None and not flags.get(x, True):
            continue
        if _passes_diamond_check(x, tester, mbs[x]):
            return x, False
        if flags is not None:
            flags[x] = False
    x = scan[0]
    logger.warning(
        f"No vertex passed the diamond-free removability check among {len(scan)} "
        f"active vertices; falling back to vertex {x} with boundary size {len(mbs[x])}"
    )
    return x, True


def find_neighbors_d(x, active, tester, mb_x):
    """
    Neighbours and separating sets of ``x`` in a diamond-free graph.

    A member ``y`` of ``Mb(x)`` is a co-parent iff a single ``z`` of
    ``Mb(x) - {y}`` makes ``x`` and ``y`` independent given
    ``Mb(x) - {y, z}``.

    Returns
    -------
    tuple
        ``(neighbors, sepsets)`` as in :func:`find_neighbors_omega`.
    """
    mb = set(mb_x)
    sepsets = {y: frozenset(mb) for y in sorted(active) if y != x and y not in mb}
    neighbors = set()
    for y in sorted(mb):
        witness = None
        for z in sorted(mb - {y}):
            cond = mb - {y, z}
            if _is_independent(tester, x, y, cond):
                witness = cond
                break
        if witness is None:
            neighbors.add(y)
        else:
            sepsets[y] = frozenset(witness)
    return frozenset(neighbors), sepsets


# ---------------------------------------------------------------------------
# Drivers
# ---------------------------------------------------------------------------

def _counting(tester):
    return tester if isinstance(tester, CountingTester) else CountingTester(tester)


def rsl_learn(tester, mbs, side, *, order=None, seed=None):
    """
    Learn a skeleton and separating sets from precomputed Markov boundaries.

    Parameters
    ----------
    tester : tester
        CI tester. A plain backend is wrapped in a fresh
        :class:`~rslearn.ci.CountingTester`; pass a counting tester to share
        its cache.
    mbs : MbMap
        Boundaries of all vertices. Not modified.
    side : BoundedClique or DiamondFree
        Side information selecting the removability test.
    order : sequence of int, optional
        Explicit tie-break priority among vertices of equal boundary size.
    seed : optional
        Seed for a random tie-break permutation when *order* is not given.

    Returns
    -------
    LearnResult

    Raises
    ------
    NoRemovableFoundError
        Under ``BoundedClique`` when no active vertex passes.
    ConfigError
        If *side* is ``Auto``; use :func:`learn_auto`.
    """
    if isinstance(side, Auto):
        raise ConfigError("rsl_learn needs a clique bound or diamond-freeness; use learn_auto.")
    if not isinstance(side, (BoundedClique, DiamondFree)):
        raise ConfigError(f"Unknown side information {side!r}.")

    start = time.perf_counter()
    tester = _counting(tester)
    mbs = mbs.copy()
    active = set(mbs.active)
    ranks = _tie_break_ranks(active, order=order, seed=seed)
    flags = {v: True for v in active}
    edges = set()
    sepsets = SepSetMap()
    removal_order = []
    fallback_used = False

    while len(active) > 1:
        if isinstance(side, BoundedClique):
            x = find_removable_omega(active, tester, mbs, side.m, flags=flags, ranks=ranks)
            neighbors, found = find_neighbors_omega(x, active, tester, mbs[x], side.m)
        else:
            x, fallback = find_removable_d(active, tester, mbs, flags=flags, ranks=ranks)
            fallback_used = fallback_used or fallback
            neighbors, found = find_neighbors_d(x, active, tester, mbs[x])

        for y in neighbors:
            edges.add(_canonical_pair(x, y))
        for y, s in found.items():
            sepsets.set(x, y, s)

        touched = set(mbs[x])
        update_mb(x, tester, neighbors, mbs)
        for v in touched:
            flags[v] = True
        del flags[x]
        active.discard(x)
        removal_order.append(x)
        logger.debug(f"Removed {x}: neighbours {sorted(neighbors)}, {len(active)} left")

    removal_order.extend(sorted(active))
    result = LearnResult(
        skeleton=Skeleton(tester.n, frozenset(edges)),
        sepsets=sepsets,
        stats=replace(tester.stats),
        removal_order=removal_order,
        fallback_used=fallback_used,
        m_used=side.m if isinstance(side, BoundedClique) else None,
        wall_time=time.perf_counter() - start,
    )
    logger.info(
        f"Learned {len(edges)} edges over {tester.n} vertices with "
        f"{result.stats.total_tests} CI tests"
    )
    return result


def learn_auto(tester_factory, n, *, mbs=None, mb_tester=None, order=None, seed=None):
    """
    Learn without side information by raising the clique bound.

    For ``m = 1, 2, ...`` the bounded-clique learner runs with a fresh
    counting tester; the first output whose clique number is at most ``m``
    is returned. Answers are cached across attempts, accounting is kept per
    attempt.

    Parameters
    ----------
    tester_factory : callable
        Returns a backend tester over ``n`` variables.
    n : int
        Number of variables.
    mbs : MbMap, optional
        Precomputed boundaries. Computed with *mb_tester* (or a tester from
        the factory) when omitted.
    mb_tester : tester, optional
        Backend for boundary discovery.
    order, seed : optional
        Tie-break controls passed to :func:`rsl_learn`.

    Returns
    -------
    tuple
        ``(LearnResult, m_used)``.

    Raises
    ------
    LearnAutoExhaustedError
        If no bound up to ``n`` verifies.
    """
    start = time.perf_counter()
    mb_stats = None
    if mbs is None:
        mb_counter = CountingTester(mb_tester if mb_tester is not None else tester_factory())
        mbs = compute_mb(mb_counter, n)
        mb_stats = mb_counter.stats

    if n == 0:
        result = LearnResult(
            skeleton=Skeleton(0),
            sepsets=SepSetMap(),
            stats=CiStats(),
            removal_order=[],
            mb_stats=mb_stats,
            m_used=0,
        )
        return result, 0

    cache = {}
    attempts = []
    for m in range(1, n + 1):
        counter = CountingTester(tester_factory(), cache=cache)
        try:
            result = rsl_learn(counter, mbs, BoundedClique(m), order=order, seed=seed)
        except NoRemovableFoundError as e:
            attempts.append(replace(counter.stats))
            logger.info(f"Clique bound {m} rejected: {e}")
            continue
        attempts.append(replace(counter.stats))
        omega = clique_number(result.skeleton)
        if omega <= m:
            total = CiStats()
            for a in attempts:
                total = total.merged(a)
            result.stats = total
            result.attempt_stats = attempts
            result.mb_stats = mb_stats
            result.m_used = m
            result.wall_time = time.perf_counter() - start
            logger.info(f"Clique bound {m} verified after {len(attempts)} attempts")
            return result, m
        logger.info(f"Clique bound {m} rejected: learned skeleton has clique number {omega}")
    raise LearnAutoExhaustedError(f"No clique bound from 1 to {n} produced a verified skeleton.")


def learn_structure(tester, side, *, mb_tester=None, order=None, seed=None):
    """
    Run boundary discovery followed by the learner selected by *side*.

    Parameters
    ----------
    tester : tester
        Backend used for learning (and for boundary discovery unless
        *mb_tester* is given).
    side : SideInfo
        ``BoundedClique``, ``DiamondFree`` or ``Auto``.
    mb_tester : tester, optional
        Backend for boundary discovery, e.g. a Fisher-Z tester at a
        different significance level.

    Returns
    -------
    LearnResult
        With ``mb_stats`` filled in.
    """
    inner = tester.inner if isinstance(tester, CountingTester) else tester
    mb_counter = CountingTester(mb_tester if mb_tester is not None else inner)
    mbs = compute_mb(mb_counter, inner.n)
    if isinstance(side, Auto):
        result, _ = learn_auto(lambda: inner, inner.n, mbs=mbs, order=order, seed=seed)
    else:
        result = rsl_learn(CountingTester(inner), mbs, side, order=order, seed=seed)
    result.mb_stats = mb_counter.stats
    return result


def extract_vstructures(skeleton, sepsets):
    """
    Read the v-structures off a skeleton and its separating sets.

    ``(y, x, z)`` with ``y < z`` is emitted when ``y - x - z`` is an induced
    path of the skeleton and ``x`` is not in the separating set of
    ``(y, z)``.

    Raises
    ------
    MissingSepsetError
        If a consulted non-adjacent pair has no separating set.
    """
    adj = skeleton.adjacency
    out = set()
    for x in range(skeleton.n):
        for y, z in combinations(sorted(adj[x]), 2):
            if z in adj[y]:
                continue
            if (y, z) not in sepsets:
                raise MissingSepsetError(f"No separating set recorded for ({y}, {z}).")
            if x not in sepsets.get(y, z):
                out.add((y, x, z))
    return out
