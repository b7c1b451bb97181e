"""
Markov boundary discovery and maintenance.

``compute_mb`` finds every boundary by total conditioning. ``update_mb``
repairs the boundaries after a removable vertex leaves the active set.
"""

import logging
from itertools import combinations

from .helpers.helpers import _is_independent

logger = logging.getLogger(__name__)


class MbMap:
    """
    Markov boundaries of the active vertices.

    Maps each active vertex to the set of active vertices in its boundary.
    The relation is kept symmetric by every mutation in this module.

    Parameters
    ----------
    boundaries : dict, optional
        Mapping from vertex to an iterable of vertices.
    """

    def __init__(self, boundaries=None):
        self.boundaries = {int(v): set(mb) for v, mb in (boundaries or {}).items()}

    def __getitem__(self, v):
        return self.boundaries[v]

    def __contains__(self, v):
        return v in self.boundaries

    def __iter__(self):
        return iter(sorted(self.boundaries))

    def __len__(self):
        return len(self.boundaries)

    def __delitem__(self, v):
        del self.boundaries[v]

    def __eq__(self, other):
        if not isinstance(other, MbMap):
            return NotImplemented
        return self.boundaries == other.boundaries

    def __repr__(self):
        return f"MbMap({self.as_dict()})"

    @property
    def active(self):
        return tuple(sorted(self.boundaries))

    def copy(self):
        return MbMap(self.boundaries)

    def as_dict(self):
        """Return ``{vertex: sorted list}`` for serialization."""
        return {v: sorted(self.boundaries[v]) for v in sorted(self.boundaries)}

    def is_symmetric(self):
        """True iff ``y in Mb(x)`` exactly when ``x in Mb(y)`` for all active pairs."""
        for x, mb in self.boundaries.items():
            if x in mb:
                return False
            for y in mb:
                if y not in self.boundaries or x not in self.boundaries[y]:
                    return False
        return True

    def max_size(self):
        return max((len(mb) for mb in self.boundaries.values()), default=0)


def compute_mb(tester, n):
    """
    Markov boundaries of all ``n`` variables by total conditioning.

    Each unordered pair is tested once, conditioning on every other variable;
    dependent pairs enter each other's boundary. Exactly ``n * (n - 1) / 2``
    tests are issued.

    Parameters
    ----------
    tester : tester
        CI tester over ``n`` variables.
    n : int
        Number of variables.

    Returns
    -------
    MbMap
    """
    mbs = MbMap({v: () for v in range(n)})
    everything = set(range(n))
    for x, y in combinations(range(n), 2):
        if not _is_independent(tester, x, y, everything - {x, y}):
            mbs[x].add(y)
            mbs[y].add(x)
    logger.info(
        f"Markov boundary discovery over {n} variables: max boundary size {mbs.max_size()}"
    )
    return mbs


def update_mb(x, tester, neighbors_x, mbs):
    """
    Remove ``x`` from the boundaries and repair the ones it affected.

    ``x`` leaves every boundary it belonged to. When ``x`` had no co-parents
    (its neighbours are its whole boundary), a pair of its neighbours may
    have been linked only through ``x``; each still-linked pair is retested
    conditioning on the smaller of the two boundaries, preferring the first
    vertex's on ties, and dropped on independence.

    Parameters
    ----------
    x : int
        A removable vertex of the current active set.
    tester : tester
        CI tester.
    neighbors_x : iterable of int
        The neighbours of ``x`` in the current active set.
    mbs : MbMap
        Current boundaries; mutated in place.

    Returns
    -------
    MbMap
        *mbs*, without ``x``.
    """
    mb_x = set(mbs[x])
    for y in mb_x:
        mbs[y].discard(x)
    del mbs[x]

    neighbors_x = set(neighbors_x)
    if neighbors_x != mb_x:
        return mbs

    for y, z in combinations(sorted(neighbors_x), 2):
        if z not in mbs[y]:
            continue
        cond_y = mbs[y] - {z}
        cond_z = mbs[z] - {y}
        cond = cond_y if len(cond_y) <= len(cond_z) else cond_z
        if _is_independent(tester, y, z, cond):
            logger.debug(f"Dropping {y} and {z} from each other's boundary after removing {x}")
            mbs[y].discard(z)
            mbs[z].discard(y)
    return mbs
