"""
Helper functions shared by the learner modules.
"""

import logging
import re

import numpy as np

from ..errors import ConfigError, SingularSubmatrixError

logger = logging.getLogger(__name__)

__all__ = [
    "_canonical_pair",
    "_is_independent",
    "_tie_break_ranks",
    "_resolve_sample_count",
]


def _canonical_pair(x, y):
    """
    Order an unordered vertex pair as ``(lo, hi)``.

    Parameters
    ----------
    x, y : int
        Two distinct vertex indices.

    Returns
    -------
    tuple of int
        The pair with the smaller index first.
    """
    return (x, y) if x < y else (y, x)


def _is_independent(tester, x, y, cond):
    """
    Ask *tester* whether ``x`` and ``y`` are independent given *cond*.

    A numerically singular correlation submatrix is read as dependence, which
    keeps the pair in each other's Markov boundary and never deletes an edge.

    Parameters
    ----------
    tester : CiTester
        Any object with a ``test(x, y, s)`` method.
    x, y : int
        The queried pair.
    cond : iterable of int
        The conditioning set.

    Returns
    -------
    bool
        True if the tester reports independence.
    """
    try:
        return tester.test(x, y, cond)
    except SingularSubmatrixError as e:
        logger.warning(f"Treating ({x}, {y} | {sorted(cond)}) as dependent: {e}")
        return False


def _tie_break_ranks(vertices, order=None, seed=None):
    """
    Build the secondary sort key used when Markov boundary sizes tie.

    Priority goes to an explicit *order* when given, then to a seeded random
    permutation, and finally to the vertex index itself.

    Parameters
    ----------
    vertices : iterable of int
        Vertices that will be ranked.
    order : sequence of int, optional
        Explicit priority; earlier vertices win ties. Vertices missing from
        *order* rank after the listed ones, by index.
    seed : int, numpy.random.SeedSequence or numpy.random.Generator, optional
        Seed for a random permutation of equal-size groups.

    Returns
    -------
    dict
        Mapping from vertex to an integer rank (lower goes first).
    """
    vertices = sorted(vertices)
    if order is not None:
        listed = {v: i for i, v in enumerate(order)}
        tail = len(listed)
        return {v: listed.get(v, tail + v) for v in vertices}
    if seed is not None:
        rng = np.random.default_rng(seed)
        perm = rng.permutation(len(vertices))
        return {v: int(perm[i]) for i, v in enumerate(vertices)}
    return {v: v for v in vertices}


_MULTIPLIER = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*n\s*$")


def _resolve_sample_count(samples, n):
    """
    Turn a sample size into an absolute count.

    Parameters
    ----------
    samples : int or str
        An absolute count (``1000`` or ``"1000"``) or a multiplier of the
        vertex count (``"50n"``).
    n : int
        The vertex count used by multipliers.

    Returns
    -------
    int
        The number of samples.

    Raises
    ------
    ConfigError
        If *samples* cannot be parsed or resolves to less than one sample.
    """
    if isinstance(samples, (int, np.integer)):
        count = int(samples)
    else:
        text = str(samples)
        match = _MULTIPLIER.match(text)
        if match:
            count = int(round(float(match.group(1)) * n))
        elif text.strip().isdigit():
            count = int(text)
        else:
            raise ConfigError(
                f"Unrecognised sample size {samples!r}; expected a count or a multiplier like '50n'."
            )
    if count < 1:
        raise ConfigError(f"Sample size {samples!r} resolves to {count} samples for n={n}.")
    return count
