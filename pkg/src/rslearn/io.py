"""
File formats: edge-list graphs, CSV datasets and learner result JSON.

Graph files are plain text::

    # comment
    n 3
    name 0 smoking
    0 1
    smoking 2

The ``n <count>`` line comes first. ``u v`` is the directed edge ``u -> v``;
endpoints are indices or names declared with ``name <idx> <string>``.
"""

import json
import logging
from importlib import resources

import numpy as np
import pandas as pd

from .ci import GaussianDataset
from .errors import (
    DatasetFormatError,
    GraphFormatError,
    InvalidVertexError,
    ResultFormatError,
    UnknownVertexNameError,
)
from .graph import Dag, Skeleton
from .rsl import SepSetMap

logger = logging.getLogger(__name__)

RESULT_SCHEMA = 1
FIXTURE_SUFFIX = ".edges"


def default_names(n):
    return [f"X{i}" for i in range(n)]


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------

def _resolve(token, n, by_name, path, line_no):
    if token in by_name:
        return by_name[token]
    if token.isdigit():
        v = int(token)
        if v >= n:
            raise GraphFormatError(f"Vertex index {v} is out of range for n={n}.", path, line_no)
        return v
    raise UnknownVertexNameError(f"{path}:{line_no}: unknown vertex name {token!r}")


def read_graph(path):
    """
    Parse an edge-list graph file.

    Returns
    -------
    tuple
        ``(Dag, names)`` where *names* lists one name per vertex (``X<i>``
        for undeclared ones).

    Raises
    ------
    GraphFormatError
        On a missing or malformed header, malformed lines, out-of-range
        indices, self-loops or cycles.
    UnknownVertexNameError
        If an edge names a vertex that was never declared.
    """
    n = None
    names = []
    by_name = {}
    edges = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if n is None:
                if len(tokens) != 2 or tokens[0] != "n" or not tokens[1].isdigit():
                    raise GraphFormatError("Expected header line 'n <count>'.", path, line_no)
                n = int(tokens[1])
                names = default_names(n)
                continue
            if tokens[0] == "name":
                if len(tokens) != 3 or not tokens[1].isdigit():
                    raise GraphFormatError("Expected 'name <idx> <string>'.", path, line_no)
                idx = int(tokens[1])
                if idx >= n:
                    raise GraphFormatError(f"Name index {idx} is out of range.", path, line_no)
                if tokens[2] in by_name or tokens[2].isdigit():
                    raise GraphFormatError(f"Invalid or duplicate name {tokens[2]!r}.", path, line_no)
                names[idx] = tokens[2]
                by_name[tokens[2]] = idx
                continue
            if len(tokens) != 2:
                raise GraphFormatError(f"Expected an edge 'u v', got {line!r}.", path, line_no)
            u = _resolve(tokens[0], n, by_name, path, line_no)
            v = _resolve(tokens[1], n, by_name, path, line_no)
            edges.append((u, v))
    if n is None:
        raise GraphFormatError("Missing header line 'n <count>'.", path)
    try:
        dag = Dag.from_edges(n, edges)
    except (InvalidVertexError, ValueError) as e:
        raise GraphFormatError(str(e), path) from e
    logger.debug(f"Read graph {path}: n={n}, {len(dag.edges)} edges")
    return dag, names


def write_graph(path, dag, names=None):
    """Write *dag* in the edge-list format, with name lines when *names* is given."""
    lines = [f"n {dag.n}"]
    if names is not None:
        lines.extend(f"name {i} {name}" for i, name in enumerate(names))
    lines.extend(f"{u} {v}" for u, v in dag.edges)
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------

def read_dataset(path):
    """
    Read a CSV dataset with a header row of variable names.

    Returns
    -------
    tuple
        ``(GaussianDataset, names)``.

    Raises
    ------
    DatasetFormatError
        If the file is empty or holds non-numeric cells.
    """
    try:
        df = pd.read_csv(path)
    except pd.errors.EmptyDataError as e:
        raise DatasetFormatError(f"{path}: dataset is empty.") from e
    if df.empty:
        raise DatasetFormatError(f"{path}: dataset has no samples.")
    try:
        values = df.apply(pd.to_numeric, errors="raise").to_numpy(dtype=float)
    except (ValueError, TypeError) as e:
        raise DatasetFormatError(f"{path}: non-numeric value: {e}") from e
    if np.isnan(values).any():
        raise DatasetFormatError(f"{path}: dataset has missing values.")
    return GaussianDataset(values), [str(c) for c in df.columns]


def write_dataset(path, dataset, names=None):
    """Write *dataset* as CSV, one sample per row."""
    names = names if names is not None else default_names(dataset.n_vars)
    pd.DataFrame(dataset.values, columns=names).to_csv(path, index=False)


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

def result_to_dict(result, *, algorithm, mode, names=None, seed=None, vstructures=None):
    """
    Build the JSON payload of a learner run.

    Parameters
    ----------
    result : LearnResult
        The learner output.
    algorithm : str
        CLI algorithm name.
    mode : str
        ``"oracle"`` or ``"data"``.
    names : list of str, optional
        Vertex names.
    seed : int, optional
        Tie-break seed.
    vstructures : iterable of tuple, optional
        Extracted v-structures.
    """
    n = result.skeleton.n
    return {
        "schema": RESULT_SCHEMA,
        "algorithm": algorithm,
        "mode": mode,
        "n": n,
        "names": list(names) if names is not None else default_names(n),
        "edges": [list(e) for e in sorted(result.skeleton.edges)],
        "sepsets": result.sepsets.as_list(),
        "vstructures": [list(t) for t in sorted(vstructures or ())],
        "removal_order": list(result.removal_order),
        "ci_stats": result.stats.as_dict(),
        "mb_stats": result.mb_stats.as_dict() if result.mb_stats is not None else None,
        "attempt_stats": [a.as_dict() for a in result.attempt_stats],
        "wall_time": result.wall_time,
        "fallback_used": result.fallback_used,
        "m_used": result.m_used,
        "seed": seed,
    }


def write_result(path, payload):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)


def read_result(path):
    """
    Load a result JSON file.

    Returns
    -------
    tuple
        ``(Skeleton, SepSetMap, payload)``.

    Raises
    ------
    ResultFormatError
        On invalid JSON, an unknown schema, missing keys or a separating set
        entry that names an out-of-range vertex, a self-pair or its own endpoint.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except json.JSONDecodeError as e:
        raise ResultFormatError(f"{path}: invalid JSON: {e}") from e
    if not isinstance(payload, dict) or payload.get("schema") != RESULT_SCHEMA:
        raise ResultFormatError(f"{path}: expected a result with schema {RESULT_SCHEMA}.")
    try:
        skeleton = Skeleton(payload["n"], frozenset(tuple(e) for e in payload["edges"]))
        entries = [(x, y, frozenset(s)) for x, y, s in payload["sepsets"]]
    except (KeyError, TypeError, ValueError) as e:
        raise ResultFormatError(f"{path}: malformed result: {e}") from e
    for x, y, s in entries:
        _check_sepset_entry(path, skeleton.n, x, y, s)
    sepsets = SepSetMap({(x, y): s for x, y, s in entries})
    return skeleton, sepsets, payload


def _check_sepset_entry(path, n, x, y, s):
    if not all(isinstance(v, int) and 0 <= v < n for v in (x, y, *s)):
        raise ResultFormatError(f"{path}: separating set entry ({x}, {y}, {sorted(s)}) is out of range for n={n}.")
    if x == y:
        raise ResultFormatError(f"{path}: separating set entry for ({x}, {y}) joins a vertex to itself.")
    if x in s or y in s:
        raise ResultFormatError(f"{path}: separating set of ({x}, {y}) contains an endpoint.")


# ---------------------------------------------------------------------------
# Packaged fixtures
# ---------------------------------------------------------------------------

def list_fixtures():
    """Names of the packaged graph fixtures."""
    root = resources.files("rslearn") / "fixtures"
    return sorted(
        p.name[: -len(FIXTURE_SUFFIX)] for p in root.iterdir() if p.name.endswith(FIXTURE_SUFFIX)
    )


def fixture_path(name):
    """
    Path of the packaged fixture *name*.

    Raises
    ------
    FileNotFoundError
        If no such fixture is packaged.
    """
    path = resources.files("rslearn") / "fixtures" / f"{name}{FIXTURE_SUFFIX}"
    if not path.is_file():
        raise FileNotFoundError(f"Unknown fixture {name!r}; available: {', '.join(list_fixtures())}")
    return path
