"""
Graph representations and graph-side ground truth.

Vertices are dense 0-based integers. ``Dag`` holds ground-truth and learned
directed structures, ``Skeleton`` the undirected learning output, and
``VertexSubset`` an active vertex set. All three are immutable.

The functions here answer questions from the graph itself (d-separation,
diamonds, clique number, removability, Markov boundaries); the learners in
:mod:`rslearn.rsl` only ever see CI answers and are checked against them.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import networkx as nx

from .errors import InvalidVertexError
from .helpers.helpers import _canonical_pair

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Dag:
    """
    Directed acyclic graph over vertices ``0..n-1``.

    Parameters
    ----------
    n : int
        Vertex count.
    parents : sequence of iterables of int
        ``parents[v]`` lists the parents of ``v``. Stored as a tuple of
        frozensets.

    Raises
    ------
    InvalidVertexError
        On out-of-range parents or self-loops.
    ValueError
        If the parent relation contains a directed cycle.
    """

    n: int
    parents: tuple = field(default=())

    def __post_init__(self):
        if self.n < 0:
            raise InvalidVertexError(f"Vertex count must be non-negative, got {self.n}.")
        parents = tuple(frozenset(int(p) for p in ps) for ps in self.parents)
        if not parents:
            parents = tuple(frozenset() for _ in range(self.n))
        if len(parents) != self.n:
            raise InvalidVertexError(
                f"Expected {self.n} parent sets, got {len(parents)}."
            )
        for v, ps in enumerate(parents):
            for p in ps:
                if not 0 <= p < self.n:
                    raise InvalidVertexError(f"Parent {p} of vertex {v} is out of range.")
                if p == v:
                    raise InvalidVertexError(f"Self-loop on vertex {v}.")
        object.__setattr__(self, "parents", parents)
        # Populates the cache and rejects cycles.
        self.topological_order

    @classmethod
    def from_edges(cls, n, edges):
        """Build a DAG from ``(u, v)`` pairs meaning ``u -> v``."""
        parents = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidVertexError(f"Edge ({u}, {v}) is out of range for n={n}.")
            parents[v].add(u)
        return cls(n, tuple(parents))

    @classmethod
    def from_networkx(cls, graph):
        """Build a DAG from a ``networkx.DiGraph`` whose nodes are ``0..n-1``."""
        return cls.from_edges(graph.number_of_nodes(), graph.edges())

    @cached_property
    def children(self):
        """Tuple of frozensets; ``children[v]`` are the children of ``v``."""
        kids = [set() for _ in range(self.n)]
        for v, ps in enumerate(self.parents):
            for p in ps:
                kids[p].add(v)
        return tuple(frozenset(k) for k in kids)

    @cached_property
    def topological_order(self):
        """A topological order of the vertices (Kahn's algorithm, smallest index first)."""
        indegree = [len(ps) for ps in self.parents]
        kids = self.children
        ready = sorted(v for v in range(self.n) if indegree[v] == 0)
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for c in sorted(kids[v]):
                indegree[c] -= 1
                if indegree[c] == 0:
                    ready.append(c)
            ready.sort()
        if len(order) != self.n:
            raise ValueError("The parent relation contains a directed cycle.")
        return tuple(order)

    @property
    def edges(self):
        """Sorted list of directed edges ``(u, v)``."""
        return sorted((p, v) for v, ps in enumerate(self.parents) for p in ps)

    def neighbors(self, v):
        """Parents and children of ``v``."""
        return self.parents[v] | self.children[v]

    def skeleton(self):
        """The undirected version of this DAG."""
        return Skeleton(self.n, frozenset(_canonical_pair(u, v) for u, v in self.edges))

    def max_in_degree(self):
        """Largest parent-set size (0 for the empty graph)."""
        return max((len(ps) for ps in self.parents), default=0)

    def max_degree(self):
        """Largest number of neighbours of any vertex."""
        return max((len(self.neighbors(v)) for v in range(self.n)), default=0)

    def to_networkx(self):
        """Return the DAG as a ``networkx.DiGraph``."""
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


@dataclass(frozen=True)
class Skeleton:
    """
    Undirected graph over vertices ``0..n-1``.

    Edges are stored canonically as ``(lo, hi)`` pairs.
    """

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        canonical = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise InvalidVertexError(f"Self-loop on vertex {u}.")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidVertexError(f"Edge ({u}, {v}) is out of range for n={self.n}.")
            canonical.add(_canonical_pair(u, v))
        object.__setattr__(self, "edges", frozenset(canonical))

    @cached_property
    def adjacency(self):
        """Tuple of frozensets; ``adjacency[v]`` are the neighbours of ``v``."""
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    def has_edge(self, u, v):
        return _canonical_pair(u, v) in self.edges

    def to_networkx(self):
        """Return the skeleton as a ``networkx.Graph``."""
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


@dataclass(frozen=True)
class VertexSubset:
    """Sorted set of active vertex indices."""

    active: tuple

    def __post_init__(self):
        object.__setattr__(self, "active", tuple(sorted(set(int(v) for v in self.active))))

    def __contains__(self, v):
        return v in set(self.active)

    def __len__(self):
        return len(self.active)


def _check_vertex(g, v):
    if not isinstance(v, int) or not 0 <= v < g.n:
        raise InvalidVertexError(f"Vertex {v!r} is out of range for n={g.n}.")


def _undirected(g):
    if isinstance(g, Dag):
        return g.skeleton().adjacency
    return g.adjacency


# ---------------------------------------------------------------------------
# d-separation
# ---------------------------------------------------------------------------

def d_separated(g, x, y, s):
    """
    Test whether ``x`` and ``y`` are d-separated by ``s`` in *g*.

    Uses the ancestral moral graph: restrict to the ancestors of
    ``{x, y} | s``, marry co-parents, drop ``s`` and check undirected
    reachability. The moral neighbourhood is generated on the fly, so a query
    costs time linear in the ancestral subgraph.

    Parameters
    ----------
    g : Dag
        The graph.
    x, y : int
        Distinct query vertices, neither in *s*.
    s : iterable of int
        The conditioning set.

    Returns
    -------
    bool
        True iff every path between ``x`` and ``y`` is blocked by ``s``.

    Raises
    ------
    InvalidVertexError
        If an index is out of range, ``x == y`` or ``x``/``y`` is in ``s``.
    """
    s = frozenset(s)
    _check_vertex(g, x)
    _check_vertex(g, y)
    for v in s:
        _check_vertex(g, v)
    if x == y:
        raise InvalidVertexError(f"d-separation query repeats vertex {x}.")
    if x in s or y in s:
        raise InvalidVertexError(f"Query vertices ({x}, {y}) must not be in the conditioning set.")

    parents = g.parents
    children = g.children

    ancestral = set()
    stack = [x, y, *s]
    while stack:
        v = stack.pop()
        if v in ancestral:
            continue
        ancestral.add(v)
        stack.extend(parents[v])

    seen = {x}
    stack = [x]
    while stack:
        v = stack.pop()
        moral = set(parents[v])
        for c in children[v]:
            if c in ancestral:
                moral.add(c)
                moral.update(parents[c])
        for w in moral:
            if w == y:
                return False
            if w in seen or w in s:
                continue
            seen.add(w)
            stack.append(w)
    return True


def induced_subgraph(g, vs):
    """
    Restrict *g* to the vertices of *vs*, re-indexed in sorted order.

    Vertex ``vs.active[i]`` of *g* becomes vertex ``i`` of the result.

    Parameters
    ----------
    g : Dag
        The graph.
    vs : VertexSubset
        The vertices to keep.

    Returns
    -------
    Dag
        The induced subgraph on ``len(vs)`` vertices.
    """
    for v in vs.active:
        _check_vertex(g, v)
    index = {v: i for i, v in enumerate(vs.active)}
    parents = tuple(
        frozenset(index[p] for p in g.parents[v] if p in index) for v in vs.active
    )
    return Dag(len(vs.active), parents)


# ---------------------------------------------------------------------------
# Diamonds and cliques
# ---------------------------------------------------------------------------

def find_diamond(g):
    """
    Return one diamond of the skeleton of *g*, or None.

    A diamond is an induced four-vertex subgraph with five edges; the missing
    edge joins its two degree-2 vertices. Every diamond is an edge ``(u, v)``
    whose endpoints share two non-adjacent common neighbours ``(a, b)``, so
    the scan runs over edges and pairs of common neighbours.

    Parameters
    ----------
    g : Dag or Skeleton
        The graph.

    Returns
    -------
    tuple of int or None
        ``(u, v, a, b)`` with ``u - v`` the shared edge and ``a``, ``b`` the
        non-adjacent pair, or None when the graph is diamond-free.
    """
    adj = _undirected(g)
    for u in range(len(adj)):
        for v in adj[u]:
            if v < u:
                continue
            common = sorted(adj[u] & adj[v])
            for a, b in combinations(common, 2):
                if b not in adj[a]:
                    return (u, v, a, b)
    return None


def is_diamond_free(g):
    """True iff the skeleton of *g* has no diamond as an induced subgraph."""
    return find_diamond(g) is None


def clique_number(g):
    """
    Exact clique number of the skeleton of *g*.

    Maximal cliques are enumerated with networkx's pivoting Bron-Kerbosch
    (``nx.find_cliques``), which is fast on sparse graphs.

    Parameters
    ----------
    g : Dag or Skeleton
        The graph.

    Returns
    -------
    int
        Size of the largest clique; 0 for the empty graph, 1 when edgeless.
    """
    if g.n == 0:
        return 0
    undirected = g.skeleton().to_networkx() if isinstance(g, Dag) else g.to_networkx()
    return max(len(c) for c in nx.find_cliques(undirected))


# ---------------------------------------------------------------------------
# Removability and Markov boundaries
# ---------------------------------------------------------------------------

def is_removable(g, x):
    """
    Graph-side removability of ``x``.

    ``x`` is removable iff for every child ``W`` of ``x``:

    - every neighbour of ``x`` is ``W`` or adjacent to ``W``, and
    - ``Pa(Y)`` is a subset of ``Pa(W)`` for every child ``Y`` of ``x``
      that is also a parent of ``W``.

    Removing a removable vertex keeps every d-separation among the other
    vertices unchanged.

    Parameters
    ----------
    g : Dag
        The graph.
    x : int
        The vertex.

    Returns
    -------
    bool
    """
    _check_vertex(g, x)
    nbr_x = g.neighbors(x)
    for w in g.children[x]:
        if not nbr_x <= (g.neighbors(w) | {w}):
            return False
        for y in g.children[x] & g.parents[w]:
            if not g.parents[y] <= g.parents[w]:
                return False
    return True


def true_mb(g, x):
    """
    Markov boundary of ``x`` under the perfect-map assumption.

    Returns
    -------
    frozenset of int
        Parents, children and co-parents of ``x``.
    """
    _check_vertex(g, x)
    mb = set(g.parents[x]) | set(g.children[x])
    for c in g.children[x]:
        mb.update(g.parents[c])
    mb.discard(x)
    return frozenset(mb)


def true_vstructures(g):
    """
    Set of v-structures ``(y, x, z)`` of *g*, with ``y < z``.

    A v-structure is ``y -> x <- z`` with ``y`` and ``z`` non-adjacent.
    """
    out = set()
    for x in range(g.n):
        for y, z in combinations(sorted(g.parents[x]), 2):
            if z not in g.neighbors(y):
                out.add((y, x, z))
    return out


def structure_summary(g):
    """
    Summary statistics of a structure.

    Parameters
    ----------
    g : Dag
        The graph.

    Returns
    -------
    dict
        ``n``, ``e`` (edges), ``omega`` (clique number), ``max_in_degree``,
        ``max_degree``, ``max_mb`` (largest Markov boundary) and
        ``diamond_free``.
    """
    summary = {
        "n": g.n,
        "e": len(g.edges),
        "omega": clique_number(g),
        "max_in_degree": g.max_in_degree(),
        "max_degree": g.max_degree(),
        "max_mb": max((len(true_mb(g, v)) for v in range(g.n)), default=0),
        "diamond_free": is_diamond_free(g),
    }
    logger.debug(f"Structure summary: {summary}")
    return summary
