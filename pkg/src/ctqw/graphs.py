"""Weighted undirected graphs, named families, products, and edge-list I/O.

Vertices are the integers ``0..n-1``. Edge weights are kept as exact
:class:`fractions.Fraction` values (floats are converted exactly), so that
combinatorial checks downstream can be done without rounding; numerical code
uses the float adjacency matrix view.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import hadamard as _hadamard_matrix

from .errors import FormatError

__all__ = [
    "Graph",
    "GraphStats",
    "path",
    "cycle",
    "complete",
    "hypercube",
    "hadamard_graph",
    "build_family",
    "cartesian_product",
    "compressed_q4",
    "stats",
    "parse_edge_list",
    "format_edge_list",
    "load_graph",
]


def _as_weight(value) -> Fraction:
    """Convert an edge weight to an exact positive Fraction."""
    try:
        w = Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ValueError(f"invalid edge weight {value!r}") from exc
    if w <= 0:
        raise ValueError(f"edge weight must be positive, got {value!r}")
    return w


class Graph:
    """Immutable weighted undirected simple graph.

    Parameters
    ----------
    n:
        Number of vertices (>= 1).
    edges:
        Iterable of ``(u, v)`` or ``(u, v, w)`` items with ``0 <= u, v < n``,
        ``u != v``.  Weights default to 1 and must be positive.  Duplicate
        pairs and self-loops are rejected.
    labels:
        Optional sequence of vertex names (length ``n``).
    """

    __slots__ = ("n", "labels", "_edges", "_adj")

    def __init__(self, n: int, edges: Iterable = (), labels: Sequence[str] | None = None):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        if labels is not None and len(labels) != n:
            raise ValueError("labels length must equal vertex count")
        self.n = int(n)
        self.labels = tuple(labels) if labels is not None else None
        edge_map: dict[tuple[int, int], Fraction] = {}
        adj: list[dict[int, Fraction]] = [{} for _ in range(self.n)]
        for item in edges:
            if len(item) == 2:
                u, v = item
                w = Fraction(1)
            else:
                u, v, w = item
                w = _as_weight(w)
            u, v = int(u), int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range for n={self.n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u} not allowed")
            key = (min(u, v), max(u, v))
            if key in edge_map:
                raise ValueError(f"duplicate edge {key}")
            edge_map[key] = w
            adj[u][v] = w
            adj[v][u] = w
        self._edges = dict(sorted(edge_map.items()))
        self._adj = adj

    @property
    def m(self) -> int:
        """Edge count."""
        return len(self._edges)

    def edges(self) -> list[tuple[int, int, Fraction]]:
        return [(u, v, w) for (u, v), w in self._edges.items()]

    def weight(self, u: int, v: int) -> Fraction | None:
        return self._adj[u].get(v)

    def neighbors(self, u: int) -> dict[int, Fraction]:
        return dict(self._adj[u])

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def weighted_degree(self, u: int) -> Fraction:
        return sum(self._adj[u].values(), Fraction(0))

    def is_unweighted(self) -> bool:
        return all(w == 1 for w in self._edges.values())

    def adjacency(self) -> np.ndarray:
        """Dense symmetric float adjacency matrix with zero diagonal."""
        a = np.zeros((self.n, self.n))
        for (u, v), w in self._edges.items():
            a[u, v] = a[v, u] = float(w)
        return a

    def bfs_distances(self, source: int) -> np.ndarray:
        """Hop distances from ``source``; -1 marks unreachable vertices."""
        dist = np.full(self.n, -1, dtype=int)
        dist[source] = 0
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for y in self._adj[x]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def is_connected(self) -> bool:
        return bool((self.bfs_distances(0) >= 0).all())

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class GraphStats:
    """Edge count, hop diameter, and unweighted degree sequence.

    ``diameter`` is ``math.inf`` for disconnected graphs and 0 for a single
    vertex.
    """

    m: int
    diameter: float
    degrees: tuple[int, ...]


def stats(graph: Graph) -> GraphStats:
    diameter = 0.0
    for u in range(graph.n):
        dist = graph.bfs_distances(u)
        if (dist < 0).any():
            diameter = math.inf
            break
        diameter = max(diameter, float(dist.max()))
    degrees = tuple(sorted((graph.degree(u) for u in range(graph.n)), reverse=True))
    return GraphStats(m=graph.m, diameter=diameter, degrees=degrees)


# ---------------------------------------------------------------------------
# named families


def path(n: int) -> Graph:
    """Path on ``n`` vertices, 0-1-...-(n-1)."""
    if n < 1:
        raise ValueError("path needs n >= 1")
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    """Cycle on ``n >= 3`` vertices."""
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    if n < 1:
        raise ValueError("complete graph needs n >= 1")
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def hypercube(k: int) -> Graph:
    """k-cube on ``2**k`` vertices; vertex index equals its bitstring value.

    The antipodal pair used in examples is ``(0, 2**k - 1)``.
    """
    if k < 1:
        raise ValueError("hypercube needs k >= 1")
    n = 1 << k
    edges = []
    for u in range(n):
        for bit in range(k):
            v = u ^ (1 << bit)
            if u < v:
                edges.append((u, v))
    return Graph(n, edges)


def hadamard_graph(order: int) -> Graph:
    """Bipartite Hadamard graph on ``4*order`` vertices.

    Built from a Hadamard matrix H of the given order.  Vertices, in canonical
    order: row vertices ``r_i^+`` (0..order-1), ``r_i^-`` (order..2*order-1),
    column vertices ``c_j^+`` (2*order..3*order-1), ``c_j^-`` (3*order..4*order-1).
    ``r_i^s`` is adjacent to ``c_j^t`` exactly when ``H[i, j] * s * t == 1``.
    The graph is order-regular; ``(i, order + i)`` are antipodal pairs.

    Only Sylvester orders (1, 2, 4, 8, ...) are constructible here.
    """
    if order < 1 or (order & (order - 1)) != 0:
        raise ValueError(
            f"Hadamard graph of order {order} not constructible: "
            "only orders 1, 2 and higher powers of 2 are supported"
        )
    h = _hadamard_matrix(order)
    n = order
    edges = []
    for i in range(n):
        for j in range(n):
            if h[i, j] == 1:
                edges.append((i, 2 * n + j))          # r+ ~ c+
                edges.append((n + i, 3 * n + j))      # r- ~ c-
            else:
                edges.append((i, 3 * n + j))          # r+ ~ c-
                edges.append((n + i, 2 * n + j))      # r- ~ c+
    labels = (
        [f"r{i}+" for i in range(n)]
        + [f"r{i}-" for i in range(n)]
        + [f"c{j}+" for j in range(n)]
        + [f"c{j}-" for j in range(n)]
    )
    return Graph(4 * n, edges, labels=labels)


_FAMILIES = {
    "path": path,
    "cycle": cycle,
    "complete": complete,
    "hypercube": hypercube,
    "hadamard": hadamard_graph,
}


def build_family(descriptor: str) -> Graph:
    """Build a named family from a ``name:param`` descriptor, e.g. ``hypercube:4``."""
    name, sep, arg = descriptor.partition(":")
    name = name.strip().lower()
    if name == "compressed_q4":
        return compressed_q4()[0]
    if name not in _FAMILIES:
        raise FormatError(f"unknown family {name!r}")
    if not sep or not arg.strip():
        raise FormatError(f"family {name!r} needs a size parameter, e.g. {name}:4")
    try:
        size = int(arg)
    except ValueError:
        raise FormatError(f"family size must be an integer, got {arg!r}") from None
    try:
        return _FAMILIES[name](size)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


# ---------------------------------------------------------------------------
# combinations


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """Cartesian product: ``(a,b) ~ (a',b')`` iff one coordinate moves along an edge.

    Vertex ``(a, b)`` gets index ``a * h.n + b``; the product edge inherits the
    weight of the moved coordinate's edge.
    """
    n = g.n * h.n
    edges = []
    for a in range(g.n):
        for (u, v, w) in h.edges():
            edges.append((a * h.n + u, a * h.n + v, w))
    for (a, b, w) in g.edges():
        for u in range(h.n):
            edges.append((a * h.n + u, b * h.n + u, w))
    return Graph(n, edges)


def compressed_q4() -> tuple[Graph, int, int]:
    """13-vertex weighted compression of the 4-cube between its antipodes.

    Take the distance layers (1, 4, 6, 4, 1) of the 4-cube seen from vertex
    ``a``, contract the third layer to a single vertex ``c``, and give the
    edge ``{c, b}`` weight 2 (every other edge keeps weight 1).  Layer edges
    of the cube that become parallel under the contraction collapse to one
    weight-1 edge.  Returns ``(graph, a, b)`` with ``a = 0`` and ``b = 12``;
    ``c`` is vertex 11.

    With vertex weight 2 on ``c`` and 1 elsewhere, the distance partition
    from ``a`` has the same symmetric quotient as the 4-cube's, which is what
    makes this graph transfer a state from ``a`` to ``b`` at the cube's time
    with 3 fewer vertices and 9 fewer edges.
    """
    cube = hypercube(4)
    layer = [bin(v).count("1") for v in range(16)]
    order = sorted(range(16), key=lambda v: (layer[v], v))
    # order: a, 4 vertices at distance 1, 6 at distance 2, 4 at distance 3, b
    new_id = {}
    for v in order:
        if layer[v] <= 2:
            new_id[v] = len(new_id)
    c = 11
    b = 12
    for v in order:
        if layer[v] == 3:
            new_id[v] = c
        elif layer[v] == 4:
            new_id[v] = b
    edges: dict[tuple[int, int], Fraction] = {}
    for (u, v, w) in cube.edges():
        nu, nv = new_id[u], new_id[v]
        if nu == nv:
            continue
        key = (min(nu, nv), max(nu, nv))
        edges[key] = Fraction(1)
    edges[(c, b)] = Fraction(2)
    labels = ["a"] + [f"d1_{i}" for i in range(4)] + [f"d2_{i}" for i in range(6)] + ["c", "b"]
    graph = Graph(13, [(u, v, w) for (u, v), w in edges.items()], labels=labels)
    return graph, 0, b


# ---------------------------------------------------------------------------
# edge-list text format
#
#   # comment lines and blank lines are ignored
#   <n> <m>
#   u v [w]      (0-indexed; weight optional, default 1, decimal or p/q)


def parse_edge_list(text: str) -> Graph:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append((lineno, line.split()))
    if not rows:
        raise FormatError("empty edge list")
    header_line, header = rows[0]
    if len(header) != 2:
        raise FormatError(f"line {header_line}: header must be '<n> <m>'")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise FormatError(f"line {header_line}: header must be two integers") from None
    if len(rows) - 1 != m:
        raise FormatError(f"expected {m} edge lines, found {len(rows) - 1}")
    edges = []
    for lineno, fields in rows[1:]:
        if len(fields) not in (2, 3):
            raise FormatError(f"line {lineno}: expected 'u v [w]'")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise FormatError(f"line {lineno}: vertex ids must be integers") from None
        if len(fields) == 3:
            try:
                w = _as_weight(fields[2])
            except ValueError as exc:
                raise FormatError(f"line {lineno}: {exc}") from None
            edges.append((u, v, w))
        else:
            edges.append((u, v))
    try:
        return Graph(n, edges)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def format_edge_list(graph: Graph) -> str:
    lines = [f"{graph.n} {graph.m}"]
    for u, v, w in graph.edges():
        lines.append(f"{u} {v}" if w == 1 else f"{u} {v} {w}")
    return "\n".join(lines) + "\n"


def load_graph(path_or_file) -> Graph:
    """Read an edge-list file (path or file object)."""
    if hasattr(path_or_file, "read"):
        return parse_edge_list(path_or_file.read())
    with open(path_or_file, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read())
