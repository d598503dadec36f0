"""Qubit-network graphs: chains, hypercubes, Cartesian products and column partitions.

Vertices are labelled 1..N throughout, so vertex ``n`` is row ``n - 1`` of the
adjacency matrix.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Iterable

import numpy as np

from .exceptions import (
    InvalidGraphError,
    InvalidSizeError,
    NotInFamilyError,
    UnreachableError,
    UnsupportedError,
)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with a designated input and output vertex.

    Edges are stored as sorted pairs ``(u, v)`` with ``u < v``.
    """

    vertex_count: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)
    input_vertex: int = 1
    output_vertex: int | None = None

    def __post_init__(self):
        n = self.vertex_count
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InvalidSizeError(f"vertex count must be a positive integer, got {n!r}")
        normalized = set()
        for edge in self.edges:
            u, v = (int(x) for x in edge)
            if u == v:
                raise InvalidGraphError(f"self-loop at vertex {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise InvalidGraphError(f"edge ({u}, {v}) has an endpoint outside 1..{n}")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(normalized))
        if self.output_vertex is None:
            object.__setattr__(self, "output_vertex", n)
        for name in ("input_vertex", "output_vertex"):
            x = getattr(self, name)
            if not 1 <= x <= n:
                raise InvalidGraphError(f"{name}={x} outside 1..{n}")
        if n >= 2 and self.input_vertex == self.output_vertex:
            raise InvalidGraphError("input and output vertex must differ")

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: Iterable[tuple[int, int]],
        input_vertex: int = 1,
        output_vertex: int | None = None,
    ) -> "Graph":
        """Build a graph from 1-based pairs, rejecting duplicates in either orientation."""
        seen = set()
        for u, v in edges:
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidGraphError(f"duplicate edge {key}")
            seen.add(key)
        return cls(vertex_count, frozenset(seen), input_vertex, output_vertex)

    @property
    def n(self) -> int:
        return self.vertex_count

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        for u, v in self.edges:
            A[u - 1, v - 1] = A[v - 1, u - 1] = 1.0
        return A

    def neighbors(self) -> list[list[int]]:
        """Sorted neighbour lists indexed by ``vertex - 1``."""
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u - 1].append(v)
            nbrs[v - 1].append(u)
        for lst in nbrs:
            lst.sort()
        return nbrs

    def degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    def summary(self) -> dict:
        return {
            "vertices": self.n,
            "edges": len(self.edges),
            "input": self.input_vertex,
            "output": self.output_vertex,
        }


def path_graph(n: int) -> Graph:
    """Linear chain 1 - 2 - ... - n with input 1 and output n."""
    if n < 1:
        raise InvalidSizeError(f"path needs at least one vertex, got {n}")
    return Graph(n, frozenset((k, k + 1) for k in range(1, n)), 1, n)


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """Cartesian product with row-major labels: ``(a, b) -> (a - 1) * |V(h)| + b``."""
    m = h.n

    def label(a: int, b: int) -> int:
        return (a - 1) * m + b

    edges = set()
    for a in range(1, g.n + 1):
        for u, v in h.edges:
            edges.add((label(a, u), label(a, v)))
    for b in range(1, m + 1):
        for u, v in g.edges:
            edges.add((label(u, b), label(v, b)))
    return Graph(
        g.n * m,
        frozenset(edges),
        label(g.input_vertex, h.input_vertex),
        label(g.output_vertex, h.output_vertex),
    )


def cartesian_power(g: Graph, d: int) -> Graph:
    if d < 1:
        raise InvalidSizeError(f"power must be >= 1, got {d}")
    out = g
    for _ in range(d - 1):
        out = cartesian_product(out, g)
    return out


def hypercube(d: int, links: int = 1) -> Graph:
    """d-fold Cartesian power of a one-link (2-vertex) or two-link (3-vertex) chain.

    Input and output are the antipodes ``(1, ..., 1)`` and ``(links + 1, ..., links + 1)``.
    """
    if links not in (1, 2):
        raise UnsupportedError(f"hypercubes are built from 1- or 2-link chains, got links={links}")
    if d < 1:
        raise InvalidSizeError(f"dimension must be >= 1, got {d}")
    return cartesian_power(path_graph(links + 1), d)


def bfs_depths(g: Graph, source: int) -> list[int | None]:
    nbrs = g.neighbors()
    depth: list[int | None] = [None] * g.n
    depth[source - 1] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in nbrs[u - 1]:
            if depth[v - 1] is None:
                depth[v - 1] = depth[u - 1] + 1
                queue.append(v)
    return depth


def graph_distance(g: Graph, u: int, v: int) -> int:
    """Number of edges on a shortest path from ``u`` to ``v``."""
    for x in (u, v):
        if not 1 <= x <= g.n:
            raise InvalidGraphError(f"vertex {x} outside 1..{g.n}")
    d = bfs_depths(g, u)[v - 1]
    if d is None:
        raise UnreachableError(f"vertex {v} is not reachable from {u}")
    return d


def is_connected(g: Graph) -> bool:
    return all(d is not None for d in bfs_depths(g, 1))


@dataclass(frozen=True)
class ColumnPartition:
    """BFS columns ``G_1..G_N`` in which every vertex of a column has the same
    number of neighbours in the next column (``forward``) and in the previous one
    (``backward``), with no edges inside a column.

    Such a layering keeps the uniform column states invariant under the
    adjacency matrix.  Members of the binomial family additionally have
    ``|G_n| = C(N-1, n-1)``, ``forward = N - n`` and ``backward = n - 1``.
    """

    columns: tuple[tuple[int, ...], ...]
    forward: tuple[int, ...] = ()
    backward: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return len(self.columns)

    def sizes(self) -> list[int]:
        return [len(c) for c in self.columns]

    def family_violation(self) -> str | None:
        """First binomial-family condition that fails, or None."""
        n = self.n
        for k, size in enumerate(self.sizes(), start=1):
            if size != comb(n - 1, k - 1):
                return f"column {k} has size {size}, expected C({n - 1},{k - 1})={comb(n - 1, k - 1)}"
        for k in range(1, n + 1):
            if k < n and self.forward[k - 1] != n - k:
                return f"column {k} vertices have {self.forward[k - 1]} forward neighbours, expected {n - k}"
            if k > 1 and self.backward[k - 1] != k - 1:
                return f"column {k} vertices have {self.backward[k - 1]} backward neighbours, expected {k - 1}"
        return None

    @property
    def in_family(self) -> bool:
        return self.family_violation() is None


def column_partition(g: Graph, family: bool = False) -> ColumnPartition:
    """Split ``g`` into BFS layers from the input vertex and check the column conditions.

    With ``family=True`` the binomial sizes and degree counts are enforced too.
    Raises NotInFamilyError naming the first condition that fails.
    """
    depth = bfs_depths(g, g.input_vertex)
    if any(d is None for d in depth):
        raise NotInFamilyError("graph is not connected")
    n_cols = max(depth) + 1
    columns = [[] for _ in range(n_cols)]
    for vertex, d in enumerate(depth, start=1):
        columns[d].append(vertex)

    if columns[-1] != [g.output_vertex]:
        raise NotInFamilyError(
            f"last column must be exactly the output vertex {g.output_vertex}, got {columns[-1]}"
        )

    nbrs = g.neighbors()
    forward, backward = [], []
    for k, col in enumerate(columns):
        counts = set()
        for vertex in col:
            layer = [depth[w - 1] for w in nbrs[vertex - 1]]
            if layer.count(k):
                raise NotInFamilyError(f"vertex {vertex} has a neighbour inside column {k + 1}")
            counts.add((layer.count(k + 1), layer.count(k - 1)))
        if len(counts) > 1:
            raise NotInFamilyError(f"column {k + 1} vertices disagree on neighbour counts {sorted(counts)}")
        f, b = counts.pop()
        forward.append(f)
        backward.append(b)

    partition = ColumnPartition(tuple(tuple(c) for c in columns), tuple(forward), tuple(backward))
    if family:
        problem = partition.family_violation()
        if problem:
            raise NotInFamilyError(problem)
    return partition


def parse_edge_list(text: str) -> Graph:
    """Parse the plain-text edge-list format.

    First non-comment line is the vertex count; remaining lines are ``u v`` pairs
    or ``input u`` / ``output v`` directives. ``#`` starts a comment.
    """
    n = None
    edges = []
    endpoints: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if n is None:
                if len(parts) != 1:
                    raise ValueError
                n = int(parts[0])
            elif parts[0] in ("input", "output") and len(parts) == 2:
                endpoints[parts[0]] = int(parts[1])
            elif len(parts) == 2:
                edges.append((int(parts[0]), int(parts[1])))
            else:
                raise ValueError
        except ValueError:
            raise InvalidGraphError(f"line {lineno}: cannot parse {raw.strip()!r}") from None
    if n is None:
        raise InvalidGraphError("edge list is empty")
    return Graph.from_edges(n, edges, endpoints.get("input", 1), endpoints.get("output"))


def read_edge_list(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def format_edge_list(g: Graph) -> str:
    lines = [str(g.n), f"input {g.input_vertex}", f"output {g.output_vertex}"]
    lines += [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"
