"""Finite simple graphs and the Hamiltonian H = -Laplacian + W.

Vertices are labelled 1..n at the public boundary (constructors, JSON,
component listings) and 0..n-1 everywhere inside arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, GraphError


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices 1..n.

    ``edges`` holds 0-based pairs ``(x, y)`` with ``x < y``. Use
    :meth:`from_edges` to build one from 1-based input.
    """

    n: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise GraphError(f"vertex count must be >= 1, got {self.n}")
        for x, y in self.edges:
            if not (0 <= x < y < self.n):
                raise GraphError(f"invalid internal edge ({x}, {y}) for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build from 1-based vertex pairs. Loops and duplicates are rejected."""
        n = int(n)
        if n < 1:
            raise GraphError(f"vertex count must be >= 1, got {n}")
        seen = set()
        for idx, e in enumerate(edges):
            try:
                x, y = (int(v) for v in e)
            except (TypeError, ValueError):
                raise GraphError(f"edge #{idx} is not a pair of integers: {e!r}") from None
            if not (1 <= x <= n and 1 <= y <= n):
                raise GraphError(f"edge #{idx} ({x}, {y}) has a vertex outside 1..{n}")
            if x == y:
                raise GraphError(f"edge #{idx} is a self-loop at vertex {x}")
            key = (min(x, y) - 1, max(x, y) - 1)
            if key in seen:
                raise GraphError(f"edge #{idx} ({x}, {y}) is a duplicate")
            seen.add(key)
        return cls(n, frozenset(seen))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, frozenset((x, y) for x in range(n) for y in range(x + 1, n)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, frozenset((x, x + 1) for x in range(n - 1)))

    def edge_list(self) -> list[tuple[int, int]]:
        """Sorted 1-based edge list."""
        return sorted((x + 1, y + 1) for x, y in self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for x, y in self.edges:
            a[x, y] = a[y, x] = 1.0
        return a

    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=int)
        for x, y in self.edges:
            d[x] += 1
            d[y] += 1
        return d

    def neighbors(self) -> list[list[int]]:
        nb = [[] for _ in range(self.n)]
        for x, y in sorted(self.edges):
            nb[x].append(y)
            nb[y].append(x)
        return nb


def as_potential(w, n: int, nonnegative: bool = False) -> np.ndarray:
    """Validate a potential and return it as a float array of length n."""
    if w is None:
        return np.zeros(n)
    w = np.asarray(w, dtype=float).reshape(-1)
    if w.shape[0] != n:
        raise DimensionError(f"potential has length {w.shape[0]}, graph has {n} vertices")
    if not np.all(np.isfinite(w)):
        raise GraphError("potential must have finite entries")
    if nonnegative and np.any(w < 0):
        raise GraphError("potential must be nonnegative")
    return w


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    matrix: np.ndarray
    graph: Graph
    potential: np.ndarray

    @property
    def n(self) -> int:
        return self.graph.n


def build_hamiltonian(g: Graph, w=None) -> Hamiltonian:
    """H[x,x] = d(x) + w(x), H[x,y] = -1 on edges, 0 elsewhere."""
    w = as_potential(w, g.n)
    h = -g.adjacency()
    h[np.diag_indices(g.n)] = g.degrees() + w
    h.setflags(write=False)
    w = w.copy()
    w.setflags(write=False)
    return Hamiltonian(h, g, w)


def connected_components(g: Graph) -> list[list[int]]:
    """Vertex partition into components, 1-based, ordered by smallest vertex."""
    nb = g.neighbors()
    label = [-1] * g.n
    comps = []
    for start in range(g.n):
        if label[start] >= 0:
            continue
        label[start] = len(comps)
        stack, comp = [start], []
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in nb[x]:
                if label[y] < 0:
                    label[y] = label[start]
                    stack.append(y)
        comps.append(sorted(v + 1 for v in comp))
    return comps


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) == 1
