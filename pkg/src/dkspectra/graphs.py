"""Factor graphs: parsing, validation, named families and distance matrices.

Only the (small) factor graph ``G`` lives here.  Everything is dense numpy;
factor graphs are expected to have at most a few dozen vertices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Invalid graph input.  ``kind`` names the failed check."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


def bfs_distances(neighbours: Sequence[Sequence[int]]) -> np.ndarray:
    """All-pairs shortest path lengths by one BFS per source.

    Unreachable pairs are reported as -1.
    """
    n = len(neighbours)
    dist = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        row = dist[src]
        row[src] = 0
        queue = deque([src])
        while queue:
            x = queue.popleft()
            for y in neighbours[x]:
                if row[y] < 0:
                    row[y] = row[x] + 1
                    queue.append(y)
    return dist


@dataclass(frozen=True)
class Graph:
    """Finite simple connected undirected graph on vertices ``0..n-1``.

    Construct through :meth:`from_edges` (or :func:`parse_graph`,
    :func:`named_family`), which performs validation.
    """

    vertex_count: int
    edges: frozenset[tuple[int, int]]
    name: str = ""

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[tuple[int, int]], name: str = "") -> Graph:
        if vertex_count < 2:
            raise GraphError("too_small", f"graph needs at least 2 vertices, got {vertex_count}")
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GraphError("vertex_range", f"edge ({u}, {v}) outside vertex range 0..{vertex_count - 1}")
            if u == v:
                raise GraphError("self_loop", f"self-loop at vertex {u}")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise GraphError("duplicate_edge", f"duplicate edge ({u}, {v})")
            seen.add(e)
        g = cls(vertex_count, frozenset(seen), name)
        if (g.distances < 0).any():
            raise GraphError("disconnected", "graph is not connected")
        return g

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def neighbours(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in sorted(self.edges):
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.vertex_count, self.vertex_count), dtype=np.int64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        a.setflags(write=False)
        return a

    @cached_property
    def distances(self) -> np.ndarray:
        d = bfs_distances(self.neighbours)
        d.setflags(write=False)
        return d

    @property
    def diameter(self) -> int:
        return int(self.distances.max())

    def degrees(self) -> list[int]:
        return [len(a) for a in self.neighbours]

    def summary(self) -> dict:
        return {
            "name": self.name,
            "vertices": self.vertex_count,
            "edges": self.edge_count,
            "diameter": self.diameter,
        }

    def __repr__(self) -> str:
        label = self.name or "Graph"
        return f"<{label}: |V|={self.vertex_count}, |E|={self.edge_count}>"


def parse_graph(text: str, name: str = "") -> Graph:
    """Parse an edge-list document.

    One ``u v`` pair per line; ``#`` starts a comment line; blank lines are
    skipped.  An optional ``n <count>`` line fixes the vertex count,
    otherwise it is ``max index + 1``.
    """
    edges: list[tuple[int, int]] = []
    declared: int | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "n":
            if len(tokens) != 2 or declared is not None or edges:
                raise GraphError("header", f"line {lineno}: malformed or misplaced header {line!r}")
            try:
                declared = int(tokens[1])
            except ValueError:
                raise GraphError("non_integer", f"line {lineno}: non-integer vertex count {tokens[1]!r}") from None
            continue
        if len(tokens) != 2:
            raise GraphError("malformed_line", f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphError("non_integer", f"line {lineno}: non-integer token in {line!r}") from None
        if u < 0 or v < 0:
            raise GraphError("vertex_range", f"line {lineno}: negative vertex index in {line!r}")
        edges.append((u, v))
    if declared is None:
        declared = max((max(e) for e in edges), default=-1) + 1
    return Graph.from_edges(declared, edges, name)


_FAMILY_MIN = {"K": 2, "P": 2, "C": 3, "S": 1}


def named_family(tag: str, param: int) -> Graph:
    """Standard families with fixed vertex numbering.

    ``K``: complete graph on ``param`` vertices.  ``P``: path ``0-1-...``.
    ``C``: cycle ``0-1-...-(n-1)-0``.  ``S``: star with centre 0 and
    ``param`` leaves ``1..param``.
    """
    if tag not in _FAMILY_MIN:
        raise GraphError("unknown_family", f"unknown family tag {tag!r} (expected one of K, P, C, S)")
    if param < _FAMILY_MIN[tag]:
        raise GraphError("family_param", f"family {tag} needs parameter >= {_FAMILY_MIN[tag]}, got {param}")
    n = param
    if tag == "K":
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    elif tag == "P":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif tag == "C":
        edges = [(i, (i + 1) % n) for i in range(n)]
    else:
        edges = [(0, i) for i in range(1, n + 1)]
        n += 1
    return Graph.from_edges(n, edges, f"{tag}:{param}")


def parse_family(text: str) -> Graph:
    """Parse a family string such as ``"C:5"``."""
    tag, sep, param = text.partition(":")
    if not sep:
        raise GraphError("family_format", f"family string must look like 'K:3', got {text!r}")
    try:
        value = int(param)
    except ValueError:
        raise GraphError("family_format", f"non-integer family parameter in {text!r}") from None
    return named_family(tag.strip(), value)


def all_pairs_distances(g: Graph) -> np.ndarray:
    return g.distances


def distance_k_matrix(g: Graph, k: int) -> np.ndarray:
    """0/1 matrix of vertex pairs at distance exactly ``k`` (identity for k=0)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return (g.distances == k).astype(np.int64)


def distance_matrices(g: Graph, upto: int | None = None) -> list[np.ndarray]:
    """``[D^[0], D^[1], ..., D^[upto]]``; defaults to the diameter."""
    top = g.diameter if upto is None else upto
    return [distance_k_matrix(g, h) for h in range(top + 1)]


def mean_degree(g: Graph) -> Fraction:
    return Fraction(2 * g.edge_count, g.vertex_count)
