"""Simple undirected graphs: edge-list parsing, validation and degree bookkeeping.

Vertices are compacted to ``0..n-1`` in order of first appearance in the
input; the original ids are kept in ``Graph.ids`` for reporting.  The
compacted order is also the filtration order used by the martingale
diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyGraphError, ParseError, ValidationError


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph.

    ``edges`` is an ``(m, 2)`` int64 array with ``edges[:, 0] < edges[:, 1]``,
    sorted lexicographically.  ``indptr``/``indices`` hold the sorted
    neighbour lists (CSR layout).
    """

    n: int
    edges: np.ndarray
    degrees: np.ndarray
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    ids: tuple = field(default=(), repr=False)

    @classmethod
    def from_edges(cls, edges, n=None, ids=None) -> "Graph":
        """Build a graph from dense 0-based vertex pairs.

        Raises ``ValidationError`` on self-loops, duplicate edges or ids out
        of range, and ``EmptyGraphError`` when there are no edges.
        """
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if arr.shape[0] == 0:
            raise EmptyGraphError("graph has no edges (m = 0)")
        if arr.min() < 0:
            raise ValidationError("vertex ids must be non-negative")
        if n is None:
            n = int(arr.max()) + 1
        elif arr.max() >= n:
            raise ValidationError(f"vertex id {int(arr.max())} out of range for n={n}")
        loops = arr[:, 0] == arr[:, 1]
        if loops.any():
            v = int(arr[loops][0, 0])
            raise ValidationError(f"self-loop at vertex {v}")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        order = np.lexsort((hi, lo))
        canon = np.stack([lo[order], hi[order]], axis=1)
        dup = np.all(canon[1:] == canon[:-1], axis=1)
        if dup.any():
            a, b = canon[1:][dup][0]
            raise ValidationError(f"duplicate edge ({int(a)}, {int(b)})")

        degrees = np.bincount(canon.ravel(), minlength=n).astype(np.int64)
        # both orientations, sorted by (source, target)
        src = np.concatenate([canon[:, 0], canon[:, 1]])
        dst = np.concatenate([canon[:, 1], canon[:, 0]])
        o = np.lexsort((dst, src))
        indices = dst[o]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(degrees, out=indptr[1:])
        if ids is None:
            ids = tuple(range(n))
        for a in (canon, degrees, indptr, indices):
            a.setflags(write=False)
        return cls(int(n), canon, degrees, indptr, indices, tuple(ids))

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    def neighbors(self, i: int) -> np.ndarray:
        self._check(i)
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def adjacency(self, i: int, j: int) -> int:
        """A_ij in {0, 1}; binary search in the sorted neighbour list of i."""
        self._check(i)
        self._check(j)
        nb = self.indices[self.indptr[i]:self.indptr[i + 1]]
        pos = np.searchsorted(nb, j)
        return int(pos < nb.size and nb[pos] == j)

    def max_degree(self) -> int:
        return int(self.degrees.max())

    def dense(self) -> np.ndarray:
        """Dense adjacency matrix. Only meant for small graphs and reference checks."""
        a = np.zeros((self.n, self.n), dtype=np.int64)
        a[self.edges[:, 0], self.edges[:, 1]] = 1
        a[self.edges[:, 1], self.edges[:, 0]] = 1
        return a

    def _check(self, i):
        if not 0 <= i < self.n:
            raise IndexError(f"vertex {i} out of range for n={self.n}")


def _tokens(text: str, source):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected two tokens, got {len(parts)}: {raw!r}", lineno, source)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer token in {raw!r}", lineno, source) from None
        if a < 0 or b < 0:
            raise ParseError(f"negative id in {raw!r}", lineno, source)
        yield lineno, a, b


def load_graph(source: str, name=None) -> Graph:
    """Parse edge-list text into a validated ``Graph``.

    One edge per line as two whitespace-separated non-negative integers;
    blank lines and ``#`` comments are skipped.  External ids are compacted
    to ``0..n-1`` in first-appearance order.
    """
    id_map: dict[int, int] = {}
    pairs = []
    seen = set()
    for lineno, a, b in _tokens(source, name):
        if a == b:
            raise ValidationError(f"{name or '<text>'}:{lineno}: self-loop at vertex {a}")
        key = (a, b) if a < b else (b, a)
        if key in seen:
            raise ValidationError(f"{name or '<text>'}:{lineno}: duplicate edge {key}")
        seen.add(key)
        ia = id_map.setdefault(a, len(id_map))
        ib = id_map.setdefault(b, len(id_map))
        pairs.append((ia, ib))
    if not pairs:
        raise EmptyGraphError(f"{name or '<text>'}: graph has no edges (m = 0)")
    return Graph.from_edges(pairs, n=len(id_map), ids=tuple(id_map))


def read_graph(path) -> Graph:
    path = Path(path)
    return load_graph(path.read_text(), name=str(path))
