"""Partitions (color assignments) and the free-labeling color distribution."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateError, ParseError, ValidationError

DEGENERACY_THRESHOLD = 1e-14


@dataclass(frozen=True, eq=False)
class Labeling:
    """Per-vertex colors in ``0..K-1``, aligned with a graph's compacted vertex order.

    Labelings built by ``from_colors`` or read from a file use every color.
    Labelings drawn by the simulator carry the distribution's ``K`` and may
    leave some colors empty.
    """

    colors: np.ndarray
    K: int
    color_ids: tuple = field(default=(), repr=False)

    def __post_init__(self):
        c = self.colors
        if c.ndim != 1 or c.size == 0:
            raise ValidationError("labeling must be a non-empty 1-d array")
        if self.K < 1 or c.min() < 0 or c.max() >= self.K:
            raise ValidationError(f"colors must lie in 0..{self.K - 1}")

    @classmethod
    def from_colors(cls, colors) -> "Labeling":
        """Compact arbitrary hashable color tokens to ``0..K-1`` by first appearance."""
        cmap: dict = {}
        dense = np.fromiter((cmap.setdefault(c, len(cmap)) for c in colors), dtype=np.int64)
        dense.setflags(write=False)
        return cls(dense, len(cmap), tuple(cmap))

    @property
    def n(self) -> int:
        return int(self.colors.size)

    def counts(self) -> np.ndarray:
        return np.bincount(self.colors, minlength=self.K)


@dataclass(frozen=True, eq=False)
class ColorDistribution:
    """Color probabilities of the null model with power sums ``p2 = sum p_k^2``, ``p3 = sum p_k^3``."""

    probs: np.ndarray
    p2: float
    p3: float

    @classmethod
    def from_probs(cls, probs) -> "ColorDistribution":
        p = np.array(probs, dtype=np.float64).ravel()
        if p.size == 0 or np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValidationError("probabilities must be finite and non-negative")
        total = math.fsum(p)
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")
        p.setflags(write=False)
        return cls(p, math.fsum(p * p), math.fsum(p * p * p))

    @property
    def K(self) -> int:
        return int(self.probs.size)

    def cumulative(self) -> np.ndarray:
        """Cumulative table for inverse-CDF sampling; last entry pinned to 1."""
        cum = np.cumsum(self.probs)
        cum[-1] = 1.0
        return cum


def load_labeling(source: str, graph, name=None) -> Labeling:
    """Parse ``vertex_id color_id`` lines and align them to ``graph``'s vertex order.

    Both ids are non-negative integers.  Colors are compacted to ``0..K-1``
    in compacted-vertex order.
    """
    index = {v: i for i, v in enumerate(graph.ids)}
    raw: dict[int, int] = {}
    nlines = 0
    for lineno, line in enumerate(source.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'vertex_id color_id', got {line!r}", lineno, name)
        try:
            v, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno, name) from None
        if c < 0:
            raise ParseError(f"color id out of range (negative): {c}", lineno, name)
        if v not in index:
            raise ParseError(f"vertex {v} is not in the graph", lineno, name)
        if v in raw:
            raise ParseError(f"duplicate vertex {v}", lineno, name)
        raw[v] = c
        nlines += 1
    if nlines != graph.n:
        missing = [v for v in graph.ids if v not in raw][:5]
        raise ParseError(
            f"label count mismatch: {nlines} labels for {graph.n} vertices "
            f"(missing e.g. {missing})", None, name)
    return Labeling.from_colors(raw[v] for v in graph.ids)


def read_labeling(path, graph) -> Labeling:
    path = Path(path)
    return load_labeling(path.read_text(), graph, name=str(path))


def empirical_distribution(lab: Labeling) -> ColorDistribution:
    """p_k = |color class k| / n."""
    counts = lab.counts()
    n = lab.n
    probs = counts / n
    # power sums from integer counts keep p2, p3 correctly rounded
    p2 = math.fsum(int(c) ** 2 for c in counts) / n**2
    p3 = math.fsum(int(c) ** 3 for c in counts) / n**3
    probs.setflags(write=False)
    return ColorDistribution(probs, p2, p3)


def variance_driver(dist: ColorDistribution) -> float:
    """p2 + p2^2 - 2 p3: the variance of the centered kernel.

    Raises ``DegenerateError`` when the value is at most 1e-14, which
    happens exactly when one color carries all the mass.
    """
    v = math.fsum([dist.p2, dist.p2 * dist.p2, -2.0 * dist.p3])
    if v <= DEGENERACY_THRESHOLD:
        raise DegenerateError("single-community partition: test undefined")
    return v
