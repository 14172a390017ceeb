"""Modularity, the kernel B_ij = A_ij - k_i k_j / 2m and the centered kernel h_bar."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .labeling import variance_driver

# above this size verify_decomposition aggregates the pair sum instead of looping over pairs
PAIRWISE_LIMIT = 3000


def b_kernel(g, i: int, j: int) -> float:
    """B_ij = A_ij - k_i k_j / (2m)."""
    a = g.adjacency(i, j)
    return a - int(g.degrees[i]) * int(g.degrees[j]) / (2 * g.m)


def _class_aggregates(g, colors, K):
    """(edges inside color classes, per-class degree sums) as exact integers."""
    u, v = g.edges[:, 0], g.edges[:, 1]
    inside = int(np.count_nonzero(colors[u] == colors[v]))
    dsum = [0] * K
    for c, k in zip(colors.tolist(), g.degrees.tolist()):
        dsum[c] += k
    return inside, dsum


def modularity(g, lab) -> float:
    """Q_n = (1/2m) sum_{i,j} B_ij [c_i = c_j].

    Uses sum_{same color} B_ij = 2 e_in - sum_k D_k^2 / (2m), where e_in is
    the number of edges inside color classes and D_k the degree sum of
    class k.  Evaluated in exact rational arithmetic, O(n + m).
    """
    inside, dsum = _class_aggregates(g, lab.colors, lab.K)
    m = g.m
    q = Fraction(inside, m) - Fraction(sum(d * d for d in dsum), 4 * m * m)
    return float(q)


def h_bar(ci, cj, dist):
    """Centered kernel [ci = cj] - p_ci - p_cj + p2.

    Accepts scalar colors or integer arrays (broadcast elementwise).
    """
    p = dist.probs
    ci_a, cj_a = np.asarray(ci), np.asarray(cj)
    for c in (ci_a, cj_a):
        if c.size and (c.min() < 0 or c.max() >= p.size):
            raise IndexError(f"color out of range 0..{p.size - 1}")
    out = (ci_a == cj_a) - p[ci_a] - p[cj_a] + dist.p2
    return float(out) if out.ndim == 0 else out


def _pair_sum_b_hbar(g, colors, dist):
    """sum_{i<j} B_ij h_bar(c_i, c_j) by explicit pairs (row by row, compensated)."""
    n, m = g.n, g.m
    k = g.degrees.astype(np.float64)
    p = dist.probs
    pc = p[colors]
    parts = []
    for i in range(n - 1):
        j = np.arange(i + 1, n)
        hb = (colors[j] == colors[i]) - pc[i] - pc[j] + dist.p2
        b = -k[i] * k[j] / (2 * m)
        nb = g.neighbors(i)
        nb = nb[nb > i]
        b[nb - i - 1] += 1.0
        parts.extend((b * hb).tolist())
    return math.fsum(parts)


def _aggregate_sum_b_hbar(g, colors, dist):
    """Same pair sum through degree/color aggregates, O(n + m)."""
    m = g.m
    p = dist.probs
    k = g.degrees.astype(np.float64)
    pc = p[colors]
    u, v = g.edges[:, 0], g.edges[:, 1]
    a_part = math.fsum(((colors[u] == colors[v]) - pc[u] - pc[v] + dist.p2).tolist())
    dsum = np.zeros(dist.K)
    np.add.at(dsum, colors, k)
    s2 = math.fsum((k * k).tolist())
    same = (math.fsum((dsum * dsum).tolist()) - s2) / 2
    lin = math.fsum((k * pc * (2 * m - k)).tolist())
    allp = ((2 * m) ** 2 - s2) / 2
    null_part = math.fsum([same, -lin, dist.p2 * allp]) / (2 * m)
    return a_part - null_part


def verify_decomposition(g, lab, dist) -> float:
    """|Q_n - RHS| for the kernel decomposition

    Q_n = (1-p2)/(2m) sum_i B_ii + (1/m) sum_{i<j} B_ij h_bar(c_i,c_j)
          - (1/m) sum_i B_ii (p_{c_i} - p2).
    """
    variance_driver(dist)
    m = g.m
    colors = lab.colors
    k = g.degrees.astype(np.float64)
    bii = -k * k / (2 * m)
    if g.n <= PAIRWISE_LIMIT:
        cross = _pair_sum_b_hbar(g, colors, dist)
    else:
        cross = _aggregate_sum_b_hbar(g, colors, dist)
    pc = dist.probs[colors]
    rhs = math.fsum([
        (1 - dist.p2) / (2 * m) * math.fsum(bii.tolist()),
        cross / m,
        -math.fsum((bii * (pc - dist.p2)).tolist()) / m,
    ])
    return abs(modularity(g, lab) - rhs)
