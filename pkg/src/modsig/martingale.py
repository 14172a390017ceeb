"""Martingale objects behind the moderate-deviation argument.

With vertices revealed in compacted order, z_j = sum_{i<j} A_ij h_bar(c_i, c_j)
is a martingale difference and T_n = sum_j z_j / (m delta_n).  Its
quadratic characteristic <T>_n sums E[z_j^2 | c_1..c_{j-1}].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .labeling import variance_driver
from .modularity import h_bar


@dataclass(frozen=True, eq=False)
class MartingaleTrace:
    z: np.ndarray
    t_n: float
    qchar: float


def _check_color(c, dist):
    if not 0 <= c < dist.K:
        raise IndexError(f"color {c} out of range 0..{dist.K - 1}")


def conditional_second_moment(ci: int, dist) -> float:
    """E[h_bar(ci, c)^2 | ci] = p_ci - 3 p_ci^2 + 2 p2 p_ci - p2^2 + p3."""
    _check_color(ci, dist)
    p = float(dist.probs[ci])
    return math.fsum([p, -3 * p * p, 2 * dist.p2 * p, -dist.p2**2, dist.p3])


def conditional_cross_moment(ci: int, cl: int, dist) -> float:
    """E[h_bar(ci, c) h_bar(cl, c) | ci, cl] for c drawn from ``dist``."""
    _check_color(ci, dist)
    _check_color(cl, dist)
    pi, pl = float(dist.probs[ci]), float(dist.probs[cl])
    p2, p3 = dist.p2, dist.p3
    same = (pi + pl) / 2 if ci == cl else 0.0
    return math.fsum([same, -pi * pl, -pi * pi, pi * p2, -pl * pl, pl * p2, p3, -p2 * p2])


def _moment_tables(dist):
    """Vectorised conditional second and cross moments over all colors."""
    p, p2, p3 = dist.probs, dist.p2, dist.p3
    second = p - 3 * p * p + 2 * p2 * p - p2 * p2 + p3
    pi, pl = p[:, None], p[None, :]
    cross = (np.eye(p.size) * (pi + pl) / 2 - pi * pl - pi * pi + pi * p2
             - pl * pl + pl * p2 + p3 - p2 * p2)
    return second, cross


def predecessors(g):
    """Per-vertex arrays of lower-indexed neighbours (the filtration past)."""
    return [nb[nb < j] for j, nb in ((j, g.neighbors(j)) for j in range(g.n))]


def increments(g, lab, dist) -> MartingaleTrace:
    """z_j and T_n for the given labeling; <T>_n attached via ``quadratic_characteristic``."""
    v = variance_driver(dist)
    colors = lab.colors
    u, w = g.edges[:, 0], g.edges[:, 1]
    vals = h_bar(colors[u], colors[w], dist)
    z = np.zeros(g.n)
    np.add.at(z, w, vals)
    delta = math.sqrt(v / g.m)
    t_n = math.fsum(z.tolist()) / (g.m * delta)
    return MartingaleTrace(z, t_n, quadratic_characteristic(g, lab, dist))


def quadratic_characteristic(g, lab, dist) -> float:
    """<T>_n through co-neighbour pairs.

    (1/(m^2 delta^2)) [ sum_{i<j} A_ij s(c_i) + 2 sum_{i<l<j} A_ij A_lj x(c_i, c_l) ]
    with s, x the conditional second and cross moments.  Cost O(sum_j k_j^2).
    """
    v = variance_driver(dist)
    second, cross = _moment_tables(dist)
    colors = lab.colors
    parts = []
    for s in predecessors(g):
        if s.size == 0:
            continue
        cs = colors[s]
        parts.append(float(second[cs].sum()))
        if s.size > 1:
            a, b = np.triu_indices(s.size, k=1)
            parts.append(2.0 * float(cross[cs[a], cs[b]].sum()))
    return math.fsum(parts) / (g.m * v)


def o_statistic_check(g) -> tuple[int, int]:
    """(sum_{i,j} o_ij^2, max_k * sum_i k_i^2) with o_ij = sum_l A_il A_jl; lhs <= rhs."""
    a = sparse.csr_matrix((np.ones(2 * g.m, dtype=np.int64), g.indices, g.indptr),
                          shape=(g.n, g.n))
    o = a @ a
    lhs = int((o.data.astype(object) ** 2).sum()) if o.nnz else 0
    rhs = g.max_degree() * sum(k * k for k in g.degrees.tolist())
    return lhs, rhs


def calibrate_concentration_constant(xs, freqs, eta: float) -> float:
    """Smallest M with freq(x) <= M exp(-x / eta^2) at every grid point."""
    xs = np.asarray(xs, dtype=np.float64)
    freqs = np.asarray(freqs, dtype=np.float64)
    if xs.size == 0:
        return 0.0
    return float(np.max(freqs * np.exp(xs / eta**2)))


def prefix_martingale_residual(g, dist, guard: int = 10**6) -> float:
    """max over j and over every coloring of j's past of |E[z_j | c_1..c_{j-1}]|.

    z_j only sees the colors of j's predecessors, so enumerating those
    K^{s_j} assignments covers every prefix.
    """
    worst = 0.0
    p = dist.probs
    for j, s in enumerate(predecessors(g)):
        if s.size == 0:
            continue
        if dist.K ** s.size > guard:
            raise ValueError(f"vertex {j} has too many predecessors to enumerate")
        past = np.stack(np.unravel_index(np.arange(dist.K ** s.size), (dist.K,) * s.size), axis=1)
        # E[z_j | past] = sum_c p_c sum_i h_bar(c_i, c)
        cond = np.zeros(past.shape[0])
        for c in range(dist.K):
            cond += p[c] * h_bar(past, np.full_like(past, c), dist).sum(axis=1)
        worst = max(worst, float(np.max(np.abs(cond))))
    return worst
