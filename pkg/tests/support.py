"""Graph fixtures and slow reference implementations used as oracles."""

import itertools
import math

import mpmath
import networkx as nx
import numpy as np

from modsig.graph import Graph
from modsig.labeling import ColorDistribution

PATH = [(0, 1), (1, 2)]
TRIANGLE = [(0, 1), (1, 2), (2, 0)]
STAR4 = [(0, 1), (0, 2), (0, 3), (0, 4)]


def graph(edges, n=None):
    return Graph.from_edges(edges, n=n)


def erdos_renyi(n, p, seed):
    """G(n, p) on a fixed vertex set; resampled until it has an edge."""
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    while True:
        mask = rng.random(iu[0].size) < p
        if mask.any():
            return Graph.from_edges(np.stack([iu[0][mask], iu[1][mask]], axis=1), n=n)


def benchmark_graph(n=500, degree=25, seed=42):
    return erdos_renyi(n, degree / (n - 1), seed)


def atlas_graphs(max_n=6):
    """Every graph with at most ``max_n`` vertices and at least one edge (networkx atlas)."""
    out = []
    for h in nx.graph_atlas_g():
        if 0 < h.number_of_nodes() <= max_n and h.number_of_edges() > 0:
            out.append(Graph.from_edges(list(h.edges()), n=h.number_of_nodes()))
    return out


def random_simplex(rng, K):
    return ColorDistribution.from_probs(_normalise(rng.dirichlet(np.ones(K))))


def _normalise(p):
    p = np.asarray(p, dtype=np.float64)
    p = p / p.sum()
    p[-1] = 1.0 - p[:-1].sum()
    return p


# dense references -----------------------------------------------------------

def b_dense(g):
    a = g.dense().astype(np.float64)
    k = g.degrees.astype(np.float64)
    return a - np.outer(k, k) / (2 * g.m)


def modularity_dense(g, colors):
    """(1/2m) sum_{i,j} B_ij [c_i = c_j] as an explicit double sum."""
    b = b_dense(g)
    same = colors[:, None] == colors[None, :]
    return math.fsum(b[same].tolist()) / (2 * g.m)


def sigma2_dense(g, dist):
    """Variance formula with every B_ij materialised."""
    b = b_dense(g)
    off = b.copy()
    np.fill_diagonal(off, 0.0)
    v = dist.p2 + dist.p2**2 - 2 * dist.p3
    w = dist.p3 - dist.p2**2
    m = g.m
    return (v / (2 * m * m) * math.fsum((off**2).ravel().tolist())
            + w / (m * m) * math.fsum((np.diag(b) ** 2).tolist()))


def brute_moments(g, dist):
    """E and Var of Q_n by looping over every labeling with itertools (independent of the kernel)."""
    mean = []
    second = []
    b = b_dense(g)
    for colors in itertools.product(range(dist.K), repeat=g.n):
        c = np.array(colors)
        pr = float(np.prod(dist.probs[c]))
        q = float(b[c[:, None] == c[None, :]].sum()) / (2 * g.m)
        mean.append(pr * q)
        second.append(pr * q * q)
    mu = math.fsum(mean)
    return mu, math.fsum(second) - mu * mu


def qchar_pairs_dense(g, colors, dist):
    """<T>_n as sum_j sum_c p_c (sum_{i<j} A_ij h_bar(c_i, c))^2 / (m v), looping over j and c."""
    a = g.dense()
    p = dist.probs
    v = dist.p2 + dist.p2**2 - 2 * dist.p3
    total = []
    for j in range(g.n):
        past = [i for i in range(j) if a[i, j]]
        for c in range(dist.K):
            s = sum((colors[i] == c) - p[colors[i]] - p[c] + dist.p2 for i in past)
            total.append(p[c] * s * s)
    return math.fsum(total) / (g.m * v)


def upper_tail_mp(x, dps=40):
    """1 - Phi(x) in high precision via mpmath."""
    with mpmath.workdps(dps):
        return mpmath.mpf(1) / 2 * mpmath.erfc(mpmath.mpf(x) / mpmath.sqrt(2))
