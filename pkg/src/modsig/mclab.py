"""Seeded Monte-Carlo engine for the free-labeling null and the exact enumeration oracle.

Replicates are grouped in fixed-size blocks.  Block ``b`` draws from a
Philox stream keyed by the master seed with ``b`` in the top counter word,
so every replicate's labeling is a function of (seed, replicate index)
alone and the output does not depend on how blocks are scheduled.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bounds import gaussian_cdf, gaussian_tail
from .errors import BudgetError, ValidationError
from .labeling import ColorDistribution, Labeling, variance_driver
from .martingale import calibrate_concentration_constant
from .null import deviation_scales

BLOCK_SIZE = 1024
DEFAULT_BUDGET = 5e11
ENUMERATION_GUARD = 10**7
DEFAULT_X_GRID = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
QCHAR_X_GRID = (0.1, 0.2, 0.5)


@dataclass
class SimulationConfig:
    replicates: int = 10_000
    seed: int = 0
    probs_override: tuple | None = None
    x_grid: tuple = DEFAULT_X_GRID
    workers: int = 1
    scale: str = "delta"
    budget: float = DEFAULT_BUDGET

    def __post_init__(self):
        if self.replicates < 1:
            raise ValidationError("replicates must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        xs = tuple(float(x) for x in self.x_grid)
        if any(x < 0 for x in xs) or list(xs) != sorted(xs):
            raise ValidationError("x_grid must be non-negative and sorted ascending")
        self.x_grid = xs
        if self.scale not in ("delta", "sigma"):
            raise ValidationError(f"unknown scale {self.scale!r}")
        if self.workers < 0:
            raise ValidationError("workers must be >= 0")


def block_stream(seed: int, block: int) -> np.random.Generator:
    """Independent counter-based stream for replicate block ``block``."""
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, block]))


def _draw_colors(cum: np.ndarray, rng: np.random.Generator, shape) -> np.ndarray:
    u = rng.random(shape)
    return np.searchsorted(cum, u, side="right").astype(np.int64)


def sample_labeling(n: int, dist: ColorDistribution, rng: np.random.Generator) -> Labeling:
    """Independent colors with P(c_i = k) = p_k by inverse CDF on the cumulative table."""
    colors = _draw_colors(dist.cumulative(), rng, n)
    colors.setflags(write=False)
    return Labeling(colors, dist.K)


class ReplicateKernel:
    """Vectorised per-replicate statistics for a batch of labelings.

    For every vertex j the kernel counts predecessors (lower-indexed
    neighbours) of each color, N[j, c].  From those counts:

    * edges inside color classes = sum_j N[j, c_j], giving Q_n;
    * z_j = N[j, c_j] - P_j - s_j p_{c_j} + s_j p2 with P_j = sum_c N[j,c] p_c;
    * E[z_j^2 | past] = sum_c p_c (N[j,c] - s_j p_c + s_j p2 - P_j)^2, giving <T>_n.
    """

    def __init__(self, g, dist: ColorDistribution):
        self.n, self.m, self.K = g.n, g.m, dist.K
        self.src = np.ascontiguousarray(g.edges[:, 0])
        self.dst = np.ascontiguousarray(g.edges[:, 1])
        self.deg = g.degrees.astype(np.float64)
        self.s = np.bincount(self.dst, minlength=self.n).astype(np.float64)
        self.p = np.asarray(dist.probs, dtype=np.float64)
        self.p2 = dist.p2
        self.cum = dist.cumulative()
        self.v = variance_driver(dist)
        self._base = {}

    def _offsets(self, b):
        base = self._base.get(b)
        if base is None:
            base = (np.arange(b, dtype=np.int64)[:, None] * self.n + self.dst[None, :]) * self.K
            self._base = {b: base}
        return base

    def stats(self, colors: np.ndarray, want_t=False):
        """(Q_n, <T>_n[, T_n]) for each row of ``colors`` (shape (B, n))."""
        b, n, K, m = colors.shape[0], self.n, self.K, self.m
        flat = self._offsets(b) + colors[:, self.src]
        counts = np.bincount(flat.ravel(), minlength=b * n * K).reshape(b, n, K)
        counts = counts.astype(np.float64)
        own = np.take_along_axis(counts, colors[:, :, None], axis=2)[:, :, 0]
        inside = own.sum(axis=1)
        dsum = np.bincount((np.arange(b)[:, None] * K + colors).ravel(),
                           weights=np.broadcast_to(self.deg, (b, n)).ravel(),
                           minlength=b * K).reshape(b, K)
        q = inside / m - (dsum * dsum).sum(axis=1) / (4.0 * m * m)
        pj = counts @ self.p
        shift = self.s * self.p2 - pj
        resid = counts - self.s[:, None] * self.p[None, :] + shift[:, :, None]
        qnum = ((resid * resid) @ self.p).sum(axis=1)
        qchar = qnum / (m * self.v)
        if not want_t:
            return q, qchar
        z = own - self.p[colors] * self.s + shift
        t = z.sum(axis=1) / (m * math.sqrt(self.v / m))
        return q, qchar, t

    def block(self, seed: int, index: int, count: int):
        colors = _draw_colors(self.cum, block_stream(seed, index), (count, self.n))
        return self.stats(colors)


_WORKER_KERNEL = None


def _init_worker(kernel):
    global _WORKER_KERNEL
    _WORKER_KERNEL = kernel


def _run_block(args):
    seed, index, count = args
    return _WORKER_KERNEL.block(seed, index, count)


@dataclass(frozen=True, eq=False)
class Replicates:
    q: np.ndarray
    qchar: np.ndarray


def _resolve_workers(w: int) -> int:
    return w if w > 0 else (os.cpu_count() or 1)


def run_replicates(g, dist: ColorDistribution, cfg: SimulationConfig) -> Replicates:
    """Raw per-replicate Q_n and <T>_n in replicate-index order."""
    kernel = ReplicateKernel(g, dist)
    cost = cfg.replicates * (g.n * (1 + dist.K) + 2 * g.m)
    if cost > cfg.budget:
        raise BudgetError(f"estimated cost {cost:.3g} exceeds budget {cfg.budget:.3g}")
    R = cfg.replicates
    jobs = [(cfg.seed, b, min(BLOCK_SIZE, R - b * BLOCK_SIZE))
            for b in range(-(-R // BLOCK_SIZE))]
    workers = min(_resolve_workers(cfg.workers), len(jobs))
    if workers == 1:
        parts = [kernel.block(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker,
                                 initargs=(kernel,)) as pool:
            parts = list(pool.map(_run_block, jobs))
    q = np.concatenate([p[0] for p in parts])
    qc = np.concatenate([p[1] for p in parts])
    return Replicates(q, qc)


def ks_distance(samples) -> float:
    """One-sample Kolmogorov statistic against the standard normal.

    D = max_i max(i/N - Phi(x_(i)), Phi(x_(i)) - (i-1)/N) over the sorted sample.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    N = x.size
    if N == 0:
        raise ValueError("ks_distance needs at least one sample")
    F = gaussian_cdf(x)
    i = np.arange(1, N + 1)
    return float(max(np.max(i / N - F), np.max(F - (i - 1) / N)))


@dataclass
class TailRow:
    x: float
    scale: str
    empirical_tail: float
    gaussian_tail: float
    ratio: float | None
    std_err: float | None
    within_valid_range: bool


@dataclass
class SimulationSummary:
    replicates: int
    seed: int
    n: int
    m: int
    probs: list
    mu_n: float
    sigma2_n: float
    delta_n: float
    eta_n: float
    valid_x_range: float
    emp_mean: float
    emp_var: float
    scale: str
    ks_distance: float
    ks_by_scale: dict
    tail_ratios: list = field(default_factory=list)
    qchar_mean: float = 0.0
    qchar_tail: list = field(default_factory=list)
    qchar_M_fit: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def tail_rows(z: np.ndarray, scale: str, x_grid, x_cap: float) -> list[TailRow]:
    R = z.size
    rows = []
    for x in x_grid:
        emp = np.count_nonzero(z > x) / R
        gt = gaussian_tail(x)
        if gt > 0:
            ratio, se = emp / gt, math.sqrt(emp * (1 - emp) / R) / gt
        else:  # reference tail underflows
            ratio = se = None
        rows.append(TailRow(x, scale, emp, gt, ratio, se, x <= x_cap))
    return rows


def summarize(g, dist, reps: Replicates, cfg: SimulationConfig) -> SimulationSummary:
    calc = deviation_scales(g, dist)
    q = reps.q
    R = q.size
    mean = math.fsum(q.tolist()) / R
    var = math.fsum(((q - mean) ** 2).tolist()) / (R - 1) if R > 1 else 0.0
    zs = {"delta": (q - calc.mu_n) / calc.delta_n, "sigma": (q - calc.mu_n) / calc.sigma_n}
    ks = {k: ks_distance(v) for k, v in zs.items()}
    rows = []
    for scale in ("delta", "sigma"):
        rows.extend(asdict(r) for r in tail_rows(zs[scale], scale, cfg.x_grid, calc.valid_x_range))
    dev = np.abs(reps.qchar - 1.0)
    qtail = [{"x": x, "freq": np.count_nonzero(dev >= x) / R} for x in QCHAR_X_GRID]
    m_fit = calibrate_concentration_constant(QCHAR_X_GRID, [r["freq"] for r in qtail], calc.eta_n)
    return SimulationSummary(
        replicates=R, seed=cfg.seed, n=g.n, m=g.m, probs=dist.probs.tolist(),
        mu_n=calc.mu_n, sigma2_n=calc.sigma2_n, delta_n=calc.delta_n, eta_n=calc.eta_n,
        valid_x_range=calc.valid_x_range, emp_mean=mean, emp_var=var, scale=cfg.scale,
        ks_distance=ks[cfg.scale], ks_by_scale=ks, tail_ratios=rows,
        qchar_mean=math.fsum(reps.qchar.tolist()) / R, qchar_tail=qtail, qchar_M_fit=m_fit,
    )


def simulate(g, dist: ColorDistribution, cfg: SimulationConfig) -> SimulationSummary:
    """Run ``cfg.replicates`` free labelings and aggregate moments, KS and tail ratios.

    ``cfg.probs_override`` replaces ``dist`` when given.  Degenerate
    distributions are rejected before any sampling.
    """
    if cfg.probs_override is not None:
        dist = ColorDistribution.from_probs(cfg.probs_override)
    variance_driver(dist)
    return summarize(g, dist, run_replicates(g, dist, cfg), cfg)


@dataclass(frozen=True, eq=False)
class ExactDistribution:
    """Every labeling's probability and statistics, atoms in lexicographic order
    (vertex 0 is the most significant digit)."""

    K: int
    n: int
    probs: np.ndarray
    q: np.ndarray
    t_n: np.ndarray | None
    qchar: np.ndarray | None

    def _e(self, x):
        return math.fsum((self.probs * x).tolist())

    @property
    def mean(self) -> float:
        return self._e(self.q)

    @property
    def var(self) -> float:
        mu = self.mean
        return self._e((self.q - mu) ** 2)

    def expect(self, name: str) -> float:
        return self._e(getattr(self, name))

    def labeling(self, index: int) -> np.ndarray:
        return np.array(np.unravel_index(index, (self.K,) * self.n))


def _all_labelings(n, K, start, stop):
    idx = np.arange(start, stop, dtype=np.int64)
    return np.stack(np.unravel_index(idx, (K,) * n), axis=1).astype(np.int64)


def enumerate_exact(g, dist: ColorDistribution, guard: int = ENUMERATION_GUARD,
                    chunk: int = 1 << 15) -> ExactDistribution:
    """Exact law of Q_n (and T_n, <T>_n when non-degenerate) over all K^n labelings."""
    n, K = g.n, dist.K
    total = K**n
    if total > guard:
        raise BudgetError(f"K^n = {total} labelings exceeds the enumeration guard {guard}")
    degenerate = math.fsum([dist.p2, dist.p2**2, -2 * dist.p3]) <= 1e-14
    if degenerate:
        # every labeling has the same Q_n (a single color carries all mass)
        from .modularity import modularity
        lab = np.full(n, int(np.argmax(dist.probs)))
        q0 = modularity(g, Labeling(lab, K))
        return ExactDistribution(K, n, np.array([1.0]), np.array([q0]), None, None)
    kernel = ReplicateKernel(g, dist)
    probs, qs, ts, qcs = [], [], [], []
    for start in range(0, total, chunk):
        colors = _all_labelings(n, K, start, min(total, start + chunk))
        pr = np.prod(dist.probs[colors], axis=1)
        q, qc, t = kernel.stats(colors, want_t=True)
        probs.append(pr)
        qs.append(q)
        qcs.append(qc)
        ts.append(t)
    return ExactDistribution(K, n, np.concatenate(probs), np.concatenate(qs),
                             np.concatenate(ts), np.concatenate(qcs))
