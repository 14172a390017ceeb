"""Exact null moments of Q_n and the moderate-deviation scales.

Degree functionals are accumulated as exact integers and combined in
rational arithmetic; the probability power sums enter as floats only at
the end, so the cancellation in ``2m + S/(4m^2) - X/m`` costs nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateError
from .labeling import variance_driver

DEFAULT_RANGE_CONSTANT = 0.1


@dataclass(frozen=True)
class DegreeSums:
    m: int
    max_degree: int
    s2: int  # sum k_i^2
    s4: int  # sum k_i^4
    edge_kk: int  # sum over edges of k_i k_j

    @classmethod
    def of(cls, g) -> "DegreeSums":
        k = g.degrees.tolist()
        kk = (g.degrees[g.edges[:, 0]] * g.degrees[g.edges[:, 1]]).tolist()
        return cls(g.m, max(k), sum(x * x for x in k), sum(x**4 for x in k), sum(kk))

    def offdiag_b2(self) -> Fraction:
        """sum_{i != j} B_ij^2 = 2m + sum_{i!=j} k_i^2 k_j^2 / (4m^2) - sum_{i!=j} A_ij k_i k_j / m."""
        m = self.m
        cross = self.s2 * self.s2 - self.s4
        return 2 * m + Fraction(cross, 4 * m * m) - Fraction(2 * self.edge_kk, m)

    def diag_b2(self) -> Fraction:
        """sum_i B_ii^2 = sum_i k_i^4 / (4m^2)."""
        return Fraction(self.s4, 4 * self.m * self.m)


@dataclass(frozen=True)
class NullCalculus:
    mu_n: float
    sigma2_n: float
    delta_n: float
    epsilon_n: float
    eta_n: float
    gamma_n: float
    eta_ok: bool
    epsilon_ok: bool
    valid_x_range: float
    variance_driver: float
    max_degree: float
    m: float

    @property
    def conditions_ok(self) -> tuple[bool, bool]:
        """(eta_n <= 1/2, epsilon_n <= 1/(8e))."""
        return (self.eta_ok, self.epsilon_ok)

    @property
    def sigma_n(self) -> float:
        return math.sqrt(self.sigma2_n)

    def lower_bound_factor(self) -> float:
        """1 - sqrt(2) max_k / sqrt(m), the factor in sigma_n^2 >= delta_n^2 * factor."""
        return 1.0 - math.sqrt(2.0) * self.max_degree / math.sqrt(self.m)


def null_mean(g, dist) -> float:
    """mu_n = -(1 - p2) / (4 m^2) * sum_i k_i^2."""
    ds = DegreeSums.of(g)
    return -(1.0 - dist.p2) * float(Fraction(ds.s2, 4 * ds.m * ds.m))


def null_variance(g, dist, sums: DegreeSums | None = None) -> float:
    """sigma_n^2 = v/(2m^2) sum_{i!=j} B_ij^2 + (p3 - p2^2)/m^2 sum_i B_ii^2 with v = p2 + p2^2 - 2p3."""
    ds = sums or DegreeSums.of(g)
    m2 = ds.m * ds.m
    v = math.fsum([dist.p2, dist.p2 * dist.p2, -2.0 * dist.p3])
    w = math.fsum([dist.p3, -dist.p2 * dist.p2])
    off = float(ds.offdiag_b2() / (2 * m2))
    diag = float(ds.diag_b2() / m2)
    return max(math.fsum([v * off, w * diag]), 0.0)


def scale_terms(max_degree: float, m: float, v: float):
    """(delta, epsilon, eta, gamma) from max degree, edge count and the variance driver.

    eta follows the form the concentration argument actually produces,
    eta^2 = 64 e max_k / (sqrt(m) v).
    """
    if v <= 0:
        raise DegenerateError("single-community partition: test undefined")
    delta = math.sqrt(v / m)
    eps = 2.0 * max_degree / math.sqrt(m * v)
    eta = math.sqrt(64.0 * math.e * max_degree / (math.sqrt(m) * v))
    gamma = 4.0 * math.e * eps
    return delta, eps, eta, gamma


def calculus_from_stats(mu_n, sigma2_n, max_degree, m, v,
                        range_constant=DEFAULT_RANGE_CONSTANT) -> NullCalculus:
    delta, eps, eta, gamma = scale_terms(max_degree, m, v)
    x_cap = range_constant / eta if eta > 0 else math.inf
    return NullCalculus(
        mu_n=mu_n, sigma2_n=sigma2_n, delta_n=delta, epsilon_n=eps, eta_n=eta,
        gamma_n=gamma, eta_ok=eta <= 0.5, epsilon_ok=eps <= 1.0 / (8.0 * math.e),
        valid_x_range=x_cap, variance_driver=v, max_degree=float(max_degree), m=float(m),
    )


def deviation_scales(g, dist, range_constant=DEFAULT_RANGE_CONSTANT) -> NullCalculus:
    """All null moments and scales for ``g`` under ``dist``.

    The applicability conditions are evaluated and flagged, never enforced.
    ``valid_x_range`` is the heuristic cap ``range_constant / eta_n``.
    """
    v = variance_driver(dist)
    ds = DegreeSums.of(g)
    mu = -(1.0 - dist.p2) * float(Fraction(ds.s2, 4 * ds.m * ds.m))
    return calculus_from_stats(mu, null_variance(g, dist, ds), ds.max_degree, ds.m, v,
                               range_constant)


def standardize(q: float, calc: NullCalculus, scale: str = "delta") -> float:
    """(q - mu_n) / delta_n or (q - mu_n) / sigma_n."""
    if scale == "delta":
        den = calc.delta_n
    elif scale == "sigma":
        den = calc.sigma_n
    else:
        raise ValueError(f"unknown scale {scale!r}")
    if not den > 0:
        raise DegenerateError(f"{scale} scale is zero: test undefined")
    return (q - calc.mu_n) / den
