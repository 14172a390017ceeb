"""Gaussian tails, moderate-deviation envelopes and p-values.

Every envelope is stated up to an unspecified universal constant ``M``;
callers choose it (default 1) and reports say so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import RangeError

SQRT2 = math.sqrt(2.0)


def gaussian_tail(x):
    """1 - Phi(x) = erfc(x / sqrt 2) / 2.

    Scalars go through ``math.erfc``; arrays through ``scipy.special.erfc``.
    Both are accurate to a few ulp on |x| <= 8.
    """
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(float(x) / SQRT2)
    return 0.5 * special.erfc(np.asarray(x, dtype=np.float64) / SQRT2)


def gaussian_cdf(x):
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(-float(x) / SQRT2)
    return 0.5 * special.erfc(-np.asarray(x, dtype=np.float64) / SQRT2)


def mills_bounds(x: float) -> tuple[float, float]:
    """Lower and upper elementary bounds on 1 - Phi(x) for x >= 0:
    e^{-x^2/2} / (sqrt(2 pi)(1+x))  and  e^{-x^2/2} / (sqrt(pi)(1+x))."""
    g = math.exp(-x * x / 2) / (1 + x)
    return g / math.sqrt(2 * math.pi), g / math.sqrt(math.pi)


def _xlogx(t: float) -> float:
    return t * abs(math.log(t)) if t > 0 else 0.0


def cramer_envelope(x: float, calc, M: float = 1.0, form: str = "compact") -> float:
    """M times the log-ratio envelope at threshold x >= 0.

    full:    x^3 (eps + eta) + x^2 g|ln g| + (1+x)(eps|ln eps| + eta|ln eta| + g|ln g|)
    compact: x^3 eta + x^2 eta^2 |ln eta| + (1+x) eta |ln eta|
    """
    if x < 0:
        raise ValueError("envelope is defined for x >= 0; mirror the statistic for lower tails")
    eps, eta, gam = calc.epsilon_n, calc.eta_n, calc.gamma_n
    if form == "compact":
        val = x**3 * eta + x**2 * eta * _xlogx(eta) + (1 + x) * _xlogx(eta)
    elif form == "full":
        val = (x**3 * (eps + eta) + x**2 * _xlogx(gam)
               + (1 + x) * (_xlogx(eps) + _xlogx(eta) + _xlogx(gam)))
    else:
        raise ValueError(f"unknown envelope form {form!r}")
    return M * val


def berry_esseen_bound(calc, M: float = 1.0, strict: bool = True) -> float:
    """Uniform Kolmogorov-distance guarantee M * eta_n |ln eta_n|.

    With ``strict`` a ``RangeError`` is raised when eta_n > 1/2, where the
    guarantee no longer applies; otherwise the value is returned anyway.
    """
    eta = calc.eta_n
    if strict and not 0 < eta <= 0.5:
        raise RangeError(f"eta_n = {eta:.6g} outside (0, 1/2]: bound not guaranteed")
    return M * _xlogx(eta)


def concentration_envelope(x: float, scale: float, kind: str = "increment_sum") -> float:
    """Exponential tail envelopes min(1, exp(2 - x/(c e s))).

    ``increment_sum``: c = 2, s = F_n (root sum of squared increment bounds).
    ``u_statistic``:   c = 4, s = D_n (root sum of squared kernel bounds).
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    c = {"increment_sum": 2.0, "u_statistic": 4.0}[kind]
    return min(1.0, math.exp(2.0 - x / (c * math.e * scale)))


@dataclass(frozen=True)
class TailReport:
    x: float
    gaussian_tail: float
    envelope_log_ratio: float
    within_valid_range: bool
    M: float


def tail_report(x: float, calc, M: float = 1.0) -> TailReport:
    return TailReport(x, gaussian_tail(x), cramer_envelope(x, calc, M, "compact"),
                      x <= calc.valid_x_range, M)


@dataclass(frozen=True)
class PValue:
    upper: float
    lower: float
    two_sided: float
    within_valid_range: bool
    conditions_ok: tuple
    envelope: float
    M: float


def p_value(z: float, calc, M: float = 1.0) -> PValue:
    """Gaussian p-values for a standardized statistic, never suppressed, only flagged.

    ``envelope`` is the compact log-ratio band at |z| (the mirrored
    statement covers the lower tail).
    """
    upper = gaussian_tail(z)
    lower = gaussian_cdf(z)
    two = min(1.0, 2.0 * min(upper, lower))
    return PValue(upper, lower, two, abs(z) <= calc.valid_x_range, calc.conditions_ok,
                  cramer_envelope(abs(z), calc, M, "compact"), M)
