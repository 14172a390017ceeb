"""Report assembly and serialisation for the command-line front end."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np

from . import bounds
from .errors import DegenerateError
from .labeling import variance_driver
from .martingale import (conditional_cross_moment, o_statistic_check, prefix_martingale_residual,
                         predecessors)
from .mclab import SimulationConfig, enumerate_exact, run_replicates
from .modularity import h_bar, modularity, verify_decomposition
from .null import deviation_scales, standardize

JSON_DIGITS = 12
TEXT_DIGITS = 6
ENVELOPE_NOTE = "envelopes hold up to an unspecified universal constant M"
EXACT_ATOM_LIMIT = 10**6
PREFIX_LIMIT = 10**5


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _round(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(f"{obj:.{JSON_DIGITS}g}")
    if isinstance(obj, (np.floating, np.integer)):
        return _round(obj.item())
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical JSON: floats at 12 significant digits, sorted keys.  Idempotent under reload."""
    return json.dumps(_round(obj), sort_keys=True, indent=2) + "\n"


def analysis_report(g, lab, dist, M=1.0, scale="delta", inputs=None) -> dict:
    """Every null-model quantity for one partition, with flags next to each p-value."""
    calc = deviation_scales(g, dist)
    q = modularity(g, lab)
    z_delta = standardize(q, calc, "delta")
    z_sigma = standardize(q, calc, "sigma")
    z = z_delta if scale == "delta" else z_sigma
    pv = bounds.p_value(z, calc, M)
    return {
        "inputs": dict(inputs or {}, n=g.n, m=g.m, K=lab.K),
        "filtration_order": "compacted input order",
        "q_n": q,
        "mu_n": calc.mu_n,
        "sigma2_n": calc.sigma2_n,
        "delta_n": calc.delta_n,
        "epsilon_n": calc.epsilon_n,
        "eta_n": calc.eta_n,
        "gamma_n": calc.gamma_n,
        "probs": dist.probs.tolist(),
        "z_delta": z_delta,
        "z_sigma": z_sigma,
        "scale": scale,
        "p_upper": pv.upper,
        "p_lower": pv.lower,
        "p_two_sided": pv.two_sided,
        "condition_flags": {"eta_le_half": calc.eta_ok, "epsilon_le_1_over_8e": calc.epsilon_ok},
        "range_flags": {
            "valid_x_range": calc.valid_x_range,
            "z_delta_within_range": abs(z_delta) <= calc.valid_x_range,
            "z_sigma_within_range": abs(z_sigma) <= calc.valid_x_range,
        },
        "envelope": {
            "M": M,
            "cramer_compact": bounds.cramer_envelope(abs(z), calc, M, "compact"),
            "cramer_full": bounds.cramer_envelope(abs(z), calc, M, "full"),
            "berry_esseen": bounds.berry_esseen_bound(calc, M, strict=False),
            "berry_esseen_guaranteed": 0 < calc.eta_n <= 0.5,
            "note": ENVELOPE_NOTE,
        },
    }


def _g(x):
    return f"{x:.{TEXT_DIGITS}g}" if isinstance(x, float) else str(x)


def format_analysis(rep: dict) -> str:
    cf, rf, env = rep["condition_flags"], rep["range_flags"], rep["envelope"]
    inp = rep["inputs"]
    lines = [
        f"graph: n={inp['n']} m={inp['m']}   partition: K={inp['K']}",
        f"Q_n        {_g(rep['q_n'])}",
        f"mu_n       {_g(rep['mu_n'])}",
        f"sigma2_n   {_g(rep['sigma2_n'])}",
        f"delta_n    {_g(rep['delta_n'])}",
        f"epsilon_n  {_g(rep['epsilon_n'])}   eta_n {_g(rep['eta_n'])}   gamma_n {_g(rep['gamma_n'])}",
        f"z_delta    {_g(rep['z_delta'])}   z_sigma {_g(rep['z_sigma'])}   (scale used: {rep['scale']})",
        f"p_upper    {_g(rep['p_upper'])}   p_lower {_g(rep['p_lower'])}   "
        f"p_two_sided {_g(rep['p_two_sided'])}",
        f"conditions eta<=1/2: {cf['eta_le_half']}   epsilon<=1/(8e): {cf['epsilon_le_1_over_8e']}",
        f"range      cap {_g(rf['valid_x_range'])}   z_delta within: {rf['z_delta_within_range']}   "
        f"z_sigma within: {rf['z_sigma_within_range']}",
        f"envelope   log-ratio band {_g(env['cramer_compact'])}   Berry-Esseen "
        f"{_g(env['berry_esseen'])} (guaranteed: {env['berry_esseen_guaranteed']})",
        f"           M={_g(float(env['M']))}; {env['note']}",
    ]
    return "\n".join(lines) + "\n"


def comparison_report(g, lab_a, lab_b, dist_of, M=1.0, scale="delta", inputs=None) -> dict:
    """Side-by-side reports and the difference of sigma-standardized statistics.

    ``dist_of`` maps a labeling to its null distribution.  A degenerate side
    is reported as such and the comparison is marked partial.
    """
    sides = {}
    for key, lab in (("a", lab_a), ("b", lab_b)):
        try:
            sides[key] = analysis_report(g, lab, dist_of(lab), M, scale,
                                         (inputs or {}).get(key))
        except DegenerateError as exc:
            sides[key] = {"degenerate": True, "message": str(exc)}
    partial = any(s.get("degenerate") for s in sides.values())
    diff = None if partial else sides["a"]["z_sigma"] - sides["b"]["z_sigma"]
    return {
        "a": sides["a"],
        "b": sides["b"],
        "partial": partial,
        "z_sigma_difference": diff,
        "note": "marginal statistics only; no joint inference between the partitions is made",
    }


def tail_csv(summary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "scale", "empirical_tail", "gaussian_tail", "ratio", "std_err",
                "within_valid_range"])
    for r in summary.tail_ratios:
        w.writerow([_round(r["x"]), r["scale"], _round(r["empirical_tail"]),
                    _round(r["gaussian_tail"]), _round(r["ratio"]), _round(r["std_err"]),
                    r["within_valid_range"]])
    return buf.getvalue()


def format_simulation(summary) -> str:
    s = summary
    lines = [
        f"replicates {s.replicates}  seed {s.seed}  n={s.n} m={s.m}",
        f"mean  empirical {_g(s.emp_mean)}  exact {_g(s.mu_n)}",
        f"var   empirical {_g(s.emp_var)}  exact {_g(s.sigma2_n)}",
        f"KS    delta {_g(s.ks_by_scale['delta'])}  sigma {_g(s.ks_by_scale['sigma'])}",
        f"<T>_n mean {_g(s.qchar_mean)}  fitted M {_g(s.qchar_M_fit)}",
        f"{'x':>6} {'scale':>6} {'empirical':>12} {'gaussian':>12} {'ratio':>10} {'se':>10} range",
    ]
    for r in s.tail_ratios:
        flag = "ok" if r["within_valid_range"] else "OUT"
        ratio = "-" if r["ratio"] is None else f"{r['ratio']:.6g}"
        se = "-" if r["std_err"] is None else f"{r['std_err']:.3g}"
        lines.append(f"{r['x']:>6.3g} {r['scale']:>6} {r['empirical_tail']:>12.6g} "
                     f"{r['gaussian_tail']:>12.6g} {ratio:>10} {se:>10} {flag}")
    return "\n".join(lines) + "\n"


def validation_checks(g, lab, dist, seed=0, mc_replicates=20_000) -> list[dict]:
    """Identity and inequality suite; each entry has name, passed, value, mode."""
    variance_driver(dist)
    checks = []

    def add(name, passed, value, mode, detail=""):
        checks.append({"name": name, "passed": bool(passed), "value": value, "mode": mode,
                       "detail": detail})

    res = verify_decomposition(g, lab, dist)
    add("decomposition residual", res <= 1e-10, res, "exact", "<= 1e-10")

    lhs, rhs = o_statistic_check(g)
    add("co-neighbour inequality", lhs <= rhs, float(lhs - rhs), "exact", f"{lhs} <= {rhs}")

    calc = deviation_scales(g, dist)
    factor = calc.lower_bound_factor()
    if factor > 0:
        bound = calc.delta_n**2 * factor
        add("variance lower bound", calc.sigma2_n >= bound, calc.sigma2_n - bound, "exact")
    else:
        add("variance lower bound", True, factor, "not applicable", "factor <= 0")

    K = dist.K
    colors = np.arange(K)
    cond = np.array([[conditional_cross_moment(a, b, dist) for b in colors] for a in colors])
    weighted = float(abs(dist.probs @ cond @ dist.probs))
    add("cross moment mean zero", weighted <= 1e-14, weighted, "exact", "<= 1e-14")

    hb = h_bar(colors[:, None], colors[None, :], dist)
    cm = float(np.max(np.abs(hb @ dist.probs)))
    add("kernel conditional mean zero", cm <= 1e-14, cm, "exact", "<= 1e-14")

    if K**g.n <= EXACT_ATOM_LIMIT:
        ex = enumerate_exact(g, dist)
        mean_err = abs(ex.mean - calc.mu_n) / abs(calc.mu_n)
        var_err = abs(ex.var - calc.sigma2_n) / calc.sigma2_n
        qerr = abs(ex.expect("qchar") - 1.0)
        add("null mean (enumeration)", mean_err <= 1e-10, mean_err, "exact", "relative")
        add("null variance (enumeration)", var_err <= 1e-10, var_err, "exact", "relative")
        add("quadratic characteristic mean one", qerr <= 1e-10, qerr, "exact")
    else:
        reps = run_replicates(g, dist, SimulationConfig(replicates=mc_replicates, seed=seed))
        qc = reps.qchar
        se = float(np.std(qc, ddof=1) / math.sqrt(qc.size))
        dev = abs(float(qc.mean()) - 1.0)
        add("quadratic characteristic mean one", dev <= 5 * se + 1e-12, dev, "mc",
            f"within 5 standard errors ({se:.3g})")

    max_past = max((s.size for s in predecessors(g)), default=0)
    if K**max_past <= PREFIX_LIMIT:
        pr = prefix_martingale_residual(g, dist)
        add("martingale difference property", pr <= 1e-12, pr, "exact", "<= 1e-12")
    else:
        add("martingale difference property", True, None, "skipped", "past too large to enumerate")
    return checks


def format_checks(checks) -> str:
    lines = []
    for c in checks:
        status = "PASS" if c["passed"] else "FAIL"
        val = "-" if c["value"] is None else _g(float(c["value"]))
        lines.append(f"{status}  {c['name']:<36} {val:>14}  [{c['mode']}] {c['detail']}")
    return "\n".join(lines) + "\n"
