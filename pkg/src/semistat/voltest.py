"""Constant-volatility test and relative-variation confidence intervals.

Under constant volatility, the centered relative variation path

    D_i = delta^(-1/2) * (rrv(i*delta) - i*delta/T),   i = 1..N-1,

converges to a Brownian bridge on [0, T] scaled by c = sqrt(lambda_p)/(m_p*T),
where m_p is the absolute normal moment and lambda_p the variation CLT
constant (evaluated at the estimated smoothness, making the test feasible).
Three distances of D from zero are supported:

    L1:  delta * sum |D_i|          (integral of |bridge|; quantiles by MC)
    L2:  delta * sum D_i^2          (squared integral; Cramer-von Mises law)
    Sup: max |D_i|                  (Kolmogorov law)

Critical values come from closed-form inversions where the classical laws
apply, or from a Monte Carlo table of discretized bridges (shipped with the
package for the default configuration, regenerable through the same code).
"""

import csv
import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np
import scipy.optimize
import scipy.special as sc

from .estimate import cof_estimate, lambda2_scalar, normal_abs_moment
from .exceptions import DegenerateError, DomainError
from .simulate import RngSeed
from .variation import first_order_variation, grid_index, rrv

METRICS = ("L1", "L2", "Sup")

# shipped Monte Carlo table configuration
TABLE_N_MC = 1_000_000
TABLE_GRID = 10_000
TABLE_SEED = RngSeed(1618033988, 0)
_TABLE_RESOURCE = "bridge_quantiles.csv"
_CACHE_ENV = "SEMISTAT_CACHE"
# shipped level range [0.005, 0.995]: at 10^6 draws the quantile noise in the
# extreme upper tail exceeds half a percent, so deeper levels are not shipped
_DENSE_LEVELS = np.round(np.arange(5e-3, 0.99501, 5e-4), 6)


@dataclass(frozen=True)
class VolTestResult:
    """Outcome of the constant-volatility test for one metric."""

    metric: str
    statistic: float
    critical_values: dict
    reject: dict
    lambda_p_used: float
    alpha_hat_used: float


@dataclass(frozen=True)
class RrvCi:
    """Confidence interval for the relative accumulated variation at time t."""

    t: float
    estimate: float
    lower: float
    upper: float
    level: float


def cvm_cdf(x):
    """CDF of the integrated squared Brownian bridge (Cramer-von Mises law).

    Series expansion in Bessel K_(1/4); exponentially convergent for x > 0.
    """
    if x <= 0:
        return 0.0
    total = 0.0
    w = 1.0  # binom(2j, j) / 4^j
    for j in range(0, 120):
        y = (4.0 * j + 1.0) ** 2 / (16.0 * x)
        # e^-y K(y) = kve(y) e^-2y, computed without underflow until e^-2y dies
        if 2.0 * y > 700.0:
            break
        total += w * np.sqrt(4.0 * j + 1.0) * sc.kve(0.25, y) * np.exp(-2.0 * y)
        w *= (2.0 * j + 1.0) / (2.0 * j + 2.0)
    return float(total / (np.pi * np.sqrt(x)))


def cvm_quantile(prob):
    """Quantile of the Cramer-von Mises law at probability prob in (0, 1)."""
    if not 0.0 < prob < 1.0:
        raise DomainError(f"prob must be in (0,1), got {prob}")
    return float(scipy.optimize.brentq(lambda x: cvm_cdf(x) - prob, 1e-6, 50.0,
                                       xtol=1e-12, rtol=1e-12))


# Mean shortfall of a grid maximum below the continuous supremum is
# -zeta(1/2)/sqrt(2 pi) times sqrt(step) (Asmussen, Glynn and Pitman 1995);
# adding it back makes the Sup samples track the continuous-path law instead
# of the skeleton's, whose quantiles sit visibly lower.
_SUP_GRID_SHIFT = float(-sc.zeta(0.5) / np.sqrt(2.0 * np.pi))


def _bridge_stats(rng, n_mc, grid_n, batch=2000):
    """Metric samples of the standard bridge discretized on grid_n points.

    Sup draws carry the continuity correction _SUP_GRID_SHIFT / sqrt(grid_n);
    the L1 and L2 Riemann sums are already accurate to O(1/grid_n).
    """
    t = np.arange(1, grid_n, dtype=float) / grid_n
    sup_shift = _SUP_GRID_SHIFT / np.sqrt(grid_n)
    out = {m: np.empty(n_mc) for m in METRICS}
    done = 0
    while done < n_mc:
        b = min(batch, n_mc - done)
        z = rng.standard_normal((b, grid_n)) * np.sqrt(1.0 / grid_n)
        w = np.cumsum(z, axis=1)
        bridge = w[:, :-1] - np.outer(w[:, -1], t)
        np.abs(bridge, out=bridge)
        out["Sup"][done:done + b] = bridge.max(axis=1) + sup_shift
        out["L1"][done:done + b] = bridge.sum(axis=1) / grid_n
        bridge *= bridge
        out["L2"][done:done + b] = bridge.sum(axis=1) / grid_n
        done += b
    return out


def mc_bridge_table(n_mc=TABLE_N_MC, grid_n=TABLE_GRID, seed=TABLE_SEED,
                    levels=None):
    """Monte Carlo quantile table for all three metrics at unit scale.

    Returns a list of rows (metric, c, level, quantile, n_mc, grid, seed)
    where level is the upper-tail test level and quantile the (1-level)
    quantile of the metric under the standard bridge.
    """
    if levels is None:
        levels = _DENSE_LEVELS
    stats = _bridge_stats(seed.generator(), n_mc, grid_n)
    rows = []
    for m in METRICS:
        qs = np.quantile(stats[m], 1.0 - np.asarray(levels))
        for lvl, q in zip(levels, qs):
            rows.append((m, 1.0, float(lvl), float(q), n_mc, grid_n, seed.seed))
    return rows


def write_bridge_table(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "c", "level", "quantile", "n_mc", "grid", "seed"])
        for r in rows:
            w.writerow([r[0], f"{r[1]:.17g}", f"{r[2]:.17g}", f"{r[3]:.17g}",
                        r[4], r[5], r[6]])


def _read_bridge_table(fh):
    table = {m: ([], []) for m in METRICS}
    for row in csv.DictReader(fh):
        m = row["metric"]
        table[m][0].append(float(row["level"]))
        table[m][1].append(float(row["quantile"]))
    out = {}
    for m, (lv, qs) in table.items():
        order = np.argsort(lv)
        out[m] = (np.asarray(lv)[order], np.asarray(qs)[order])
    return out


@lru_cache(maxsize=1)
def _shipped_table():
    ref = resources.files("semistat").joinpath("_data", _TABLE_RESOURCE)
    with ref.open("r") as fh:
        return _read_bridge_table(fh)


def _table_quantile(table, metric, level):
    lv, qs = table[metric]
    if level < lv[0] or level > lv[-1]:
        raise DomainError(f"level {level} outside tabulated range "
                          f"[{lv[0]}, {lv[-1]}]")
    return float(np.interp(level, lv, qs))


@lru_cache(maxsize=8)
def _mc_table_for(n_mc, grid_n, seed):
    """Quantile table at the requested MC configuration, using the shipped
    table when it matches and a disk cache (env SEMISTAT_CACHE) otherwise."""
    if (n_mc, grid_n, seed) == (TABLE_N_MC, TABLE_GRID, TABLE_SEED):
        try:
            return _shipped_table()
        except FileNotFoundError:
            pass
    cache_dir = os.environ.get(_CACHE_ENV)
    fname = f"bridge_{n_mc}_{grid_n}_{seed.seed}_{seed.stream_id}.csv"
    if cache_dir:
        fpath = os.path.join(cache_dir, fname)
        if os.path.exists(fpath):
            with open(fpath) as fh:
                return _read_bridge_table(fh)
    rows = mc_bridge_table(n_mc, grid_n, seed)
    table = {m: ([], []) for m in METRICS}
    for m, _c, lvl, q, *_ in rows:
        table[m][0].append(lvl)
        table[m][1].append(q)
    table = {m: (np.asarray(lv), np.asarray(qs)) for m, (lv, qs) in table.items()}
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        write_bridge_table(rows, os.path.join(cache_dir, fname))
    return table


def bridge_critical_values(metric, scale_c, levels, seed=None, method="auto",
                           n_mc=TABLE_N_MC, grid_n=TABLE_GRID):
    """Upper-tail critical values of the chosen metric of c times a standard
    bridge on [0, 1].

    method "closed_form" uses the Kolmogorov law (Sup) and the Cramer-von
    Mises law (L2); L1 has no classical closed form. method "mc" draws on the
    Monte Carlo table (the shipped one for the default configuration). "auto"
    uses closed forms where available and the table for L1. Quantiles scale
    linearly in c for Sup and L1 and quadratically for the squared-L2
    statistic.
    """
    if metric not in METRICS:
        raise DomainError(f"metric must be one of {METRICS}, got {metric!r}")
    if not scale_c > 0:
        raise DomainError(f"scale_c must be > 0, got {scale_c}")
    if method not in ("auto", "closed_form", "mc"):
        raise DomainError(f"unknown method {method!r}")
    for lvl in levels:
        if not 0.0 < lvl < 1.0:
            raise DomainError(f"levels must lie in (0,1), got {lvl}")

    factor = scale_c ** 2 if metric == "L2" else scale_c
    out = {}
    if method == "closed_form" or (method == "auto" and metric != "L1"):
        if metric == "Sup":
            for lvl in levels:
                out[lvl] = factor * float(sc.kolmogi(lvl))
        elif metric == "L2":
            for lvl in levels:
                out[lvl] = factor * cvm_quantile(1.0 - lvl)
        else:
            raise DomainError("L1 has no closed-form law; use method='mc' or 'auto'")
        return out
    table = _mc_table_for(n_mc, grid_n, seed if seed is not None else TABLE_SEED)
    for lvl in levels:
        out[lvl] = factor * _table_quantile(table, metric, lvl)
    return out


def _variation_pieces(path, p, t):
    """First-order variation totals entering the feasible CLT at time t."""
    horizon = path.horizon
    n = len(path.values) - 1
    i = grid_index(t, path.step)
    if i < 1 or i >= n:
        raise DomainError(f"t={t} must satisfy 0 < floor(t/delta) < N")
    d = np.abs(np.diff(path.values))
    dp = d ** p
    d2p = d ** (2.0 * p)
    vtp = float(np.sum(dp[:i]))
    vTp = float(np.sum(dp))
    vt2p = float(np.sum(d2p[:i]))
    vT2p = float(np.sum(d2p))
    if vTp == 0.0:
        raise DegenerateError("total variation is zero")
    return vtp, vTp, vt2p, vT2p


def rrv_variance(path, p, t, lambda_p):
    """Feasible asymptotic variance v_t(delta) of the relative variation at t.

    v_t = lambda_p / (delta * m_2p * (V_T)^2)
          * ((1 - rrv_t)^2 * V_t^(2p) + rrv_t^2 * (V_T^(2p) - V_t^(2p))).
    """
    if not p > 0:
        raise DomainError(f"p must be > 0, got {p}")
    vtp, vTp, vt2p, vT2p = _variation_pieces(path, p, t)
    ratio = vtp / vTp
    m2p = normal_abs_moment(2.0 * p)
    return float(lambda_p / (path.step * m2p * vTp ** 2)
                 * ((1.0 - ratio) ** 2 * vt2p + ratio ** 2 * (vT2p - vt2p)))


def rrv_confidence(path, p, t, level):
    """Two-sided confidence interval for the relative accumulated variation.

    Uses lambda_p = lambda2_scalar(alpha_hat) with the change-of-frequency
    estimate at p=2 on the same path; the interval is clipped to [0, 1].
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must be in (0,1), got {level}")
    alpha_hat = cof_estimate(path, 2.0).alpha_hat
    lam = lambda2_scalar(alpha_hat)
    vtp, vTp, _, _ = _variation_pieces(path, p, t)
    est = vtp / vTp
    half = float(sc.ndtri(1.0 - level / 2.0)) * np.sqrt(
        path.step * rrv_variance(path, p, t, lam))
    return RrvCi(t=float(t), estimate=float(est),
                 lower=float(max(0.0, est - half)),
                 upper=float(min(1.0, est + half)), level=float(level))


def vol_test(path, p=2.0, metric="L2", levels=(0.01, 0.05, 0.10),
             critval_method="auto", seed=None):
    """Test of constant volatility against time-varying volatility.

    The statistic measures the distance of the centered relative-variation
    path from zero under the chosen metric, and is compared with quantiles of
    the matching functional of the scaled limiting bridge. The scale uses
    lambda_p at the estimated smoothness (recorded in the result); an estimate
    outside (-1/2, 1/4) raises DomainError.
    """
    if metric not in METRICS:
        raise DomainError(f"metric must be one of {METRICS}, got {metric!r}")
    if not p > 0:
        raise DomainError(f"p must be > 0, got {p}")
    rv = rrv(path, p)
    horizon = path.horizon
    delta = path.step
    d = (rv.values[:-1] - rv.times[:-1] / horizon) / np.sqrt(delta)
    if metric == "L1":
        stat = delta * float(np.sum(np.abs(d)))
    elif metric == "L2":
        stat = delta * float(np.sum(d * d))
    else:
        stat = float(np.max(np.abs(d)))

    alpha_hat = cof_estimate(path, 2.0).alpha_hat
    lam = lambda2_scalar(alpha_hat)
    c = np.sqrt(lam) / (normal_abs_moment(p) * horizon)
    if metric == "Sup":
        scale = c * np.sqrt(horizon)
    elif metric == "L2":
        scale = c * horizon
    else:
        scale = c * horizon ** 1.5
    crit = bridge_critical_values(metric, float(scale), tuple(levels),
                                  seed=seed, method=critval_method)
    reject = {lvl: bool(stat > crit[lvl]) for lvl in crit}
    return VolTestResult(metric=metric, statistic=float(stat),
                         critical_values=crit, reject=reject,
                         lambda_p_used=float(lam),
                         alpha_hat_used=float(alpha_hat))
