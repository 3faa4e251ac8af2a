"""Reproducible Monte Carlo studies of the smoothness estimator and tests.

An experiment is a cross product of parameter grids (one cell per
combination), a replication count, and a base seed. Every replication of
every cell draws from its own random stream whose id is a hash of the cell
coordinates and the replication index, so results are independent of worker
count, chunking, and cell order, and a given configuration always produces
byte-identical CSV output.

Simulator defaults: regime A_constant uses the exact Gaussian sampler
(error-free), regimes B/C use the convolution scheme with internal refinement
k = 10 when alpha < 0 and k = 1 otherwise; the ACF study always uses the
convolution scheme, since scheme-induced ACF distortion is its subject. All
defaults can be overridden through the config.

Per-replication failures (an estimate outside the CLT region, a degenerate
variation) are counted, reported through n_reps_effective, and excluded from
the averages; they are never silently dropped.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from itertools import product

import numpy as np
import scipy.special as sc

from .error import error_curve
from .estimate import cof_estimate
from .exceptions import DegenerateError, DomainError
from .kernel import GammaKernelParams, ProcessMoments, matern_rho
from .simulate import (ConstantVol, ExpOuVol, RngSeed, SamplePath, SimGrid,
                       convolution_paths, exact_gaussian_paths)
from .voltest import vol_test

_KINDS = ("bias_rmse", "alpha_test", "vol_size", "vol_power", "p_study",
          "acf_check", "infreq_sampling", "error_curve")
_REGIMES = ("A_constant", "B_stochvol", "C_leverage")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one Monte Carlo experiment.

    Grids are tuples; the experiment runs every combination that applies to
    its kind. alpha_nulls empty means "test each true alpha against itself"
    (a size study); k_factors empty means the per-regime default refinement.
    deltas is the observation spacing grid for the infrequent-sampling and
    ACF studies (the horizon is then n_obs * delta); other kinds observe on
    [0, horizon].
    """

    experiment_kind: str
    regime: str = "A_constant"
    alphas: tuple = (0.0,)
    lams: tuple = (1.0,)
    betas: tuple = (5.0,)
    rhos: tuple = (-0.5,)
    n_obs: tuple = (500,)
    deltas: tuple = (0.1,)
    p_values: tuple = (2.0,)
    alpha_nulls: tuple = ()
    metrics: tuple = ("L1", "L2", "Sup")
    levels: tuple = (0.01, 0.05, 0.1)
    k_factors: tuple = ()
    n_reps: int = 2000
    base_seed: int = 0
    truncation: int = 1000
    horizon: float = 1.0
    n_lags: int = 50
    m_time: float = 2.0

    def __post_init__(self):
        if self.experiment_kind not in _KINDS:
            raise DomainError(f"unknown experiment_kind {self.experiment_kind!r}; "
                              f"choose from {_KINDS}")
        if self.regime not in _REGIMES:
            raise DomainError(f"unknown regime {self.regime!r}; choose from {_REGIMES}")
        for name in ("alphas", "lams", "betas", "rhos", "n_obs", "deltas",
                     "p_values", "alpha_nulls", "metrics", "levels", "k_factors"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        for name in ("alphas", "lams", "n_obs", "p_values", "levels", "metrics"):
            if not getattr(self, name):
                raise DomainError(f"grid {name} must be nonempty")
        if self.n_reps < 1:
            raise DomainError(f"n_reps must be >= 1, got {self.n_reps}")
        if self.truncation < 1:
            raise DomainError(f"truncation must be >= 1, got {self.truncation}")
        if self.experiment_kind in ("infreq_sampling", "acf_check") and not self.deltas:
            raise DomainError("deltas must be nonempty for this experiment kind")


def config_to_dict(config):
    """Plain-dict form of a config, suitable for JSON."""
    return asdict(config)


def config_from_dict(data):
    """Build a config from a plain dict, rejecting unknown keys."""
    known = {f.name for f in fields(ExperimentConfig)}
    extra = set(data) - known
    if extra:
        raise DomainError(f"unknown config keys: {sorted(extra)}")
    if "experiment_kind" not in data:
        raise DomainError("config requires experiment_kind")
    return ExperimentConfig(**data)


def config_hash(config):
    """Ten hex digits identifying the exact configuration."""
    blob = json.dumps(config_to_dict(config), sort_keys=True,
                      separators=(",", ":"))
    return hashlib.sha1(blob.encode()).hexdigest()[:10]


@dataclass(frozen=True)
class McSummary:
    """Aggregated result for one experiment cell.

    cell maps coordinate names to values. bias/rmse are NaN for pure
    rejection studies; rejection_rates maps (metric, level) or (alpha0,
    level) keys, or is empty for bias studies. extra carries kind-specific
    payloads (per-lag ACF arrays, error-curve rows).
    """

    cell: dict
    bias: float
    rmse: float
    rejection_rates: dict
    mc_stderr: float
    n_reps_effective: int
    extra: dict

    def __post_init__(self):
        for key, rate in self.rejection_rates.items():
            if np.isfinite(rate) and not 0.0 <= rate <= 1.0:
                raise DomainError(f"rejection rate {rate} for {key} outside [0,1]")
        if (np.isfinite(self.bias) and np.isfinite(self.rmse)
                and self.rmse < abs(self.bias) - 1e-12):
            raise DomainError(f"rmse {self.rmse} < |bias| {self.bias}")


def _stream_id(kind, cell, rep):
    """63-bit stream id from the cell coordinates and replication index."""
    key = json.dumps([kind, cell, rep], sort_keys=True, separators=(",", ":"))
    digest = hashlib.blake2b(key.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def _rep_seeds(config, cell, lo, hi):
    return [RngSeed(config.base_seed, _stream_id(config.experiment_kind, cell, r))
            for r in range(lo, hi)]


def _default_k(regime, alpha):
    if regime == "A_constant":
        return 1
    return 10 if alpha < 0 else 1


def _cells(config):
    """Cell dicts for the config's kind, in deterministic grid order."""
    kind = config.experiment_kind
    regime = config.regime
    betas = config.betas if regime in ("B_stochvol", "C_leverage") else (None,)
    rhos = config.rhos if regime == "C_leverage" else (None,)

    out = []
    if kind in ("bias_rmse", "p_study"):
        for a, lam, b, r, n, p in product(config.alphas, config.lams, betas,
                                          rhos, config.n_obs, config.p_values):
            k = config.k_factors or (_default_k(regime, a),)
            for kk in k:
                out.append({"regime": regime, "alpha": a, "lam": lam, "beta": b,
                            "rho": r, "n_obs": n, "p": p, "k": kk})
    elif kind == "alpha_test":
        for a, lam, b, r, n in product(config.alphas, config.lams, betas,
                                       rhos, config.n_obs):
            nulls = config.alpha_nulls or (a,)
            k = config.k_factors or (_default_k(regime, a),)
            for a0, kk in product(nulls, k):
                out.append({"regime": regime, "alpha": a, "alpha0": a0,
                            "lam": lam, "beta": b, "rho": r, "n_obs": n,
                            "k": kk})
    elif kind in ("vol_size", "vol_power"):
        for a, lam, b, r, n, p in product(config.alphas, config.lams, betas,
                                          rhos, config.n_obs, config.p_values):
            k = config.k_factors or (_default_k(regime, a),)
            for kk in k:
                out.append({"regime": regime, "alpha": a, "lam": lam, "beta": b,
                            "rho": r, "n_obs": n, "p": p, "k": kk})
    elif kind == "acf_check":
        k = config.k_factors or (1,)
        for a, lam, d, n, kk in product(config.alphas, config.lams,
                                        config.deltas, config.n_obs, k):
            out.append({"alpha": a, "lam": lam, "delta": d, "n_obs": n, "k": kk})
    elif kind == "infreq_sampling":
        for a, lam, d, n, p in product(config.alphas, config.lams, config.deltas,
                                       config.n_obs, config.p_values):
            out.append({"regime": regime, "alpha": a, "lam": lam, "delta": d,
                        "n_obs": n, "p": p})
    elif kind == "error_curve":
        for a, lam in product(config.alphas, config.lams):
            out.append({"alpha": a, "lam": lam})
    return out


def _simulate_cell(config, cell, seeds):
    """Path values for one cell, shape (len(seeds), N+1), plus the step."""
    kind = config.experiment_kind
    params = GammaKernelParams(alpha=cell["alpha"], lam=cell["lam"])
    n = cell["n_obs"]
    if kind in ("infreq_sampling", "acf_check"):
        horizon = n * cell["delta"]
    else:
        horizon = config.horizon
    k = cell.get("k", 1)

    use_conv = kind == "acf_check" or cell.get("regime", "A_constant") != "A_constant"
    if not use_conv:
        grid = SimGrid(n_obs=n, horizon=horizon)
        vals = exact_gaussian_paths(params, 1.0, grid, seeds)
    else:
        grid = SimGrid(n_obs=n, horizon=horizon, truncation=config.truncation,
                       subsample_factor=k)
        regime = cell.get("regime", "A_constant")
        if regime == "A_constant":
            vol = ConstantVol(1.0)
        elif regime == "B_stochvol":
            vol = ExpOuVol(beta=cell["beta"], leverage_rho=0.0)
        else:
            vol = ExpOuVol(beta=cell["beta"], leverage_rho=cell["rho"])
        vals = convolution_paths(params, vol, grid, seeds)
    return vals, horizon / n


def _chunk_payload(config, cell, lo, hi):
    """Per-replication results for replications lo..hi-1 of one cell.

    Failed replications are NaN throughout; the caller counts them.
    """
    kind = config.experiment_kind
    seeds = _rep_seeds(config, cell, lo, hi)
    vals, step = _simulate_cell(config, cell, seeds)
    n_rep = hi - lo

    if kind in ("bias_rmse", "p_study", "infreq_sampling"):
        ahat = np.full(n_rep, np.nan)
        for r in range(n_rep):
            path = SamplePath(step=step, values=vals[r])
            try:
                ahat[r] = cof_estimate(path, cell["p"]).alpha_hat
            except (DegenerateError, DomainError):
                pass
        return {"alpha_hat": ahat}

    if kind == "alpha_test":
        crit = np.array([sc.ndtri(1.0 - lvl / 2.0) for lvl in config.levels])
        rej = np.full((n_rep, len(config.levels)), np.nan)
        for r in range(n_rep):
            path = SamplePath(step=step, values=vals[r])
            try:
                est = cof_estimate(path, 2.0)
            except (DegenerateError, DomainError):
                continue
            if not -0.5 < est.alpha_hat < 0.25:
                continue
            z = est.z_stat_vs(cell["alpha0"])
            rej[r] = (np.abs(z) > crit).astype(float)
        return {"reject": rej}

    if kind in ("vol_size", "vol_power"):
        rej = np.full((n_rep, len(config.metrics), len(config.levels)), np.nan)
        for r in range(n_rep):
            path = SamplePath(step=step, values=vals[r])
            try:
                for mi, metric in enumerate(config.metrics):
                    res = vol_test(path, p=cell["p"], metric=metric,
                                   levels=config.levels)
                    rej[r, mi] = [float(res.reject[lvl]) for lvl in config.levels]
            except (DegenerateError, DomainError):
                rej[r] = np.nan
        return {"reject": rej}

    if kind == "acf_check":
        lags = config.n_lags
        acf = np.full((n_rep, lags), np.nan)
        for r in range(n_rep):
            x = vals[r]
            denom = float(x @ x)
            if denom == 0.0:
                continue
            acf[r] = [float(x[:-l] @ x[l:]) / denom for l in range(1, lags + 1)]
        return {"acf": acf}

    raise DomainError(f"no replication payload for kind {kind!r}")


def _run_task(args):
    config, cell, lo, hi = args
    return _chunk_payload(config, cell, lo, hi)


def _binom_stderr(rate, n_eff):
    if n_eff == 0 or not np.isfinite(rate):
        return float("nan")
    return float(np.sqrt(rate * (1.0 - rate) / n_eff))


def _summarize(config, cell, payload):
    kind = config.experiment_kind

    if kind in ("bias_rmse", "p_study", "infreq_sampling"):
        err = payload["alpha_hat"] - cell["alpha"]
        ok = np.isfinite(err)
        n_eff = int(ok.sum())
        if n_eff == 0:
            bias = rmse = stderr = float("nan")
        else:
            bias = float(np.mean(err[ok]))
            rmse = float(np.sqrt(np.mean(err[ok] ** 2)))
            spread = float(np.std(err[ok], ddof=1)) if n_eff > 1 else float("nan")
            stderr = float(spread / np.sqrt(n_eff)) if n_eff > 1 else float("nan")
        return McSummary(cell=cell, bias=bias, rmse=rmse, rejection_rates={},
                         mc_stderr=stderr, n_reps_effective=n_eff, extra={})

    if kind == "alpha_test":
        rej = payload["reject"]
        ok = np.isfinite(rej[:, 0])
        n_eff = int(ok.sum())
        rates = {}
        worst = float("nan")
        for li, lvl in enumerate(config.levels):
            rate = float(np.mean(rej[ok, li])) if n_eff else float("nan")
            rates[(cell["alpha0"], lvl)] = rate
            se = _binom_stderr(rate, n_eff)
            worst = se if not np.isfinite(worst) or se > worst else worst
        return McSummary(cell=cell, bias=float("nan"), rmse=float("nan"),
                         rejection_rates=rates, mc_stderr=worst,
                         n_reps_effective=n_eff, extra={})

    if kind in ("vol_size", "vol_power"):
        rej = payload["reject"]
        ok = np.isfinite(rej[:, 0, 0])
        n_eff = int(ok.sum())
        rates = {}
        worst = float("nan")
        for mi, metric in enumerate(config.metrics):
            for li, lvl in enumerate(config.levels):
                rate = float(np.mean(rej[ok, mi, li])) if n_eff else float("nan")
                rates[(metric, lvl)] = rate
                se = _binom_stderr(rate, n_eff)
                worst = se if not np.isfinite(worst) or se > worst else worst
        return McSummary(cell=cell, bias=float("nan"), rmse=float("nan"),
                         rejection_rates=rates, mc_stderr=worst,
                         n_reps_effective=n_eff, extra={})

    if kind == "acf_check":
        acf = payload["acf"]
        ok = np.isfinite(acf[:, 0])
        n_eff = int(ok.sum())
        params = GammaKernelParams(alpha=cell["alpha"], lam=cell["lam"])
        h = cell["delta"] * np.arange(1, config.n_lags + 1)
        theory = matern_rho(params, h)
        if n_eff:
            emp = np.mean(acf[ok], axis=0)
            lo_b = np.percentile(acf[ok], 2.5, axis=0)
            hi_b = np.percentile(acf[ok], 97.5, axis=0)
        else:
            emp = lo_b = hi_b = np.full(config.n_lags, np.nan)
        extra = {"lag": np.arange(1, config.n_lags + 1), "theory": theory,
                 "emp_mean": emp, "band_lo": lo_b, "band_hi": hi_b}
        return McSummary(cell=cell, bias=float("nan"), rmse=float("nan"),
                         rejection_rates={}, mc_stderr=float("nan"),
                         n_reps_effective=n_eff, extra=extra)

    raise DomainError(f"no summary rule for kind {kind!r}")


def _error_curve_summaries(config):
    mom = ProcessMoments()
    out = []
    for cell in _cells(config):
        params = GammaKernelParams(alpha=cell["alpha"], lam=cell["lam"])
        rows = error_curve(params, mom, config.n_obs, t=min(config.horizon, 1.0),
                           m_time=config.m_time)
        out.append(McSummary(cell=cell, bias=float("nan"), rmse=float("nan"),
                             rejection_rates={}, mc_stderr=float("nan"),
                             n_reps_effective=0, extra={"rows": rows}))
    return out


def run_experiment(config, out_dir=None, workers=1):
    """Run every cell of the experiment; returns (summaries, csv_path).

    csv_path is None unless out_dir is given, in which case the summary table
    is written to <kind>_<confighash>.csv inside it. workers > 1 distributes
    (cell, replication-chunk) tasks over processes; results are identical for
    any worker count because each replication owns a hash-derived stream and
    aggregation runs in replication order.
    """
    if config.experiment_kind == "error_curve":
        summaries = _error_curve_summaries(config)
    else:
        cells = _cells(config)
        chunk = max(1, -(-config.n_reps // max(1, 4 * workers)))
        tasks = []
        for ci, cell in enumerate(cells):
            for lo in range(0, config.n_reps, chunk):
                tasks.append((ci, lo, (config, cell, lo,
                                       min(lo + chunk, config.n_reps))))
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_run_task, [t[2] for t in tasks]))
        else:
            results = [_run_task(t[2]) for t in tasks]

        by_cell = {}
        for (ci, lo, _), payload in zip(tasks, results):
            by_cell.setdefault(ci, []).append((lo, payload))
        summaries = []
        for ci, cell in enumerate(cells):
            parts = sorted(by_cell[ci], key=lambda t: t[0])
            keys = parts[0][1].keys()
            merged = {k: np.concatenate([p[k] for _, p in parts]) for k in keys}
            summaries.append(_summarize(config, cell, merged))

    path = None
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(
            out_dir, f"{config.experiment_kind}_{config_hash(config)}.csv")
        header, rows = csv_rows(config, summaries)
        with open(path, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    return summaries, path


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_rows(config, summaries):
    """Flat CSV header and rows for an experiment's summaries.

    Schemas by kind (coordinates first, aggregates last):
      bias_rmse / p_study:
        regime,alpha,lam,beta,rho,n_obs,p,k,bias,rmse,mc_stderr,n_reps_effective
      infreq_sampling:
        regime,alpha,lam,delta,n_obs,p,bias,rmse,mc_stderr,n_reps_effective
      alpha_test: one row per level:
        regime,alpha,alpha0,lam,beta,rho,n_obs,k,level,rejection_rate,mc_stderr,n_reps_effective
      vol_size / vol_power: one row per metric and level:
        regime,alpha,lam,beta,rho,n_obs,p,k,metric,level,rejection_rate,mc_stderr,n_reps_effective
      acf_check: one row per lag:
        alpha,lam,delta,n_obs,k,lag,theory,emp_mean,band_lo,band_hi,n_reps_effective
      error_curve:
        N,alpha,lambda,c1,c2,c3,mse,rmse
    """
    kind = config.experiment_kind
    rows = []
    if kind in ("bias_rmse", "p_study"):
        header = ["regime", "alpha", "lam", "beta", "rho", "n_obs", "p", "k",
                  "bias", "rmse", "mc_stderr", "n_reps_effective"]
        for s in summaries:
            c = s.cell
            rows.append([c["regime"], c["alpha"], c["lam"], c["beta"], c["rho"],
                         c["n_obs"], c["p"], c["k"], s.bias, s.rmse,
                         s.mc_stderr, s.n_reps_effective])
    elif kind == "infreq_sampling":
        header = ["regime", "alpha", "lam", "delta", "n_obs", "p",
                  "bias", "rmse", "mc_stderr", "n_reps_effective"]
        for s in summaries:
            c = s.cell
            rows.append([c["regime"], c["alpha"], c["lam"], c["delta"],
                         c["n_obs"], c["p"], s.bias, s.rmse, s.mc_stderr,
                         s.n_reps_effective])
    elif kind == "alpha_test":
        header = ["regime", "alpha", "alpha0", "lam", "beta", "rho", "n_obs",
                  "k", "level", "rejection_rate", "mc_stderr",
                  "n_reps_effective"]
        for s in summaries:
            c = s.cell
            for lvl in config.levels:
                rate = s.rejection_rates[(c["alpha0"], lvl)]
                rows.append([c["regime"], c["alpha"], c["alpha0"], c["lam"],
                             c["beta"], c["rho"], c["n_obs"], c["k"], lvl,
                             rate, _binom_stderr(rate, s.n_reps_effective),
                             s.n_reps_effective])
    elif kind in ("vol_size", "vol_power"):
        header = ["regime", "alpha", "lam", "beta", "rho", "n_obs", "p", "k",
                  "metric", "level", "rejection_rate", "mc_stderr",
                  "n_reps_effective"]
        for s in summaries:
            c = s.cell
            for metric in config.metrics:
                for lvl in config.levels:
                    rate = s.rejection_rates[(metric, lvl)]
                    rows.append([c["regime"], c["alpha"], c["lam"], c["beta"],
                                 c["rho"], c["n_obs"], c["p"], c["k"], metric,
                                 lvl, rate,
                                 _binom_stderr(rate, s.n_reps_effective),
                                 s.n_reps_effective])
    elif kind == "acf_check":
        header = ["alpha", "lam", "delta", "n_obs", "k", "lag", "theory",
                  "emp_mean", "band_lo", "band_hi", "n_reps_effective"]
        for s in summaries:
            c = s.cell
            e = s.extra
            for i in range(len(e["lag"])):
                rows.append([c["alpha"], c["lam"], c["delta"], c["n_obs"],
                             c["k"], int(e["lag"][i]), float(e["theory"][i]),
                             float(e["emp_mean"][i]), float(e["band_lo"][i]),
                             float(e["band_hi"][i]), s.n_reps_effective])
    elif kind == "error_curve":
        header = ["N", "alpha", "lambda", "c1", "c2", "c3", "mse", "rmse"]
        for s in summaries:
            c = s.cell
            for n, eb in s.extra["rows"]:
                rows.append([n, c["alpha"], c["lam"], eb.c1, eb.c2, eb.c3,
                             eb.mse, eb.rmse])
    else:
        raise DomainError(f"no CSV schema for kind {kind!r}")
    return header, rows


def negbias_curve(alpha, n_max, n_reps, seed):
    """Mean estimate along nested prefixes of shared simulated paths.

    Simulates n_reps exact-Gaussian paths of n_max observations (lam = 1,
    unit volatility, step 1/n_max) and estimates alpha from the first N
    observations for N = 10, 20, ..., n_max, reusing the same paths across N.
    Returns (n_grid, mean_alpha_hat) arrays.
    """
    if n_max < 20:
        raise DomainError(f"n_max must be >= 20, got {n_max}")
    if n_reps < 1:
        raise DomainError(f"n_reps must be >= 1, got {n_reps}")
    params = GammaKernelParams(alpha=alpha, lam=1.0)
    grid = SimGrid(n_obs=n_max, horizon=1.0)
    seeds = [RngSeed(seed.seed, _stream_id("negbias",
                                           {"alpha": alpha, "n_max": n_max,
                                            "stream": seed.stream_id}, r))
             for r in range(n_reps)]
    vals = exact_gaussian_paths(params, 1.0, grid, seeds)

    d1 = vals[:, 2:] - 2.0 * vals[:, 1:-1] + vals[:, :-2]
    d2 = vals[:, 4:] - 2.0 * vals[:, 2:-2] + vals[:, :-4]
    cum1 = np.cumsum(d1 * d1, axis=1)
    cum2 = np.cumsum(d2 * d2, axis=1)

    n_grid = np.arange(10, n_max + 1, 10)
    means = np.empty(len(n_grid))
    for gi, n in enumerate(n_grid):
        v1 = cum1[:, n - 2]
        v2 = cum2[:, n - 4]
        good = (v1 > 0) & (v2 > 0)
        ahat = np.log2(v2[good] / v1[good]) / 2.0 - 0.5
        means[gi] = float(np.mean(ahat)) if good.any() else float("nan")
    return n_grid, means
