"""Command-line interface.

Subcommands map one-to-one onto the library: path simulation, closed-form
error curves, the ACF comparison study, the smoothness estimator and its
test, the constant-volatility test, Monte Carlo experiments from a JSON
config, and bridge critical values.

Path CSVs use a `t,x` header with 17-significant-digit decimals, so a
simulated path fed back into an estimator reproduces the in-process result
bit for bit. Exit codes: 2 for usage errors, 3 for data errors (short
series, non-equidistant grid), 4 for numerical failures (Cholesky breakdown,
degenerate variation, estimates outside the valid region).
"""

import json
import sys
from dataclasses import replace

import click
import numpy as np

from .error import error_curve
from .estimate import cof_estimate, test_alpha
from .exceptions import (CholeskyError, DegenerateError, DomainError,
                         GridError, LengthError, SemistatError)
from .kernel import GammaKernelParams, ProcessMoments
from .mc_harness import (ExperimentConfig, config_from_dict, run_experiment)
from .simulate import (ConstantVol, ExpOuVol, RngSeed, SamplePath, SimGrid,
                       simulate_convolution, simulate_exact_gaussian)
from .voltest import TABLE_SEED, bridge_critical_values, vol_test

_REL_JITTER = 1e-9


def _fail(code, message):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    try:
        fn()
    except (GridError, LengthError) as exc:
        _fail(3, exc)
    except (CholeskyError, DegenerateError, DomainError) as exc:
        _fail(4, exc)
    except SemistatError as exc:
        _fail(4, exc)


def _read_path_csv(path):
    """SamplePath from a `t,x` CSV with an equidistance check."""
    with open(path) as fh:
        header = fh.readline().strip()
        if [c.strip() for c in header.split(",")] != ["t", "x"]:
            raise GridError(f"expected header 't,x', got {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[0] < 3:
        raise LengthError(f"need at least 3 rows, got {data.shape[0]}")
    t, x = data[:, 0], data[:, 1]
    step = (t[-1] - t[0]) / (len(t) - 1)
    if not step > 0:
        raise GridError("time column must be strictly increasing")
    jitter = np.max(np.abs(np.diff(t) - step))
    if jitter > _REL_JITTER * step:
        raise GridError(
            f"grid not equidistant: relative jitter {jitter / step:.3e} "
            f"exceeds {_REL_JITTER}")
    return SamplePath(step=float(step), values=x)


def _write_rows(out, header, rows):
    lines = [",".join(header)]
    lines += [",".join(row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out is None or out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _emit_json(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out is None or out == "-":
        click.echo(text)
    else:
        with open(out, "w") as fh:
            fh.write(text + "\n")


def _g17(v):
    return f"{float(v):.17g}"


def _parse_vol(spec):
    parts = spec.split(":")
    if parts[0] == "constant" and len(parts) == 2:
        return ConstantVol(float(parts[1]))
    if parts[0] == "expou" and len(parts) in (2, 3):
        rho = float(parts[2]) if len(parts) == 3 else 0.0
        return ExpOuVol(beta=float(parts[1]), leverage_rho=rho)
    raise click.BadParameter(
        f"volatility spec {spec!r}; use constant:<sigma0> or expou:<beta>[:<rho>]")


def _parse_floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {text!r}")


def _parse_ints(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}")


@click.group()
def main():
    """Simulation, estimation and testing for rough moving-average processes."""


@main.command()
@click.option("--alpha", type=float, required=True, help="Kernel smoothness.")
@click.option("--lambda", "lam", type=float, required=True, help="Kernel decay.")
@click.option("--n", "n_obs", type=int, required=True, help="Observations after time 0.")
@click.option("--t", "horizon", type=float, default=1.0, show_default=True,
              help="Observation horizon.")
@click.option("--vol", default="constant:1", show_default=True,
              help="constant:<sigma0> or expou:<beta>[:<rho>].")
@click.option("--k", type=int, default=1, show_default=True,
              help="Internal refinement factor (convolution scheme).")
@click.option("--m", "truncation", type=int, default=1000, show_default=True,
              help="Truncation steps below time 0 (convolution scheme).")
@click.option("--simulator", type=click.Choice(["auto", "exact", "convolution"]),
              default="auto", show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", default="-", show_default=True, help="Output CSV or - for stdout.")
def simulate(alpha, lam, n_obs, horizon, vol, k, truncation, simulator, seed, out):
    """Simulate one path and write it as a t,x CSV."""
    volspec = _parse_vol(vol)

    def run():
        params = GammaKernelParams(alpha=alpha, lam=lam)
        exact = simulator == "exact" or (
            simulator == "auto" and isinstance(volspec, ConstantVol) and k == 1)
        if exact:
            if not isinstance(volspec, ConstantVol):
                raise DomainError("the exact simulator supports constant volatility only")
            grid = SimGrid(n_obs=n_obs, horizon=horizon)
            path = simulate_exact_gaussian(params, volspec.sigma0, grid,
                                           RngSeed(seed, 0))
        else:
            grid = SimGrid(n_obs=n_obs, horizon=horizon, truncation=truncation,
                           subsample_factor=k)
            path = simulate_convolution(params, volspec, grid, RngSeed(seed, 0))
        times = path.times()
        rows = [(_g17(times[i]), _g17(path.values[i]))
                for i in range(len(path.values))]
        _write_rows(out, ["t", "x"], rows)

    _guarded(run)


@main.command("estimate-alpha")
@click.option("--in", "infile", required=True, type=click.Path(exists=True))
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--out", default="-", show_default=True)
def estimate_alpha_cmd(infile, p, out):
    """Estimate the smoothness parameter from a path CSV; prints JSON."""

    def run():
        path = _read_path_csv(infile)
        est = cof_estimate(path, p)
        _emit_json({"alpha_hat": est.alpha_hat, "stderr": est.stderr,
                    "cof_value": est.cof_value, "p": est.p,
                    "n_used": est.n_used}, out)

    _guarded(run)


@main.command("test-alpha")
@click.option("--in", "infile", required=True, type=click.Path(exists=True))
@click.option("--alpha0", type=float, required=True, help="Null value.")
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--level", type=float, default=0.05, show_default=True)
@click.option("--out", default="-", show_default=True)
def test_alpha_cmd(infile, alpha0, p, level, out):
    """Two-sided test of the smoothness parameter; prints JSON."""

    def run():
        path = _read_path_csv(infile)
        res = test_alpha(path, p, alpha0, level)
        _emit_json({"z": res.z, "reject": res.reject, "level": res.level,
                    "alpha0": res.alpha0, "alpha_hat": res.estimate.alpha_hat,
                    "stderr": res.estimate.stderr}, out)

    _guarded(run)


@main.command("test-vol")
@click.option("--in", "infile", required=True, type=click.Path(exists=True))
@click.option("--metric", type=click.Choice(["L1", "L2", "Sup"]), default="L2",
              show_default=True)
@click.option("--levels", default="0.01,0.05,0.10", show_default=True)
@click.option("--p", type=float, default=2.0, show_default=True)
@click.option("--out", default="-", show_default=True)
def test_vol_cmd(infile, metric, levels, p, out):
    """Constant-volatility test on a path CSV; prints JSON."""
    lvls = _parse_floats(levels)

    def run():
        path = _read_path_csv(infile)
        res = vol_test(path, p=p, metric=metric, levels=lvls)
        _emit_json({"metric": res.metric, "statistic": res.statistic,
                    "critical_values": {repr(l): v for l, v
                                        in res.critical_values.items()},
                    "reject": {repr(l): v for l, v in res.reject.items()},
                    "lambda_p_used": res.lambda_p_used,
                    "alpha_hat_used": res.alpha_hat_used}, out)

    _guarded(run)


@main.command("error-curve")
@click.option("--alpha", type=float, required=True)
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--n-list", default="50,100,200,400,800", show_default=True)
@click.option("--t", type=float, default=1.0, show_default=True,
              help="Evaluation time in (0, 1].")
@click.option("--m-time", type=float, default=2.0, show_default=True,
              help="Truncation depth in time units.")
@click.option("--c3-mode", type=click.Choice(["exact", "printed"]),
              default="exact", show_default=True)
@click.option("--out", default="-", show_default=True)
def error_curve_cmd(alpha, lam, n_list, t, m_time, c3_mode, out):
    """Closed-form scheme error against grid resolution; writes CSV."""
    ns = _parse_ints(n_list)

    def run():
        params = GammaKernelParams(alpha=alpha, lam=lam)
        rows = error_curve(params, ProcessMoments(), ns, t=t, m_time=m_time,
                           c3_mode=c3_mode)
        out_rows = [(str(n), _g17(alpha), _g17(lam), _g17(eb.c1), _g17(eb.c2),
                     _g17(eb.c3), _g17(eb.mse), _g17(eb.rmse))
                    for n, eb in rows]
        _write_rows(out, ["N", "alpha", "lambda", "c1", "c2", "c3", "mse",
                          "rmse"], out_rows)

    _guarded(run)


@main.command("acf-check")
@click.option("--alpha", type=float, required=True)
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--delta", type=float, default=0.1, show_default=True,
              help="Observation spacing.")
@click.option("--n", "n_obs", type=int, default=500, show_default=True)
@click.option("--k-list", default="1,100", show_default=True,
              help="Refinement factors to compare.")
@click.option("--lags", type=int, default=50, show_default=True)
@click.option("--reps", type=int, default=500, show_default=True)
@click.option("--m", "truncation", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
def acf_check_cmd(alpha, lam, delta, n_obs, k_list, lags, reps, truncation,
                  seed, workers, out_dir):
    """Theoretical vs scheme ACF with MC bands; writes one CSV per config."""
    ks = _parse_ints(k_list)

    def run():
        config = ExperimentConfig(
            experiment_kind="acf_check", alphas=(alpha,), lams=(lam,),
            deltas=(delta,), n_obs=(n_obs,), k_factors=ks, n_lags=lags,
            n_reps=reps, base_seed=seed, truncation=truncation)
        _, path = run_experiment(config, out_dir=out_dir, workers=workers)
        click.echo(path)

    _guarded(run)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True), help="JSON experiment config.")
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--full", is_flag=True,
              help="Run the full 20000-replication version.")
@click.option("--seed", type=int, default=None,
              help="Override the config's base_seed.")
def mc(config_path, out_dir, workers, full, seed):
    """Run a Monte Carlo experiment from a JSON config; writes CSV."""

    def run():
        with open(config_path) as fh:
            data = json.load(fh)
        config = config_from_dict(data)
        if full:
            config = replace(config, n_reps=20000)
        if seed is not None:
            config = replace(config, base_seed=seed)
        _, path = run_experiment(config, out_dir=out_dir, workers=workers)
        click.echo(path)

    _guarded(run)


@main.command()
@click.option("--metric", type=click.Choice(["L1", "L2", "Sup"]), required=True)
@click.option("--c", "scale_c", type=float, required=True,
              help="Scale multiplying the standard bridge.")
@click.option("--levels", default="0.01,0.05,0.10", show_default=True)
@click.option("--method", type=click.Choice(["auto", "closed_form", "mc"]),
              default="auto", show_default=True)
@click.option("--out", default="-", show_default=True)
def critvals(metric, scale_c, levels, method, out):
    """Critical values of the scaled bridge functional; writes CSV."""
    lvls = _parse_floats(levels)

    def run():
        vals = bridge_critical_values(metric, scale_c, lvls, method=method)
        used_mc = method == "mc" or (method == "auto" and metric == "L1")
        from .voltest import TABLE_GRID, TABLE_N_MC
        rows = []
        for lvl in lvls:
            rows.append((metric, repr(float(scale_c)), repr(float(lvl)),
                         _g17(vals[lvl]),
                         str(TABLE_N_MC) if used_mc else "",
                         str(TABLE_GRID) if used_mc else "",
                         f"{TABLE_SEED.seed}:{TABLE_SEED.stream_id}"
                         if used_mc else ""))
        _write_rows(out, ["metric", "c", "level", "quantile", "n_mc", "grid",
                          "seed"], rows)

    _guarded(run)


if __name__ == "__main__":
    main()
