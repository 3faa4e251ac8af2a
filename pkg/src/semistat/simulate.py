"""Path generation for the gamma-kernel moving-average process.

Two simulators ship:

* simulate_exact_gaussian: constant volatility and Brownian driver; the joint
  law on the grid is multivariate normal with Toeplitz covariance built from
  the closed-form autocovariance, sampled through a Cholesky factor. Exact in
  distribution.
* simulate_convolution: step-function approximation of the moving average,
  truncated M steps below time 0, computed as a discrete convolution of kernel
  values against volatility-scaled driver increments. Supports constant or
  exp-OU stochastic volatility, optional leverage (per-interval correlation
  between the driver and the volatility innovations), and internal refinement
  (simulate on step delta/k, keep every k-th point).

Both are deterministic functions of (inputs, seed). Batch variants evaluate
many replications with one factorization / one convolution setup while giving
every replication its own random stream, so results never depend on batch
sizes or scheduling.
"""

import functools
from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.signal

from .exceptions import CholeskyError, DomainError, LengthError
from .kernel import ProcessMoments, acvf_gamma, kernel_eval

# direct convolution is used below this total length for single paths; FFT above
_FFT_THRESHOLD = 4096
# soft cap on scratch array elements per batch chunk (keeps memory in the
# low hundreds of MB even for heavily refined grids)
_CHUNK_BUDGET = 30_000_000


@dataclass(frozen=True)
class RngSeed:
    """Seed plus stream identifier; identical pairs give identical output."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.stream_id < 0:
            raise DomainError("seed and stream_id must be nonnegative integers")

    def generator(self):
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.default_rng(ss)


@dataclass(frozen=True)
class SimGrid:
    """Observation grid: n_obs points beyond 0 on [0, horizon], step = horizon/n_obs.

    truncation is the lower truncation depth M in base-grid steps;
    subsample_factor k > 1 makes the convolution simulator refine internally
    (step/k, truncation*k) and return every k-th point.
    """

    n_obs: int
    horizon: float = 1.0
    truncation: int = 1000
    subsample_factor: int = 1

    def __post_init__(self):
        if self.n_obs < 2:
            raise DomainError(f"n_obs must be >= 2, got {self.n_obs}")
        if not self.horizon > 0:
            raise DomainError(f"horizon must be > 0, got {self.horizon}")
        if self.truncation < 1:
            raise DomainError(f"truncation must be >= 1, got {self.truncation}")
        if self.subsample_factor < 1:
            raise DomainError(f"subsample_factor must be >= 1, got {self.subsample_factor}")

    @property
    def step(self):
        return self.horizon / self.n_obs


@dataclass(frozen=True)
class ConstantVol:
    """Constant volatility sigma0 > 0."""

    sigma0: float = 1.0

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise DomainError(f"sigma0 must be > 0, got {self.sigma0}")


@dataclass(frozen=True)
class ExpOuVol:
    """Exponential-OU volatility: log sigma is a stationary OU process with
    mean-reversion beta; leverage_rho correlates the per-interval driver and
    volatility innovations."""

    beta: float
    leverage_rho: float = 0.0

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"beta must be > 0, got {self.beta}")
        if abs(self.leverage_rho) > 1:
            raise DomainError(f"|leverage_rho| must be <= 1, got {self.leverage_rho}")


@dataclass(frozen=True)
class SamplePath:
    """Equidistant observations X(0), X(step), ..., X(n*step)."""

    step: float
    values: np.ndarray

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError(f"step must be > 0, got {self.step}")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 3:
            raise LengthError("path needs at least 3 equidistant observations")
        if not np.all(np.isfinite(vals)):
            raise DomainError("path values must all be finite")
        object.__setattr__(self, "values", vals)

    @property
    def horizon(self):
        return self.step * (len(self.values) - 1)

    def times(self):
        return self.step * np.arange(len(self.values))


@functools.lru_cache(maxsize=4)
def _toeplitz_cholesky(params, sigma0, grid):
    """Cholesky factor of the exact grid covariance, with one-shot jitter.

    Cached on (params, sigma0, grid): the factor for an N=2000 grid costs a
    few seconds, and batch studies request it once per chunk. Callers must
    treat the returned array as read-only.
    """
    h = grid.step * np.arange(grid.n_obs + 1)
    unit = ProcessMoments(1.0, 1.0)
    row = (sigma0 ** 2) * acvf_gamma(params, unit, h)
    cov = row[np.abs(np.subtract.outer(np.arange(grid.n_obs + 1),
                                       np.arange(grid.n_obs + 1)))]
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        cov[np.diag_indices_from(cov)] += 1e-12 * row[0]
        try:
            return np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise CholeskyError(
                "grid covariance not positive definite even after jitter "
                f"(alpha={params.alpha}, lam={params.lam}, n={grid.n_obs})") from None


def exact_gaussian_paths(params, sigma0, grid, seeds):
    """Batch exact-Gaussian simulation; one row per seed, shape (len(seeds), N+1).

    Each replication is a separate matrix-vector product against the cached
    Cholesky factor: a single wide matrix product would be a little faster
    but makes the last columns of a batch depend on the batch width in the
    final bits, breaking bit-level reproducibility across chunkings.
    """
    if not sigma0 > 0:
        raise DomainError(f"sigma0 must be > 0, got {sigma0}")
    fac = _toeplitz_cholesky(params, sigma0, grid)
    n1 = grid.n_obs + 1
    out = np.empty((len(seeds), n1))
    for r, sd in enumerate(seeds):
        out[r] = fac @ sd.generator().standard_normal(n1)
    return out


def simulate_exact_gaussian(params, sigma0, grid, seed):
    """Exact simulation of the constant-volatility Gaussian process on the grid."""
    values = exact_gaussian_paths(params, sigma0, grid, [seed])[0]
    return SamplePath(step=grid.step, values=values)


def _expou_logsigma(beta, innovations, z_seed, delta):
    """Advance log sigma by the exact AR(1) recursion from a stationary start.

    innovations has shape (paths, steps); z_seed shape (paths,). Returns the
    log-volatility at the step grid (same shape as innovations).
    """
    a = np.exp(-beta * delta)
    s = np.sqrt((1.0 - np.exp(-2.0 * beta * delta)) / (2.0 * beta))
    y0 = z_seed / np.sqrt(2.0 * beta)
    out, _ = scipy.signal.lfilter([1.0], [1.0, -a], s * innovations,
                                  axis=1, zi=(a * y0)[:, None])
    return out


def simulate_volatility(spec, grid_extended, seed):
    """Volatility values at left endpoints, from -M*step up to (N-1)*step.

    Returns (sigma_path, driver_normals), each of length N+M. For ExpOU the
    log-volatility starts from its stationary law at time (-M-1)*step and is
    advanced by the exact recursion; driver_normals are the standard normal
    innovations consumed, which under leverage get correlated with the main
    driver. For ConstantVol the innovations are empty.
    """
    n_steps = grid_extended.n_obs + grid_extended.truncation
    if isinstance(spec, ConstantVol):
        return np.full(n_steps, spec.sigma0), np.empty(0)
    if not isinstance(spec, ExpOuVol):
        raise DomainError(f"unsupported volatility spec: {spec!r}")
    rng = seed.generator()
    z = rng.standard_normal(1 + n_steps)
    log_sig = _expou_logsigma(spec.beta, z[None, 1:], z[:1], grid_extended.step)
    return np.exp(log_sig[0]), z[1:]


def _kernel_weights(params, length, delta):
    """g at the strictly positive grid points delta, 2*delta, ..., length*delta."""
    return kernel_eval(params, delta * (np.arange(length) + 1.0))


def _conv_rows(weights, rows, n_keep, m, method):
    """Linear convolution of each row with the kernel weights; returns the
    slice [m-1 : m-1+n_keep] of the full convolution for each row."""
    total = weights.size
    if method == "auto":
        method = "direct" if (total <= _FFT_THRESHOLD
                              and rows.shape[0] * total * total <= 2e8) else "fft"
    if method == "direct":
        out = np.empty((rows.shape[0], n_keep))
        for r in range(rows.shape[0]):
            out[r] = np.convolve(weights, rows[r])[m - 1:m - 1 + n_keep]
        return out
    nfft = scipy.fft.next_fast_len(2 * total - 1)
    wf = scipy.fft.rfft(weights, nfft)
    conv = scipy.fft.irfft(scipy.fft.rfft(rows, nfft, axis=1) * wf, nfft, axis=1)
    return conv[:, m - 1:m - 1 + n_keep]


def convolution_paths(params, vol, grid, seeds, conv_method="auto"):
    """Batch convolution-scheme simulation; one row per seed, shape (R, N+1).

    The scheme runs on the refined grid (step/k, N*k observations, M*k
    truncation steps) and keeps every k-th point, where k = grid.subsample_factor.
    """
    if conv_method not in ("auto", "direct", "fft"):
        raise DomainError(f"unknown conv_method {conv_method!r}")
    k = grid.subsample_factor
    n_f = grid.n_obs * k
    m_f = grid.truncation * k
    delta_f = grid.step / k
    total = n_f + m_f
    weights = _kernel_weights(params, total, delta_f)
    sqdt = np.sqrt(delta_f)

    out = np.empty((len(seeds), grid.n_obs + 1))
    nfft = scipy.fft.next_fast_len(2 * total - 1)
    per_row = max(3 * total, 2 * nfft)
    chunk = max(1, int(_CHUNK_BUDGET / per_row))
    for lo in range(0, len(seeds), chunk):
        batch = seeds[lo:lo + chunk]
        scaled = np.empty((len(batch), total))
        if isinstance(vol, ConstantVol):
            for r, sd in enumerate(batch):
                scaled[r] = sd.generator().standard_normal(total)
            scaled *= vol.sigma0 * sqdt
        elif isinstance(vol, ExpOuVol):
            rho = vol.leverage_rho
            z_seed = np.empty(len(batch))
            z_l = np.empty((len(batch), total + 1))
            z_perp = np.empty((len(batch), total + 1))
            for r, sd in enumerate(batch):
                z = sd.generator().standard_normal(2 * total + 3)
                z_seed[r] = z[0]
                z_l[r] = z[1:total + 2]
                z_perp[r] = z[total + 2:]
            z_vol = rho * z_l + np.sqrt(1.0 - rho ** 2) * z_perp
            log_sig = _expou_logsigma(vol.beta, z_vol[:, :total], z_seed, delta_f)
            scaled = np.exp(log_sig) * (sqdt * z_l[:, 1:])
        else:
            raise DomainError(f"unsupported volatility spec: {vol!r}")
        fine = _conv_rows(weights, scaled, n_f + 1, m_f, conv_method)
        out[lo:lo + chunk] = fine[:, ::k]
    return out


def simulate_convolution(params, vol, grid, seed, conv_method="auto"):
    """Single-path convolution-scheme simulation (see convolution_paths)."""
    values = convolution_paths(params, vol, grid, [seed], conv_method)[0]
    return SamplePath(step=grid.step, values=values)


def subsample(path, k):
    """Keep every k-th observation; step becomes k times coarser."""
    if k < 1:
        raise DomainError(f"subsample factor must be >= 1, got {k}")
    n = len(path.values) - 1
    if n % k != 0:
        raise LengthError(f"path with {n} increments cannot be subsampled by k={k}")
    return SamplePath(step=path.step * k, values=path.values[::k].copy())
