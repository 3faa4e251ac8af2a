"""Gamma kernel, theoretical autocovariance (Matérn correlation) and the
Gaussian-core scale factor.

The moving-average kernel is g(x) = x^alpha * exp(-lam*x) for alpha > -1/2,
lam > 0. Its stationary autocovariance has the closed form

    gamma(0) = kappa * E[sigma^2] * Gamma(2*alpha+1) / (2*lam)^(2*alpha+1)
    gamma(h) = gamma(0) * rho(h)

with rho the Matérn correlation of order nu = alpha + 1/2.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, SingularityError
from .specfun import bessel_k, gamma_fn


@dataclass(frozen=True)
class GammaKernelParams:
    """Kernel parameters: smoothness exponent alpha > -1/2 and decay rate lam > 0."""

    alpha: float
    lam: float

    def __post_init__(self):
        if not self.alpha > -0.5:
            raise DomainError(f"alpha must be > -0.5, got {self.alpha}")
        if not self.lam > 0:
            raise DomainError(f"lam must be > 0, got {self.lam}")


@dataclass(frozen=True)
class ProcessMoments:
    """Second-moment inputs: kappa = Var of the driver at unit time, and E[sigma^2(0)]."""

    kappa: float = 1.0
    mean_sigma_sq: float = 1.0

    def __post_init__(self):
        if self.kappa < 0:
            raise DomainError(f"kappa must be >= 0, got {self.kappa}")
        if self.mean_sigma_sq < 0:
            raise DomainError(f"mean_sigma_sq must be >= 0, got {self.mean_sigma_sq}")


def kernel_eval(params, x):
    """Evaluate g(x) = x^alpha * exp(-lam*x) for x >= 0.

    g(0) is 0 for alpha > 0 and 1 for alpha = 0; for alpha < 0 the kernel has a
    non-removable singularity at the origin and evaluation there raises
    SingularityError (discretizations must use strictly positive abscissae).
    Accepts a scalar or an ndarray for x.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("kernel_eval requires x >= 0")
    at_zero = xa == 0.0
    if np.any(at_zero):
        if params.alpha < 0:
            raise SingularityError(
                f"kernel has a singularity at x=0 for alpha={params.alpha} < 0")
        zero_val = 1.0 if params.alpha == 0 else 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(at_zero, zero_val,
                           np.power(xa, params.alpha) * np.exp(-params.lam * xa))
    else:
        out = np.power(xa, params.alpha) * np.exp(-params.lam * xa)
    if np.isscalar(x):
        return float(out)
    return out


def acvf_gamma(params, moments, h):
    """Closed-form autocovariance gamma(h) of the stationary moving average.

    gamma(0) = kappa * E[sigma^2] * Gamma(2*alpha+1) / (2*lam)^(2*alpha+1),
    gamma(h) = gamma(0) * matern_rho(h). Accepts scalar or ndarray h >= 0.
    """
    ha = np.asarray(h, dtype=float)
    if np.any(ha < 0):
        raise DomainError("acvf_gamma requires h >= 0")
    a, lam = params.alpha, params.lam
    var0 = (moments.kappa * moments.mean_sigma_sq
            * gamma_fn(2 * a + 1) / (2 * lam) ** (2 * a + 1))
    out = var0 * _matern_rho_arr(params, ha)
    if np.isscalar(h):
        return float(out)
    return out


def matern_rho(params, h):
    """Matérn correlation of order nu = alpha + 1/2 at lag h >= 0.

    rho(h) = 2^(1/2 - alpha) / Gamma(alpha + 1/2) * (lam*h)^(alpha+1/2)
             * K_(alpha+1/2)(lam*h), with rho(0) = 1 as the limit value.
    Accepts scalar or ndarray h.
    """
    ha = np.asarray(h, dtype=float)
    if np.any(ha < 0):
        raise DomainError("matern_rho requires h >= 0")
    out = _matern_rho_arr(params, ha)
    if np.isscalar(h):
        return float(out)
    return out


def _matern_rho_arr(params, ha):
    nu = params.alpha + 0.5
    pos = ha > 0
    out = np.ones_like(ha, dtype=float)
    if np.any(pos):
        z = params.lam * ha[pos]
        val = (2.0 ** (0.5 - params.alpha) / gamma_fn(nu)
               * np.power(z, nu) * bessel_k(nu, z))
        out[pos] = val
    return out


def gaussian_core_scale(params, delta):
    """Scale factor c(delta) = sqrt(2*gamma0(0) - 2*gamma0(delta)).

    gamma0 is the autocovariance with unit kappa and unit E[sigma^2]; c(delta)
    is the standard deviation of an increment of the underlying Gaussian core
    over one step.
    """
    if delta <= 0:
        raise DomainError(f"gaussian_core_scale requires delta > 0, got {delta}")
    unit = ProcessMoments(1.0, 1.0)
    g0 = acvf_gamma(params, unit, 0.0)
    gd = acvf_gamma(params, unit, delta)
    return float(np.sqrt(2.0 * g0 - 2.0 * gd))
