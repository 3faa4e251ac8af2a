"""Change-of-frequency estimation of the smoothness exponent alpha and the
asymptotic variance constants of the associated central limit theory.

The estimator compares p-th power variations of second-order differences at
frequencies v=2 and v=1:

    cof = V_2 / V_1,   alpha_hat = log2(cof)/p - 1/2.

Its asymptotic variance involves a 2x2 matrix Lambda2(alpha) built from the
correlation function of second-differenced fractional Brownian motion with
Hurst index H = alpha + 1/2; the scalar constant lambda2(alpha) built from
plain fractional Gaussian noise correlations drives the relative-variation
limit theory in the volatility-test module. Both are evaluated by exact
partial sums plus analytic tails.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.special as sc

from .exceptions import DegenerateError, DomainError
from .variation import power_variation

# partial-sum lengths; tails are handled analytically (scalar) or are below
# machine precision at this length (matrix; terms decay like j^(4*alpha-6))
_SCALAR_TERMS = 10_000
_MATRIX_TERMS = 20_000


def normal_abs_moment(p):
    """E|Z|^p for standard normal Z: 2^(p/2) Gamma((p+1)/2) / sqrt(pi)."""
    if not p > 0:
        raise DomainError(f"p must be > 0, got {p}")
    return float(2.0 ** (p / 2.0) * sc.gamma((p + 1.0) / 2.0) / np.sqrt(np.pi))


def _check_alpha(alpha, hi, what):
    if not -0.5 < alpha < hi:
        raise DomainError(f"{what} requires alpha in (-1/2, {hi}), got {alpha}")


def fgn_rho(alpha, j):
    """Correlation at lag j >= 0 of fractional Gaussian noise, H = alpha + 1/2.

    rho(j) = ((j+1)^(2H) - 2 j^(2H) + (j-1)^(2H)) / 2 for j >= 1; rho(0) = 1.
    """
    _check_alpha(alpha, 0.5, "fgn_rho")
    if j < 0:
        raise DomainError(f"lag j must be >= 0, got {j}")
    if j == 0:
        return 1.0
    tp = 2.0 * alpha + 1.0
    return 0.5 * ((j + 1.0) ** tp - 2.0 * float(j) ** tp + abs(j - 1.0) ** tp)


def second_diff_rho(alpha, j):
    """Correlation at integer lag j of second-differenced fBm, H = alpha + 1/2.

    Even in j (it is an autocorrelation); rho(0) = 1; for j >= 1:
    rho(j) = (-(j-2)^(2H) + 4(j-1)^(2H) - 6 j^(2H) + 4(j+1)^(2H) - (j+2)^(2H))
             / (2 * (4 - 2^(2H)))
    with the absolute value of the shifted lags.
    """
    _check_alpha(alpha, 0.5, "second_diff_rho")
    j = abs(int(j))
    if j == 0:
        return 1.0
    tp = 2.0 * alpha + 1.0
    num = (-abs(j - 2.0) ** tp + 4.0 * abs(j - 1.0) ** tp - 6.0 * float(j) ** tp
           + 4.0 * (j + 1.0) ** tp - (j + 2.0) ** tp)
    return num / (2.0 * (4.0 - 2.0 ** tp))


def _second_diff_rho_vec(alpha, jmax):
    """rho values at lags 0..jmax as an array."""
    tp = 2.0 * alpha + 1.0
    pw = np.power(np.arange(jmax + 3, dtype=float), tp)
    j = np.arange(1, jmax + 1)
    num = (-pw[np.abs(j - 2)] + 4.0 * pw[np.abs(j - 1)] - 6.0 * pw[j]
           + 4.0 * pw[j + 1] - pw[j + 2])
    out = np.empty(jmax + 1)
    out[0] = 1.0
    out[1:] = num / (2.0 * (4.0 - 2.0 ** tp))
    return out


def lambda2_scalar(alpha, j_terms=_SCALAR_TERMS):
    """Asymptotic variance constant 2 + 2*sum_j rho(j)^2 of fGn quadratic variation.

    The series converges only for alpha < 1/4 (the squared correlations decay
    like j^(4*alpha - 2)); alpha outside (-1/2, 1/4) raises DomainError. The
    partial sum to j_terms is completed with the analytic tail of the large-j
    expansion rho(j) = j^(2H-2) (C2 + C4 j^-2 + C6 j^-4 + ...), C_m =
    binom(2H, m), summed with the Hurwitz zeta function; the result is
    accurate to machine precision over the whole domain.
    """
    _check_alpha(alpha, 0.25, "lambda2_scalar")
    tp = 2.0 * alpha + 1.0
    j = np.arange(1, j_terms + 1, dtype=float)
    rho = 0.5 * ((j + 1.0) ** tp - 2.0 * j ** tp + (j - 1.0) ** tp)
    partial = float(np.sum(rho * rho))

    c2 = sc.binom(tp, 2)
    c4 = sc.binom(tp, 4)
    c6 = sc.binom(tp, 6)
    s0 = 4.0 - 2.0 * tp
    tail = (c2 * c2 * sc.zeta(s0, j_terms + 1)
            + 2.0 * c2 * c4 * sc.zeta(s0 + 2.0, j_terms + 1)
            + (c4 * c4 + 2.0 * c2 * c6) * sc.zeta(s0 + 4.0, j_terms + 1))
    return 2.0 + 2.0 * (partial + float(tail))


@dataclass(frozen=True)
class Lambda2Matrix:
    """Symmetric 2x2 variance matrix of the (fine, coarse) variation pair."""

    l11: float
    l12: float
    l22: float

    def __post_init__(self):
        if not (self.l11 > 0 and self.l22 > 0):
            raise DomainError("diagonal entries must be positive")
        if self.l11 * self.l22 - self.l12 ** 2 < -1e-9:
            raise DomainError("matrix must be positive semidefinite")

    @property
    def quad_e1(self):
        """e1' Lambda e1 with e1 = (-1, 1)': l11 - 2*l12 + l22."""
        return self.l11 - 2.0 * self.l12 + self.l22


def lambda2_matrix(alpha, j_terms=_MATRIX_TERMS):
    """Variance matrix Lambda2(alpha) for the second-difference variation pair.

    Valid for alpha in (-1/2, 1/4). Entries are series in the second-difference
    correlations rho (even extension at negative lags):

        l11 = 2 + 4 sum_{j>=1} rho(j)^2
        l12 = 2^(2-2a) (rho(1)+1)^2
              + 2^(1-2a) sum_{j>=0} (rho(j) + 2 rho(j+1) + rho(j+2))^2
        l22 = 2 + 2^(-4a) sum_{j>=1}
              (rho(j-2) + 4 rho(j-1) + 6 rho(j) + 4 rho(j+1) + rho(j+2))^2

    The summands decay like j^(4*alpha-6), so the default truncation leaves a
    tail below machine precision.
    """
    return _lambda2_matrix_cached(round(float(alpha), 12), int(j_terms))


@lru_cache(maxsize=4096)
def _lambda2_matrix_cached(alpha, j_terms):
    _check_alpha(alpha, 0.25, "lambda2_matrix")
    r = _second_diff_rho_vec(alpha, j_terms + 2)
    j = np.arange(1, j_terms + 1)
    l11 = 2.0 + 4.0 * float(np.sum(r[1:j_terms + 1] ** 2))
    fwd = r[:j_terms + 1] + 2.0 * r[1:j_terms + 2] + r[2:j_terms + 3]
    l12 = (2.0 ** (2.0 - 2.0 * alpha) * (r[1] + 1.0) ** 2
           + 2.0 ** (1.0 - 2.0 * alpha) * float(np.sum(fwd * fwd)))
    wide = (r[np.abs(j - 2)] + 4.0 * r[np.abs(j - 1)] + 6.0 * r[j]
            + 4.0 * r[j + 1] + r[j + 2])
    l22 = 2.0 + 2.0 ** (-4.0 * alpha) * float(np.sum(wide * wide))
    return Lambda2Matrix(l11=l11, l12=l12, l22=l22)


@dataclass(frozen=True)
class CofEstimate:
    """Change-of-frequency estimate of alpha.

    cof_value is the coarse/fine variation ratio V_2/V_1 and alpha_hat =
    log2(cof_value)/p - 1/2 exactly. stderr is the asymptotic standard error
    from the variation CLT with the plug-in matrix Lambda2(alpha_hat); it is
    NaN when alpha_hat falls outside (-1/2, 1/4), where that matrix is
    undefined. n_used counts observed increments.
    """

    alpha_hat: float
    p: float
    cof_value: float
    n_used: int
    stderr: float

    def z_stat_vs(self, alpha0):
        """Standardized deviation (alpha_hat - alpha0)/stderr; NaN when stderr is."""
        return (self.alpha_hat - alpha0) / self.stderr

    def __iter__(self):
        yield self.alpha_hat
        yield self.stderr


def cof_estimate(path, p=2.0):
    """Estimate alpha from one path via the change-of-frequency ratio at t = T.

    The standard error uses the quadratic-variation matrix (p = 2 theory) with
    the actual p in the moment constant; all shipped studies use p = 2.
    """
    if not p > 0:
        raise DomainError(f"p must be > 0, got {p}")
    horizon = path.horizon
    v1 = power_variation(path, 1, p, horizon)
    v2 = power_variation(path, 2, p, horizon)
    if v1.value == 0.0 or v2.value == 0.0:
        raise DegenerateError("power variation vanished; cannot form the ratio")
    cof = v2.value / v1.value
    alpha_hat = math.log2(cof) / p - 0.5

    stderr = float("nan")
    if -0.5 < alpha_hat < 0.25:
        lam = lambda2_matrix(alpha_hat)
        m2p = normal_abs_moment(2.0 * p)
        v2_2p = power_variation(path, 2, 2.0 * p, horizon).value
        stderr = (math.sqrt(v2_2p / m2p * lam.quad_e1)
                  / (v2.value * math.log(2.0) * p))
    return CofEstimate(alpha_hat=alpha_hat, p=float(p), cof_value=cof,
                       n_used=len(path.values) - 1, stderr=stderr)


@dataclass(frozen=True)
class AlphaTestResult:
    """Two-sided test of alpha = alpha0; unpacks as (z, reject)."""

    z: float
    reject: bool
    level: float
    alpha0: float
    estimate: CofEstimate

    def __iter__(self):
        yield self.z
        yield self.reject


def test_alpha(path, p, alpha0, level=0.05):
    """Two-sided CLT test of H0: alpha = alpha0 at the given level.

    Raises DomainError when alpha_hat falls outside (-1/2, 1/4): the variance
    matrix is undefined there and the result is reported rather than clamped.
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must be in (0,1), got {level}")
    est = cof_estimate(path, p)
    if not -0.5 < est.alpha_hat < 0.25:
        raise DomainError(
            f"alpha_hat={est.alpha_hat:.4f} outside (-1/2, 1/4); "
            "test statistic undefined")
    z = est.z_stat_vs(alpha0)
    crit = float(sc.ndtri(1.0 - level / 2.0))
    return AlphaTestResult(z=float(z), reject=bool(abs(z) > crit),
                           level=float(level), alpha0=float(alpha0), estimate=est)
