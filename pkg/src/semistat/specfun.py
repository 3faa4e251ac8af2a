"""Special functions used by the kernel, error and estimation modules.

Thin, domain-checked wrappers around scipy.special. All three functions accept
scalars or numpy arrays in the argument that varies in the calling code and
return floats for scalar input.
"""

import numpy as np
import scipy.special as sc

from .exceptions import DomainError


def gamma_fn(a):
    """Gamma function for positive real a.

    Parameters
    ----------
    a : float
        Argument, must be > 0.

    Returns
    -------
    float
    """
    if a <= 0:
        raise DomainError(f"gamma_fn requires a > 0, got a={a}")
    return float(sc.gamma(a))


def lower_incomplete_gamma(a, x):
    """Lower incomplete gamma function gamma(a, x) = int_0^x t^(a-1) e^(-t) dt.

    Unnormalized. By convention the value is 0 for x <= 0, which lets callers
    difference consecutive integration limits without special-casing the first
    term.

    Parameters
    ----------
    a : float
        Shape parameter, must be > 0.
    x : float or ndarray
        Upper integration limit; any real value, clipped below at 0.

    Returns
    -------
    float or ndarray
    """
    if a <= 0:
        raise DomainError(f"lower_incomplete_gamma requires a > 0, got a={a}")
    xa = np.asarray(x, dtype=float)
    out = sc.gammainc(a, np.clip(xa, 0.0, None)) * sc.gamma(a)
    if np.isscalar(x):
        return float(out)
    return out


def bessel_k(nu, x):
    """Modified Bessel function of the second kind K_nu(x).

    Parameters
    ----------
    nu : float
        Order, must be > 0. Shipped callers use nu in (0, 1].
    x : float or ndarray
        Argument, must be > 0 (K_nu diverges at 0).

    Returns
    -------
    float or ndarray
    """
    if nu <= 0:
        raise DomainError(f"bessel_k requires nu > 0, got nu={nu}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("bessel_k requires x > 0")
    out = sc.kv(nu, xa)
    if np.isscalar(x):
        return float(out)
    return out
