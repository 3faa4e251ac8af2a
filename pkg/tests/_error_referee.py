"""Independent checks of the closed-form scheme error.

Two referees, neither sharing code paths with the package's incomplete-gamma
evaluation:

* scheme_error_quad: direct adaptive quadrature of the defining integral,
  sum over cells of the squared difference between the kernel and its
  right-endpoint step approximation, plus the truncated tail.
* mc_scheme_error: unbiased Monte Carlo. The target process at one time is
  projected exactly onto the scheme's Brownian increments (coefficients are
  per-cell kernel averages from quadrature) plus an independent Gaussian
  remainder carrying the within-cell and tail variance; the scheme is the
  endpoint-weight dot product with the same increments. The mean squared
  difference estimates the scheme error with relative noise sqrt(2/reps).
"""

import numpy as np
from scipy.integrate import quad


def _kernel(alpha, lam):
    return lambda x: x ** alpha * np.exp(-lam * x)


def _cell_quads(alpha, lam, delta, n_cells):
    """Per-cell integrals of g and of g^2 over ((j-1) delta, j delta]."""
    g = _kernel(alpha, lam)
    g2 = _kernel(2 * alpha, 2 * lam)
    ig = np.empty(n_cells)
    ig2 = np.empty(n_cells)
    for j in range(1, n_cells + 1):
        ig[j - 1] = quad(g, (j - 1) * delta, j * delta)[0]
        ig2[j - 1] = quad(g2, (j - 1) * delta, j * delta)[0]
    return ig, ig2


def scheme_error_quad(alpha, lam, delta, n_cells):
    """Quadrature value of the scheme's squared error with n_cells support."""
    g = _kernel(alpha, lam)
    g2 = _kernel(2 * alpha, 2 * lam)
    total = 0.0
    for j in range(1, n_cells + 1):
        gj = g(j * delta)
        total += quad(lambda x: (g(x) - gj) ** 2, (j - 1) * delta, j * delta)[0]
    total += quad(g2, n_cells * delta, np.inf)[0]
    return total


def mc_scheme_error(alpha, lam, delta, n_cells, n_reps, rng, chunk=20000):
    """Monte Carlo estimate of the scheme's squared error at one time."""
    g = _kernel(alpha, lam)
    g2 = _kernel(2 * alpha, 2 * lam)
    ig, ig2 = _cell_quads(alpha, lam, delta, n_cells)
    a = ig / delta
    gj = g(delta * np.arange(1, n_cells + 1))
    var_x = float(np.sum(ig2)) + quad(g2, n_cells * delta, np.inf)[0]
    resid_var = max(var_x - delta * float(np.sum(a * a)), 0.0)
    w = np.sqrt(delta) * (a - gj)
    s_resid = np.sqrt(resid_var)

    acc = 0.0
    done = 0
    while done < n_reps:
        b = min(chunk, n_reps - done)
        z = rng.standard_normal((b, n_cells))
        eta = rng.standard_normal(b)
        d = z @ w + s_resid * eta
        acc += float(np.sum(d * d))
        done += b
    return acc / n_reps
