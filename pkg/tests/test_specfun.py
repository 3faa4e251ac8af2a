"""Special-function wrappers against frozen reference values."""

import math

import numpy as np
import pytest

from semistat.exceptions import DomainError
from semistat.specfun import bessel_k, gamma_fn, lower_incomplete_gamma

from _pins import BESSEL_K_07_10, BESSEL_K_10_10, LOWER_GAMMA_15_10


def test_gamma_integer_factorials():
    for n in range(1, 8):
        assert gamma_fn(n) == pytest.approx(math.factorial(n - 1), rel=1e-14)


def test_gamma_half():
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


def test_gamma_rejects_nonpositive():
    with pytest.raises(DomainError):
        gamma_fn(0.0)
    with pytest.raises(DomainError):
        gamma_fn(-1.3)


def test_lower_incomplete_gamma_pin():
    assert lower_incomplete_gamma(1.5, 1.0) == pytest.approx(
        LOWER_GAMMA_15_10, rel=1e-13)


def test_lower_incomplete_gamma_limits():
    # at a = 1 the integral is 1 - e^(-x)
    for x in (0.3, 1.0, 4.0):
        assert lower_incomplete_gamma(1.0, x) == pytest.approx(
            1.0 - math.exp(-x), rel=1e-13)
    # saturates to the complete gamma
    assert lower_incomplete_gamma(2.5, 200.0) == pytest.approx(
        gamma_fn(2.5), rel=1e-13)


def test_lower_incomplete_gamma_nonpositive_x_is_zero():
    assert lower_incomplete_gamma(0.7, 0.0) == 0.0
    assert lower_incomplete_gamma(0.7, -3.0) == 0.0


def test_lower_incomplete_gamma_vectorized():
    x = np.array([-1.0, 0.0, 0.5, 2.0])
    got = lower_incomplete_gamma(1.0, x)
    want = np.where(x > 0, 1.0 - np.exp(-np.clip(x, 0, None)), 0.0)
    assert np.allclose(got, want, rtol=1e-13)


def test_lower_incomplete_gamma_monotone_in_x():
    xs = np.linspace(0.0, 5.0, 40)
    vals = lower_incomplete_gamma(0.8, xs)
    assert np.all(np.diff(vals) > 0)


def test_bessel_k_pins():
    assert bessel_k(0.7, 1.0) == pytest.approx(BESSEL_K_07_10, rel=1e-13)
    assert bessel_k(1.0, 1.0) == pytest.approx(BESSEL_K_10_10, rel=1e-13)


def test_bessel_k_half_closed_form():
    # K_{1/2}(x) = sqrt(pi/(2x)) e^(-x)
    for x in (0.2, 1.0, 3.7):
        assert bessel_k(0.5, x) == pytest.approx(
            math.sqrt(math.pi / (2 * x)) * math.exp(-x), rel=1e-13)


def test_bessel_k_rejects_bad_args():
    with pytest.raises(DomainError):
        bessel_k(0.0, 1.0)
    with pytest.raises(DomainError):
        bessel_k(0.5, 0.0)
    with pytest.raises(DomainError):
        bessel_k(-0.5, 1.0)
