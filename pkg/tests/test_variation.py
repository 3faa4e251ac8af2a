"""Difference operators, power variations, and the relative variation path."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semistat.exceptions import DegenerateError, DomainError, LengthError
from semistat.simulate import RngSeed, SamplePath
from semistat.variation import (first_order_variation, grid_index,
                                power_variation, rrv, second_diff)


def _path(values, step=1.0):
    return SamplePath(step=step, values=np.asarray(values, dtype=float))


def test_grid_index_floor_and_jitter():
    assert grid_index(1.0, 0.1) == 10
    assert grid_index(0.99999999999, 0.1) == 10  # tolerates 1e-9 relative
    assert grid_index(0.95, 0.1) == 9
    assert grid_index(0.0, 0.1) == 0


def test_second_diff_of_squares():
    got = second_diff(_path([0.0, 1.0, 4.0, 9.0]), 1)
    assert np.allclose(got, [2.0, 2.0])


def test_second_diff_frequency_two():
    got = second_diff(_path([0.0, 1.0, 4.0, 9.0, 16.0]), 2)
    assert np.allclose(got, [8.0])


def test_second_diff_kills_affine():
    i = np.arange(12, dtype=float)
    got = second_diff(_path(3.0 - 0.7 * i), 3)
    assert np.allclose(got, 0.0, atol=1e-12)


def test_second_diff_too_short():
    with pytest.raises(LengthError):
        second_diff(_path([0.0, 1.0, 2.0, 3.0]), 2)


def test_power_variation_examples():
    path = _path([0.0, 1.0, 4.0, 9.0])
    pv = power_variation(path, 1, 2.0, path.horizon)
    assert pv.value == 8.0
    assert pv.frequency == 1
    assert pv.count == 2
    assert power_variation(path, 1, 1.0, path.horizon).value == 4.0


def test_power_variation_count_rule():
    # count = floor(t/delta) - 2v + 1
    path = _path(np.arange(11.0) ** 2)
    for v in (1, 2, 3):
        for t in (10.0, 7.0, 2.0 * v):
            pv = power_variation(path, v, 2.0, t)
            assert pv.count == int(t) - 2 * v + 1


def test_power_variation_truncates_at_t():
    path = _path([0.0, 1.0, 4.0, 9.0, 16.0])
    assert power_variation(path, 1, 2.0, 3.0).value == 8.0
    assert power_variation(path, 1, 2.0, path.horizon).value == 12.0


def test_power_variation_rejects_bad_args():
    path = _path([0.0, 1.0, 4.0, 9.0])
    with pytest.raises(LengthError):
        power_variation(path, 2, 2.0, 1.9)  # floor(t/delta) < 2v
    with pytest.raises(DomainError):
        power_variation(path, 1, -1.0, 3.0)
    with pytest.raises(DomainError):
        power_variation(path, 1, 2.0, 99.0)  # beyond the horizon


def test_first_order_examples():
    path = _path([0.0, 1.0, 3.0])
    pv = first_order_variation(path, 2.0, path.horizon)
    assert pv.value == 5.0
    assert pv.frequency == 0
    assert pv.count == 2
    flat = first_order_variation(_path([2.0, 2.0, 2.0]), 2.0, 2.0)
    assert flat.value == 0.0


def test_first_order_brownian_realized_variance():
    rng = RngSeed(404, 0).generator()
    n, reps = 2000, 400
    vals = np.concatenate([[np.zeros(reps)],
                           np.cumsum(rng.standard_normal((n, reps))
                                     / np.sqrt(n), axis=0)]).reshape(n + 1, reps)
    rv = [first_order_variation(SamplePath(step=1.0 / n, values=vals[:, r]),
                                2.0, 1.0).value for r in range(reps)]
    # realized variance of standard BM on [0,1]: mean 1, sd sqrt(2/n) per rep
    assert np.mean(rv) == pytest.approx(1.0, abs=4 * np.sqrt(2.0 / n / reps))


def test_rrv_final_value_exact_and_monotone():
    rng = RngSeed(7, 3).generator()
    path = _path(np.cumsum(rng.standard_normal(300)), step=0.01)
    out = rrv(path, 2.0)
    assert out.values[-1] == 1.0  # exact, not approximate
    assert np.all(np.diff(out.values) >= 0.0)
    assert np.all((out.values >= 0.0) & (out.values <= 1.0))
    assert len(out.values) == 300 - 1
    assert out.times[0] == pytest.approx(0.01)


def test_rrv_uniform_increments():
    path = _path([0.0, 1.0, 0.0, 1.0, 0.0, 1.0], step=0.5)
    out = rrv(path, 2.0)
    assert np.allclose(out.values, np.arange(1, 6) / 5.0)


def test_rrv_constant_path_degenerate():
    with pytest.raises(DegenerateError):
        rrv(_path([1.0, 1.0, 1.0, 1.0]), 2.0)


# exactly representable affine transforms: power-of-two scale, integer shifts
@settings(max_examples=40, deadline=None)
@given(scale_exp=st.integers(min_value=-3, max_value=3),
       shift=st.integers(min_value=-8, max_value=8),
       slope=st.integers(min_value=-4, max_value=4),
       v=st.sampled_from([1, 2]),
       seed=st.integers(min_value=0, max_value=10_000))
def test_second_diff_affine_invariance(scale_exp, shift, slope, v, seed):
    rng = RngSeed(seed, 0).generator()
    x = rng.standard_normal(24)
    base = second_diff(_path(x), v)
    i = np.arange(24, dtype=float)
    moved = second_diff(_path(x + shift + slope * i), v)
    assert np.allclose(base, moved, atol=1e-12)
    scaled = second_diff(_path(2.0 ** scale_exp * x), v)
    assert np.array_equal(scaled, 2.0 ** scale_exp * base)


@settings(max_examples=30, deadline=None)
@given(scale_exp=st.integers(min_value=-2, max_value=2),
       v=st.sampled_from([1, 2]),
       p=st.sampled_from([1.0, 2.0, 3.0]),
       seed=st.integers(min_value=0, max_value=10_000))
def test_power_variation_scale_equivariance(scale_exp, v, p, seed):
    rng = RngSeed(seed, 1).generator()
    x = rng.standard_normal(30)
    path = _path(x)
    c = 2.0 ** scale_exp
    base = power_variation(path, v, p, path.horizon).value
    scaled = power_variation(_path(c * x), v, p, path.horizon).value
    assert scaled == c ** p * base  # bit-exact for power-of-two scales


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000),
       p=st.sampled_from([1.0, 2.0]))
def test_rrv_translation_invariance(seed, p):
    rng = RngSeed(seed, 2).generator()
    x = rng.standard_normal(40)
    a = rrv(_path(x), p).values
    b = rrv(_path(x + 5.0), p).values
    # translation is absorbed by differencing up to float rounding of x + 5
    assert np.allclose(a, b, rtol=1e-10, atol=1e-12)
    assert b[-1] == 1.0
