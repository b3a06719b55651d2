import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orlicz_approx import Grid, OrliczContext, PeriodicFunction, TrigPolynomial, Weight, YoungFunction
from orlicz_approx.approximation import (best_approx, best_approx_sweep, k_functional, near_best,
                                         near_best_error, near_best_errors, realization)
from orlicz_approx.norms import luxemburg_norm
from orlicz_approx.operators import weyl_derivative
from orlicz_approx.periodic import fourier_coeffs

from conftest import cos_fn


def parseval_tail(f, n):
    c = fourier_coeffs(f)
    return math.sqrt(math.pi * np.sum(c.a[n + 1:] ** 2 + c.b[n + 1:] ** 2))


def test_near_best_cases(l2, grid):
    t = TrigPolynomial.random(5, np.random.default_rng(0)).on(grid)
    np.testing.assert_allclose(near_best(l2, t, 5).on(grid).samples, t.samples, atol=1e-12)
    assert near_best_error(l2, t, 5) < 1e-12
    f = cos_fn(grid, 4)
    np.testing.assert_allclose(near_best(l2, f, 3).on(grid).samples, 0.0, atol=1e-13)
    assert near_best_error(l2, f, 3) == pytest.approx(luxemburg_norm(l2, f), rel=1e-14)


def test_best_of_polynomial_is_zero(l2, grid):
    t = TrigPolynomial.random(3, np.random.default_rng(1)).on(grid)
    assert best_approx(l2, t, 3).value < 1e-12


@pytest.mark.parametrize("fn", ["abs15", "saw", "exp"])
def test_best_matches_parseval(l2, grid, fn):
    x = grid.nodes
    f = {"abs15": np.abs(np.sin(x)) ** 1.5, "saw": np.clip(math.pi - x, -2, 2),
         "exp": np.exp(np.cos(x) + 0.5 * np.sin(2 * x))}[fn]
    f = PeriodicFunction(grid, f).band_limited()
    for n in (0, 2, 5, 8):
        res = best_approx(l2, f, n, restarts=1)
        assert res.value == pytest.approx(parseval_tail(f, n), rel=1e-6)
        assert res.gap_to_near_best >= -1e-12


def test_best_beats_near_best_off_hilbert(grid):
    ctx = OrliczContext(YoungFunction.power(3), Weight.power(grid, 0.4))
    f = PeriodicFunction(grid, np.clip(math.pi - grid.nodes, -2, 2)).band_limited()
    res = best_approx(ctx, f, 4, restarts=1)
    assert res.value <= res.near_best_value
    # the Fourier projection is near-best: within a modest factor
    assert res.near_best_value <= 3 * res.value


def test_sweep_non_increasing(grid):
    ctx = OrliczContext(YoungFunction.power_log(2), Weight.constant(grid))
    f = PeriodicFunction(grid, np.abs(np.sin(grid.nodes)) ** 0.5).band_limited()
    vals = [r.value for r in best_approx_sweep(ctx, f, range(0, 7), restarts=0)]
    assert np.all(np.diff(vals) <= 0)


@given(st.integers(0, 2 ** 31 - 1))
def test_near_best_errors_monotone_and_batched(seed):
    grid = Grid(256)
    ctx = OrliczContext(YoungFunction.power(1.5), Weight.power(grid, -0.4))
    f = TrigPolynomial.random(60, np.random.default_rng(seed), decay=1.0).on(grid)
    ns = np.arange(0, 64)
    vals = near_best_errors(ctx, f, ns)
    # L^p-type norms of tails are not monotone in general, but they vanish past the degree
    assert np.all(vals[61:] < 1e-12 * max(vals[0], 1e-300) + 1e-300)
    for n in (0, 10, 33):
        assert vals[n] == pytest.approx(near_best_error(ctx, f, n), rel=1e-12)


def test_k_functional_limits(l2, grid):
    t = cos_fn(grid, 1) + 3.0
    assert k_functional(l2, t, 2, 1e-6) < 1e-10
    f = PeriodicFunction(grid, np.abs(np.sin(grid.nodes)) ** 1.5).band_limited()
    mean_free = luxemburg_norm(l2, f - f.mean)
    assert k_functional(l2, f, 2, 1e6) <= mean_free + 1e-12


def test_realization_cases(l2, grid):
    t = TrigPolynomial.random(4, np.random.default_rng(3)).on(grid)
    d2 = luxemburg_norm(l2, weyl_derivative(t, 2))
    assert realization(l2, t, 1, 4) == pytest.approx(d2 / 16, rel=1e-12)
    assert realization(l2, PeriodicFunction.constant(grid, 2.0), 1, 4) == pytest.approx(0.0, abs=1e-13)


def test_k_not_above_r(grid):
    ctx = OrliczContext(YoungFunction.power(3), Weight.power(grid, 0.4))
    f = PeriodicFunction(grid, np.clip(math.pi - grid.nodes, -2, 2)).band_limited()
    for n in (2, 5, 16):
        R = realization(ctx, f, 1, n)
        K = k_functional(ctx, f, 2, 1 / n, extra_degrees=[n])
        assert K <= R * (1 + 1e-12)
