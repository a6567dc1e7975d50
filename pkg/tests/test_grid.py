import math

import numpy as np
import pytest

from convkernel.grid import (GridFunction, GridMismatchError, convolve, conv_power,
                             cumulative_integral, integrate, norm_l2, norm_inf,
                             norm_weighted_l2, norm_weighted_inf)
from conftest import smooth_random


def sin_sin(x):
    return (np.sin(x) - x * np.cos(x)) / 2


def conv_error(n, order):
    f = GridFunction.from_callable(np.sin, n)
    return np.max(np.abs(convolve(f, f, order).values - sin_sin(f.x)))


def test_constant_convolution_is_x():
    one = GridFunction.from_callable(lambda x: 1.0, 65)
    for order in (2, 4):
        np.testing.assert_allclose(convolve(one, one, order).values, one.x, atol=1e-13)


@pytest.mark.parametrize("order", [2, 4])
def test_sin_sin_closed_form(order):
    assert conv_error(1025, order) < (1e-5 if order == 2 else 1e-8)


def test_trapezoid_rate_is_second_order():
    ratio = conv_error(257, 2) / conv_error(513, 2)
    assert 3.8 < ratio < 4.2


def test_higher_order_rule_beats_trapezoid():
    assert conv_error(257, 4) < conv_error(257, 2) / 50


def test_commutative_and_associative(rng):
    f, g, h = (smooth_random(rng, 513) for _ in range(3))
    step = f.step
    np.testing.assert_allclose(convolve(f, g).values, convolve(g, f).values, atol=1e-13)
    dev = np.max(np.abs(convolve(convolve(f, g), h).values - convolve(f, convolve(g, h)).values))
    assert dev <= 10 * step ** 2


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_short_grids_integrate_polynomials(n):
    # every node count uses a rule exact for at least linear integrands
    one = GridFunction.from_callable(lambda x: 1.0, n)
    lin = GridFunction.from_callable(lambda x: x, n)
    np.testing.assert_allclose(convolve(one, lin, 4).values, one.x ** 2 / 2, atol=1e-13)


def test_conv_power_examples():
    one = GridFunction.from_callable(lambda x: 1.0, 1025)
    np.testing.assert_allclose(conv_power(one, 3).values, one.x ** 2 / 2, atol=1e-12)
    a = 0.7
    for nu in (1, 2, 4):
        expected = a ** nu * one.x ** (nu - 1) / math.factorial(nu - 1)
        np.testing.assert_allclose(conv_power(a * one, nu, order=4).values, expected, atol=1e-8)
    f = GridFunction.from_callable(np.cos, 33)
    assert conv_power(f, 1) == f or np.array_equal(conv_power(f, 1).values, f.values)
    with pytest.raises(ValueError):
        conv_power(f, 0)


def test_cumulative_integral_and_integrate():
    f = GridFunction.from_callable(np.cos, 1025)
    np.testing.assert_allclose(cumulative_integral(f, 4).values, np.sin(f.x), atol=1e-8)
    assert abs(integrate(np.sin(f.x), f.step, 4) - 2.0) < 1e-11
    assert abs(integrate(np.sin(f.x), f.step, 2) - 2.0) < 1e-5


def test_norm_examples():
    one = GridFunction.from_callable(lambda x: 1.0, 1025)
    assert norm_weighted_l2(one) == pytest.approx(math.sqrt(math.pi ** 3 / 3), rel=1e-6)
    assert norm_weighted_inf(one) == pytest.approx(math.pi)
    assert norm_l2(one) == pytest.approx(math.sqrt(math.pi))
    assert norm_inf(one) == 1.0
    zero = GridFunction.zeros(9)
    assert norm_l2(zero) == norm_inf(zero) == norm_weighted_l2(zero) == norm_weighted_inf(zero) == 0


def test_norm_inequalities(rng):
    for _ in range(20):
        f = smooth_random(rng, 257, modes=6)
        assert norm_weighted_l2(f) <= math.pi * norm_l2(f) + 1e-12
        assert norm_weighted_l2(f) <= math.sqrt(math.pi) * norm_weighted_inf(f) + 1e-12


def test_mismatch_raises():
    with pytest.raises(GridMismatchError):
        convolve(GridFunction.zeros(9), GridFunction.zeros(17))
    with pytest.raises(GridMismatchError):
        GridFunction.zeros(9) + GridFunction.zeros(17)


def test_reflect_weighted_subsample():
    f = GridFunction.from_callable(lambda x: x, 9)
    np.testing.assert_allclose(f.reflect().values, math.pi - f.x)
    np.testing.assert_allclose(f.weighted().values, (math.pi - f.x) * f.x)
    assert f.subsample(2).n_points == 5
    with pytest.raises(ValueError):
        f.subsample(3)


def test_values_are_read_only():
    f = GridFunction.zeros(5)
    with pytest.raises(ValueError):
        f.values[0] = 1


def test_csv_round_trip(tmp_path, rng):
    f = smooth_random(rng, 65)
    path = tmp_path / "f.csv"
    f.to_csv(path)
    g = GridFunction.from_csv(path)
    assert np.array_equal(f.values, g.values)


@pytest.mark.parametrize("text", ["", "a,b,c\n0,1,2\n", "x,re,im\n0,1\n3.14,1\n",
                                  "x,re,im\n0,1,0\n1,1,0\n", "x,re,im\n0,zz,0\n3.14159,1,0\n"])
def test_csv_malformed(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ValueError):
        GridFunction.from_csv(path)
