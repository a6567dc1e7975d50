import math
import warnings

import numpy as np
import pytest

from convkernel.charfn import (CharProduct, eval_delta, build_w, build_w_asymptotic, delta_from_w,
                               sine_coefficients, find_eigenvalues, locate_roots, b_coefficient,
                               RootFindingError, TruncationWarning, SWITCH_RADIUS)
from convkernel.grid import GridFunction, norm_l2
from convkernel.spectra import Spectrum, complete_tail, random_spectrum

EPS = 1e-3


def test_unperturbed_values():
    cp = CharProduct(Spectrum.unperturbed(5))
    assert eval_delta(cp, 0) == pytest.approx(math.pi)
    assert eval_delta(cp, 0.25) == pytest.approx(2.0)
    assert cp(0.25) == pytest.approx(2.0)
    for k in range(1, 9):
        assert abs(eval_delta(cp, k * k)) < 1e-12


def test_single_mode_value_at_one():
    cp = CharProduct(complete_tail([1 + EPS]))
    assert eval_delta(cp, 1.0) == pytest.approx(math.pi * EPS / 2, rel=1e-12)


def test_vanishes_at_head_eigenvalues():
    s = random_spectrum(np.random.default_rng(3), 10, r=1.0, complex_values=True)
    assert np.max(np.abs(eval_delta(s, s.head))) < 1e-12


def test_branches_agree_across_switch_radius():
    # the removable-singularity branch and the generic product meet continuously
    s = complete_tail([1.2, 3.7 + 0.3j, 9.4, 15.8])
    for k in range(1, 5):
        for side in (-1, 1):
            rho_in = k + side * (SWITCH_RADIUS - 1e-9)
            rho_out = k + side * (SWITCH_RADIUS + 1e-9)
            assert abs(eval_delta(s, rho_in ** 2) - eval_delta(s, rho_out ** 2)) < 1e-8


def test_near_integer_square_is_smooth():
    s = complete_tail([1.3, 4.2])
    lam = np.array([4 - 1e-9, 4.0, 4 + 1e-9])
    v = eval_delta(s, lam)
    assert np.all(np.isfinite(v)) and np.ptp(np.abs(v)) < 1e-7


def test_build_w_examples():
    assert norm_l2(build_w(Spectrum.unperturbed(8), 257)) == 0
    w = build_w(complete_tail([1 + EPS]), 1025)
    assert np.max(np.abs(w.values - EPS * np.sin(w.x))) < 1e-15


def test_build_w_accepts_grid_and_warns_on_truncation():
    s = complete_tail([1.1, 4.3, 9.2])
    assert build_w(s, GridFunction.zeros(33)).n_points == 33
    with pytest.warns(TruncationWarning):
        build_w(s, 33, K_terms=2)


def test_parseval():
    s = random_spectrum(np.random.default_rng(7), 12, r=1.0)
    w = build_w(s, 4097)
    coef = sine_coefficients(s)
    assert norm_l2(w) == pytest.approx(math.sqrt(2 / math.pi * np.sum(np.abs(coef) ** 2)), rel=1e-10)


def test_delta_from_w_examples():
    zero = GridFunction.zeros(1025)
    assert delta_from_w(zero, 0.25) == pytest.approx(2.0)
    for k in (1, 2, 5):
        assert abs(delta_from_w(zero, k * k)) < 1e-14
    w = GridFunction.from_callable(lambda x: EPS * np.sin(x), 1025)
    assert delta_from_w(w, 1.0) == pytest.approx(math.pi * EPS / 2, rel=1e-9)


def test_delta_from_w_matches_product():
    s = random_spectrum(np.random.default_rng(11), 8, r=0.8, complex_values=True)
    w = build_w(s, 2049)
    lam = np.array([0.3, 2.5, 10.0, 33.0 + 2j, 70.0])
    np.testing.assert_allclose(delta_from_w(w, lam), eval_delta(s, lam), atol=1e-9)


def test_find_eigenvalues_unperturbed():
    sin_delta = lambda lam: math.pi * np.sinc(np.sqrt(np.asarray(lam, complex)))
    s = find_eigenvalues(sin_delta, 10)
    np.testing.assert_allclose(s.head, np.arange(1, 11) ** 2, atol=1e-9)


def test_find_eigenvalues_recovers_head():
    s = complete_tail([1 + EPS])
    found = find_eigenvalues(lambda lam: eval_delta(s, lam), 6)
    np.testing.assert_allclose(found.head, s.values(6), atol=1e-9)
    r = random_spectrum(np.random.default_rng(2), 10, r=1.0, complex_values=True)
    found = find_eigenvalues(lambda lam: eval_delta(r, lam), 10)
    np.testing.assert_allclose(found.head, r.head, atol=1e-8)


def test_root_failure_reports_index():
    # no zero near k=1: Delta is bounded away from zero there
    bad = lambda lam: np.where(np.abs(np.sqrt(np.asarray(lam, complex)) - 1) < 0.5, 1.0 + 0j,
                               math.pi * np.sinc(np.sqrt(np.asarray(lam, complex))))
    with pytest.raises(RootFindingError) as info:
        find_eigenvalues(bad, 3)
    assert info.value.report.failed == [1]
    report = locate_roots(bad, 3)
    assert report.converged.tolist() == [False, True, True]


@pytest.mark.parametrize("k", range(1, 6))
def test_b_coefficient(k):
    assert abs(b_coefficient(k) - (-1) ** (k + 1) * math.pi / 2) < 1e-2


def test_asymptotic_w_reduces_to_product_for_zero_constant():
    s = random_spectrum(np.random.default_rng(1), 6, r=0.5)
    w0 = build_w(s, 257)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        wa = build_w_asymptotic(s, 0.0, 257, K_terms=6)
    np.testing.assert_allclose(wa.values, w0.values, atol=1e-12)
