import json
import math

import numpy as np
import pytest

from convkernel.algorithm import invert, round_trip, StageError
from convkernel.config import SolverConfig
from convkernel.grid import GridFunction, norm_weighted_l2
from convkernel.spectra import Spectrum, complete_tail, random_spectrum, lambda_distance
from convkernel import stability
from conftest import poly_kernel

CFG = SolverConfig(grid_points=513, oracle_points=1025)


def test_identical_spectra_give_zero_report():
    s = complete_tail([1.2, 4.1, 8.7, 16.3])
    rep = stability.run_pair(s, s, CFG)
    assert rep.lambda_dist == 0 and rep.dM_l2w == 0 and rep.dw_inf == 0
    assert rep.ratios == {} and not any(rep.theta)


def test_single_mode_pair():
    d = 0.01
    rep = stability.run_pair(complete_tail([1 + d]), Spectrum.unperturbed(1), CFG)
    assert rep.lambda_dist == pytest.approx(d) and rep.lambda1_dist == pytest.approx(d)
    # w differs by d sin x, whose L2 norm is d sqrt(pi/2)
    assert rep.dw_l2 == pytest.approx(d * math.sqrt(math.pi / 2), rel=1e-3)
    assert rep.ratios["w_l2/Lambda"] == pytest.approx(math.sqrt(math.pi / 2), rel=1e-3)


def test_report_serialization(tmp_path):
    s = random_spectrum(np.random.default_rng(0), 6, 0.5, complex_values=True)
    rep = stability.run_pair(s, Spectrum.unperturbed(6), CFG)
    path = tmp_path / "r.json"
    rep.to_json(path)
    data = json.loads(path.read_text())
    assert data["lambda_dist"] == rep.lambda_dist and len(data["a_head"]) == 6


def test_theta_examples():
    s = Spectrum.unperturbed(20)
    assert not np.any(stability.theta_sequence(s, s))
    t = Spectrum(np.where(np.arange(1, 21) == 15, 225.5, np.arange(1, 21) ** 2))
    theta = stability.theta_sequence(s, t, r=1, k_max=20)
    for k in range(1, 21):
        expected = 0.5 / abs(225 - k * k) if abs(15 - k) >= 6 else 0.0
        assert theta[k - 1] == pytest.approx(expected)
    with pytest.raises(ValueError):
        stability.theta_sequence(s, t, r=0)


def test_a_coefficients():
    assert np.allclose(stability.a_coefficients(Spectrum.unperturbed(6), 6), 1)
    eps = 0.01
    a = stability.a_coefficients(complete_tail([1 + eps]), 6)
    k = np.arange(2, 7)
    assert a[0] == 1
    np.testing.assert_allclose(a[1:], 1 + eps / (1 - k ** 2))
    with pytest.raises(ValueError):
        stability.a_coefficients(Spectrum.unperturbed(2), 4, J=3)


def test_random_ensemble_bounds():
    kappa_ok, a_max, theta_ratio = True, 0.0, 0.0
    for i, s, t in stability.random_pairs(1, 20, 12, r=1.0, complex_values=True):
        d = stability.spectrum_diagnostics(s)
        kappa_ok &= d["kappa_bound_ok"]
        a_max = max(a_max, float(np.max(np.abs(d["a"]))))
        th = stability.theta_sequence(s, t)
        theta_ratio = max(theta_ratio, float(np.max(th)) / lambda_distance(s, t))
    assert kappa_ok and math.isfinite(a_max) and math.isfinite(theta_ratio)


def test_diagnostics_tail_only():
    d = stability.spectrum_diagnostics(Spectrum.unperturbed(8))
    assert np.allclose(d["a"], 1) and not np.any(d["theta"]) and d["radius"] == 0


def test_smoothness_diagnostic_zero_and_step(kernel_fine, kernel_spectrum_32):
    d = stability.smoothness_diagnostic(Spectrum.unperturbed(8), GridFunction.zeros(65))
    assert d["A_est"] == 0 and d["M0"] == 0 and d["discrepancy"] == 0
    smooth = stability.smoothness_diagnostic(kernel_spectrum_32, kernel_fine)
    assert abs(smooth["A_est"] - 0.25) < 0.025 and smooth["discrepancy"] < 0.05
    from convkernel.forward import oracle_spectrum
    step = GridFunction.from_callable(lambda x: np.where(x < 1.0, 0.5, 0.0), 2049)
    rough = stability.smoothness_diagnostic(oracle_spectrum(step, 32), step)
    assert rough["residual_l2"] > 10 * smooth["residual_l2"]


def test_delta_sweep_and_csv(tmp_path):
    base = random_spectrum(np.random.default_rng(4), 8, 0.5)
    rows = stability.delta_sweep(base, np.random.default_rng(5).standard_normal(8), [1e-1, 1e-3], CFG)
    assert [d for d, _ in rows] == [0.1, 0.001]
    for d, rep in rows:
        assert rep.lambda_dist == pytest.approx(d)
    path = tmp_path / "sweep.csv"
    stability.write_csv(rows, path, key="delta")
    lines = path.read_text().splitlines()
    assert lines[0].startswith("delta,lambda_dist") and len(lines) == 3
    best = stability.summarize(r for _, r in rows)
    assert set(best) == {name for name, _, _ in stability.RATIOS}


def test_ensemble_is_deterministic():
    a = stability.ensemble(3, 2, 1.0, 6, CFG)
    b = stability.ensemble(3, 2, 1.0, 6, CFG)
    assert [r.to_dict() for _, r in a] == [r.to_dict() for _, r in b]


def test_invert_stage_errors():
    with pytest.raises(StageError) as info:
        invert(complete_tail([np.inf]), CFG)
    assert info.value.stage == "validate"
    with pytest.raises(StageError) as info:
        invert(complete_tail([1.0, 4.0, 9.0]), CFG.updated(tail_model="asymptotic"))
    assert info.value.stage == "build_w"


def test_round_trip_small():
    M = poly_kernel(0.1, 1025)
    spec, rec = round_trip(M, 12, CFG)
    assert spec.K == 12 and max(rec.info["oracle_residuals"]) < 1e-8
    _, fitted = round_trip(M, 12, CFG.updated(tail_model="asymptotic"))
    # the k**2 tail cannot represent the jump of w at pi; the fitted tail can
    assert fitted.info["relative_error_l2w"] < 0.1 * rec.info["relative_error_l2w"]
    assert fitted.info["relative_error_l2w"] < 2e-2
