"""Empirical stability studies for the reconstruction.

Every experiment runs the full reconstruction on two spectra and records how
far apart the intermediate objects (w, N, M) end up relative to the spectral
distances.  The quotients are reported, never compared with theoretical
constants, since those are only known to exist.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, asdict
from os import PathLike
from typing import Iterable, Sequence, Union

import numpy as np

from .algorithm import invert, Reconstruction
from .config import SolverConfig
from .grid import GridFunction, norm_l2, norm_inf, norm_weighted_l2, norm_weighted_inf
from .spectra import (Spectrum, lambda_distance, lambda1_distance, radius, random_spectrum,
                      fit_asymptotic_constant, sqrt_residuals, eps_residuals)

# (ratio name, numerator, denominator)
RATIOS = (
    ("M_l2w/Lambda", "dM_l2w", "lambda_dist"),
    ("M_infw/Lambda1", "dM_infw", "lambda1_dist"),
    ("w_l2/Lambda", "dw_l2", "lambda_dist"),
    ("w_inf/Lambda1", "dw_inf", "lambda1_dist"),
    ("N_l2w/w_l2", "dN_l2w", "dw_l2"),
    ("N_infw/w_inf", "dN_infw", "dw_inf"),
    ("M_l2w/N_l2w", "dM_l2w", "dN_l2w"),
    ("M_infw/N_infw", "dM_infw", "dN_infw"),
)


@dataclass
class StabilityReport:
    lambda_dist: float
    lambda1_dist: float
    dw_l2: float
    dw_inf: float
    dN_l2w: float
    dN_infw: float
    dM_l2w: float
    dM_infw: float
    r_ball: float
    ratios: dict = field(default_factory=dict)
    theta: list = field(default_factory=list)
    a_head: list = field(default_factory=list)

    def __post_init__(self):
        for name, num, den in RATIOS:
            d = getattr(self, den)
            if d > 0:
                self.ratios[name] = getattr(self, num) / d

    def to_dict(self) -> dict:
        out = asdict(self)
        out["a_head"] = [[float(z.real), float(z.imag)] for z in np.asarray(self.a_head, complex)]
        out["theta"] = [float(t) for t in self.theta]
        return out

    def to_json(self, path: Union[str, PathLike]):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")


def deviations(a: Reconstruction, b: Reconstruction) -> dict:
    dw, dN, dM = a.w - b.w, a.N - b.N, a.M - b.M
    return {"dw_l2": norm_l2(dw), "dw_inf": norm_inf(dw),
            "dN_l2w": norm_weighted_l2(dN), "dN_infw": norm_weighted_inf(dN),
            "dM_l2w": norm_weighted_l2(dM), "dM_infw": norm_weighted_inf(dM)}


def run_pair(s: Spectrum, t: Spectrum, cfg: SolverConfig = SolverConfig(),
             r: int | None = None) -> StabilityReport:
    """Reconstruct from both spectra and record every step's deviation.

    ``r`` (integer ball radius for ``theta``) defaults to ``ceil`` of the
    larger of the two radii, at least 1.
    """
    rec_s, rec_t = invert(s, cfg), invert(t, cfg)
    r_ball = max(radius(s), radius(t))
    r = max(1, math.ceil(r_ball)) if r is None else r
    return StabilityReport(
        lambda_dist=lambda_distance(s, t),
        lambda1_dist=lambda1_distance(s, t),
        r_ball=r_ball,
        theta=list(theta_sequence(s, t, r)),
        a_head=list(a_coefficients(s, s.K)),
        **deviations(rec_s, rec_t),
    )


def theta_sequence(s: Spectrum, t: Spectrum, r: int = 1, k_max: int | None = None) -> np.ndarray:
    """``theta_k = sum_{|j-k| >= 6r} |(lambda_j - mu_j)/(lambda_j - k**2)|``, k = 1..k_max.

    Only indices inside the longer head contribute, so the sums are exact.
    """
    if r < 1:
        raise ValueError("r must be a positive integer")
    count = max(s.K, t.K)
    k_max = count + 6 * r if k_max is None else k_max
    j = np.arange(1, count + 1)
    lam = s.values(count)
    diff = np.abs(lam - t.values(count))
    out = np.zeros(k_max)
    for k in range(1, k_max + 1):
        sel = (np.abs(j - k) >= 6 * r) & (diff > 0)
        if np.any(sel):
            out[k - 1] = float(np.sum(diff[sel] / np.abs(lam[sel] - k * k)))
    return out


def a_coefficients(s: Spectrum, k_max: int, J: int | None = None) -> np.ndarray:
    """``a_k = prod_{j <= J, j != k} (lambda_j - k**2)/(j**2 - k**2)`` for k = 1..k_max.

    Factors past the head equal 1, so any ``J >= K`` gives the full product.
    """
    J = max(k_max + 1, s.K) if J is None else J
    if J < k_max + 1:
        raise ValueError("need J >= k_max + 1")
    jj = np.arange(1, min(J, s.K) + 1, dtype=float)
    lam = s.head[: jj.size]
    out = np.empty(k_max, dtype=complex)
    for k in range(1, k_max + 1):
        keep = jj != k
        out[k - 1] = np.prod((lam[keep] - k * k) / (jj[keep] ** 2 - k * k))
    if not np.all(np.isfinite(out)):
        raise ValueError("degenerate spectrum: non-finite a_k")
    return out


def smoothness_diagnostic(s: Spectrum, M: GridFunction) -> dict:
    """Compare the fitted constant ``A`` of ``sqrt(lambda_k) ~ k + A/k`` with ``M(0)/2``.

    ``M(0)`` is extrapolated quadratically from the first three interior
    nodes.  ``residual_l2`` measures how far ``k (sqrt(lambda_k) - k)``
    strays from the fitted law; it stays small only for kernels smooth
    enough for the ``A/k`` asymptotics to hold.
    """
    A, B, resid = fit_asymptotic_constant(s)
    v = M.values
    M0 = complex(3 * v[1] - 3 * v[2] + v[3])
    return {"A_est": A, "B_est": B, "M0": M0, "discrepancy": abs(M0 - 2 * A),
            "residual_l2": resid}


def spectrum_diagnostics(s: Spectrum, r: int = 1) -> dict:
    """Per-index quantities of a single spectrum, relative to ``{k**2}``."""
    base = Spectrum.unperturbed(s.K)
    kap, eps = sqrt_residuals(s), eps_residuals(s)
    return {
        "K": s.K,
        "radius": radius(s),
        "kappa": kap,
        "eps": eps,
        "kappa_bound_ok": bool(np.all(np.abs(kap) <= np.abs(eps) * (1 + 1e-12) + 1e-300)),
        "a": a_coefficients(s, s.K),
        "theta": theta_sequence(s, base, r),
    }


# -- ensembles --------------------------------------------------------------

def random_pairs(seed: int, count: int, K: int, r: float = 1.0, complex_values: bool = False):
    """``count`` independent pairs inside the r-ball, one child RNG per pair."""
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(count)):
        rng = np.random.default_rng(child)
        yield i, random_spectrum(rng, K, r, complex_values), random_spectrum(rng, K, r, complex_values)


def ensemble(seed: int, count: int, r: float = 1.0, K: int | None = None,
             cfg: SolverConfig = SolverConfig()) -> list[tuple[int, StabilityReport]]:
    K = cfg.K_default if K is None else K
    return [(i, run_pair(s, t, cfg)) for i, s, t in random_pairs(seed, count, K, r)]


def delta_sweep(base: Spectrum, direction: Sequence[complex], deltas: Iterable[float],
                cfg: SolverConfig = SolverConfig()) -> list[tuple[float, StabilityReport]]:
    """Perturb ``base`` along a fixed head direction, scaled so ``Lambda = delta``."""
    d = np.asarray(direction, dtype=complex)
    k = np.arange(1, d.size + 1)
    d = d / math.sqrt(float(np.sum(np.abs(d) ** 2 / k ** 2)))
    head = base.values(max(base.K, d.size))
    out = []
    for delta in deltas:
        pert = head.copy()
        pert[: d.size] += delta * d
        out.append((float(delta), run_pair(base, Spectrum(pert), cfg)))
    return out


def summarize(reports: Iterable[StabilityReport]) -> dict:
    """Sample maximum of every ratio (the empirical constants)."""
    best: dict = {}
    for rep in reports:
        for name, val in rep.ratios.items():
            best[name] = max(best.get(name, 0.0), val)
    return best


CSV_FIELDS = ("lambda_dist", "lambda1_dist", "dw_l2", "dw_inf", "dN_l2w", "dN_infw",
              "dM_l2w", "dM_infw", "r_ball")


def write_csv(rows: Iterable[tuple], path: Union[str, PathLike], key: str = "seed"):
    """One row per experiment: ``key``, distances, deviations, ratios."""
    ratio_names = [name for name, _, _ in RATIOS]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([key, *CSV_FIELDS, *ratio_names])
        for label, rep in rows:
            writer.writerow([label, *(repr(float(getattr(rep, f))) for f in CSV_FIELDS),
                             *(repr(rep.ratios[n]) if n in rep.ratios else "" for n in ratio_names)])
