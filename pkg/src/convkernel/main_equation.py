"""The main nonlinear integral equation

    w(pi - x) = sum_{nu>=1} (pi - x)**nu / nu! * N^{*nu}(x)

and its inversion ``w -> N``.  The solver iterates on ``h = (pi - x) N``,
which is square integrable even where ``N`` blows up at ``x = pi``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, convolve, norm_l2, norm_weighted_l2

log = logging.getLogger(__name__)


class SeriesTruncationError(RuntimeError):
    def __init__(self, message, last_term_norm):
        super().__init__(message)
        self.last_term_norm = last_term_norm


class ConvergenceError(RuntimeError):
    def __init__(self, message, history):
        super().__init__(message)
        self.history = history


@dataclass(frozen=True)
class MainEqConfig:
    nu_max: int = 30
    fp_tol: float = 1e-12
    max_iter: int = 500
    quad_order: int = 4

    def __post_init__(self):
        if self.nu_max < 2:
            raise ValueError("nu_max must be >= 2")
        if not self.fp_tol > 0:
            raise ValueError("fp_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


def _series(N: GridFunction, cfg: MainEqConfig, start: int) -> tuple[np.ndarray, int]:
    """``sum_{nu >= start} (pi-x)**nu/nu! N^{*nu}`` with adaptive truncation."""
    weight = math.pi - N.x
    total = np.zeros(N.n_points, dtype=complex)
    power = N
    cutoff = cfg.fp_tol * 1e-2
    quiet = 0
    term_norm = math.inf
    for nu in range(1, cfg.nu_max + 1):
        if nu > 1:
            power = convolve(N, power, cfg.quad_order)
        if nu < start:
            continue
        term = GridFunction(weight ** nu / math.factorial(nu) * power.values)
        total += term.values
        term_norm = norm_weighted_l2(term)
        # two consecutive negligible terms guard against an accidental zero
        quiet = quiet + 1 if term_norm < cutoff else 0
        if quiet >= 2 or (term_norm == 0.0 and not np.any(power.values)):
            return total, nu
    raise SeriesTruncationError(
        f"series not converged by nu_max={cfg.nu_max} (last term norm {term_norm:.3e})",
        term_norm)


def forward_series(N: GridFunction, cfg: MainEqConfig = MainEqConfig(),
                   terms: int | None = None) -> GridFunction:
    """Map ``N -> w`` through the right-hand side of the main equation.

    By default the series is truncated adaptively.  ``terms`` sums exactly
    ``nu = 1..terms`` instead (``terms=1`` gives ``w(pi - x) = (pi - x) N(x)``).
    """
    if terms is None:
        total, _ = _series(N, cfg, start=1)
    else:
        if terms < 1:
            raise ValueError("terms must be >= 1")
        weight = math.pi - N.x
        total = np.zeros(N.n_points, dtype=complex)
        power = N
        for nu in range(1, terms + 1):
            if nu > 1:
                power = convolve(N, power, cfg.quad_order)
            total += weight ** nu / math.factorial(nu) * power.values
    return GridFunction(total).reflect()


def nonlinear_part(h: GridFunction, cfg: MainEqConfig = MainEqConfig()) -> GridFunction:
    """``D h = sum_{nu>=2} (pi-x)**nu/nu! N^{*nu}`` with ``N = h/(pi - x)``."""
    total, _ = _series(unweight(h), cfg, start=2)
    return GridFunction(total)


def unweight(h: GridFunction) -> GridFunction:
    """``N = h / (pi - x)``; the node ``x = pi`` is filled by linear extrapolation."""
    vals = np.empty(h.n_points, dtype=complex)
    vals[:-1] = h.values[:-1] / (math.pi - h.x[:-1])
    if h.n_points >= 3:
        vals[-1] = 2 * vals[-2] - vals[-3]
    else:
        vals[-1] = vals[-2]
    return GridFunction(vals)


def solve_main_equation(w: GridFunction, cfg: MainEqConfig = MainEqConfig(),
                        full_output: bool = False):
    """Solve the main equation for ``N`` by successive approximation in ``h``.

    ``h_{n+1} = w(pi - .) - D h_n`` from ``h_0 = w(pi - .)``.  Five straight
    increases of the update norm switch to the damped update
    ``h_{n+1} = (h_n + w(pi - .) - D h_n)/2``; a second divergence aborts.

    Returns ``N``, or ``(N, info)`` with ``full_output=True``; ``info`` holds
    ``iterations``, ``history`` (update norms), ``damped`` and ``residual``
    (``||forward_series(N) - w||_2``).
    """
    target = w.reflect()
    h = target
    history = []
    damping = 1.0
    rising = 0
    converged = False
    for it in range(1, cfg.max_iter + 1):
        new = target - nonlinear_part(h, cfg)
        if damping != 1.0:
            new = GridFunction((1 - damping) * h.values + damping * new.values)
        diff = norm_l2(new - h)
        if not math.isfinite(diff):
            raise ConvergenceError("iteration produced non-finite values", history)
        history.append(diff)
        h = new
        if diff < cfg.fp_tol:
            converged = True
            break
        rising = rising + 1 if len(history) > 1 and diff > history[-2] else 0
        if rising >= 5:
            if damping != 1.0:
                raise ConvergenceError(
                    f"damped iteration diverges (update norm {diff:.3e} at iteration {it})",
                    history)
            log.info("main equation: divergence detected at iteration %d, damping 1/2", it)
            damping = 0.5
            rising = 0
    if not converged:
        raise ConvergenceError(
            f"no convergence in {cfg.max_iter} iterations (last update {history[-1]:.3e})",
            history)
    N = unweight(h)
    if not full_output:
        return N
    residual = norm_l2(forward_series(N, cfg) - w)
    info = {"iterations": len(history), "history": history,
            "damped": damping != 1.0, "residual": residual}
    return N, info
