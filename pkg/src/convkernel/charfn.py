"""Characteristic function of the Dirichlet problem and its kernel ``w``.

With the tail ``lambda_k = k**2`` for ``k > K`` the infinite product

    Delta(lam) = pi * prod_k (lambda_k - lam) / k**2

closes through the sine product into

    Delta(lam) = sin(rho pi)/rho * prod_{k<=K} (lambda_k - lam)/(k**2 - lam),

``rho**2 = lam``.  Near ``lam = k**2`` the vanishing pair ``sin(rho pi)``,
``k**2 - lam`` is replaced by ``(-1)**(k+1) pi sinc(rho - k) / (rho (rho + k))``.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import zeta

from .grid import GridFunction, DEFAULT_POINTS, integrate
from .spectra import Spectrum, _principal_sqrt

log = logging.getLogger(__name__)

# |rho - k| below which the removable-singularity branch is used
SWITCH_RADIUS = 0.25


class TruncationWarning(UserWarning):
    pass


class MultiplicityWarning(UserWarning):
    pass


class RootFindingError(RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class CharProduct:
    """``Delta`` as a tail-closed product over ``spectrum``; callable on ``lam``."""

    spectrum: Spectrum

    def __call__(self, lam):
        return eval_delta(self, lam)


def _as_spectrum(cp) -> Spectrum:
    return cp.spectrum if isinstance(cp, CharProduct) else cp


def eval_delta(cp, lam):
    """Evaluate ``Delta(lam)``; accepts scalars or arrays of complex ``lam``."""
    s = _as_spectrum(cp)
    lam_arr = np.asarray(lam, dtype=complex)
    scalar = lam_arr.ndim == 0
    lam_arr = np.atleast_1d(lam_arr)
    rho = _principal_sqrt(lam_arr)
    # head index whose k**2 is within the switch radius (0 = none); at most one
    kn = np.rint(rho.real).astype(int)
    nearest = np.where((kn >= 1) & (kn <= s.K) & (np.abs(rho - kn) < SWITCH_RADIUS), kn, 0)
    near = nearest > 0
    out = math.pi * np.sinc(rho)          # sin(rho pi)/rho, entire
    if np.any(near):
        r, kk = rho[near], nearest[near]
        # sin(rho pi) / (rho (k**2 - lam)) without the 0/0
        out[near] = (-1.0) ** (kk + 1) * math.pi * np.sinc(r - kk) / (r * (r + kk))
    for k in range(1, s.K + 1):
        lk = s.head[k - 1]
        here = nearest == k
        rest = ~here
        out[rest] *= (lk - lam_arr[rest]) / (k * k - lam_arr[rest])
        out[here] *= lk - lam_arr[here]
    return complex(out[0]) if scalar else out


def sine_coefficients(cp, count: int | None = None) -> np.ndarray:
    """``k Delta(k**2)`` for ``k = 1..count``; zero past the head."""
    s = _as_spectrum(cp)
    count = s.K if count is None else count
    k = np.arange(1, count + 1)
    coef = np.zeros(count, dtype=complex)
    m = min(count, s.K)
    coef[:m] = k[:m] * eval_delta(s, (k[:m] ** 2).astype(complex))
    return coef


def build_w(cp, n_points: int = DEFAULT_POINTS, K_terms: int | None = None) -> GridFunction:
    """``w(x) = (2/pi) sum_k k Delta(k**2) sin(kx)`` on the grid.

    The sum is exact at ``K_terms >= K`` since ``Delta(k**2) = 0`` past the head.
    """
    s = _as_spectrum(cp)
    if isinstance(n_points, GridFunction):
        n_points = n_points.n_points
    K_terms = s.K if K_terms is None else K_terms
    if K_terms < s.K:
        warnings.warn(f"K_terms={K_terms} drops {s.K - K_terms} nonzero sine coefficients",
                      TruncationWarning, stacklevel=2)
    coef = sine_coefficients(s, K_terms)
    x = np.linspace(0.0, math.pi, n_points)
    k = np.arange(1, K_terms + 1)
    return GridFunction((2.0 / math.pi) * (np.sin(np.outer(x, k)) @ coef))


def delta_from_w(w: GridFunction, lam, order: int = 4):
    """``sin(rho pi)/rho + int_0^pi w(x) sin(rho x)/rho dx`` by product quadrature."""
    lam_arr = np.asarray(lam, dtype=complex)
    scalar = lam_arr.ndim == 0
    rho = _principal_sqrt(np.atleast_1d(lam_arr))
    x = w.x
    # sin(rho x)/rho = x sinc(rho x / pi)
    kern = x[:, None] * np.sinc(np.outer(x, rho) / math.pi)
    integrand = w.values[:, None] * kern
    vals = np.array([integrate(integrand[:, i], w.step, order) for i in range(rho.size)])
    out = math.pi * np.sinc(rho) + vals
    return complex(out[0]) if scalar else out


@dataclass
class RootReport:
    """Outcome of a per-index Newton search."""

    roots: np.ndarray                  # lambda_k, k = 1..K
    residuals: np.ndarray              # |Delta(lambda_k)|
    iterations: np.ndarray
    converged: np.ndarray
    messages: list = field(default_factory=list)

    @property
    def spectrum(self) -> Spectrum:
        return Spectrum(self.roots)

    @property
    def failed(self) -> list[int]:
        return [int(k) + 1 for k in np.flatnonzero(~self.converged)]


def locate_roots(delta: Callable, K: int, tol: float = 1e-11, max_iter: int = 50,
                 fd_step: float = 1e-6, max_halvings: int = 8) -> RootReport:
    """Newton iteration in ``rho`` from ``rho = k`` for every ``k = 1..K``.

    ``delta`` must accept an array of ``lam`` values.  Steps are halved until
    the trial point stays inside ``|rho - k| < 1/2`` and does not increase
    ``|Delta|``.  All indices advance together, one batched call per stage.
    """
    k = np.arange(1, K + 1, dtype=float)
    rho = k.astype(complex)
    f = np.asarray(delta(rho ** 2), dtype=complex)
    done = np.zeros(K, dtype=bool)
    stuck = np.zeros(K, dtype=bool)
    iters = np.zeros(K, dtype=int)
    messages = []
    for _ in range(max_iter):
        act = np.flatnonzero(~done & ~stuck)
        if act.size == 0:
            break
        r = rho[act]
        fp = np.asarray(delta(np.concatenate([(r + fd_step) ** 2, (r - fd_step) ** 2])))
        deriv = (fp[: act.size] - fp[act.size:]) / (2 * fd_step)
        zero_d = deriv == 0
        if np.any(zero_d):
            stuck[act[zero_d]] = True
            messages += [f"k={i + 1}: zero derivative" for i in act[zero_d]]
        step = np.where(zero_d, 0, -f[act] / np.where(zero_d, 1, deriv))
        iters[act] += 1
        pending = ~zero_d
        for _ in range(max_halvings + 1):
            idx = np.flatnonzero(pending)
            if idx.size == 0:
                break
            trial = r[idx] + step[idx]
            inside = np.abs(trial - k[act[idx]]) < 0.5
            ft = np.full(idx.size, np.inf, dtype=complex)
            if np.any(inside):
                ft[inside] = delta(trial[inside] ** 2)
            ok = inside & (np.abs(ft) <= np.abs(f[act[idx]]) * (1 + 1e-12) + 1e-300)
            small = np.abs(step[idx]) <= tol * np.maximum(1.0, np.abs(r[idx]))
            ok |= inside & small
            acc = idx[ok]
            rho[act[acc]] = trial[ok]
            f[act[acc]] = ft[ok]
            done[act[acc]] = small[ok]
            pending[acc] = False
            step[idx[~ok]] *= 0.5
        # no acceptable step after all halvings: converged if already tiny, else stuck
        left = np.flatnonzero(pending)
        for i in left:
            g = act[i]
            if abs(step[i]) * 2 ** max_halvings <= 1e3 * tol * max(1.0, abs(rho[g])):
                done[g] = True
            else:
                stuck[g] = True
                messages.append(f"k={g + 1}: line search failed at rho={rho[g]:.12g}")
    for g in np.flatnonzero(~done & ~stuck):
        messages.append(f"k={g + 1}: no convergence in {max_iter} iterations")
    roots = rho ** 2
    report = RootReport(roots=roots, residuals=np.abs(f), iterations=iters,
                        converged=done, messages=messages)
    _check_multiplicity(report)
    return report


def _check_multiplicity(report: RootReport, rel: float = 1e-6):
    r = report.roots
    for i in range(r.size):
        for j in range(i + 1, r.size):
            if abs(r[i] - r[j]) <= rel * max(1.0, abs(r[i])):
                msg = f"roots k={i + 1} and k={j + 1} collide at {r[i]:.10g} (multiple eigenvalue?)"
                report.messages.append(msg)
                warnings.warn(msg, MultiplicityWarning, stacklevel=3)


def find_eigenvalues(delta: Callable, K: int, tol: float = 1e-11, max_iter: int = 50,
                     **kwargs) -> Spectrum:
    """Zeros ``lambda_1..lambda_K`` of ``delta``, indexed by their starting guess ``k**2``."""
    report = locate_roots(delta, K, tol=tol, max_iter=max_iter, **kwargs)
    for m in report.messages:
        log.debug(m)
    if not report.converged.all():
        raise RootFindingError(f"root search failed for k={report.failed}", report)
    return report.spectrum


def b_coefficient(k: int, J: int = 100_000) -> float:
    """Truncated ``pi prod_{j<=J, j!=k} (j**2 - k**2)/j**2``; tends to ``(-1)**(k+1) pi/2``."""
    j = np.arange(1, J + 1, dtype=float)
    j = j[j != k]
    return float(math.pi * np.prod((j ** 2 - k * k) / j ** 2))


def asymptotic_sine_coefficients(s: Spectrum, A: complex, count: int,
                                 J: int = 20_000) -> np.ndarray:
    """``k Delta(k**2)``, ``k = 1..count``, for the head of ``s`` followed by
    the tail ``lambda_j = (j + A/j)**2`` instead of ``j**2``.

    Uses ``k Delta(k**2) = (-1)**(k+1) pi/2 (lambda_k - k**2)/k * a_k`` with
    ``a_k = prod_{j != k} (lambda_j - k**2)/(j**2 - k**2)``; the tail product
    runs to ``J`` and the remainder is closed with Hurwitz zeta sums.
    """
    A = complex(A)
    K = s.K
    j = np.arange(K + 1, J + 1, dtype=float)
    dj = 2 * A + A * A / j ** 2                  # (j + A/j)**2 - j**2
    head_j = np.arange(1, K + 1, dtype=float)
    out = np.empty(count, dtype=complex)
    rem2, rem4 = zeta(2, J + 1), zeta(4, J + 1)
    for m in range(1, count + 1):
        m2 = float(m * m)
        lam_m = s.head[m - 1] if m <= K else (m + A / m) ** 2
        keep = head_j != m
        a_m = np.prod((s.head[keep] - m2) / (head_j[keep] ** 2 - m2))
        sel = j != m
        log_tail = np.sum(np.log1p(dj[sel] / (j[sel] ** 2 - m2)))
        log_tail += 2 * A * (rem2 + m2 * rem4) + A * A * rem4
        a_m *= np.exp(log_tail)
        out[m - 1] = (-1) ** (m + 1) * (math.pi / 2) * (lam_m - m2) / m * a_m
    return out


def build_w_asymptotic(s: Spectrum, A: complex, n_points: int = DEFAULT_POINTS,
                       K_terms: int | None = None) -> GridFunction:
    """``w`` for the head of ``s`` continued by ``lambda_j = (j + A/j)**2``.

    The coefficients approach ``(-1)**(k+1) pi A/k``, whose sine series sums
    to ``A x``; that part is added in closed form and only the faster
    decaying difference is summed up to ``K_terms`` (default ``4K``).
    """
    K_terms = 4 * s.K if K_terms is None else K_terms
    coef = asymptotic_sine_coefficients(s, A, K_terms)
    k = np.arange(1, K_terms + 1)
    jump = (-1.0) ** (k + 1) * math.pi * complex(A) / k
    x = np.linspace(0.0, math.pi, n_points)
    return GridFunction(complex(A) * x
                        + (2.0 / math.pi) * (np.sin(np.outer(x, k)) @ (coef - jump)))
