"""Direct solver for the Cauchy problem

    -y'' + int_0^x M(x - t) y'(t) dt = lam y,   y(0) = 0, y'(0) = 1,

giving ``S(x, lam)`` and the characteristic function ``Delta(lam) = S(pi, lam)``
without going through ``w`` or ``N``.  Used to cross-check the inversion.
"""
from __future__ import annotations

import numpy as np

from .charfn import locate_roots, RootFindingError
from .grid import GridFunction
from .spectra import Spectrum


def _march(M: np.ndarray, step: float, lam: np.ndarray, keep_path: bool = False):
    """Implicit trapezoid for ``(y, y')`` with trapezoid memory quadrature.

    Returns ``y`` at ``x = pi`` for every ``lam`` (or the whole path).  The
    memory term at the new node depends linearly on the new ``y'`` through
    ``M(0)``, so each step is solved in closed form.
    """
    n = M.size
    L = lam.size
    h = step
    V = np.zeros((n, L), dtype=complex)
    V[0] = 1.0
    u = np.zeros(L, dtype=complex)
    path = np.zeros((n, L), dtype=complex) if keep_path else None
    mem = np.zeros(L, dtype=complex)
    c = 0.5 * h * M[0]
    denom = 1.0 + 0.25 * lam * h * h - 0.5 * h * c
    for m in range(n - 1):
        # memory at x_{m+1} without the v_{m+1} contribution
        P = 0.5 * h * M[m + 1] * V[0]
        if m:
            P = P + h * (M[m:0:-1] @ V[1:m + 1])
        v = V[m]
        v_new = (v + 0.5 * h * (-2.0 * lam * u - 0.5 * h * lam * v + mem + P)) / denom
        u = u + 0.5 * h * (v + v_new)
        mem = P + c * v_new
        V[m + 1] = v_new
        if keep_path:
            path[m + 1] = u
    return path if keep_path else u


def solve_cauchy(M: GridFunction, lam: complex) -> GridFunction:
    """``S(x, lam)`` on the grid of ``M`` (second-order accurate)."""
    path = _march(M.values, M.step, np.array([lam], dtype=complex), keep_path=True)
    return GridFunction(path[:, 0])


def oracle_delta(M: GridFunction, lam, richardson: bool = True):
    """``Delta(lam) = S(pi, lam)``, vectorized over ``lam``.

    With ``richardson`` (and an even number of intervals) the fine result is
    combined with the one on every second node, ``(4 D_h - D_2h)/3``, which
    removes the leading ``step**2`` error term.
    """
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=complex))
    fine = _march(M.values, M.step, lam_arr)
    if richardson and (M.n_points - 1) % 2 == 0 and M.n_points >= 5:
        coarse = _march(M.values[::2], 2 * M.step, lam_arr)
        out = (4.0 * fine - coarse) / 3.0
    else:
        out = fine
    return complex(out[0]) if np.ndim(lam) == 0 else out


def oracle_spectrum(M: GridFunction, K: int, tol: float = 1e-11, max_iter: int = 50,
                    richardson: bool = True, full_output: bool = False):
    """First ``K`` Dirichlet eigenvalues of the operator with kernel ``M``.

    Newton in ``rho`` from ``rho = k`` on :func:`oracle_delta`; the head is
    completed with the ``k**2`` tail.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    report = locate_roots(lambda lam: oracle_delta(M, lam, richardson), K,
                          tol=tol, max_iter=max_iter)
    if not report.converged.all():
        raise RootFindingError(f"oracle root search failed for k={report.failed}", report)
    spec = Spectrum(report.roots)
    return (spec, report) if full_output else spec
