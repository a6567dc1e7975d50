"""Last step of the reconstruction, ``M = 2N - int_0^x N^{*2}``, and its inverse."""
from __future__ import annotations

import math

from .grid import GridFunction, convolve, cumulative_integral, norm_weighted_l2
from .main_equation import ConvergenceError


def n_to_m(N: GridFunction, order: int = 4) -> GridFunction:
    """``M(x) = 2 N(x) - int_0^x N^{*2}(t) dt``."""
    return 2 * N - cumulative_integral(convolve(N, N, order), order)


def m_to_n(M: GridFunction, tol: float = 1e-12, max_iter: int = 200, order: int = 4,
           full_output: bool = False):
    """Invert :func:`n_to_m` by the Volterra iteration
    ``N <- (M + int_0^x N^{*2})/2`` started at ``M/2``.

    Stops once successive iterates differ by less than ``tol`` in the weighted
    L2 norm.  With ``full_output`` also returns ``iterations``, ``history``
    and ``residual = ||n_to_m(N) - M||_{2,pi}``.
    """
    N = M / 2
    history = []
    for _ in range(max_iter):
        new = (M + cumulative_integral(convolve(N, N, order), order)) / 2
        diff = norm_weighted_l2(new - N)
        history.append(diff)
        N = new
        if not math.isfinite(diff):
            break
        if diff < tol:
            break
    else:
        raise ConvergenceError(
            f"m_to_n: no convergence in {max_iter} iterations (last update {history[-1]:.3e})",
            history)
    if not math.isfinite(history[-1]):
        raise ConvergenceError("m_to_n: iteration diverged", history)
    if not full_output:
        return N
    return N, {"iterations": len(history), "history": history,
               "residual": norm_weighted_l2(n_to_m(N, order) - M)}
