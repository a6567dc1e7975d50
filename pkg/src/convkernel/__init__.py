"""Inverse spectral problem for -y'' + int_0^x M(x-t) y'(t) dt on (0, pi), Dirichlet.

Recovers the convolution kernel ``M`` from eigenvalues (:func:`invert`),
computes eigenvalues from a kernel (:func:`oracle_spectrum`), and measures
how reconstructions move under spectral perturbations (:mod:`.stability`).
"""
__version__ = "0.1.0"

from .grid import (GridFunction, GridMismatchError, convolve, conv_power, cumulative_integral,
                   integrate, norm_l2, norm_inf, norm_weighted_l2, norm_weighted_inf)
from .spectra import (Spectrum, complete_tail, sqrt_residuals, eps_residuals, lambda_distance,
                      lambda1_distance, radius, random_spectrum, check_admissible,
                      fit_asymptotic_constant, InadmissibleSpectrumError)
from .charfn import (CharProduct, eval_delta, build_w, build_w_asymptotic, delta_from_w,
                     find_eigenvalues, locate_roots, b_coefficient, RootFindingError)
from .main_equation import (MainEqConfig, forward_series, solve_main_equation,
                            ConvergenceError, SeriesTruncationError)
from .recovery import n_to_m, m_to_n
from .forward import solve_cauchy, oracle_delta, oracle_spectrum
from .config import SolverConfig
from .algorithm import invert, round_trip, Reconstruction, StageError
