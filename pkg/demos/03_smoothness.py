"""Reading M(0) off the eigenvalues.

For a smooth kernel, sqrt(lambda_k) = k + A/k + ... with A = M(0)/2.  A step
kernel breaks the expansion, which shows up as a large fit residual.
"""
import numpy as np

from convkernel import GridFunction, oracle_spectrum
from convkernel.stability import smoothness_diagnostic

kernels = {
    "smooth  2a - a^2 x^2/2": GridFunction.from_callable(lambda x: 0.5 - x ** 2 / 32, 2049),
    "smooth  0.3 cos x + 0.1": GridFunction.from_callable(lambda x: 0.3 * np.cos(x) + 0.1, 2049),
    "step    0.5 on [0, 1)": GridFunction.from_callable(lambda x: np.where(x < 1, 0.5, 0.0), 2049),
}
print("kernel                    M(0)     2 A_est   fit residual")
for name, M in kernels.items():
    d = smoothness_diagnostic(oracle_spectrum(M, 32), M)
    print(f"{name:24s}  {d['M0'].real:.4f}   {2 * d['A_est'].real:.4f}   {d['residual_l2']:.2e}")
