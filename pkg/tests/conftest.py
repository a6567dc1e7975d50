import math

import numpy as np
import pytest

from convkernel import GridFunction, SolverConfig, oracle_spectrum

A_TEST = 0.25


def poly_kernel(a=A_TEST, n_points=2049):
    """M(x) = 2a - a**2 x**2 / 2, the kernel whose N is the constant a."""
    return GridFunction.from_callable(lambda x: 2 * a - a * a * x ** 2 / 2, n_points)


@pytest.fixture(scope="session")
def kernel_fine():
    return poly_kernel()


@pytest.fixture(scope="session")
def kernel_spectrum_32(kernel_fine):
    """Oracle eigenvalues of the polynomial kernel (K=32, 2049 nodes)."""
    return oracle_spectrum(kernel_fine, 32)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def smooth_random(rng, n_points=1025, modes=4, scale=1.0):
    """Random low-order trigonometric polynomial with complex coefficients."""
    c = (rng.standard_normal(modes) + 1j * rng.standard_normal(modes)) / np.arange(1, modes + 1) ** 2
    return GridFunction.from_callable(
        lambda x: scale * sum(ck * np.cos(k * x) for k, ck in enumerate(c)), n_points)


ACCEPTANCE_LINES = []


def record(number, title, ok, detail):
    """Remember one acceptance verdict; printed in the terminal summary."""
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
