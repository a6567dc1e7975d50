"""Uniform-grid functions on [0, pi] and the Volterra convolution algebra.

All kernels of the inverse problem (M, N, w, h) live on the same uniform
grid ``x_j = j*pi/(n-1)``, both endpoints included.  Convolutions are
evaluated by a product quadrature that only ever looks at nodes ``<= x``,
so everything built on top of them stays causal.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Callable, Union

import numpy as np

DEFAULT_POINTS = 1025

# Interior weight corrections of the 4th-order Gregory rule
# (end weights 3/8, 7/6, 23/24 relative to the plain sum).
_GREGORY = (3.0 / 8.0 - 1.0, 7.0 / 6.0 - 1.0, 23.0 / 24.0 - 1.0)

# Closed rules for 1..4 intervals, used before the Gregory rule applies.
_SHORT_RULES = {
    1: np.array([1.0, 1.0]) / 2.0,
    2: np.array([1.0, 4.0, 1.0]) / 3.0,
    3: np.array([3.0, 9.0, 9.0, 3.0]) / 8.0,
    4: np.array([14.0, 64.0, 24.0, 64.0, 14.0]) / 45.0,
}


class GridMismatchError(ValueError):
    """Two grid functions with different node counts were combined."""


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples of a function at ``n_points`` equispaced nodes on [0, pi]."""

    values: np.ndarray
    x: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("a grid function needs a 1-d array of at least 2 samples")
        vals.setflags(write=False)
        x = np.linspace(0.0, math.pi, vals.size)
        x.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "x", x)

    @classmethod
    def from_callable(cls, func: Callable[[np.ndarray], np.ndarray],
                      n_points: int = DEFAULT_POINTS) -> "GridFunction":
        x = np.linspace(0.0, math.pi, n_points)
        return cls(np.broadcast_to(np.asarray(func(x), dtype=complex), x.shape))

    @classmethod
    def zeros(cls, n_points: int = DEFAULT_POINTS) -> "GridFunction":
        return cls(np.zeros(n_points, dtype=complex))

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def step(self) -> float:
        return math.pi / (self.n_points - 1)

    def __len__(self):
        return self.n_points

    def _check(self, other: "GridFunction"):
        if other.n_points != self.n_points:
            raise GridMismatchError(
                f"grid sizes differ: {self.n_points} vs {other.n_points}")

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.values + other.values)
        return GridFunction(self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.values - other.values)
        return GridFunction(self.values - other)

    def __rsub__(self, other):
        return GridFunction(other - self.values)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.values * other.values)
        return GridFunction(self.values * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.values / other)

    def __neg__(self):
        return GridFunction(-self.values)

    def reflect(self) -> "GridFunction":
        """Return ``x -> f(pi - x)``."""
        return GridFunction(self.values[::-1])

    def weighted(self) -> "GridFunction":
        """Return ``x -> (pi - x) f(x)``."""
        return GridFunction((math.pi - self.x) * self.values)

    def subsample(self, stride: int) -> "GridFunction":
        if (self.n_points - 1) % stride:
            raise ValueError(f"{self.n_points - 1} intervals not divisible by {stride}")
        return GridFunction(self.values[::stride])

    # -- CSV ---------------------------------------------------------------

    def to_csv(self, path: Union[str, PathLike]):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "re", "im"])
            for xi, vi in zip(self.x, self.values):
                writer.writerow([repr(float(xi)), repr(float(vi.real)), repr(float(vi.imag))])

    @classmethod
    def from_csv(cls, path: Union[str, PathLike]) -> "GridFunction":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip().lower() for c in rows[0]] != ["x", "re", "im"]:
            raise ValueError(f"{path}: expected header row 'x,re,im'")
        body = [r for r in rows[1:] if r]
        try:
            data = np.array([[float(c) for c in r] for r in body])
        except ValueError as exc:
            raise ValueError(f"{path}: non-numeric entry ({exc})") from None
        if data.ndim != 2 or data.shape[1] != 3 or data.shape[0] < 2:
            raise ValueError(f"{path}: expected at least two rows of 3 columns")
        n = data.shape[0]
        expected = np.linspace(0.0, math.pi, n)
        if np.max(np.abs(data[:, 0] - expected)) > 1e-9:
            raise ValueError(f"{path}: x column is not the uniform grid on [0, pi] with {n} nodes")
        return cls(data[:, 1] + 1j * data[:, 2])


def _as_values(f) -> np.ndarray:
    return f.values if isinstance(f, GridFunction) else np.asarray(f, dtype=complex)


def convolve(f: GridFunction, g: GridFunction, order: int = 2) -> GridFunction:
    """Causal convolution ``(f*g)(x) = int_0^x f(x - t) g(t) dt`` at every node.

    ``order=2`` is the trapezoid product rule.  ``order=4`` adds Gregory end
    corrections (short Newton-Cotes rules on the first four nodes), which is
    exact for cubics and converges like ``step**4`` for smooth data.
    """
    if f.n_points != g.n_points:
        raise GridMismatchError(f"grid sizes differ: {f.n_points} vs {g.n_points}")
    a, b = f.values, g.values
    n = a.size
    h = f.step
    full = np.convolve(a, b)[:n]
    # end corrections, indexed by the output node m
    m = np.arange(n)
    out = full.copy()
    if order == 2:
        out[1:] -= 0.5 * (a[1:] * b[0] + a[0] * b[1:])
        out[0] = 0.0
    elif order == 4:
        big = m >= 5
        mm = m[big]
        for c, i in zip(_GREGORY, (0, 1, 2)):
            if mm.size:
                out[big] += c * (a[mm - i] * b[i] + a[i] * b[mm - i])
        out[0] = 0.0
        for k, w in _SHORT_RULES.items():
            if k < n:
                out[k] = np.dot(w, a[k::-1] * b[: k + 1])
    else:
        raise ValueError(f"unsupported quadrature order {order}")
    return GridFunction(h * out)


def conv_power(f: GridFunction, nu: int, order: int = 2) -> GridFunction:
    """``f^{*nu}``: f convolved with itself ``nu`` times (``f^{*1} = f``)."""
    if nu < 1:
        raise ValueError("convolution power needs nu >= 1 (there is no grid identity)")
    out = f
    for _ in range(nu - 1):
        out = convolve(f, out, order)
    return out


def cumulative_integral(f: GridFunction, order: int = 2) -> GridFunction:
    """``x -> int_0^x f(t) dt``, i.e. the convolution ``1 * f``."""
    return convolve(GridFunction(np.ones(f.n_points)), f, order)


def integrate(values, step: float, order: int = 2) -> complex:
    """Quadrature of equispaced samples over the whole interval."""
    v = np.asarray(values, dtype=complex)
    n = v.size - 1
    if n < 1:
        return 0j
    if order == 2:
        return step * (v.sum() - 0.5 * (v[0] + v[-1]))
    if order != 4:
        raise ValueError(f"unsupported quadrature order {order}")
    if n in _SHORT_RULES:
        return step * np.dot(_SHORT_RULES[n], v)
    s = v.sum()
    for c, i in zip(_GREGORY, (0, 1, 2)):
        s += c * (v[i] + v[n - i])
    return step * s


def _trapz_sq(samples: np.ndarray, step: float) -> float:
    sq = np.abs(samples) ** 2
    return float(step * (sq.sum() - 0.5 * (sq[0] + sq[-1])))


def norm_l2(f: GridFunction) -> float:
    """Trapezoid approximation of ``||f||_2`` on (0, pi)."""
    return math.sqrt(max(_trapz_sq(f.values, f.step), 0.0))


def norm_weighted_l2(f: GridFunction) -> float:
    """``||(pi - x) f(x)||_2``."""
    return math.sqrt(max(_trapz_sq((math.pi - f.x) * f.values, f.step), 0.0))


def norm_inf(f: GridFunction) -> float:
    return float(np.max(np.abs(f.values)))


def norm_weighted_inf(f: GridFunction) -> float:
    """``max_x |(pi - x) f(x)|`` over the nodes."""
    return float(np.max(np.abs((math.pi - f.x) * f.values)))
