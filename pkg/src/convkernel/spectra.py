"""Spectral sequences with an unperturbed tail.

A :class:`Spectrum` stores the first ``K`` eigenvalues explicitly; every
later eigenvalue is taken to be ``k**2``.  Infinite sums over spectra
(distances, residual norms) are therefore evaluated exactly over the head.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from os import PathLike
from typing import Sequence, Union

import numpy as np
from scipy.special import zeta


class InadmissibleSpectrumError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues ``lambda_1..lambda_K`` followed by ``lambda_k = k**2``."""

    head: np.ndarray

    def __post_init__(self):
        head = np.array(self.head, dtype=complex).ravel()
        if head.size < 1:
            raise InadmissibleSpectrumError("spectrum head must hold at least one eigenvalue")
        head.setflags(write=False)
        object.__setattr__(self, "head", head)

    @property
    def K(self) -> int:
        return self.head.size

    def __len__(self):
        return self.K

    def values(self, count: int | None = None) -> np.ndarray:
        """``lambda_1..lambda_count`` (tail filled with ``k**2``)."""
        count = self.K if count is None else count
        k = np.arange(1, count + 1, dtype=float)
        out = (k ** 2).astype(complex)
        m = min(count, self.K)
        out[:m] = self.head[:m]
        return out

    def __getitem__(self, k: int) -> complex:
        """1-based eigenvalue access."""
        if k < 1:
            raise IndexError("eigenvalues are indexed from 1")
        return complex(self.head[k - 1]) if k <= self.K else complex(k * k)

    @classmethod
    def unperturbed(cls, K: int = 1) -> "Spectrum":
        return cls(np.arange(1, K + 1, dtype=float) ** 2)

    def is_unperturbed(self) -> bool:
        k = np.arange(1, self.K + 1, dtype=float)
        return bool(np.all(self.head == k ** 2))

    # -- JSON --------------------------------------------------------------

    def to_dict(self) -> dict:
        return {"K": self.K, "lambda": [[float(z.real), float(z.imag)] for z in self.head]}

    @classmethod
    def from_dict(cls, data: dict) -> "Spectrum":
        try:
            K = int(data["K"])
            lam = [complex(float(re), float(im)) for re, im in data["lambda"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InadmissibleSpectrumError(f"malformed spectrum record: {exc!r}") from None
        if len(lam) != K:
            raise InadmissibleSpectrumError(f"K={K} but {len(lam)} eigenvalues given")
        return complete_tail(lam, K)

    def to_json(self, path: Union[str, PathLike]):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def from_json(cls, path: Union[str, PathLike]) -> "Spectrum":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def complete_tail(head: Sequence[complex], K: int | None = None) -> Spectrum:
    """Embed ``K`` measured eigenvalues into an infinite sequence with tail ``k**2``."""
    head = list(head)
    if not head:
        raise InadmissibleSpectrumError("empty head")
    if K is not None and K != len(head):
        raise InadmissibleSpectrumError(f"K={K} does not match head length {len(head)}")
    return Spectrum(head)


def eps_residuals(s: Spectrum) -> np.ndarray:
    """``eps_k = (lambda_k - k**2)/k`` over the head."""
    k = np.arange(1, s.K + 1, dtype=float)
    return (s.head - k ** 2) / k


def _principal_sqrt(z: np.ndarray) -> np.ndarray:
    # Re >= 0, and Im >= 0 on the cut (numpy returns -i for -1-0j)
    r = np.sqrt(np.asarray(z, dtype=complex))
    flip = (r.real == 0) & (r.imag < 0)
    return np.where(flip, -r, r)


def sqrt_residuals(s: Spectrum) -> np.ndarray:
    """``kappa_k`` with ``lambda_k = (k + kappa_k)**2`` and ``Re(k + kappa_k) >= 0``.

    Evaluated as ``eps_k / (sqrt(1 + eps_k/k) + 1)``, which equals
    ``k (sqrt(1 + eps_k/k) - 1)`` without the cancellation for small ``eps_k``.
    """
    k = np.arange(1, s.K + 1, dtype=float)
    eps = eps_residuals(s)
    root = _principal_sqrt(1.0 + eps / k)
    return eps / (root + 1.0)


def check_admissible(s: Spectrum, kappa_l2_max: float = math.inf) -> float:
    """Validate a spectrum; return ``||kappa||_{l2}`` over the head."""
    if not np.all(np.isfinite(s.head)):
        raise InadmissibleSpectrumError("spectrum contains non-finite eigenvalues")
    kap = sqrt_residuals(s)
    norm = float(np.sqrt(np.sum(np.abs(kap) ** 2)))
    if not math.isfinite(norm) or norm > kappa_l2_max:
        raise InadmissibleSpectrumError(
            f"||kappa||_l2 = {norm:.6g} exceeds the admissible bound {kappa_l2_max:.6g}")
    return norm


def _differences(s: Spectrum, t: Spectrum) -> tuple[np.ndarray, np.ndarray]:
    count = max(s.K, t.K)
    k = np.arange(1, count + 1, dtype=float)
    return s.values(count) - t.values(count), k


def lambda_distance(s: Spectrum, t: Spectrum, tail_sq_sum: float = 0.0) -> float:
    """``sqrt(sum_k |lambda_k - mu_k|**2 / k**2)``.

    ``tail_sq_sum`` adds a closed-form value for the part of the sum past
    both heads; it is zero for spectra obeying the ``k**2`` tail.
    """
    d, k = _differences(s, t)
    return math.sqrt(float(np.sum(np.abs(d) ** 2 / k ** 2)) + tail_sq_sum)


def lambda1_distance(s: Spectrum, t: Spectrum, tail_sum: float = 0.0) -> float:
    """``sum_k |lambda_k - mu_k| / k`` (plus an optional closed-form tail)."""
    d, k = _differences(s, t)
    return float(np.sum(np.abs(d) / k)) + tail_sum


def radius(s: Spectrum) -> float:
    """``Lambda(s, {k**2})``: the data-ball radius a spectrum sits in."""
    return lambda_distance(s, Spectrum.unperturbed(1))


def power_tail(p: float, K: int) -> float:
    """``sum_{k > K} k**(-p)`` in closed form (Hurwitz zeta)."""
    return float(zeta(p, K + 1))


def random_spectrum(rng: np.random.Generator, K: int, r: float = 1.0,
                    complex_values: bool = False) -> Spectrum:
    """``lambda_k = k**2 + k xi_k`` with ``||xi||_2 <= r``, i.e. inside the r-ball."""
    xi = rng.standard_normal(K)
    if complex_values:
        xi = xi + 1j * rng.standard_normal(K)
    xi = xi / np.linalg.norm(xi) * (r * rng.uniform())
    k = np.arange(1, K + 1, dtype=float)
    return Spectrum(k ** 2 + k * xi)


class InsufficientDataError(ValueError):
    pass


def fit_asymptotic_constant(s: Spectrum, k_min: int | None = None) -> tuple[complex, complex, float]:
    """Least-squares fit ``sqrt(lambda_k) = k + A/k + B/k**3`` over ``k_min..K``.

    The default ``k_min = K//2`` keeps the low indices, where the square
    summable remainder is still O(1), out of the fit.  Returns ``(A, B,
    residual)`` with ``residual`` the l2 norm of ``k (sqrt(lambda_k) - k) - A - B/k**2``
    over the fitted indices.
    """
    if s.K < 4:
        raise InsufficientDataError(f"need at least 4 eigenvalues to fit, got K={s.K}")
    k_min = max(1, s.K // 2) if k_min is None else k_min
    k = np.arange(k_min, s.K + 1, dtype=float)
    y = sqrt_residuals(s)[k_min - 1:]            # sqrt(lambda_k) - k
    X = np.column_stack([1 / k, 1 / k ** 3]).astype(complex)
    (A, B), *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = float(np.linalg.norm(k * y - A - B / k ** 2))
    return complex(A), complex(B), resid
