"""Solver settings and their key-value text form.

The text form is one ``key = value`` per line; ``#`` starts a comment.
Unknown keys are rejected so that a typo cannot silently fall back to a
default.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from os import PathLike
from typing import Union

from .main_equation import MainEqConfig

TAIL_MODELS = ("unperturbed", "asymptotic")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    grid_points: int = 1025          # inversion grid (nodes incl. both ends)
    nu_max: int = 30                 # series cap in the main equation
    fp_tol: float = 1e-12            # fixed-point tolerance (weighted L2)
    max_iter: int = 500
    newton_tol: float = 1e-11        # relative step tolerance in rho
    K_default: int = 16
    quad_order: int = 4              # 2 = trapezoid, 4 = Gregory-corrected
    oracle_points: int = 2049        # grid of the forward Cauchy solver
    richardson: bool = True          # extrapolate the forward solver in step
    tail_model: str = "unperturbed"  # eigenvalues past the head: k**2 or (k + A/k)**2
    kappa_l2_max: float = math.inf   # admissibility bound on ||kappa||_l2

    def __post_init__(self):
        if self.grid_points < 6 or self.oracle_points < 6:
            raise ConfigError("grid sizes must be at least 6 nodes")
        if (self.oracle_points - 1) % (self.grid_points - 1):
            raise ConfigError("oracle_points - 1 must be a multiple of grid_points - 1")
        if self.quad_order not in (2, 4):
            raise ConfigError("quad_order must be 2 or 4")
        if self.tail_model not in TAIL_MODELS:
            raise ConfigError(f"tail_model must be one of {TAIL_MODELS}")
        if self.K_default < 1:
            raise ConfigError("K_default must be >= 1")
        if not self.newton_tol > 0:
            raise ConfigError("newton_tol must be positive")
        try:
            self.main_eq()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def main_eq(self) -> MainEqConfig:
        return MainEqConfig(nu_max=self.nu_max, fp_tol=self.fp_tol,
                            max_iter=self.max_iter, quad_order=self.quad_order)

    def updated(self, **changes) -> "SolverConfig":
        return replace(self, **changes)

    def to_text(self) -> str:
        lines = [f"{f.name} = {_fmt(getattr(self, f.name))}" for f in fields(self)]
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_text(cls, text: str) -> "SolverConfig":
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in types:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            values[key] = _parse(types[key], value, lineno)
        return cls(**values)

    @classmethod
    def from_file(cls, path: Union[str, PathLike]) -> "SolverConfig":
        with open(path) as fh:
            return cls.from_text(fh.read())


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "inf" if math.isinf(v) else repr(v)
    return str(v)


def _parse(kind: str, value: str, lineno: int):
    try:
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
        if kind == "bool":
            low = value.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(value)
        return value
    except ValueError:
        raise ConfigError(f"line {lineno}: cannot read {value!r} as {kind}") from None
