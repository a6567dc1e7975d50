"""Command-line front end.

Exit codes: 0 success, 1 I/O problem, 2 solver failure, 3 invalid input.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from .algorithm import StageError, invert, round_trip
from .charfn import RootFindingError
from .config import ConfigError, SolverConfig
from .forward import oracle_spectrum
from .grid import GridFunction
from .main_equation import ConvergenceError, SeriesTruncationError
from .spectra import InadmissibleSpectrumError, InsufficientDataError, Spectrum
from . import stability

log = logging.getLogger("convkernel")

EXIT_IO, EXIT_SOLVER, EXIT_INVALID = 1, 2, 3


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [_jsonable(float(obj.real)), _jsonable(float(obj.imag))]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(data, path):
    try:
        with open(path, "w") as fh:
            json.dump(_jsonable(data), fh, indent=1, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot write {path}: {exc}") from None


def load_config(path) -> SolverConfig:
    if path is None:
        return SolverConfig()
    try:
        return SolverConfig.from_file(path)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot read config {path}: {exc}") from None
    except ConfigError as exc:
        raise CLIError(EXIT_INVALID, f"config {path}: {exc}") from None


def load_kernel(path) -> GridFunction:
    try:
        return GridFunction.from_csv(path)
    except (OSError, ValueError) as exc:
        raise CLIError(EXIT_IO, f"cannot read kernel: {exc}") from None


def load_spectrum(path) -> Spectrum:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise CLIError(EXIT_IO, f"cannot read spectrum {path}: {exc}") from None
    try:
        return Spectrum.from_dict(data)
    except InadmissibleSpectrumError as exc:
        raise CLIError(EXIT_INVALID, f"{path}: {exc}") from None


def _solver_failure(exc: Exception) -> CLIError:
    if isinstance(exc, StageError) and exc.stage == "validate":
        return CLIError(EXIT_INVALID, str(exc))
    return CLIError(EXIT_SOLVER, str(exc))


def _resample(M: GridFunction, n_points: int) -> GridFunction:
    if M.n_points == n_points:
        return M
    if (M.n_points - 1) % (n_points - 1) == 0:
        return M.subsample((M.n_points - 1) // (n_points - 1))
    raise CLIError(EXIT_INVALID,
                   f"kernel grid of {M.n_points} nodes does not nest with {n_points} nodes")


# -- commands -------------------------------------------------------------

def cmd_forward(args) -> int:
    cfg = load_config(args.config)
    M = load_kernel(args.kernel)
    K = args.K or cfg.K_default
    try:
        spec, report = oracle_spectrum(M, K, tol=cfg.newton_tol, richardson=cfg.richardson,
                                       full_output=True)
    except (RootFindingError, ValueError) as exc:
        raise CLIError(EXIT_SOLVER, f"[forward] {exc}") from None
    for k, (lam, res) in enumerate(zip(report.roots, report.residuals), 1):
        log.info("k=%d lambda=%.12g%+.12gj |Delta|=%.2e", k, lam.real, lam.imag, res)
    try:
        spec.to_json(args.output)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot write {args.output}: {exc}") from None
    return 0


def _manifest(cfg, info, **extra) -> dict:
    return {"config": cfg.as_dict(), **info, **extra}


def cmd_invert(args) -> int:
    cfg = load_config(args.config)
    spec = load_spectrum(args.spectrum)
    try:
        rec = invert(spec, cfg)
    except (StageError, ConvergenceError, SeriesTruncationError) as exc:
        raise _solver_failure(exc) from None
    try:
        rec.M.to_csv(args.output)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot write {args.output}: {exc}") from None
    write_json(_manifest(cfg, rec.info, command="invert", spectrum=args.spectrum),
               args.manifest or args.output + ".manifest.json")
    return 0


def cmd_roundtrip(args) -> int:
    cfg = load_config(args.config)
    M = _resample(load_kernel(args.kernel), cfg.oracle_points)
    K = args.K or cfg.K_default
    try:
        spec, rec = round_trip(M, K, cfg)
    except (StageError, ConvergenceError, SeriesTruncationError) as exc:
        raise _solver_failure(exc) from None
    try:
        rec.M.to_csv(args.output)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot write {args.output}: {exc}") from None
    write_json(_manifest(cfg, rec.info, command="roundtrip", spectrum=spec.to_dict()),
               args.manifest or args.output + ".manifest.json")
    log.info("relative weighted L2 error %.3e", rec.info["relative_error_l2w"])
    return 0


def cmd_stability(args) -> int:
    cfg = load_config(args.config)
    a, b = load_spectrum(args.spectrum_a), load_spectrum(args.spectrum_b)
    try:
        rep = stability.run_pair(a, b, cfg)
    except (StageError, ConvergenceError, SeriesTruncationError) as exc:
        raise _solver_failure(exc) from None
    write_json(rep.to_dict(), args.output)
    return 0


def cmd_ensemble(args) -> int:
    cfg = load_config(args.config)
    K = args.K or cfg.K_default
    try:
        if args.sweep:
            deltas = [float(d) for d in args.sweep.split(",")]
            rng = np.random.default_rng(args.seed)
            base = stability.random_spectrum(rng, K, args.r / 2)
            direction = rng.standard_normal(K)
            rows = stability.delta_sweep(base, direction, deltas, cfg)
            key = "delta"
        else:
            rows = stability.ensemble(args.seed, args.count, args.r, K, cfg)
            key = "seed"
    except ValueError as exc:
        raise CLIError(EXIT_INVALID, str(exc)) from None
    except (StageError, ConvergenceError, SeriesTruncationError) as exc:
        raise _solver_failure(exc) from None
    try:
        stability.write_csv(rows, args.output, key=key)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot write {args.output}: {exc}") from None
    for name, val in stability.summarize(r for _, r in rows).items():
        log.info("max %s = %.6g", name, val)
    return 0


def cmd_diagnose(args) -> int:
    cfg = load_config(args.config)
    spec = load_spectrum(args.spectrum)
    out = stability.spectrum_diagnostics(spec, r=args.r)
    if spec.K >= 4:
        try:
            # the k**2 tail pins M(0) near 0, so compare against the fitted tail instead
            rec = invert(spec, cfg.updated(tail_model="asymptotic"))
            out["smoothness"] = stability.smoothness_diagnostic(spec, rec.M)
        except (StageError, ConvergenceError, SeriesTruncationError) as exc:
            raise _solver_failure(exc) from None
        except InsufficientDataError as exc:
            out["smoothness"] = {"skipped": str(exc)}
    else:
        out["smoothness"] = {"skipped": f"K={spec.K} < 4"}
    write_json(out, args.output)
    return 0


def cmd_config(args) -> int:
    cfg = load_config(args.config)
    if args.dump:
        sys.stdout.write(cfg.to_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="convkernel", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--config", help="key = value settings file")
        sp.set_defaults(func=func)
        return sp

    sp = add("forward", cmd_forward, "eigenvalues of the operator with a given kernel")
    sp.add_argument("kernel", help="kernel CSV (x,re,im)")
    sp.add_argument("-K", type=int, help="number of eigenvalues")
    sp.add_argument("-o", "--output", required=True, help="spectrum JSON")

    sp = add("invert", cmd_invert, "recover the kernel from a spectrum")
    sp.add_argument("spectrum", help="spectrum JSON")
    sp.add_argument("-o", "--output", required=True, help="kernel CSV")
    sp.add_argument("--manifest", help="run manifest JSON (default: OUTPUT.manifest.json)")

    sp = add("roundtrip", cmd_roundtrip, "forward-solve a kernel, invert, compare")
    sp.add_argument("kernel")
    sp.add_argument("-K", type=int)
    sp.add_argument("-o", "--output", required=True, help="reconstructed kernel CSV")
    sp.add_argument("--manifest")

    sp = add("stability", cmd_stability, "compare reconstructions from two spectra")
    sp.add_argument("spectrum_a")
    sp.add_argument("spectrum_b")
    sp.add_argument("-o", "--output", required=True, help="report JSON")

    sp = add("ensemble", cmd_ensemble, "random pairs in the r-ball, or a delta sweep")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=50)
    sp.add_argument("--r", type=float, default=1.0)
    sp.add_argument("-K", type=int)
    sp.add_argument("--sweep", help="comma-separated deltas for a fixed-direction sweep")
    sp.add_argument("-o", "--output", required=True, help="ensemble CSV")

    sp = add("diagnose", cmd_diagnose, "per-index diagnostics of a spectrum")
    sp.add_argument("spectrum")
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("-o", "--output", required=True)

    sp = add("config", cmd_config, "show settings")
    sp.add_argument("--dump", action="store_true", help="print settings as key = value")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * args.verbose
    logging.basicConfig(level=max(level, logging.DEBUG), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"convkernel {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
