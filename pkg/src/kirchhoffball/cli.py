"""Batch command-line front end.

Subcommands: solve, scan, limits, classify, oracle, constants.  Parameters
come from defaults, then an optional flat key=value config file, then
command-line flags.  Reports are written atomically into the output
directory with deterministic byte content; exit status is 0 on success, 2
when the parameters fall outside every supported regime (or on usage
errors), 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import reports
from .constants import BallGeometry, spectral_constants
from .errors import (
    ConvergenceNotReached,
    InvalidAmplitude,
    KirchhoffError,
    NoSolutionFound,
    NonFiniteBlowup,
    NotARoot,
    NotConverged,
    UnsupportedRegime,
)
from .oracle import oracle_compare
from .regimes import (
    build_alpha_grid,
    classify,
    describe_case,
    find_roots,
    sample_f,
    verify_limits,
)
from .scaling import closed_form_root_b0
from .shooting import ProblemParams, SolverTolerances

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("solve", "scan", "limits", "classify", "oracle", "constants")

_CONFIG_KEYS = {
    "a": float,
    "b": float,
    "lambda": str,
    "mu": float,
    "q": float,
    "p": str,
    "N": int,
    "R": float,
    "tol_ode": float,
    "tol_root": float,
    "grid_points": int,
    "alpha_min": float,
    "alpha_max": float,
    "out": str,
}

_DEFAULTS = {
    "a": 1.0,
    "b": 1.0,
    "lambda": "1.0",
    "mu": 1.0,
    "q": 2.0,
    "p": "4",
    "N": 3,
    "R": 1.0,
    "tol_ode": None,
    "tol_root": None,
    "grid_points": 200,
    "alpha_min": None,
    "alpha_max": None,
    "out": ".",
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Fully resolved run request; embedded verbatim in every report."""

    subcommand: str
    params: ProblemParams
    grid_points: int
    alpha_min: float | None
    alpha_max: float | None
    out_dir: str
    raw: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = dict(self.raw)
        d["subcommand"] = self.subcommand
        return d


def parse_exponent(text: str, N: int) -> float:
    """Parse p with an exact rational admissibility check against 2N/(N-2).

    Accepts decimals ("3.5") and fractions ("10/3"); the comparison with the
    critical exponent is exact in rational arithmetic, so "10/3" for N = 5
    is recognized as exactly critical while "3.3333" stays subcritical.
    """
    try:
        frac = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse exponent {text!r}: {exc}") from None
    critical = Fraction(2 * N, N - 2)
    if frac > critical:
        raise ConfigError(
            f"p = {text} exceeds the critical exponent 2N/(N-2) = {critical}"
        )
    if frac == critical:
        return 2.0 * N / (N - 2.0)
    return float(frac)


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path) as handle:
            for lineno, line in enumerate(handle, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in _CONFIG_KEYS:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kirchhoffball",
        description="Radial shooting and scaling reduction for Kirchhoff problems on a ball",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, help_text in (
        ("solve", "locate all roots of f(alpha)=1 and reconstruct solutions"),
        ("scan", "sweep f(alpha) over the admissible interval"),
        ("limits", "verify the endpoint limits of the Dirichlet energy"),
        ("classify", "match parameters against the existence regimes"),
        ("oracle", "compare shooting against the variational oracle"),
        ("constants", "emit the spectral constants of the ball"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=str, default=None, help="flat key=value config file")
        p.add_argument("--a", type=float, default=None)
        p.add_argument("--b", type=float, default=None)
        p.add_argument("--lambda", dest="lambda_", type=str, default=None)
        p.add_argument("--mu", type=float, default=None)
        p.add_argument("--q", type=float, default=None)
        p.add_argument("--p", type=str, default=None, help="decimal or fraction, e.g. 10/3")
        p.add_argument("--N", type=int, default=None)
        p.add_argument("--R", type=float, default=None)
        p.add_argument("--tol-ode", type=float, default=None, help="ODE relative tolerance")
        p.add_argument("--tol-root", type=float, default=None, help="tolerance on |f-1| at roots")
        p.add_argument("--grid-points", type=int, default=None)
        p.add_argument("--alpha-min", type=float, default=None)
        p.add_argument("--alpha-max", type=float, default=None)
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--verbose", action="store_true")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = dict(_DEFAULTS)
    if args.config:
        values.update(_read_config_file(args.config))
    cli_values = {
        "a": args.a,
        "b": args.b,
        "lambda": args.lambda_,
        "mu": args.mu,
        "q": args.q,
        "p": args.p,
        "N": args.N,
        "R": args.R,
        "tol_ode": args.tol_ode,
        "tol_root": args.tol_root,
        "grid_points": args.grid_points,
        "alpha_min": args.alpha_min,
        "alpha_max": args.alpha_max,
        "out": args.out,
    }
    values.update({k: v for k, v in cli_values.items() if v is not None})

    try:
        N = int(values["N"])
        R = float(values["R"])
        geom = BallGeometry(N, R)
        p = parse_exponent(str(values["p"]), N)
        lam = float(Fraction(str(values["lambda"])))
        tol_kwargs = {}
        if values["tol_ode"] is not None:
            rtol = float(values["tol_ode"])
            tol_kwargs["ode_rtol"] = rtol
            tol_kwargs["ode_atol"] = rtol * 1e-2
        if values["tol_root"] is not None:
            tol_kwargs["root_tol"] = float(values["tol_root"])
        params = ProblemParams(
            a=float(values["a"]),
            b=float(values["b"]),
            lam=lam,
            mu=float(values["mu"]),
            q=float(values["q"]),
            p=p,
            geom=geom,
            tol=SolverTolerances(**tol_kwargs),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None

    raw = {
        "a": params.a,
        "b": params.b,
        "lambda": params.lam,
        "mu": params.mu,
        "q": params.q,
        "p": params.p,
        "N": N,
        "R": R,
        "tol_ode": params.tol.ode_rtol,
        "tol_root": params.tol.root_tol,
        "grid_points": int(values["grid_points"]),
        "alpha_min": None if values["alpha_min"] is None else float(values["alpha_min"]),
        "alpha_max": None if values["alpha_max"] is None else float(values["alpha_max"]),
        "out": str(values["out"]),
    }
    return RunConfig(
        subcommand=args.subcommand,
        params=params,
        grid_points=raw["grid_points"],
        alpha_min=raw["alpha_min"],
        alpha_max=raw["alpha_max"],
        out_dir=raw["out"],
        raw=raw,
    )


def _forced_interval(config: RunConfig) -> tuple[float, float] | None:
    if config.alpha_min is not None and config.alpha_max is not None:
        if not (0 <= config.alpha_min < config.alpha_max):
            raise ConfigError("need 0 <= alpha-min < alpha-max")
        return (config.alpha_min, config.alpha_max)
    return None


def _scan_grid(config: RunConfig):
    forced = _forced_interval(config)
    if forced is not None:
        return build_alpha_grid(
            forced, config.grid_points, center=closed_form_root_b0(config.params), forced=True
        )
    desc = describe_case(config.params)
    return build_alpha_grid(
        (desc.alpha_lo, desc.alpha_hi),
        config.grid_points,
        center=closed_form_root_b0(config.params),
    )


def run(config: RunConfig) -> int:
    """Execute one subcommand; returns the process exit status."""
    params = config.params
    out = config.out_dir
    cfg = config.to_dict()

    if config.subcommand == "constants":
        consts = spectral_constants(params.geom)
        doc = reports.constants_dict(params.geom, consts, cfg)
        reports.atomic_write(os.path.join(out, "constants.json"), reports.to_json_text(doc))
        print(os.path.join(out, "constants.json"))
        return 0

    if config.subcommand == "classify":
        pred = classify(params)
        doc = reports.classification_dict(pred, params, cfg)
        reports.atomic_write(
            os.path.join(out, "classification.json"), reports.to_json_text(doc)
        )
        print(os.path.join(out, "classification.json"))
        return 0

    if config.subcommand == "scan":
        samples = sample_f(params, _scan_grid(config))
        reports.atomic_write(
            os.path.join(out, "fscan.csv"), reports.fscan_csv_text(samples)
        )
        print(os.path.join(out, "fscan.csv"))
        return 0

    if config.subcommand == "solve":
        report = find_roots(
            params,
            grid_points=config.grid_points,
            force_interval=_forced_interval(config),
        )
        profile_files = []
        for i, sol in enumerate(report.solutions):
            name = f"profile_{i}.csv"
            reports.atomic_write(
                os.path.join(out, name), reports.profile_csv_text(sol.profile)
            )
            profile_files.append(name)
        doc = reports.root_report_dict(report, cfg, profile_files)
        reports.atomic_write(os.path.join(out, "report.json"), reports.to_json_text(doc))
        print(os.path.join(out, "report.json"))
        return 0

    if config.subcommand == "limits":
        report = verify_limits(params)
        doc = reports.limit_report_dict(report, params, cfg)
        reports.atomic_write(os.path.join(out, "limits.json"), reports.to_json_text(doc))
        print(os.path.join(out, "limits.json"))
        return 0

    if config.subcommand == "oracle":
        n = min(config.grid_points, 10) if config.grid_points else 10
        forced = _forced_interval(config)
        if forced is not None:
            alphas = np.linspace(forced[0], forced[1], n)
        else:
            desc = describe_case(params)
            if math.isinf(desc.alpha_hi):
                center = closed_form_root_b0(params)
                alphas = center * np.geomspace(0.3, 3.0, n)
            else:
                span = desc.alpha_hi - desc.alpha_lo
                alphas = desc.alpha_lo + span * np.linspace(0.1, 0.9, n)
        rows = oracle_compare(alphas, params)
        reports.atomic_write(os.path.join(out, "oracle.csv"), reports.oracle_csv_text(rows))
        print(os.path.join(out, "oracle.csv"))
        return 0

    raise ConfigError(f"unknown subcommand {config.subcommand!r}")  # pragma: no cover


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "verbose", False):
        logging.basicConfig(level=logging.INFO)
    try:
        config = resolve_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(config)
    except UnsupportedRegime as exc:
        print(f"unsupported regime: {exc}", file=sys.stderr)
        return 2
    except (
        NoSolutionFound,
        ConvergenceNotReached,
        NonFiniteBlowup,
        NotConverged,
        NotARoot,
        InvalidAmplitude,
    ) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except KirchhoffError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
