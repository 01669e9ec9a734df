"""Deterministic report serialization.

JSON output is rendered by a small recursive writer: keys sorted, floats
formatted with 17 significant digits, no timestamps.  Identical inputs
produce byte-identical files.  Files are written atomically (temp file then
rename).  A bundled JSON schema describes every report kind.
"""

from __future__ import annotations

import math
import os
import sys
import tempfile
from dataclasses import asdict
from importlib import resources
from typing import Any

import numpy as np
import scipy

from . import __version__
from .regimes import (
    FSample,
    HolderCheck,
    LimitReport,
    RegimePrediction,
    RootReport,
)
from .scaling import KirchhoffSolution

SCHEMA_RESOURCE = "schemas/report.schema.json"


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return f"{x:.17g}"


def _render(obj: Any, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(", ")
            out.append('"' + str(key) + '": ')
            _render(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(", ")
            _render(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def to_json_text(obj: Any) -> str:
    out: list[str] = []
    _render(obj, out)
    out.append("\n")
    return "".join(out)


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def schema_path() -> str:
    return str(resources.files("kirchhoffball").joinpath(SCHEMA_RESOURCE))


def versions_dict() -> dict:
    return {
        "kirchhoffball": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": ".".join(str(v) for v in sys.version_info[:3]),
    }


def params_dict(params) -> dict:
    return {
        "a": params.a,
        "b": params.b,
        "lambda": params.lam,
        "mu": params.mu,
        "q": params.q,
        "p": params.p,
        "N": params.geom.N,
        "R": params.geom.R,
        "tol_ode_rtol": params.tol.ode_rtol,
        "tol_ode_atol": params.tol.ode_atol,
        "tol_radius": params.tol.radius_tol,
        "tol_root": params.tol.root_tol,
    }


def prediction_dict(pred: RegimePrediction | None) -> dict | None:
    if pred is None:
        return None
    return {
        "family": pred.family,
        "matched_cases": list(pred.matched_cases),
        "guaranteed_count": pred.guaranteed_count,
        "conditions": [
            {"name": c.name, "satisfied": c.satisfied, "value": c.value}
            for c in pred.conditions
        ],
        "constants": dict(pred.constants),
        "alpha_interval": [pred.alpha_interval[0], pred.alpha_interval[1]],
        "probe_alpha": pred.probe_alpha,
        "radiality_satisfied": pred.radiality_satisfied,
        "radiality_note": pred.radiality_note,
    }


def _sample_dict(s: FSample) -> dict:
    return {
        "alpha": s.alpha,
        "D": s.dirichlet,
        "f": s.f_value,
        "beta": s.beta,
        "status": "ok" if s.error is None else s.error,
    }


def _solution_dict(sol: KirchhoffSolution, profile_file: str | None) -> dict:
    return {
        "alpha_root": sol.alpha_root,
        "total_factor": sol.chain.total_factor,
        "scale_t_mu": sol.chain.t_mu,
        "scale_s": sol.chain.s,
        "effective_stiffness": sol.effective_stiffness,
        "dirichlet_energy_local": sol.local.dirichlet_energy,
        "dirichlet_energy": sol.dirichlet_energy,
        "local_energy": sol.local.local_energy,
        "central_amplitude": sol.local.beta,
        "residual": sol.residual,
        "profile_csv": profile_file,
    }


def root_report_dict(report: RootReport, config: dict, profile_files=None) -> dict:
    profile_files = profile_files or [None] * len(report.solutions)
    return {
        "kind": "root_report",
        "config": config,
        "versions": versions_dict(),
        "params": params_dict(report.params),
        "interval": [report.interval[0], report.interval[1]],
        "grid_points": report.grid_points,
        "prediction": prediction_dict(report.prediction),
        "probe_alpha": report.probe_alpha,
        "samples": [_sample_dict(s) for s in report.samples],
        "roots": [
            {
                "alpha": r.alpha,
                "bracket": [r.bracket[0], r.bracket[1]],
                "iterations": r.iterations,
                "f_value": r.f_value,
                "f_mismatch": r.f_mismatch,
            }
            for r in report.roots
        ],
        "solutions": [
            _solution_dict(sol, pf) for sol, pf in zip(report.solutions, profile_files)
        ],
        "root_count": len(report.roots),
        "agreement": report.agreement,
        "warnings": list(report.warnings),
    }


def limit_report_dict(report: LimitReport, params, config: dict) -> dict:
    return {
        "kind": "limit_report",
        "config": config,
        "versions": versions_dict(),
        "params": params_dict(params),
        "family": report.family,
        "entries": [
            {
                "name": e.name,
                "endpoint": e.endpoint,
                "direction": e.direction,
                "alphas": list(e.alphas),
                "d_values": list(e.d_values),
                "extrapolated": e.extrapolated,
                "predicted": e.predicted,
                "reference": e.reference,
                "relative_error": e.relative_error,
                "converged": e.converged,
            }
            for e in report.entries
        ],
    }


def classification_dict(pred: RegimePrediction, params, config: dict) -> dict:
    return {
        "kind": "classification",
        "config": config,
        "versions": versions_dict(),
        "params": params_dict(params),
        "prediction": prediction_dict(pred),
    }


def constants_dict(geom, consts, config: dict) -> dict:
    from .constants import bessel_first_zero

    nu = geom.N / 2.0 - 1.0
    return {
        "kind": "constants",
        "config": config,
        "versions": versions_dict(),
        "N": geom.N,
        "R": geom.R,
        "lambda1": consts.lambda1,
        "sobolev_s": consts.sobolev_s,
        "sphere_area": consts.sphere_area,
        "ball_volume": consts.ball_volume,
        "bessel_order": nu,
        "bessel_first_zero": bessel_first_zero(nu),
    }


def holder_dict(check: HolderCheck, params, config: dict) -> dict:
    return {
        "kind": "holder_check",
        "config": config,
        "versions": versions_dict(),
        "params": params_dict(params),
        "ok": check.ok,
        "bound": check.bound,
        "worst_margin": check.worst_margin,
        "rows": [
            {"alpha": r.alpha, "D": r.dirichlet, "margin": r.margin} for r in check.rows
        ],
    }


# CSV writers (fixed columns, documented in the README).

def profile_csv_text(profile, n_points: int | None = None) -> str:
    lines = ["r,u,du"]
    if n_points is None:
        rr = profile.nodes
        uu = profile.values
        vv = profile.derivs
    else:
        rr = np.linspace(0.0, profile.radius, n_points)
        uu, vv = profile(rr)
    for r, u, v in zip(rr, uu, vv):
        lines.append(f"{r:.17g},{u:.17g},{v:.17g}")
    return "\n".join(lines) + "\n"


def fscan_csv_text(samples) -> str:
    lines = ["alpha,D,f"]
    for s in samples:
        d = "" if s.dirichlet is None else f"{s.dirichlet:.17g}"
        f = "" if s.f_value is None else f"{s.f_value:.17g}"
        lines.append(f"{s.alpha:.17g},{d},{f}")
    return "\n".join(lines) + "\n"


def oracle_csv_text(rows) -> str:
    lines = ["alpha,D_shoot,D_oracle,gap"]
    for row in rows:
        ds = "" if row.d_shoot is None else f"{row.d_shoot:.17g}"
        do = "" if row.d_oracle is None else f"{row.d_oracle:.17g}"
        gap = "" if row.gap is None else f"{row.gap:.17g}"
        lines.append(f"{row.alpha:.17g},{ds},{do},{gap}")
    return "\n".join(lines) + "\n"
