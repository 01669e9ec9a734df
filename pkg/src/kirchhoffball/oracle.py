"""Finite-difference Nehari minimization, independent of the shooting path.

The local energy functional is discretized on a uniform radial grid with a
conservative second-order Dirichlet form (midpoint radial weights) and
trapezoid nonlinear terms.  Ground states are found by projected descent:
each step preconditions the discrete gradient with the radial stiffness
matrix, truncates negative parts, and re-projects onto the discrete Nehari
constraint.  This module exists to cross-check the shooting solver, so it
deliberately shares none of its machinery.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded
from scipy.optimize import brentq

from .constants import BallGeometry, sphere_area
from .errors import NoSolutionFound, NotConverged, ProjectionUndefined
from .shooting import ProblemParams, local_energy_data

_ARMIJO_C = 1e-4
_STAGNATION_RTOL = 1e-12
_GAP_FLAG = 5e-3


@dataclass
class GridFunction:
    """Nodal values on the uniform radial grid over [0, R]; boundary value 0."""

    geom: BallGeometry
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or len(self.values) < 3:
            raise ValueError("grid function needs at least 3 nodes")
        if abs(self.values[-1]) > 1e-14 * max(1.0, np.max(np.abs(self.values))):
            raise ValueError("boundary value must vanish")
        self.values[-1] = 0.0

    @property
    def r(self) -> np.ndarray:
        return np.linspace(0.0, self.geom.R, len(self.values))

    @property
    def h(self) -> float:
        return self.geom.R / (len(self.values) - 1)


def _mid_weights(gf: GridFunction) -> np.ndarray:
    r = gf.r
    return (0.5 * (r[:-1] + r[1:])) ** (gf.geom.N - 1)


def _trap_weights(gf: GridFunction) -> np.ndarray:
    r = gf.r
    w = np.full(len(r), gf.h)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w * r ** (gf.geom.N - 1)


def grid_dirichlet(gf: GridFunction) -> float:
    """Discrete |grad v|_2^2 via midpoint radial weights."""
    om = sphere_area(gf.geom.N)
    dv = np.diff(gf.values)
    return float(om / gf.h * np.dot(dv * dv, _mid_weights(gf)))


def grid_power(gf: GridFunction, s: float) -> float:
    """Discrete |v|_s^s via trapezoid weights."""
    om = sphere_area(gf.geom.N)
    return float(om * np.dot(np.abs(gf.values) ** s, _trap_weights(gf)))


def energy_value(gf: GridFunction, alpha: float, params: ProblemParams) -> float:
    """Discrete local energy I_alpha."""
    return (
        0.5 * grid_dirichlet(gf)
        - alpha / params.q * grid_power(gf, params.q)
        - grid_power(gf, params.p) / params.p
    )


def energy_gradient(gf: GridFunction, alpha: float, params: ProblemParams) -> np.ndarray:
    """Gradient of the discrete energy wrt interior nodal values (0..M-1).

    The r = 0 node carries the natural symmetry condition: its only coupling
    is through the first cell of the Dirichlet form.
    """
    om = sphere_area(gf.geom.N)
    v = gf.values
    h = gf.h
    wm = _mid_weights(gf)
    dv = np.diff(v)
    flux = wm * dv  # length M
    g = np.empty(len(v) - 1)
    g[0] = -flux[0]
    g[1:] = flux[:-1] - flux[1:]
    g *= om / h
    wt = _trap_weights(gf)[:-1]
    vv = v[:-1]
    g -= om * wt * (alpha * np.abs(vv) ** (params.q - 1.0) * np.sign(vv)
                    + np.abs(vv) ** (params.p - 1.0) * np.sign(vv))
    return g


def _stiffness_banded(gf: GridFunction) -> np.ndarray:
    """Dirichlet-form stiffness matrix in upper banded storage (for solveh_banded)."""
    om = sphere_area(gf.geom.N)
    wm = om / gf.h * _mid_weights(gf)
    m = len(gf.values) - 1
    ab = np.zeros((2, m))
    ab[1, 0] = wm[0]
    ab[1, 1:] = wm[:-1] + wm[1:]
    ab[0, 1:] = -wm[:-1]
    return ab


def nehari_project(gf: GridFunction, alpha: float, params: ProblemParams) -> GridFunction:
    """Scale gf onto the discrete Nehari constraint t^2 A = alpha t^q Q + t^p P.

    For q = 2 the closed form t = ((A - alpha Q)/P)^{1/(p-2)} applies and the
    projection is undefined when A - alpha Q <= 0.
    """
    v = gf.values
    if not np.any(v):
        raise ValueError("cannot project the zero function")
    if np.min(v) < 0:
        raise ValueError("projection expects a nonnegative iterate")
    a2 = grid_dirichlet(gf)
    qq = grid_power(gf, params.q)
    pp = grid_power(gf, params.p)
    p, q = params.p, params.q
    if q == 2.0 or alpha == 0.0:
        head = a2 - alpha * qq
        if head <= 0.0:
            raise ProjectionUndefined(
                f"|grad v|^2 - alpha |v|_2^2 = {head:.3e} <= 0 at alpha={alpha:.6g}"
            )
        t = (head / pp) ** (1.0 / (p - 2.0))
    else:
        def psi(t):
            return a2 - alpha * t ** (q - 2.0) * qq - t ** (p - 2.0) * pp

        t_hi = (a2 / pp) ** (1.0 / (p - 2.0))
        while psi(t_hi) >= 0.0:
            t_hi *= 1.5
        t = brentq(psi, 0.0, t_hi, xtol=1e-300, rtol=1e-12, maxiter=200)
    return GridFunction(gf.geom, t * v)


@dataclass
class EnergyReport:
    """Result of one Nehari minimization."""

    m_alpha: float
    grad_norm_sq: float
    profile: GridFunction
    iterations: int
    converged: bool


def minimize_nehari(
    alpha: float,
    params: ProblemParams,
    grid_size: int = 2000,
    budget: int = 600,
) -> EnergyReport:
    """Minimize the discrete energy over the Nehari constraint.

    Descent directions are stiffness-preconditioned gradients; steps
    backtrack from 1.0 with halving under an Armijo test, truncate negative
    parts, and re-project.  Terminates on relative energy stagnation below
    1e-12 or raises NotConverged with the last iterate attached.
    """
    if params.is_critical:
        warnings.warn(
            "critical exponent: discrete minimizers may under-resolve bubbles",
            RuntimeWarning,
            stacklevel=2,
        )
    geom = params.geom
    r = np.linspace(0.0, geom.R, grid_size + 1)
    v0 = 1.0 - (r / geom.R) ** 2
    gf = nehari_project(GridFunction(geom, v0), alpha, params)
    ab = _stiffness_banded(gf)

    energy = energy_value(gf, alpha, params)
    iterations = 0
    converged = False
    for iterations in range(1, budget + 1):
        g = energy_gradient(gf, alpha, params)
        d = solveh_banded(ab, g)
        slope = float(np.dot(g, d))
        step = 1.0
        accepted = None
        while step >= 1e-14:
            trial = gf.values[:-1] - step * d
            np.clip(trial, 0.0, None, out=trial)
            if not np.any(trial):
                step *= 0.5
                continue
            try:
                cand = nehari_project(
                    GridFunction(geom, np.append(trial, 0.0)), alpha, params
                )
            except ProjectionUndefined:
                step *= 0.5
                continue
            cand_energy = energy_value(cand, alpha, params)
            if cand_energy <= energy - _ARMIJO_C * step * slope:
                accepted = (cand, cand_energy)
                break
            step *= 0.5
        if accepted is None:
            converged = True  # no admissible descent left at machine resolution
            break
        gf, new_energy = accepted
        if abs(energy - new_energy) <= _STAGNATION_RTOL * max(1.0, abs(new_energy)):
            energy = new_energy
            converged = True
            break
        energy = new_energy

    report = EnergyReport(
        m_alpha=energy,
        grad_norm_sq=grid_dirichlet(gf),
        profile=gf,
        iterations=iterations,
        converged=converged,
    )
    if not converged:
        raise NotConverged(
            f"budget {budget} exhausted at alpha={alpha:.6g}", report=report
        )
    return report


@dataclass
class OracleRow:
    alpha: float
    d_shoot: float | None
    d_oracle: float | None
    gap: float | None
    flagged: bool


def oracle_compare(
    alphas,
    params: ProblemParams,
    grid_size: int = 2000,
    budget: int = 600,
) -> list[OracleRow]:
    """Pair shooting and variational Dirichlet energies; flag gaps > 0.5%."""
    rows = []
    for alpha in alphas:
        d_shoot = None
        d_oracle = None
        try:
            d_shoot = local_energy_data(alpha, params).dirichlet_energy
        except NoSolutionFound:
            pass
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                d_oracle = minimize_nehari(alpha, params, grid_size, budget).grad_norm_sq
        except (ProjectionUndefined, NotConverged, ValueError):
            pass
        gap = None
        if d_shoot is not None and d_oracle is not None:
            gap = abs(d_shoot - d_oracle) / d_shoot
        rows.append(
            OracleRow(
                alpha=float(alpha),
                d_shoot=d_shoot,
                d_oracle=d_oracle,
                gap=gap,
                flagged=(gap is None or gap > _GAP_FLAG),
            )
        )
    return rows
