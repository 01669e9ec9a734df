"""Scaling reduction between the local problem and the Kirchhoff problem.

A local solution u_alpha generates the Kirchhoff candidate
phi = (lambda/(alpha mu))^{1/(p-q)} u_alpha; it actually solves the
nonlocal problem exactly when f(alpha) = 1, with f the two-term expression
evaluated by f_eval.  The chain of amplitude factors is recorded so the
identity can be certified a posteriori through the residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotARoot
from .shooting import LocalSolution, ProblemParams, RadialProfile

_RESIDUAL_SAMPLES = 200


@dataclass(frozen=True)
class ScalingChain:
    """Amplitude factors linking u_alpha to the Kirchhoff solution phi."""

    t_mu: float          # mu^{1/(2-p)}: from u_alpha to the mu-normalized problem
    s: float             # second factor, fixed by s^{p-q} alpha mu^{(q-2)/(p-2)} = lambda
    total_factor: float  # s * t_mu = (lambda/(alpha mu))^{1/(p-q)}


@dataclass
class KirchhoffSolution:
    """Reconstructed solution of the nonlocal problem with its certificate."""

    params: ProblemParams
    alpha_root: float
    local: LocalSolution
    profile: RadialProfile
    chain: ScalingChain
    effective_stiffness: float   # a + b * |grad phi|_2^2
    dirichlet_energy: float      # |grad phi|_2^2
    residual: float


def f_eval(alpha: float, dirichlet: float, params: ProblemParams) -> float:
    """Two-term reduction function whose roots give Kirchhoff solutions.

    f(alpha) = a X^{(p-2)/(p-q)} + b X^{(p-4)/(p-q)} mu^{2/(2-p)} D with
    X = alpha mu^{(q-2)/(p-2)} / lambda and D the Dirichlet energy of
    u_alpha.  At p = 4 the second exponent vanishes and X^0 = 1 for any
    X > 0, which Python's float power already satisfies.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not dirichlet > 0:
        raise ValueError(f"Dirichlet energy must be positive, got {dirichlet}")
    p, q = params.p, params.q
    x = alpha * params.mu ** ((q - 2.0) / (p - 2.0)) / params.lam
    first = params.a * x ** ((p - 2.0) / (p - q))
    second = params.b * x ** ((p - 4.0) / (p - q)) * params.mu ** (2.0 / (2.0 - p)) * dirichlet
    return first + second


def closed_form_root_b0(params: ProblemParams) -> float:
    """Unique root of f = 1 when b = 0: alpha* = lambda mu^{-(q-2)/(p-2)} a^{-(p-q)/(p-2)}."""
    p, q = params.p, params.q
    return (
        params.lam
        * params.mu ** (-(q - 2.0) / (p - 2.0))
        * params.a ** (-(p - q) / (p - 2.0))
    )


def scaling_chain(alpha: float, params: ProblemParams) -> ScalingChain:
    """Amplitude factors of the reduction at parameter alpha."""
    p, q = params.p, params.q
    t_mu = params.mu ** (1.0 / (2.0 - p))
    s = (params.lam / (alpha * params.mu ** ((q - 2.0) / (p - 2.0)))) ** (1.0 / (p - q))
    total = (params.lam / (alpha * params.mu)) ** (1.0 / (p - q))
    return ScalingChain(t_mu=t_mu, s=s, total_factor=total)


def reconstruct(
    local: LocalSolution,
    params: ProblemParams,
    *,
    require_root: bool = True,
    sample_count: int = _RESIDUAL_SAMPLES,
) -> KirchhoffSolution:
    """Scale a local solution into a Kirchhoff solution and certify it.

    Raises NotARoot when f(alpha) differs from 1 by more than the root
    tolerance (unless require_root is disabled for diagnostics).
    """
    f = f_eval(local.alpha, local.dirichlet_energy, params)
    if require_root and abs(f - 1.0) > params.tol.root_tol:
        raise NotARoot(f, params.tol.root_tol)
    chain = scaling_chain(local.alpha, params)
    c = chain.total_factor
    profile = local.profile.scaled(c)
    d_phi = c * c * local.dirichlet_energy
    stiffness = params.a + params.b * d_phi
    sol = KirchhoffSolution(
        params=params,
        alpha_root=local.alpha,
        local=local,
        profile=profile,
        chain=chain,
        effective_stiffness=stiffness,
        dirichlet_energy=d_phi,
        residual=math.nan,
    )
    sol.residual = kirchhoff_residual(sol, sample_count)
    return sol


def kirchhoff_residual(sol: KirchhoffSolution, sample_count: int = _RESIDUAL_SAMPLES) -> float:
    """Max relative residual of -(a + b |grad phi|^2) Lap phi = lambda phi^{q-1} + mu phi^{p-1}.

    Lap phi is substituted algebraically through the local ODE satisfied by
    u_alpha (no re-differentiation), so the value isolates the scaling
    mismatch |f - 1| plus quadrature error in the stiffness integral.
    """
    params = sol.params
    q, p = params.q, params.p
    c = sol.chain.total_factor
    prof = sol.local.profile
    R = prof.radius
    r = np.linspace(0.005 * R, 0.995 * R, sample_count)
    u, _ = prof(r)
    u = np.maximum(u, 0.0)
    # -Lap phi = c (alpha u^{q-1} + u^{p-1}) by the local equation.
    neg_lap_phi = c * (sol.alpha_root * u ** (q - 1.0) + u ** (p - 1.0))
    phi = c * u
    rhs = params.lam * phi ** (q - 1.0) + params.mu * phi ** (p - 1.0)
    num = np.abs(sol.effective_stiffness * neg_lap_phi - rhs)
    return float(np.max(num / (1.0 + rhs)))
