"""Radial shooting solver for the local semilinear problem on the ball.

The local problem is -Lap u = alpha u^{q-1} + u^{p-1} with zero boundary
values.  Radial candidates solve u'' + (N-1)/r u' + alpha u^{q-1} + u^{p-1}
= 0 from u(0) = beta, u'(0) = 0; the boundary condition is met by adjusting
the central amplitude beta until the first zero of u lands at R.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize as _sopt

from .constants import BallGeometry, sphere_area
from .errors import InvalidAmplitude, NoSolutionFound
from .integrate import integrate_radial

logger = logging.getLogger(__name__)

_GL_NODES, _GL_WEIGHTS = leggauss(7)

# Defaults for the amplitude scan; all overridable per call.
_BETA_MIN_FACTOR = 1e-3
_BETA_MAX_FACTOR = 1e6
_SCAN_PER_DECADE = 4
_R_CAP_FACTOR = 1.25
_DEFAULT_R_MAX_FACTOR = 16.0


@dataclass(frozen=True)
class SolverTolerances:
    """Numerical tolerances; the defaults satisfy the residual contracts."""

    ode_rtol: float = 1e-10
    ode_atol: float = 1e-12
    radius_tol: float = 1e-9      # on |u(R)| zero location, relative to R
    root_tol: float = 1e-8        # on |f(alpha) - 1| at accepted roots
    blowup_bound: float = 1e12


@dataclass(frozen=True)
class ProblemParams:
    """Full Kirchhoff data (a, b, lambda, mu, q, p) plus geometry and tolerances.

    The canonical restriction is 2 <= q < p <= 2N/(N-2).  b = 0 is accepted
    so the degenerate non-Kirchhoff formulas remain evaluable; the existence
    theory assumes b > 0.
    """

    a: float
    b: float
    lam: float
    mu: float
    q: float
    p: float
    geom: BallGeometry
    tol: SolverTolerances = SolverTolerances()

    def __post_init__(self):
        if not (self.a > 0 and self.lam > 0 and self.mu > 0):
            raise ValueError("a, lambda, mu must be positive")
        if self.b < 0:
            raise ValueError("b must be nonnegative")
        pstar = self.geom.critical_exponent
        if not (2.0 <= self.q < self.p):
            raise ValueError(f"need 2 <= q < p, got q={self.q}, p={self.p}")
        if self.p > pstar * (1.0 + 1e-12):
            raise ValueError(f"p={self.p} exceeds the critical exponent {pstar}")

    @property
    def is_critical(self) -> bool:
        pstar = self.geom.critical_exponent
        return abs(self.p - pstar) <= 1e-12 * pstar

    def ode_tolerances(self) -> tuple[float, float]:
        """Effective integrator tolerances; tightened for critical exponents."""
        if self.is_critical:
            return min(self.tol.ode_rtol, 1e-12), min(self.tol.ode_atol, 1e-14)
        return self.tol.ode_rtol, self.tol.ode_atol

    def local_key(self) -> tuple:
        """Cache key of the local problem: everything except (a, b, lambda, mu)."""
        rtol, atol = self.ode_tolerances()
        return (self.q, self.p, self.geom.N, self.geom.R, rtol, atol, self.tol.radius_tol)


def _odd_power(exponent: float) -> Callable[[float], float]:
    """Odd extension u -> sign(u) |u|^e, specialised for small integer e."""
    n = round(exponent)
    if abs(exponent - n) < 1e-12 and 1 <= n <= 9:
        n = int(n)
        if n == 1:
            return lambda u: u
        if n % 2 == 1:
            return lambda u: u**n
        return lambda u: abs(u) ** (n - 1) * u
    e = float(exponent)
    return lambda u: math.copysign(abs(u) ** e, u)


@dataclass
class RadialProfile:
    """Sampled radial curve (r, u, u') on [0, radius] with dense evaluation.

    nodes are strictly increasing with nodes[0] = 0; evaluation between
    nodes is delegated to the integrator's interpolant (or to exact
    callables for synthetic profiles), so quadrature sees the solution at
    the integrator's own order.
    """

    nodes: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    _evaluate: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self._evaluate(np.atleast_1d(r))

    @property
    def radius(self) -> float:
        return float(self.nodes[-1])

    def scaled(self, factor: float) -> "RadialProfile":
        """Pointwise multiple factor*u of this profile (same nodes)."""
        inner = self._evaluate

        def evaluate(r):
            u, v = inner(r)
            return factor * u, factor * v

        return RadialProfile(self.nodes, factor * self.values, factor * self.derivs, evaluate)

    @staticmethod
    def from_callable(u, du, radius: float, n_nodes: int = 257) -> "RadialProfile":
        """Wrap exact callables u(r), u'(r) as a profile on [0, radius]."""
        nodes = np.linspace(0.0, radius, n_nodes)
        uu = np.asarray([u(r) for r in nodes], dtype=float)
        vv = np.asarray([du(r) for r in nodes], dtype=float)

        def evaluate(r):
            return (
                np.asarray([u(x) for x in r], dtype=float),
                np.asarray([du(x) for x in r], dtype=float),
            )

        return RadialProfile(nodes, uu, vv, evaluate)


@dataclass
class FirstZero:
    """The shot crossed u = 0 at radius r0."""

    r0: float
    profile: RadialProfile


@dataclass
class NoZero:
    """The shot stayed positive up to the integration cap."""

    reached: float


ShotOutcome = Union[FirstZero, NoZero]


@dataclass
class LocalSolution:
    """A solution of the local problem at parameter alpha.

    dirichlet_energy is the full gradient integral over the ball;
    local_energy is the value of the local functional, and norm_q_pow /
    norm_p_pow hold |u|_q^q and |u|_p^p for identity checks.
    """

    alpha: float
    profile: RadialProfile
    dirichlet_energy: float
    local_energy: float
    beta: float
    norm_q_pow: float
    norm_p_pow: float
    bracket_count: int = 1


def _shoot_raw(alpha, beta, params, r_max):
    """Integrate one shot; returns (result, h0, curvature coefficient)."""
    geom = params.geom
    N = geom.N
    F = alpha * beta ** (params.q - 1.0) + beta ** (params.p - 1.0)
    h0 = 1e-6 * geom.R
    if F != 0.0:
        h0 = min(h0, 0.01 * math.sqrt(2.0 * N * beta / abs(F)))
    u_h = beta - F * h0 * h0 / (2.0 * N)
    v_h = -F * h0 / N

    pq = _odd_power(params.q - 1.0)
    pp = _odd_power(params.p - 1.0)
    nm1 = float(N - 1)
    alpha = float(alpha)

    def g(r, u, v):
        return -nm1 / r * v - alpha * pq(u) - pp(u)

    rtol, atol = params.ode_tolerances()
    # A steep inner core legitimately reaches |u'| ~ beta^{p/2}; the guard
    # only needs to catch the post-crossing focusing divergence.
    bound = max(params.tol.blowup_bound, 1e8 * (beta + beta ** (params.p / 2.0)))
    result = integrate_radial(
        g,
        h0,
        u_h,
        v_h,
        r_max,
        rtol=rtol,
        atol=atol,
        first_step=h0,
        zero_radius_tol=params.tol.radius_tol * geom.R,
        blowup_bound=min(bound, 1e300),
    )
    return result, h0, F


def _profile_from_result(result, beta, F, N, h0, r_cut) -> RadialProfile:
    dense = result.interpolant()

    def evaluate(r):
        u = np.empty_like(r)
        v = np.empty_like(r)
        head = r <= h0
        if head.any():
            rh = r[head]
            u[head] = beta - F * rh * rh / (2.0 * N)
            v[head] = -F * rh / N
        tail = ~head
        if tail.any():
            ut, vt = dense(r[tail])
            u[tail] = ut
            v[tail] = vt
        return u, v

    keep = result.rs < r_cut * (1.0 - 1e-15)
    nodes = np.concatenate(([0.0], result.rs[keep], [r_cut]))
    u_cut, v_cut = dense(np.asarray([r_cut]))
    values = np.concatenate(([beta], result.us[keep], u_cut))
    derivs = np.concatenate(([0.0], result.vs[keep], v_cut))
    return RadialProfile(nodes, values, derivs, evaluate)


def shoot(alpha: float, beta: float, params: ProblemParams, r_max: float | None = None) -> ShotOutcome:
    """Integrate the radial IVP with central amplitude beta.

    Returns FirstZero with the refined crossing radius and the profile up to
    it, or NoZero if u stays positive until r_max (default 16 R).  Raises
    InvalidAmplitude for beta <= 0 and NonFiniteBlowup if the state leaves
    the configured magnitude bound.
    """
    if not (isinstance(beta, (int, float)) and math.isfinite(beta) and beta > 0):
        raise InvalidAmplitude(f"amplitude must be positive, got {beta!r}")
    if r_max is None:
        r_max = _DEFAULT_R_MAX_FACTOR * params.geom.R
    result, h0, F = _shoot_raw(alpha, float(beta), params, r_max)
    if result.status == "zero":
        profile = _profile_from_result(result, beta, F, params.geom.N, h0, result.r_zero)
        return FirstZero(r0=result.r_zero, profile=profile)
    return NoZero(reached=r_max)


def _zero_radius(alpha, beta, params, r_cap):
    """First-zero radius capped at r_cap (no profile construction)."""
    result, _, _ = _shoot_raw(alpha, beta, params, r_cap)
    return result.r_zero if result.status == "zero" else r_cap


def _expand_bracket(gap, hint, lo_limit, hi_limit, gentle=False):
    """Walk geometrically from a trusted amplitude until gap changes sign.

    gentle walks use a small fixed factor so narrow sign windows (critical
    bubble branches) are not stepped over.
    """
    g0 = gap(hint)
    if g0 == 0.0:
        return (hint, hint)
    factor = 1.15 if gentle else 1.3
    growth = 1.0 if gentle else 1.3
    if g0 > 0.0:
        prev = hint
        b = hint
        for _ in range(120):
            b = min(b * factor, hi_limit)
            gb = gap(b)
            if gb <= 0.0:
                return (prev, b)
            prev = b
            if b >= hi_limit:
                break
            factor = min(factor * growth, 4.0)
    else:
        prev = hint
        b = hint
        for _ in range(120):
            b = max(b / factor, lo_limit)
            gb = gap(b)
            if gb >= 0.0:
                return (b, prev)
            prev = b
            if b <= lo_limit:
                break
            factor = min(factor * growth, 4.0)
    return None


def _zoom_brackets(gap, betas, gaps, r_margin, levels=8, points=17):
    """Zoom on the extremum of r0(beta) - R when a coarse scan saw no sign change.

    Near the critical exponent the window where the first zero dips inside R
    can be much narrower than any fixed scan; the dip itself is smooth, so
    recursively refining around the extremal sample recovers it.
    """
    g_arr = np.asarray(gaps)
    if np.all(g_arr >= r_margin * (1.0 - 1e-12)):
        return []  # every shot stayed positive to the cap: nothing to zoom on
    target_min = bool(np.any(g_arr > 0.0))
    for _ in range(levels):
        i = int(np.argmin(g_arr) if target_min else np.argmax(g_arr))
        lo = betas[max(0, i - 1)]
        hi = betas[min(len(betas) - 1, i + 1)]
        if hi <= lo * (1.0 + 1e-13):
            break
        betas = np.geomspace(lo, hi, points)
        g_arr = np.asarray([gap(b) for b in betas])
        found = [
            (betas[j], betas[j + 1])
            for j in range(len(betas) - 1)
            if (g_arr[j] > 0.0) != (g_arr[j + 1] > 0.0) or g_arr[j] == 0.0
        ]
        if found:
            return found
    return []


def solve_local(
    alpha: float,
    params: ProblemParams,
    *,
    beta_hint: float | None = None,
    beta_min: float | None = None,
    beta_max: float | None = None,
    scan_per_decade: int | None = None,
) -> LocalSolution:
    """Find the amplitude whose first zero lands at R and assemble the solution.

    The amplitude axis is scanned geometrically for sign changes of
    r0(beta) - R; each bracket is solved by Brent's method, and when several
    brackets exist the candidate with minimal local energy is returned
    (ground-state selection) with the multiplicity recorded.  Raises
    NoSolutionFound when no bracket exists in the scan range.
    """
    geom = params.geom
    R = geom.R
    r_cap = _R_CAP_FACTOR * R
    beta_lin = R ** (-2.0 / (params.p - 2.0))
    if beta_min is None:
        beta_min = _BETA_MIN_FACTOR * beta_lin
    if beta_max is None:
        beta_max = _BETA_MAX_FACTOR * beta_lin
    if scan_per_decade is None:
        scan_per_decade = 12 if params.is_critical else _SCAN_PER_DECADE

    def gap(beta):
        return _zero_radius(alpha, beta, params, r_cap) - R

    brackets = []
    if beta_hint is not None and beta_min < beta_hint < beta_max:
        found = _expand_bracket(
            gap, beta_hint, beta_min, beta_max, gentle=params.is_critical
        )
        if found is not None:
            brackets = [found]
    if not brackets:
        n_decades = math.log10(beta_max / beta_min)
        n_pts = max(8, int(round(n_decades * scan_per_decade)) + 1)
        betas = np.geomspace(beta_min, beta_max, n_pts)
        gaps = [gap(b) for b in betas]
        brackets = [
            (betas[i], betas[i + 1])
            for i in range(len(betas) - 1)
            if (gaps[i] > 0.0) != (gaps[i + 1] > 0.0) or gaps[i] == 0.0
        ]
        if not brackets:
            brackets = _zoom_brackets(gap, betas, gaps, r_cap - R)
    if not brackets:
        raise NoSolutionFound(
            f"no amplitude bracket for alpha={alpha:.6g} in "
            f"[{beta_min:.3g}, {beta_max:.3g}] (q={params.q}, p={params.p})"
        )

    candidates = []
    for lo, hi in brackets:
        if lo == hi:
            beta_star = lo
        else:
            beta_star = _sopt.brentq(gap, lo, hi, xtol=1e-300, rtol=1e-13, maxiter=200)
        candidates.append(_assemble(alpha, beta_star, params))
    if len(candidates) > 1:
        logger.info(
            "alpha=%.6g: %d amplitude brackets; selecting minimal local energy",
            alpha,
            len(candidates),
        )
    best = min(candidates, key=lambda s: s.local_energy)
    return replace(best, bracket_count=len(candidates))


def _assemble(alpha, beta, params) -> LocalSolution:
    geom = params.geom
    R = geom.R
    result, h0, F = _shoot_raw(alpha, beta, params, _R_CAP_FACTOR * R)
    if result.status != "zero":
        raise NoSolutionFound(f"amplitude {beta:.6g} lost the zero crossing at alpha={alpha:.6g}")
    r0 = result.r_zero
    if abs(r0 - R) > 1e3 * params.tol.radius_tol * R:
        logger.warning("zero radius misses R by %.3e at alpha=%.6g", abs(r0 - R), alpha)
    profile = _profile_from_result(result, beta, F, geom.N, h0, R)
    d_energy = dirichlet_energy(profile, geom.N)
    qpow = _power_integral(profile, geom.N, params.q)
    ppow = _power_integral(profile, geom.N, params.p)
    energy = 0.5 * d_energy - alpha / params.q * qpow - ppow / params.p
    return LocalSolution(
        alpha=float(alpha),
        profile=profile,
        dirichlet_energy=d_energy,
        local_energy=energy,
        beta=float(beta),
        norm_q_pow=qpow,
        norm_p_pow=ppow,
    )


def _segment_quadrature(profile: RadialProfile, integrand) -> float:
    """Composite 7-point Gauss-Legendre over the profile's node intervals."""
    nodes = profile.nodes
    a = nodes[:-1]
    b = nodes[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    rr = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    u, v = profile(rr)
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return float(np.dot(w, integrand(u, v, rr)))


def dirichlet_energy(profile: RadialProfile, N: int) -> float:
    """Gradient integral over the ball: omega_{N-1} int u'(r)^2 r^{N-1} dr."""
    return sphere_area(N) * _segment_quadrature(
        profile, lambda u, v, r: v * v * r ** (N - 1)
    )


def _power_integral(profile: RadialProfile, N: int, s: float) -> float:
    """omega_{N-1} int |u|^s r^{N-1} dr (the s-th power of the L^s norm)."""
    return sphere_area(N) * _segment_quadrature(
        profile, lambda u, v, r: np.abs(u) ** s * r ** (N - 1)
    )


def lp_norm(profile: RadialProfile, N: int, s: float) -> float:
    """L^s norm of the profile over the ball, s >= 1."""
    if s < 1:
        raise ValueError(f"exponent must be >= 1, got {s}")
    return _power_integral(profile, N, s) ** (1.0 / s)


def local_residual(
    solution: LocalSolution,
    params: ProblemParams,
    sample_count: int = 200,
    omit_upper_power: bool = False,
) -> float:
    """Max relative strong-form residual of the local ODE at sample radii.

    u'' is recomputed independently by a fourth-order central difference of
    the dense-output derivative, so this certifies the integrated profile
    rather than restating the right side.  omit_upper_power drops the
    u^{p-1} term (used to check pure eigenfunction profiles).
    """
    prof = solution.profile
    R = prof.radius
    N = params.geom.N
    delta = 1e-3 * R
    r = np.linspace(max(4.0 * delta, 0.01 * R), R - 2.5 * delta, sample_count)
    u, v = prof(r)
    v_p2 = prof(r + 2 * delta)[1]
    v_p1 = prof(r + delta)[1]
    v_m1 = prof(r - delta)[1]
    v_m2 = prof(r - 2 * delta)[1]
    upp = (-v_p2 + 8.0 * v_p1 - 8.0 * v_m1 + v_m2) / (12.0 * delta)

    alpha = solution.alpha
    lower = alpha * np.sign(u) * np.abs(u) ** (params.q - 1.0)
    upper = np.sign(u) * np.abs(u) ** (params.p - 1.0)
    if omit_upper_power:
        upper = np.zeros_like(u)
    num = np.abs(upp + (N - 1.0) / r * v + lower + upper)
    den = 1.0 + np.abs(lower + upper)
    return float(np.max(num / den))


# ---------------------------------------------------------------------------
# Energy cache: D(alpha) is reused heavily by root finding and sweeps.  The
# key excludes (a, b, lambda, mu) because the local problem does not depend
# on them.  Populate before parallel read phases; entries are immutable.

@dataclass(frozen=True)
class LocalEnergy:
    alpha: float
    beta: float
    dirichlet_energy: float
    local_energy: float
    norm_q_pow: float
    norm_p_pow: float
    bracket_count: int


_ENERGY_CACHE: dict = {}
_BETA_HINTS: dict = {}


def local_energy_data(alpha: float, params: ProblemParams) -> LocalEnergy:
    """Solve the local problem at alpha (cached) and return its scalar data."""
    key = (params.local_key(), float(alpha))
    hit = _ENERGY_CACHE.get(key)
    if hit is not None:
        return hit
    hint = _BETA_HINTS.get(key[0])
    beta_hint = None
    if hint is not None and alpha > 0 and hint[0] > 0:
        if abs(math.log(alpha / hint[0])) < 2.0:
            beta_hint = hint[1]
    sol = solve_local(alpha, params, beta_hint=beta_hint)
    rec = LocalEnergy(
        alpha=float(alpha),
        beta=sol.beta,
        dirichlet_energy=sol.dirichlet_energy,
        local_energy=sol.local_energy,
        norm_q_pow=sol.norm_q_pow,
        norm_p_pow=sol.norm_p_pow,
        bracket_count=sol.bracket_count,
    )
    _ENERGY_CACHE[key] = rec
    _BETA_HINTS[key[0]] = (float(alpha), sol.beta)
    return rec


def seed_energy_cache(params: ProblemParams, records) -> None:
    """Insert precomputed records (e.g. from worker processes) into the cache."""
    lk = params.local_key()
    for rec in records:
        _ENERGY_CACHE[(lk, rec.alpha)] = rec


def seed_beta_hint(params: ProblemParams, alpha: float, beta: float) -> None:
    """Prime the amplitude hint so the next solve skips the cold scan."""
    _BETA_HINTS[params.local_key()] = (float(alpha), float(beta))


def clear_energy_cache() -> None:
    _ENERGY_CACHE.clear()
    _BETA_HINTS.clear()
