"""Adaptive embedded Runge-Kutta integration of the radial shooting ODE.

The system is u' = v, v' = g(r, u, v) with g the radial semilinear right
side.  A Dormand-Prince 5(4) pair is unrolled over the two scalar state
components: the hot loop runs on plain Python floats, which is an order of
magnitude faster than generic array-based integrators for this tiny system
and is what makes dense alpha sweeps affordable.  Dense output uses the
standard quartic interpolant of the pair, so profile evaluation between
steps matches the integrator's local order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteBlowup

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_A71, _A73, _A74, _A75, _A76 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# Error weights: 5th-order minus embedded 4th-order solution.
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

# Quartic dense-output matrix; y(t+th) = y + h * sum_i K_i * P_i(theta),
# P_i(theta) = sum_j P[i][j] theta^{j+1}.
_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)
_P_ARR = np.asarray(_P)

_MAX_STEPS = 500_000
_MIN_STEP_FRACTION = 1e-14


@dataclass
class RadialIVPResult:
    """Accepted steps of one shot, plus the data needed for dense output.

    status is one of "zero" (u crossed zero; r_zero holds the refined
    radius), "reached" (integrated to r_end without a crossing).
    Arrays have one entry per accepted step; rs has one extra node.
    """

    rs: np.ndarray          # nodes r_0 .. r_n, including the final point
    us: np.ndarray
    vs: np.ndarray
    hs: np.ndarray          # step sizes, len n
    ks: np.ndarray          # stage derivatives, shape (n, 7, 2)
    status: str
    r_zero: float | None

    def interpolant(self) -> "DenseSegments":
        return DenseSegments(self.rs, self.us, self.vs, self.hs, self.ks)


class DenseSegments:
    """Vectorized piecewise-quartic evaluation of (u, v) over the step mesh."""

    def __init__(self, rs, us, vs, hs, ks):
        self.r_left = np.asarray(rs[:-1])
        self.r_last = float(rs[-1])
        self.u0 = np.asarray(us[:-1])
        self.v0 = np.asarray(vs[:-1])
        self.h = np.asarray(hs)
        # Q[k, component, j]: dense-output polynomial coefficients per step.
        self.q = np.einsum("kic,ij->kcj", np.asarray(ks), _P_ARR)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        idx = np.clip(np.searchsorted(self.r_left, r, side="right") - 1, 0, len(self.h) - 1)
        theta = (r - self.r_left[idx]) / self.h[idx]
        qu = self.q[idx, 0, :]
        qv = self.q[idx, 1, :]
        pu = theta * (qu[..., 0] + theta * (qu[..., 1] + theta * (qu[..., 2] + theta * qu[..., 3])))
        pv = theta * (qv[..., 0] + theta * (qv[..., 1] + theta * (qv[..., 2] + theta * qv[..., 3])))
        return self.u0[idx] + self.h[idx] * pu, self.v0[idx] + self.h[idx] * pv


def _dense_u(ks, u0, h, theta):
    """Scalar dense-output evaluation of u within one step."""
    acc = 0.0
    for i in (0, 2, 3, 4, 5, 6):
        p = _P[i]
        acc += ks[i][0] * (theta * (p[0] + theta * (p[1] + theta * (p[2] + theta * p[3]))))
    return u0 + h * acc


def integrate_radial(
    g,
    r0: float,
    u0: float,
    v0: float,
    r_end: float,
    rtol: float,
    atol: float,
    first_step: float,
    zero_radius_tol: float,
    blowup_bound: float = 1e12,
):
    """Integrate u'=v, v'=g(r,u,v) from r0 until u crosses zero or r_end.

    The first sign change of u is refined on the dense interpolant by
    bisection to zero_radius_tol.  Raises NonFiniteBlowup if |u| or |v|
    leaves blowup_bound.
    """
    rs = [r0]
    us = [u0]
    vs = [v0]
    hs = []
    kflat = []  # 14 floats per accepted step, row-major (stage, component)

    r, u, v = r0, u0, v0
    ku1, kv1 = v, g(r, u, v)
    h = first_step
    status = "reached"
    r_zero = None
    n_steps = 0

    while r < r_end:
        if n_steps > _MAX_STEPS:
            raise NonFiniteBlowup(f"step limit exceeded at r={r:.6g}")
        if h > r_end - r:
            h = r_end - r
        if h < _MIN_STEP_FRACTION * max(r, first_step):
            raise NonFiniteBlowup(f"step size underflow at r={r:.6g}")

        # Stages 2..6.
        yu = u + h * (_A21 * ku1)
        yv = v + h * (_A21 * kv1)
        ku2, kv2 = yv, g(r + _C2 * h, yu, yv)

        yu = u + h * (_A31 * ku1 + _A32 * ku2)
        yv = v + h * (_A31 * kv1 + _A32 * kv2)
        ku3, kv3 = yv, g(r + _C3 * h, yu, yv)

        yu = u + h * (_A41 * ku1 + _A42 * ku2 + _A43 * ku3)
        yv = v + h * (_A41 * kv1 + _A42 * kv2 + _A43 * kv3)
        ku4, kv4 = yv, g(r + _C4 * h, yu, yv)

        yu = u + h * (_A51 * ku1 + _A52 * ku2 + _A53 * ku3 + _A54 * ku4)
        yv = v + h * (_A51 * kv1 + _A52 * kv2 + _A53 * kv3 + _A54 * kv4)
        ku5, kv5 = yv, g(r + _C5 * h, yu, yv)

        yu = u + h * (_A61 * ku1 + _A62 * ku2 + _A63 * ku3 + _A64 * ku4 + _A65 * ku5)
        yv = v + h * (_A61 * kv1 + _A62 * kv2 + _A63 * kv3 + _A64 * kv4 + _A65 * kv5)
        ku6, kv6 = yv, g(r + h, yu, yv)

        u_new = u + h * (_A71 * ku1 + _A73 * ku3 + _A74 * ku4 + _A75 * ku5 + _A76 * ku6)
        v_new = v + h * (_A71 * kv1 + _A73 * kv3 + _A74 * kv4 + _A75 * kv5 + _A76 * kv6)
        r_new = r + h
        ku7, kv7 = v_new, g(r_new, u_new, v_new)

        err_u = h * (_E1 * ku1 + _E3 * ku3 + _E4 * ku4 + _E5 * ku5 + _E6 * ku6 + _E7 * ku7)
        err_v = h * (_E1 * kv1 + _E3 * kv3 + _E4 * kv4 + _E5 * kv5 + _E6 * kv6 + _E7 * kv7)
        su = atol + rtol * max(abs(u), abs(u_new))
        sv = atol + rtol * max(abs(v), abs(v_new))
        err = math.sqrt(0.5 * ((err_u / su) ** 2 + (err_v / sv) ** 2))

        if not math.isfinite(err):
            h *= 0.2
            n_steps += 1
            continue
        if err > 1.0:
            h *= max(0.2, 0.9 * err**-0.2)
            n_steps += 1
            continue

        # Accepted.
        ks = (
            (ku1, kv1),
            (ku2, kv2),
            (ku3, kv3),
            (ku4, kv4),
            (ku5, kv5),
            (ku6, kv6),
            (ku7, kv7),
        )
        rs.append(r_new)
        us.append(u_new)
        vs.append(v_new)
        hs.append(h)
        kflat.extend((ku1, kv1, ku2, kv2, ku3, kv3, ku4, kv4, ku5, kv5, ku6, kv6, ku7, kv7))
        n_steps += 1

        if abs(u_new) > blowup_bound or abs(v_new) > blowup_bound:
            raise NonFiniteBlowup(
                f"state magnitude exceeded {blowup_bound:g} at r={r_new:.6g}"
            )

        crossed = u_new <= 0.0 or _dense_u(ks, u, h, 0.5) <= 0.0
        if crossed and u > 0.0:
            r_zero = _refine_zero(ks, u, r, h, zero_radius_tol)
            status = "zero"
            r, u, v = r_new, u_new, v_new
            break

        r, u, v = r_new, u_new, v_new
        ku1, kv1 = ku7, kv7
        h *= min(5.0, max(0.2, 0.9 * err**-0.2 if err > 0.0 else 5.0))

    return RadialIVPResult(
        rs=np.asarray(rs),
        us=np.asarray(us),
        vs=np.asarray(vs),
        hs=np.asarray(hs),
        ks=np.asarray(kflat).reshape(-1, 7, 2) if kflat else np.zeros((0, 7, 2)),
        status=status,
        r_zero=r_zero,
    )


def _refine_zero(ks, u_left, r_left, h, tol):
    """Bisect the dense interpolant of u to the first zero within one step."""
    lo, hi = 0.0, 1.0
    f_lo = u_left
    # Guard against a dip that recovers before the step end: find the first
    # subinterval where the interpolant is nonpositive.
    if _dense_u(ks, u_left, h, 1.0) > 0.0:
        probe = 0.5
        while _dense_u(ks, u_left, h, probe) > 0.0:
            probe += 0.125
            if probe >= 1.0:  # pragma: no cover - crossing certified by caller
                probe = 1.0
                break
        hi = probe
    theta_tol = max(tol / h, 1e-15)
    while hi - lo > theta_tol:
        mid = 0.5 * (lo + hi)
        f_mid = _dense_u(ks, u_left, h, mid)
        if (f_lo > 0.0) == (f_mid > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return r_left + 0.5 * (lo + hi) * h
