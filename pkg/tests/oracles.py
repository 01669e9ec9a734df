"""Independent numerical oracles used only by the tests.

Every oracle here avoids the package's own machinery: Bessel zeros come
from a high-precision power series with bisection, the eigenvalue from a
scipy initial-value integration with eigenparameter bisection, the sphere
area from iterated one-dimensional quadrature, and the Sobolev quotient
from plain trapezoid sums on a geometric grid.
"""

import math

import mpmath
import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq


def bessel_series(nu, x, dps=50, terms=200):
    """J_nu(x) from the ascending power series in high precision."""
    with mpmath.workdps(dps):
        nu_mp = mpmath.mpf(nu)
        x_mp = mpmath.mpf(x)
        half = x_mp / 2
        total = mpmath.mpf(0)
        term_pow = half**nu_mp
        for m in range(terms):
            coeff = (-1) ** m / (mpmath.factorial(m) * mpmath.gamma(m + nu_mp + 1))
            contrib = coeff * term_pow * half ** (2 * m)
            total += contrib
            if m > 4 and abs(contrib) < mpmath.mpf(10) ** (-dps) * (abs(total) + 1):
                break
        return float(total)


def bessel_first_zero_series(nu, xtol=1e-12):
    """First positive zero of J_nu by bisection on the series evaluation."""
    step = 0.25
    x = max(nu, 0.5)
    while bessel_series(nu, x) <= 0:
        x *= 0.5
    lo = x
    hi = x + step
    while bessel_series(nu, hi) > 0:
        lo = hi
        hi += step
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if bessel_series(nu, mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def eigenvalue_linear_shooting(N, R, rtol=1e-12):
    """First Dirichlet eigenvalue by integrating u'' + (N-1)/r u' + s u = 0.

    The radial mode from u(0) = 1 first vanishes at R exactly when s is the
    eigenvalue; brackets in s are resolved on the scipy integrator.
    """

    def first_zero_minus_R(s):
        h0 = 1e-8 * R

        def rhs(r, y):
            return [y[1], -(N - 1) / r * y[1] - s * y[0]]

        def hit(r, y):
            return y[0]

        hit.terminal = True
        hit.direction = -1
        sol = solve_ivp(
            rhs,
            (h0, 4.0 * R),
            [1.0 - s * h0**2 / (2 * N), -s * h0 / N],
            rtol=1e-12,
            atol=1e-14,
            events=hit,
            method="DOP853",
        )
        if sol.t_events[0].size:
            return sol.t_events[0][0] - R
        return 4.0 * R - R

    lo = 0.25 * (math.pi / R) ** 2
    hi = 4.0 * (math.pi * (1 + N) / R) ** 2
    return brentq(first_zero_minus_R, lo, hi, rtol=rtol)


def sphere_area_iterated(N):
    """omega_{N-1} from omega_1 = 2 pi and repeated sin-power integrals."""
    area = 2.0 * math.pi
    for k in range(1, N - 1):
        factor, _ = quad(lambda t: math.sin(t) ** k, 0.0, math.pi, epsabs=1e-14, epsrel=1e-13)
        area *= factor
    return area


def sobolev_quotient_trapezoid(N, r_max=2e4, n=400_000):
    """Rayleigh quotient of the decaying bubble by trapezoid sums.

    Geometric grid plus the same leading-order tail corrections; entirely
    independent of adaptive quadrature.
    """
    r = np.geomspace(1e-8, r_max, n)
    grad = (N - 2.0) ** 2 * r**2 * (1.0 + r**2) ** (-N) * r ** (N - 1)
    dens = (1.0 + r**2) ** (-N) * r ** (N - 1)
    g = np.trapezoid(grad, r) + (N - 2.0) * r_max ** (2.0 - N)
    d = np.trapezoid(dens, r) + r_max ** (-N) / N
    om = 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)
    return om * g / (om * d) ** ((N - 2.0) / N)


def radial_quadrature(f, R, N, n=200_001):
    """omega_{N-1} int_0^R f(r) r^{N-1} dr by composite Simpson."""
    from scipy.integrate import simpson

    r = np.linspace(0.0, R, n)
    om = 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)
    return om * simpson(f(r) * r ** (N - 1), x=r)
