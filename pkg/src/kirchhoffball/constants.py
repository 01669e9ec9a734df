"""Geometric and spectral constants of the ball domain.

Everything here is a pure function of the dimension and radius: unit-sphere
areas, the first Dirichlet eigenvalue (through the first Bessel zero), and
the best Sobolev embedding constant computed from the standard decaying
bubble profile.  Results are memoized; all functions are safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy import integrate as _sint
from scipy import optimize as _sopt
from scipy import special as _ssp


@dataclass(frozen=True)
class BallGeometry:
    """Ball of radius ``R`` centered at the origin of R^N, N >= 3."""

    N: int
    R: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 3:
            raise ValueError(f"dimension must be an integer >= 3, got {self.N}")
        if not (self.R > 0 and math.isfinite(self.R)):
            raise ValueError(f"radius must be positive and finite, got {self.R}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "R", float(self.R))

    @property
    def critical_exponent(self) -> float:
        """Upper exponent 2N/(N-2) where the H^1_0 -> L^p embedding degenerates."""
        return 2.0 * self.N / (self.N - 2.0)


@dataclass(frozen=True)
class SpectralConstants:
    """Constants of the ball that enter the existence conditions."""

    lambda1: float
    sobolev_s: float
    sphere_area: float
    ball_volume: float


def bessel_first_zero(nu: float) -> float:
    """First positive zero of the Bessel function J_nu, nu >= 0.

    Brackets the zero by marching right from x = nu (J_nu > 0 on (0, j_nu,1))
    and polishes with Brent's method on the library Bessel evaluation.
    Relative accuracy is a few ulps, far below the 1e-10 contract.
    """
    if nu < 0:
        raise ValueError(f"order must be nonnegative, got {nu}")
    return _bessel_first_zero_cached(float(nu))


@lru_cache(maxsize=None)
def _bessel_first_zero_cached(nu: float) -> float:
    step = 0.25 + 0.4 * nu ** (1.0 / 3.0)
    a = max(nu, 1e-3)
    while _ssp.jv(nu, a) <= 0.0:  # pragma: no cover - J_nu(nu) > 0 always
        a *= 0.5
    b = a
    while _ssp.jv(nu, b) > 0.0:
        a = b
        b += step
    return float(_sopt.brentq(lambda x: _ssp.jv(nu, x), a, b, xtol=1e-14, rtol=8.9e-16))


def first_eigenvalue(geom: BallGeometry) -> float:
    """First Dirichlet eigenvalue of -Laplace on the ball: (j_{N/2-1,1} / R)^2."""
    j = bessel_first_zero(geom.N / 2.0 - 1.0)
    return (j / geom.R) ** 2


def sphere_area(N: int) -> float:
    """Surface area of the unit (N-1)-sphere: 2 pi^{N/2} / Gamma(N/2)."""
    if int(N) != N or N < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {N}")
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


def ball_volume(geom: BallGeometry) -> float:
    """Volume of the ball: omega_{N-1} R^N / N."""
    return sphere_area(geom.N) * geom.R**geom.N / geom.N


def aubin_talenti_quotient(
    N: int,
    truncation: float = 1e4,
    quad_tol: float = 1e-10,
    scale: float = 1.0,
) -> float:
    """Rayleigh quotient |grad U|_2^2 / |U|_{2N/(N-2)}^2 of the bubble profile.

    The profile is U_c(r) = c^{(N-2)/2} (1 + (cr)^2)^{-(N-2)/2} with c = scale.
    Both radial integrals run over [0, truncation] by adaptive quadrature; the
    power-law tails beyond the truncation radius are integrated analytically
    to leading order.  Raises if the neglected sub-leading tail exceeds
    quad_tol relative to the integral.
    """
    if int(N) != N or N < 3:
        raise ValueError(f"dimension must be an integer >= 3, got {N}")
    if truncation <= 1.0 or scale <= 0.0:
        raise ValueError("truncation must exceed 1 and scale must be positive")
    N = int(N)
    c = float(scale)
    T = float(truncation)
    nm2 = N - 2

    def grad_integrand(r):
        return (nm2 * c ** (nm2 / 2.0 + 2.0) * r * (1.0 + (c * r) ** 2) ** (-N / 2.0)) ** 2 * r ** (N - 1)

    def dens_integrand(r):
        return c**N * (1.0 + (c * r) ** 2) ** (-N) * r ** (N - 1)

    split = min(10.0 / c, T / 2.0)
    eps = quad_tol / 10.0
    grad = sum(
        _sint.quad(grad_integrand, lo, hi, epsabs=0.0, epsrel=eps, limit=400)[0]
        for lo, hi in ((0.0, split), (split, T))
    )
    dens = sum(
        _sint.quad(dens_integrand, lo, hi, epsabs=0.0, epsrel=eps, limit=400)[0]
        for lo, hi in ((0.0, split), (split, T))
    )

    # Leading tails: |grad U_c|^2 r^{N-1} ~ (N-2)^2 c^{2-N} r^{1-N},
    # U_c^{2*} r^{N-1} ~ c^{-N} r^{-N-1} for cr >> 1.
    grad_tail = nm2 * c ** (2 - N) * T ** (2 - N)
    dens_tail = c ** (-N) * T ** (-N) / N
    grad += grad_tail
    dens += dens_tail

    # Sub-leading tail terms, dropped above; used as the truncation-error bound.
    grad_err = nm2**2 * N * c ** (-N) * T ** (-N) / N
    dens_err = c ** (-N - 2) * T ** (-N - 2)
    if grad_err > quad_tol * grad or dens_err > quad_tol * dens:
        raise ValueError(
            f"truncation {T} too small: tail estimate exceeds quad_tol {quad_tol:g}"
        )

    om = sphere_area(N)
    return om * grad / (om * dens) ** ((N - 2.0) / N)


@lru_cache(maxsize=None)
def sobolev_constant(N: int, truncation: float = 1e4, quad_tol: float = 1e-10) -> float:
    """Best constant S in |grad u|_2^2 >= S |u|_{2*}^2, from the bubble quotient."""
    return aubin_talenti_quotient(N, truncation, quad_tol, scale=1.0)


@lru_cache(maxsize=None)
def spectral_constants(geom: BallGeometry) -> SpectralConstants:
    """Bundle lambda1, S, the unit-sphere area, and the ball volume."""
    return SpectralConstants(
        lambda1=first_eigenvalue(geom),
        sobolev_s=sobolev_constant(geom.N),
        sphere_area=sphere_area(geom.N),
        ball_volume=ball_volume(geom),
    )
