import math

import numpy as np
import pytest

from kirchhoffball.integrate import integrate_radial


def test_linear_mode_sin_over_r():
    # u'' + (2/r) u' + u = 0 from u(0)=1 has the exact solution sin(r)/r
    def g(r, u, v):
        return -2.0 / r * v - u

    h0 = 1e-8
    res = integrate_radial(
        g,
        h0,
        1.0 - h0**2 / 6.0,
        -h0 / 3.0,
        4.0,
        rtol=1e-11,
        atol=1e-13,
        first_step=h0,
        zero_radius_tol=1e-12,
    )
    assert res.status == "zero"
    assert res.r_zero == pytest.approx(math.pi, abs=1e-9)


def test_dense_output_accuracy():
    def g(r, u, v):
        return -2.0 / r * v - u

    h0 = 1e-8
    res = integrate_radial(
        g, h0, 1.0, -h0 / 3.0, 3.0, rtol=1e-11, atol=1e-13,
        first_step=h0, zero_radius_tol=1e-12,
    )
    dense = res.interpolant()
    rr = np.linspace(0.05, 2.9, 500)
    u, v = dense(rr)
    exact_u = np.sin(rr) / rr
    exact_v = (rr * np.cos(rr) - np.sin(rr)) / rr**2
    assert np.max(np.abs(u - exact_u)) < 1e-9
    assert np.max(np.abs(v - exact_v)) < 1e-8


def test_no_zero_status():
    # decaying positive solution: u'' + (2/r)u' = 0 has u = 1 (constant)
    def g(r, u, v):
        return -2.0 / r * v

    res = integrate_radial(
        g, 1e-8, 1.0, 0.0, 2.0, rtol=1e-10, atol=1e-12,
        first_step=1e-4, zero_radius_tol=1e-12,
    )
    assert res.status == "reached"
    assert res.r_zero is None
    assert res.us[-1] == pytest.approx(1.0, rel=1e-12)
