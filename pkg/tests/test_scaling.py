import math
from dataclasses import replace

import numpy as np
import pytest

from kirchhoffball.errors import NotARoot
from kirchhoffball.scaling import (
    closed_form_root_b0,
    f_eval,
    kirchhoff_residual,
    reconstruct,
    scaling_chain,
)
from kirchhoffball.shooting import solve_local

from .conftest import make_params


class TestFEval:
    def test_b_zero_collapses_to_linear_ratio(self, ball3):
        params = make_params(ball3, a=2.0, b=0.0, lam=2.0, mu=1.0, q=2.0, p=4.0)
        assert f_eval(1.0, 5.0, params) == pytest.approx(1.0, rel=1e-15)

    def test_p4_q2_two_term_form(self, ball3):
        # f = a alpha / lambda + b D / mu when p = 4, q = 2
        params = make_params(ball3, a=1.0, b=1.0, lam=2.0, mu=3.0, q=2.0, p=4.0)
        assert f_eval(1.0, 6.0, params) == pytest.approx(2.5, rel=1e-14)

    def test_p3_exponents(self, ball3):
        params = make_params(ball3, a=1.0, b=1.0, lam=1.0, mu=1.0, q=2.0, p=3.0)
        assert f_eval(1.0, 1.0, params) == pytest.approx(2.0, rel=1e-14)

    def test_rejects_nonpositive_inputs(self, ball3):
        params = make_params(ball3)
        with pytest.raises(ValueError):
            f_eval(0.0, 1.0, params)
        with pytest.raises(ValueError):
            f_eval(-1.0, 1.0, params)
        with pytest.raises(ValueError):
            f_eval(1.0, 0.0, params)

    @pytest.mark.parametrize("p", [3.5, 4.0, 4.5])
    def test_monotone_increasing_in_a_and_b(self, ball3, p):
        alpha, d = 1.3, 6.0
        base = dict(lam=2.0, mu=3.0, q=2.0, p=p)
        f_by_a = [f_eval(alpha, d, make_params(ball3, a=a, b=1.0, **base)) for a in np.linspace(0.5, 4.0, 5)]
        assert np.all(np.diff(f_by_a) > 0)
        f_by_b = [f_eval(alpha, d, make_params(ball3, a=1.0, b=b, **base)) for b in np.linspace(0.5, 4.0, 5)]
        assert np.all(np.diff(f_by_b) > 0)

    @pytest.mark.parametrize("p", [4.0, 4.5])
    def test_monotone_decreasing_in_lambda(self, ball3, p):
        # both lambda-exponents are nonnegative only for p >= 4; below that
        # the second term grows with lambda and monotonicity genuinely fails
        alpha, d = 1.3, 6.0
        f_by_lam = [
            f_eval(alpha, d, make_params(ball3, a=1.0, b=1.0, lam=lam, mu=3.0, q=2.0, p=p))
            for lam in np.linspace(0.5, 4.0, 5)
        ]
        assert np.all(np.diff(f_by_lam) < 0)

    def test_b_zero_closed_form_root(self, ball3):
        rng = np.random.default_rng(7)
        for _ in range(20):
            q = float(rng.uniform(2.0, 3.5))
            p = float(rng.uniform(q + 0.3, 5.8))
            params = make_params(
                ball3,
                a=float(rng.uniform(0.2, 5.0)),
                b=0.0,
                lam=float(rng.uniform(0.2, 5.0)),
                mu=float(rng.uniform(0.2, 5.0)),
                q=q,
                p=p,
            )
            alpha_star = closed_form_root_b0(params)
            assert f_eval(alpha_star, 3.7, params) == pytest.approx(1.0, abs=1e-12)


class TestScalingChain:
    def test_unit_factor_when_lambda_equals_alpha_mu(self, ball3):
        params = make_params(ball3, lam=6.0, mu=3.0, q=2.0, p=4.0)
        chain = scaling_chain(2.0, params)
        assert chain.total_factor == 1.0

    def test_defining_relation(self, ball3):
        rng = np.random.default_rng(3)
        for _ in range(20):
            q = float(rng.uniform(2.0, 3.0))
            p = float(rng.uniform(q + 0.5, 6.0))
            params = make_params(
                ball3,
                lam=float(rng.uniform(0.3, 4.0)),
                mu=float(rng.uniform(0.3, 4.0)),
                q=q,
                p=p,
            )
            alpha = float(rng.uniform(0.1, 8.0))
            chain = scaling_chain(alpha, params)
            lhs = chain.s ** (p - q) * alpha * params.mu ** ((q - 2.0) / (p - 2.0))
            assert lhs == pytest.approx(params.lam, rel=1e-13)
            assert chain.s * chain.t_mu == pytest.approx(chain.total_factor, rel=1e-14)


class TestReconstruct:
    def test_near_root_reconstruction_and_residual(self, ball3):
        # b ~ 0: the root of f = 1 sits at alpha = lambda / a = 3
        params = make_params(ball3, a=1.0, b=1e-12, lam=3.0, mu=1.0, q=2.0, p=4.0)
        local = solve_local(3.0, params)
        sol = reconstruct(local, params)
        assert sol.residual <= 1e-6
        assert sol.effective_stiffness == pytest.approx(
            params.a + params.b * sol.dirichlet_energy, rel=1e-14
        )

    def test_pointwise_scaling_exact(self, ball3, lam1):
        params = make_params(ball3, a=1.0, b=1e-12, lam=3.0, mu=1.0, q=2.0, p=4.0)
        local = solve_local(3.0, params)
        sol = reconstruct(local, params)
        c = sol.chain.total_factor
        rr = np.linspace(0.0, 1.0, 199)
        u_local = local.profile(rr)[0]
        u_phi = sol.profile(rr)[0]
        assert np.max(np.abs(u_phi - c * u_local)) == 0.0

    def test_not_a_root_raises(self, ball3, lam1):
        params = make_params(ball3, a=1.0, b=1.0, lam=1.0, mu=1.0, q=2.0, p=4.0)
        local = solve_local(0.5 * lam1, params)
        with pytest.raises(NotARoot):
            reconstruct(local, params)

    def test_forced_off_root_residual_visible(self, ball3, lam1):
        # choose (a, b, lambda, mu) so that f(alpha) = 1.1 at a solved alpha
        base = make_params(ball3, p=4.0)
        local = solve_local(0.5 * lam1, base)
        params = make_params(
            ball3, a=0.6, b=0.5, lam=local.alpha, mu=local.dirichlet_energy, q=2.0, p=4.0
        )
        f = 0.6 + 0.5  # a alpha/lambda + b D/mu with the choices above
        assert f_eval(local.alpha, local.dirichlet_energy, params) == pytest.approx(1.1, rel=1e-12)
        sol = reconstruct(local, params, require_root=False)
        assert sol.residual > 1e-3

    def test_root_tolerance_respected(self, ball3, lam1):
        # |f - 1| just inside the tolerance must reconstruct
        params = make_params(ball3, a=1.0, b=1e-12, lam=3.0, mu=1.0, q=2.0, p=4.0)
        local = solve_local(3.0 * (1.0 + 1e-9), params)
        sol = reconstruct(local, params)
        assert abs(sol.residual) < 1e-6
