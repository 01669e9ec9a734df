"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion
lines; tolerances and runtime budgets are asserted, not just reported.
"""

import math
import time

import numpy as np
import pytest

from kirchhoffball.constants import (
    BallGeometry,
    aubin_talenti_quotient,
    first_eigenvalue,
    sobolev_constant,
    spectral_constants,
)
from kirchhoffball.oracle import oracle_compare
from kirchhoffball.regimes import (
    classify,
    energy_bound_q2,
    energy_bound_q2_crit,
    energy_bound_qgt2_crit,
    find_roots,
    ground_state_level,
    holder_bound_check,
    two_root_lhs,
    verify_limits,
)
from kirchhoffball.shooting import ProblemParams, RadialProfile, dirichlet_energy

from .conftest import make_params
from .oracles import bessel_first_zero_series, eigenvalue_linear_shooting


def report(num, ok, detail, elapsed, budget):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail} ({elapsed:.1f}s / budget {budget:.0f}s)"
    print(line)
    assert ok, line
    assert elapsed <= budget, line


def test_criterion_1_scaling_identity_certification(ball3, consts3, lam1, m0_p4, m0_p3):
    t0 = time.time()
    rng = np.random.default_rng(20240817)
    worst_f = 0.0
    worst_res = 0.0
    n_roots = 0
    for regime in ("i", "ii", "iii", "iv"):
        for _ in range(5):
            a = float(rng.uniform(0.5, 2.0))
            mu = float(rng.uniform(0.5, 2.0))
            if regime == "i":
                p = 4.5
                lam = float(rng.uniform(0.3, 0.9)) * a * lam1
                b = float(rng.uniform(0.05, 1.0))
                m0 = None
            elif regime == "ii":
                p = 4.0
                lam = float(rng.uniform(0.3, 0.9)) * a * lam1
                b = float(rng.uniform(0.1, 0.8)) * mu / (4.0 * m0_p4)
                m0 = m0_p4
            elif regime == "iii":
                p = 4.0
                lam = float(rng.uniform(1.1, 2.5)) * a * lam1
                b = float(rng.uniform(1.2, 3.0)) * mu / (4.0 * m0_p4)
                m0 = m0_p4
            else:
                p = 3.0
                lam = float(rng.uniform(1.1, 2.5)) * a * lam1
                b = float(rng.uniform(0.05, 1.0))
                m0 = m0_p3
            params = make_params(ball3, a=a, b=b, lam=lam, mu=mu, q=2.0, p=p)
            rep = find_roots(params, consts3, m0=m0, grid_points=32)
            assert rep.roots, f"no roots in regime ({regime})"
            n_roots += len(rep.roots)
            worst_f = max(worst_f, max(r.f_mismatch for r in rep.roots))
            worst_res = max(worst_res, max(s.residual for s in rep.solutions))
    elapsed = time.time() - t0
    ok = worst_f <= 1e-8 and worst_res <= 1e-6
    report(
        1,
        ok,
        f"20 tuples, {n_roots} roots, max |f-1|={worst_f:.2e}, max residual={worst_res:.2e}",
        elapsed,
        60.0,
    )


def test_criterion_2_eigenvalue_exactness():
    t0 = time.time()
    worst_series = 0.0
    for N in (3, 4, 5, 6):
        j_oracle = bessel_first_zero_series(N / 2.0 - 1.0)
        for R in (0.5, 1.0, 2.0):
            lam = first_eigenvalue(BallGeometry(N, R))
            worst_series = max(worst_series, abs(lam - (j_oracle / R) ** 2) / lam)
    worst_shoot = 0.0
    for N in (3, 4, 5, 6):
        lam = first_eigenvalue(BallGeometry(N, 1.0))
        oracle = eigenvalue_linear_shooting(N, 1.0)
        worst_shoot = max(worst_shoot, abs(lam - oracle) / lam)
    elapsed = time.time() - t0
    ok = worst_series <= 1e-8 and worst_shoot <= 1e-8
    report(
        2,
        ok,
        f"series gap {worst_series:.2e}, shooting gap {worst_shoot:.2e}",
        elapsed,
        5.0,
    )


def test_criterion_3_subcritical_limits(ball3, consts3, m0_p4):
    t0 = time.time()
    params = make_params(ball3, p=4.0)
    m0 = ground_state_level(params, grid_size=2000)
    rep = verify_limits(params, consts3, m0=m0)
    by_name = {e.name: e for e in rep.entries}
    upper = by_name["upper_eigenvalue"]
    upper_ok = abs(upper.extrapolated) <= 0.01 * upper.reference
    lower = by_name["lower_zero"]
    lower_ok = lower.relative_error <= 0.01
    elapsed = time.time() - t0
    report(
        3,
        upper_ok and lower_ok,
        f"D(a->l1)/D(l1/2)={abs(upper.extrapolated)/upper.reference:.2e}, "
        f"|D(a->0)-4m0|/4m0={lower.relative_error:.2e}",
        elapsed,
        120.0,
    )


def test_criterion_4_critical_limits():
    t0 = time.time()
    s_lo = aubin_talenti_quotient(4, truncation=1e3)
    s_hi = aubin_talenti_quotient(4, truncation=1e4)
    s_consistent = abs(s_lo - s_hi) / s_hi <= 1e-6

    geom4 = BallGeometry(4, 1.0)
    consts4 = spectral_constants(geom4)
    s2 = consts4.sobolev_s**2
    rep4 = verify_limits(make_params(geom4, q=2.0, p=4.0), consts4)
    by_name = {e.name: e for e in rep4.entries}
    low4 = by_name["lower_zero"]
    low4_ok = abs(low4.extrapolated - s2) / s2 <= 0.05
    up4 = by_name["upper_eigenvalue"]
    up4_ok = abs(up4.extrapolated) <= 0.02 * s2

    geom3 = BallGeometry(3, 1.0)
    consts3_ = spectral_constants(geom3)
    s15 = consts3_.sobolev_s**1.5
    rep3 = verify_limits(make_params(geom3, q=2.0, p=6.0), consts3_)
    low3 = {e.name: e for e in rep3.entries}["lower_quarter"]
    low3_ok = abs(low3.extrapolated - s15) / s15 <= 0.05

    elapsed = time.time() - t0
    ok = s_consistent and low4_ok and up4_ok and low3_ok
    report(
        4,
        ok,
        f"S self-consistency {abs(s_lo - s_hi)/s_hi:.1e}; N=4: |D0-S^2|/S^2={abs(low4.extrapolated - s2)/s2:.2e}, "
        f"D(l1)/S^2={abs(up4.extrapolated)/s2:.2e}; N=3: |D-S^1.5|/S^1.5={abs(low3.extrapolated - s15)/s15:.2e}",
        elapsed,
        600.0,
    )


def test_criterion_5_theorem_count_agreement(ball3, consts3, lam1, m0_p4, m0_p3):
    t0 = time.time()
    cells = []

    def check_cell(name, params, consts, m0=None, expect_probe_split=False, grid=32):
        rep = find_roots(params, consts, m0=m0, grid_points=grid)
        pred = rep.prediction
        ok = len(rep.roots) >= pred.guaranteed_count and rep.agreement
        if expect_probe_split:
            ok = ok and len(rep.roots) >= 2
            if ok:
                probe = rep.probe_alpha
                ok = rep.roots[0].alpha < probe < rep.roots[-1].alpha
                ok = ok and rep.roots[0].bracket[1] <= probe <= rep.roots[-1].bracket[0]
        cells.append((name, ok, len(rep.roots), pred.guaranteed_count))
        return ok

    # q = 2 subcritical, four single-root cases
    check_cell("1.2(i)", make_params(ball3, p=4.5, lam=0.5 * lam1), consts3)
    b_ii = 0.4 * 1.0 / (4.0 * m0_p4)
    check_cell("1.2(ii)", make_params(ball3, p=4.0, b=b_ii, lam=0.5 * lam1), consts3, m0=m0_p4)
    b_iii = 2.0 / (4.0 * m0_p4)
    check_cell("1.2(iii)", make_params(ball3, p=4.0, b=b_iii, lam=2.0 * lam1), consts3, m0=m0_p4)
    check_cell("1.2(iv)", make_params(ball3, p=3.0, lam=2.0 * lam1), consts3, m0=m0_p3)

    # q = 2 subcritical two-root condition at margin 2x
    bound = energy_bound_q2(3.0, m0_p3, lam1, consts3.ball_volume)
    b2 = (0.5 / 2.0) ** 2 / bound
    check_cell(
        "1.2(2)",
        make_params(ball3, p=3.0, b=b2, lam=0.5 * lam1),
        consts3,
        m0=m0_p3,
        expect_probe_split=True,
        grid=48,
    )

    # q = 2 critical in dimension 4
    geom4 = BallGeometry(4, 1.0)
    consts4 = spectral_constants(geom4)
    lam14 = consts4.lambda1
    s2 = consts4.sobolev_s**2
    check_cell(
        "1.4(iii)",
        make_params(geom4, p=4.0, lam=0.5 * lam14, b=1.0, mu=2.0 * s2),
        consts4,
    )
    check_cell(
        "1.4(iv)",
        make_params(geom4, p=4.0, lam=2.0 * lam14, b=1.0, mu=0.5 * s2),
        consts4,
    )

    # q > 2 critical in dimension 4 (mu = 2 b S^2)
    check_cell(
        "1.5(ii)",
        make_params(geom4, q=2.5, p=4.0, b=1.0, mu=2.0 * s2),
        consts4,
    )

    # two-root cells in dimension 5 at margin 2x
    geom5 = BallGeometry(5, 1.0)
    consts5 = spectral_constants(geom5)
    lam15 = consts5.lambda1
    p5 = 10.0 / 3.0
    c2 = energy_bound_q2_crit(5, lam15, consts5.ball_volume, consts5.sobolev_s)
    b_c2 = (0.5 / two_root_lhs(1.0, 1.0, 1.0, p5, c2)) ** (2.0 / (p5 - 2.0))
    check_cell(
        "1.4(2)",
        make_params(geom5, p=p5, b=b_c2, lam=0.5 * lam15),
        consts5,
        expect_probe_split=True,
        grid=48,
    )
    c3 = energy_bound_qgt2_crit(5, 3.0, consts5.sobolev_s)
    b_c3 = (0.5 / two_root_lhs(1.0, 1.0, 1.0, p5, c3)) ** (2.0 / (p5 - 2.0))
    check_cell(
        "1.5(2)",
        make_params(geom5, q=3.0, p=p5, b=b_c3),
        consts5,
        expect_probe_split=True,
        grid=48,
    )

    elapsed = time.time() - t0
    ok = all(c[1] for c in cells)
    detail = ", ".join(f"{c[0]}:{c[2]}/{c[3]}" for c in cells)
    report(5, ok, detail, elapsed, 900.0)


def test_criterion_6_oracle_equivalence(ball3, lam1):
    t0 = time.time()
    worst = 0.0
    for p in (4.0, 3.0):
        params = make_params(ball3, p=p)
        alphas = lam1 * np.linspace(0.1, 0.9, 10)
        rows = oracle_compare(alphas, params, grid_size=2000)
        for row in rows:
            assert row.gap is not None
            worst = max(worst, row.gap)
    elapsed = time.time() - t0
    report(6, worst <= 0.005, f"max shooting/oracle gap {worst:.2e}", elapsed, 300.0)


def test_criterion_7_holder_bound(ball3, consts3, m0_p4, m0_p3):
    t0 = time.time()
    results = []
    for p, m0 in ((4.0, m0_p4), (3.0, m0_p3)):
        check = holder_bound_check(make_params(ball3, p=p), consts3, m0=m0)
        results.append((p, check.ok, check.worst_margin))
    elapsed = time.time() - t0
    ok = all(r[1] for r in results)
    detail = ", ".join(f"p={r[0]}: worst margin {r[2]:.3f}" for r in results)
    report(7, ok, detail, elapsed, 120.0)


def test_criterion_8_exact_quadrature():
    t0 = time.time()
    cases = [
        (RadialProfile.from_callable(lambda r: 1 - r * r, lambda r: -2 * r, 1.0), 16 * math.pi / 5),
        (RadialProfile.from_callable(lambda r: 1 - r, lambda r: -1.0, 1.0), 4 * math.pi / 3),
        (RadialProfile.from_callable(lambda r: 0.0, lambda r: 0.0, 1.0), 0.0),
    ]
    worst = 0.0
    for profile, expected in cases:
        got = dirichlet_energy(profile, 3)
        if expected == 0.0:
            worst = max(worst, abs(got))
        else:
            worst = max(worst, abs(got - expected) / expected)
    elapsed = time.time() - t0
    report(8, worst <= 1e-10, f"max relative quadrature error {worst:.2e}", elapsed, 1.0)
