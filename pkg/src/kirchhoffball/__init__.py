"""Positive radial solutions of Kirchhoff-type problems on a ball.

The nonlocal problem -(a + b |grad u|_2^2) Lap u = lambda u^{q-1} + mu u^{p-1}
reduces, by an amplitude scaling, to the semilinear local problem
-Lap u = alpha u^{q-1} + u^{p-1}: phi = (lambda/(alpha mu))^{1/(p-q)} u_alpha
solves the Kirchhoff problem exactly when a two-term function f(alpha) of
the local Dirichlet energy equals 1.  This package solves the local problem
by radial shooting, locates every root of f = 1 on the admissible interval,
classifies parameters against the enumerated existence regimes, and
cross-checks the shooting energies with an independent finite-difference
minimization.
"""

__version__ = "0.1.0"

from .constants import (
    BallGeometry,
    SpectralConstants,
    ball_volume,
    bessel_first_zero,
    first_eigenvalue,
    sobolev_constant,
    spectral_constants,
    sphere_area,
)
from .errors import (
    ConvergenceNotReached,
    GridTooCoarseWarning,
    InvalidAmplitude,
    KirchhoffError,
    NoSolutionFound,
    NotARoot,
    NotConverged,
    NonFiniteBlowup,
    ProjectionUndefined,
    UnsupportedRegime,
)
from .oracle import (
    EnergyReport,
    GridFunction,
    minimize_nehari,
    nehari_project,
    oracle_compare,
)
from .regimes import (
    CaseDescriptor,
    RegimePrediction,
    RootReport,
    classify,
    describe_case,
    family_of,
    find_roots,
    ground_state_level,
    holder_bound_check,
    sample_f,
    verify_limits,
)
from .scaling import (
    KirchhoffSolution,
    ScalingChain,
    f_eval,
    kirchhoff_residual,
    reconstruct,
    scaling_chain,
)
from .shooting import (
    FirstZero,
    LocalSolution,
    NoZero,
    ProblemParams,
    RadialProfile,
    SolverTolerances,
    dirichlet_energy,
    local_residual,
    lp_norm,
    shoot,
    solve_local,
)

__all__ = [name for name in dir() if not name.startswith("_")]
