"""Numerical verification toolkit for lower bounds on the first nontrivial
Neumann eigenvalue of the p-Laplacian on planar domains.

The package is organized as a pipeline: `geometry` builds nested triangle
meshes for rhombi, rectangles and regular polygons; `fem` solves the p = 2
eigenproblems on them; `special` provides the radial ball profiles for
general p; `rearrangement` turns discrete eigenfunctions into decreasing
rearrangements and runs the comparison checks; `sturm1d` solves the singular
one-dimensional problem behind the consistency identities; `bounds` evaluates
the closed-form lower bounds and aggregates reports; `cli` exposes it all as
subcommands with deterministic CSV/JSON output.
"""

from .bounds import (
    BoundEntry,
    BoundReport,
    KnEntry,
    ashbaugh_mercado,
    bct_corollary,
    compare_report,
    dominance_ratio,
    kn_lookup,
    main_bound,
    payne_weinberger,
    pw_improvement_check,
    rhombus_sharpness,
    sector_sandwich,
    symmetric_planar_bound,
)
from .errors import ConvergenceError, NumericError, ParameterError
from .fem import (
    assemble_mass,
    assemble_stiffness,
    richardson,
    solve_dirichlet_lambda1,
    solve_mixed_dn,
    solve_neumann_mu1,
)
from .geometry import (
    DomainSpec,
    Mesh,
    make_rectangle,
    make_regular_polygon,
    make_rhombus,
    triangulate,
    triangulate_half_rhombus,
)
from .rearrangement import (
    chiti_check,
    cumulative_power,
    dirichlet_ball_profile,
    lq_norm_positive,
    rearrange,
    rearrange_oriented,
    reverse_holder_check,
)
from .special import (
    bessel_first_zero,
    f_power_mean,
    lambda1_ball,
    lambda1_sharp,
    omega_n,
    psi_profile,
    sup_ratio,
)
from .sturm1d import (
    SturmProblem,
    check_L_bound,
    comparison_ball_measure,
    sigma1,
    sturm_consistency,
)

__version__ = "0.1.0"

__all__ = [
    "BoundEntry", "BoundReport", "KnEntry", "ashbaugh_mercado",
    "bct_corollary", "compare_report", "dominance_ratio", "kn_lookup",
    "main_bound", "payne_weinberger", "pw_improvement_check",
    "rhombus_sharpness", "sector_sandwich", "symmetric_planar_bound",
    "ConvergenceError", "NumericError", "ParameterError",
    "assemble_mass", "assemble_stiffness", "richardson",
    "solve_dirichlet_lambda1", "solve_mixed_dn", "solve_neumann_mu1",
    "DomainSpec", "Mesh", "make_rectangle", "make_regular_polygon",
    "make_rhombus", "triangulate", "triangulate_half_rhombus",
    "chiti_check", "cumulative_power", "dirichlet_ball_profile",
    "lq_norm_positive", "rearrange", "rearrange_oriented",
    "reverse_holder_check",
    "bessel_first_zero", "f_power_mean", "lambda1_ball", "lambda1_sharp",
    "omega_n", "psi_profile", "sup_ratio",
    "SturmProblem", "check_L_bound", "comparison_ball_measure", "sigma1",
    "sturm_consistency",
    "__version__",
]
