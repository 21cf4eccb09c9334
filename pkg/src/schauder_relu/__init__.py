"""Schauder bases for C[0, 1] built from ReLU, Softplus and their first differences."""

from .basis import (
    BasisKind,
    DyadicIndex,
    SoftplusConfig,
    a_of,
    d_fn,
    g_fn,
    hat,
    linear_rank,
    q_fn,
    relu,
    softplus,
    t_fn,
    u_fn,
    unrank,
    verification_grid,
)
from .coefficients import Expansion, RegroupedExpansion, analyze, analyze_q, collocation_oracle, regroup
from .evaluator import ErrorReport, PartialSumSpec, eval_partial, frame_identity_check, sup_error
from .expr import DomainError, Func1D, ParseError, evaluate, parse, to_source
from .approximation import RateReport, convergence_sweep, lipschitz_interpolant
from .multivariate import (
    RegionDecomposition,
    ReluPlane,
    build_arrangement,
    check_neighbor_relation,
    fit_pyramid,
    pyramid,
    zero_region_audit,
)

__version__ = "0.1.0"
