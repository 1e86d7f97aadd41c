"""Symmetric-square eigenvalue sums over binary-quadratic-form values.

Modules
-------
arith        factor sieve, Kronecker symbol, multiplicative-table assembly
eigenform    q-expansions, eigenvalue tables, symmetric squares
quadforms    reduced forms, representation counts, L(1, chi_D)
sparse_sums  sparse first moments, first-negative search, minorant machinery
sigma_dde    step kernel and the delayed equation for sigma(u)
cli          the ``symsq`` command-line tool
"""

from ._kernels import BACKEND
from .arith import FactorTable, arith_stats, build_factor_sieve, kronecker
from .eigenform import (
    EigenvalueTable,
    QExpansion,
    SymSquareTable,
    chebyshev_check,
    delta_eigenvalue_table,
    delta_qexpansion,
    extend_hecke,
    load_qexpansion,
    normalize,
    sym_square,
    verify_eigenform,
)
from .quadforms import (
    ClassGroup,
    ReducedForm,
    dirichlet_L1,
    enumerate_reduced,
    r_enumerate,
    r_formula,
    r_star,
)
from .sigma_dde import SigmaSolution, StepBeta, beta_eval, sigma_min_on, sigma_residual, solve_sigma
from .sparse_sums import (
    ExceptionalSet,
    HYTable,
    SumSeries,
    convolution_positivity_check,
    exceptional_set,
    exponent_fit,
    factorization_diagnostic,
    first_negative,
    first_negative_sparse,
    h_Y_table,
    lower_bound_sum,
    mean_value_sum,
    sparse_sum,
    sum_series,
)

__version__ = "0.1.0"
