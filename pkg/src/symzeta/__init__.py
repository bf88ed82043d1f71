"""Symmetrised combinations of the completed Riemann zeta function.

Evaluators for xi1, T+-, U, V, F1 and the square-lattice sum, critical-line
zero scanning and statistics, and the pole expansion of log|U|.
"""

from .combined import (
    FuncId,
    ModifiedSpec,
    ModifiedVariant,
    c01,
    evaluate,
    f1_fn,
    modified_u,
    modified_v,
    t_minus,
    t_plus,
    u_fn,
    v_fn,
    xi1,
)
from .errors import (
    ConvergenceError,
    CountMismatch,
    DomainError,
    InsufficientData,
    MonotonicityViolation,
    OrderError,
    OrderViolation,
    ParseError,
    PoleError,
    SignViolation,
    SymzetaError,
)
from .special import EvalConfig, bessel_k, dirichlet_L4, gamma, hurwitz_zeta, log_gamma, zeta

__version__ = "0.1.0"
