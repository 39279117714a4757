"""Base-m continued fractions: exact expansions, convergents and error bounds."""

from .numeric import (
    Ordering,
    PrecisionInterval,
    ZeroDenominatorError,
    certain_cmp_power,
    cmp_power,
    fibonacci,
    interval_from_sqrt,
    make_rational,
)
from .expansion import (
    DEFAULT_MAX_DIGITS,
    DomainError,
    Expansion,
    InfiniteDigit,
    PrecisionExhausted,
    digit_b1,
    expand,
    tau_step,
)
from .convergents import (
    ConvergentTable,
    build_table,
    determinant,
    eval_finite,
    moebius_with_tail,
    reconstruct_check,
)
from .analysis import (
    AuditReport,
    BoundsRow,
    InternalInconsistency,
    audit,
    convergence_diagnostics,
    error_bounds,
    error_exact,
    q_floors,
)
from .stats import SplitMix64, gauss_kuzmin_empirical, mcf_digit_histogram, rcf_expand

__version__ = "0.1.0"
