"""Base-m Chan continued fractions.

Digit expansions with exact rational arithmetic, the invariant measure of
the digit shift, Gauss-Kuzmin distribution/density iteration on grids with
convergence diagnostics, certified evaluation of the contraction constant,
and Monte Carlo digit statistics.  The `chancf` console script exposes all
of it with JSON output.
"""

from .contraction import (
    ChainAudit,
    ContractionAudit,
    QmBound,
    audit_final_chain,
    contraction_audit,
    delta,
    qm,
)
from .errors import DegenerateInputError, DomainError
from .expansion import (
    DigitSequence,
    ExpansionParams,
    Rational,
    convergents,
    decode,
    digit_of,
    encode,
    step,
    tau,
)
from .gk import (
    DEFAULT_GRID_SIZE,
    DEFAULT_TOL,
    DensityGrid,
    GridFunction,
    IterationReport,
    RateFit,
    apply_gk,
    density_transfer,
    derivative_max,
    distribution_to_density,
    iterate,
    iterate_with_final,
    pf_coefficient,
    rate_estimate,
    sup_error,
    uniform_grid,
)
from .interpolation import MonotoneCubic
from .measure import (
    MeasureParams,
    digit_distribution,
    digit_probability,
    digit_tail_mass,
    gamma_cdf,
    gamma_density,
    k_const,
)
from .stats import ChiSquareResult, DigitLawReport, digit_law_test, sample_orbit

__version__ = "0.1.0"

__all__ = [
    "ChainAudit",
    "ChiSquareResult",
    "ContractionAudit",
    "DEFAULT_GRID_SIZE",
    "DEFAULT_TOL",
    "DegenerateInputError",
    "DensityGrid",
    "DigitLawReport",
    "DigitSequence",
    "DomainError",
    "ExpansionParams",
    "GridFunction",
    "IterationReport",
    "MeasureParams",
    "MonotoneCubic",
    "QmBound",
    "RateFit",
    "Rational",
    "apply_gk",
    "audit_final_chain",
    "contraction_audit",
    "convergents",
    "decode",
    "delta",
    "density_transfer",
    "derivative_max",
    "digit_distribution",
    "digit_law_test",
    "digit_of",
    "digit_probability",
    "digit_tail_mass",
    "distribution_to_density",
    "encode",
    "gamma_cdf",
    "gamma_density",
    "iterate",
    "iterate_with_final",
    "k_const",
    "pf_coefficient",
    "qm",
    "rate_estimate",
    "sample_orbit",
    "step",
    "sup_error",
    "tau",
    "uniform_grid",
]
