"""Contraction constant of the density iteration, with certified truncation.

The derivative-maximum recursion M_{n+1} <= q_m M_n uses

    q_m = (m-1)^2 (m^2+1) * sum_{i>=0} 1/(m^{i+1} + m - 1)^2.

``qm`` evaluates the series with an analytic geometric tail bound, so the
true value is certified to lie in [value, value + tail_bound].  The closing
inequality chain that is supposed to show q_m <= 1 is reproduced verbatim by
``audit_final_chain``; it evaluates above 1 for every base (and the series
itself exceeds 1 for m >= 3), and both numbers are reported as computed
rather than silently repaired.  ``contraction_audit`` measures the empirical
M-ratio of one density-transfer step against the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateInputError, DomainError
from .gk import DensityGrid, MeasureParams, density_transfer, derivative_max


def delta(i: int, mp: MeasureParams) -> float:
    """alpha^i - alpha^{2i}, the partial-fraction gap of the i-th coefficient."""
    if i < 0:
        raise DomainError(f"index must be >= 0, got {i}")
    a = 1.0 / mp.m
    return a**i - a ** (2 * i)


@dataclass(frozen=True)
class QmBound:
    """Certified evaluation of the contraction series.

    The exact series value lies in [value, value + tail_bound]; below_one
    records whether even the upper end stays below 1.
    """

    m: int
    value: float
    truncation_index: int
    tail_bound: float
    below_one: bool


def _tail_bound(m: int, last_index: int) -> float:
    # each term is below m^-2(i+1), so the tail past last_index sums to
    # less than m^-2(last_index+1) / (m^2 - 1), times the prefactor
    prefactor = (m - 1) ** 2 * (m * m + 1)
    return prefactor * float(m) ** (-2 * (last_index + 1)) / (m * m - 1)


def qm(m: int, tol: float = 1e-12) -> QmBound:
    """Contraction constant with truncation certified below tol."""
    if isinstance(m, bool) or not isinstance(m, int) or m < 2:
        raise DomainError(f"base must be an integer >= 2, got {m!r}")
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    prefactor = (m - 1) ** 2 * (m * m + 1)
    last = 0
    while _tail_bound(m, last) >= tol:
        last += 1
        if last > 100_000:
            raise DomainError(f"tolerance {tol} unreachable for base {m}")
    terms = [1.0 / (m ** (i + 1) + m - 1) ** 2 for i in range(last + 1)]
    value = prefactor * math.fsum(terms)
    tail = _tail_bound(m, last)
    return QmBound(m=m, value=value, truncation_index=last, tail_bound=tail,
                   below_one=value + tail < 1.0)


@dataclass(frozen=True)
class ChainAudit:
    """The closing three-term upper bound for q_m, evaluated as printed.

    term_middle_printed is the unsquared middle term 1/(m^2+m-1) exactly as
    displayed; term_middle_squared is the 1/(m^2+m-1)^2 variant it plausibly
    should have been (the i=1 series term).  Both totals are compared
    exactly against 1, alongside the certified series value.
    """

    m: int
    prefactor: int
    term_first: float
    term_middle_printed: float
    term_middle_squared: float
    term_tail: float
    printed_value: float
    squared_value: float
    printed_at_most_one: bool
    squared_at_most_one: bool
    series: QmBound
    verdict: str


def audit_final_chain(m: int) -> ChainAudit:
    """Evaluate the printed q_m <= 1 chain exactly and report discrepancies."""
    if isinstance(m, bool) or not isinstance(m, int) or m < 2:
        raise DomainError(f"base must be an integer >= 2, got {m!r}")
    prefactor = (m - 1) ** 2 * (m * m + 1)
    first = Fraction(1, (2 * m - 1) ** 2)
    middle_printed = Fraction(1, m * m + m - 1)
    middle_squared = Fraction(1, (m * m + m - 1) ** 2)
    tail = Fraction(1, m**3 * (m - 1) ** 3 * (m * m + 1))
    printed = prefactor * (first + middle_printed + tail)
    squared = prefactor * (first + middle_squared + tail)
    series = qm(m)
    if printed <= 1:
        verdict = "printed-chain-holds"
    elif series.below_one:
        verdict = "printed-chain-exceeds-one-series-contracts"
    else:
        verdict = "printed-chain-exceeds-one-series-exceeds-one"
    return ChainAudit(
        m=m,
        prefactor=prefactor,
        term_first=float(first),
        term_middle_printed=float(middle_printed),
        term_middle_squared=float(middle_squared),
        term_tail=float(tail),
        printed_value=float(printed),
        squared_value=float(squared),
        printed_at_most_one=printed <= 1,
        squared_at_most_one=squared <= 1,
        series=series,
        verdict=verdict,
    )


@dataclass(frozen=True)
class ContractionAudit:
    """Empirical derivative-maximum contraction of one transfer step."""

    m_before: float
    m_after: float
    ratio: float


def contraction_audit(
    mp: MeasureParams, f: DensityGrid, tol: float = 1e-12
) -> ContractionAudit:
    """Measure M_{n+1}/M_n across one density-transfer step.

    Rejects inputs whose derivative maximum is below the finite-difference
    noise floor (a constant density has M = 0 and no meaningful ratio).
    """
    m_before = derivative_max(f)
    noise = 32.0 * np.finfo(float).eps * float(np.max(f.values, initial=0.0)) / f.spacing
    if m_before <= max(noise, 1e-12):
        raise DegenerateInputError(
            f"derivative maximum {m_before:.3e} is below the noise floor; "
            "contraction ratio would be meaningless"
        )
    g = density_transfer(f, mp, tol)
    m_after = derivative_max(g)
    return ContractionAudit(m_before=m_before, m_after=m_after, ratio=m_after / m_before)
