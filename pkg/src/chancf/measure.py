"""The invariant probability measure of the digit shift.

For base m the shift preserves the measure with density

    k_m / (((m-1)x + 1)((m-1)x + m)),   k_m = (m-1)^2 / log(m^2/(2m-1)),

whose distribution function is the limit law of the distribution iteration
in :mod:`chancf.gk`.  Scalar arguments return floats; numpy arrays are
accepted and mapped elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .expansion import ExpansionParams


def k_const(m: int) -> float:
    """Normalizing constant k_m = (m-1)^2 / log(m^2/(2m-1))."""
    if isinstance(m, bool) or not isinstance(m, int) or m < 2:
        raise DomainError(f"base must be an integer >= 2, got {m!r}")
    return (m - 1) ** 2 / math.log(m * m / (2 * m - 1))


@dataclass(frozen=True)
class MeasureParams:
    """Expansion base plus the cached normalizing constant."""

    params: ExpansionParams
    k: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", k_const(self.params.m))

    @classmethod
    def for_base(cls, m: int) -> "MeasureParams":
        return cls(ExpansionParams(m))

    @property
    def m(self) -> int:
        return self.params.m


def _checked_unit_interval(x, name: str) -> np.ndarray:
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0.0) or np.any(xs > 1.0) or not np.all(np.isfinite(xs)):
        raise DomainError(f"{name} requires arguments in [0, 1]")
    return xs


def gamma_density(x, mp: MeasureParams):
    """Invariant density k_m / (((m-1)x+1)((m-1)x+m)) on [0,1]."""
    xs = _checked_unit_interval(x, "gamma_density")
    m = mp.m
    val = mp.k / (((m - 1) * xs + 1.0) * ((m - 1) * xs + m))
    return float(val) if xs.ndim == 0 else val

def gamma_cdf(x, mp: MeasureParams):
    """Distribution function of the invariant measure.

    G(x) = (k_m/(m-1)^2) log( m((m-1)x+1) / ((m-1)x+m) ); G(0)=0, G(1)=1.
    """
    xs = _checked_unit_interval(x, "gamma_cdf")
    m = mp.m
    val = mp.k / (m - 1) ** 2 * np.log(m * ((m - 1) * xs + 1.0) / ((m - 1) * xs + m))
    return float(val) if xs.ndim == 0 else val


def digit_probability(i: int, mp: MeasureParams) -> float:
    """Invariant-measure probability that the leading digit equals i.

    The digit-i cylinder is (m^-(i+1), m^-i], so this is G(m^-i) - G(m^-(i+1)).
    """
    if i < 0:
        raise DomainError(f"digit index must be >= 0, got {i}")
    m = float(mp.m)
    return gamma_cdf(m**-i, mp) - gamma_cdf(m ** -(i + 1), mp)


def digit_tail_mass(i: int, mp: MeasureParams) -> float:
    """Invariant-measure probability that the leading digit is >= i.

    The digit probabilities telescope: sum_{j >= i} p_j = G(m^-i).
    """
    if i < 0:
        raise DomainError(f"digit index must be >= 0, got {i}")
    return gamma_cdf(float(mp.m) ** -i, mp)


def digit_distribution(mp: MeasureParams, tail_tol: float = 1e-12) -> tuple[list[float], float]:
    """Leading-digit probabilities truncated so the ignored tail < tail_tol.

    Returns (probs, tail_mass) with probs[i] the probability of digit i and
    tail_mass = 1 - sum(probs), guaranteed below tail_tol.  The tail decays
    geometrically with ratio 1/m.
    """
    if tail_tol <= 0:
        raise DomainError(f"tail_tol must be positive, got {tail_tol}")
    probs: list[float] = []
    i = 0
    while digit_tail_mass(i, mp) >= tail_tol:
        probs.append(digit_probability(i, mp))
        i += 1
        if i > 4000:  # unreachable for any representable tolerance
            break
    return probs, digit_tail_mass(i, mp)
