"""Base-m digit expansions of reals in (0,1) and their exact reconstruction.

The digit of x is the unique a >= 0 with m^-(a+1) < x <= m^-a, and the shift

    y = (m^-a / x - 1) / (m - 1)

removes it.  Iterating the shift produces the digit string a_1, a_2, ...;
the value is recovered as the continued fraction with partial numerators
m^-a_1, (m-1) m^-a_2, (m-1) m^-a_3, ...  All digit comparisons are done in
exact integer arithmetic so that power boundaries x = m^-a classify
correctly, which a floating log alone does not guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .errors import DomainError

# Exact rationals are plain stdlib fractions throughout the package.
Rational = Fraction

RealLike = Union[int, float, Fraction]

# Below this magnitude a floating orbit has lost most of its mantissa to
# the subnormal range; encode() flags the digits that follow.
FLOAT_PRECISION_FLOOR = 1e-300


@dataclass(frozen=True)
class ExpansionParams:
    """Expansion base m >= 2 together with alpha = 1/m as an exact rational."""

    m: int
    alpha: Fraction = field(init=False)

    def __post_init__(self) -> None:
        if isinstance(self.m, bool) or not isinstance(self.m, int):
            raise DomainError(f"base must be an integer >= 2, got {self.m!r}")
        if self.m < 2:
            raise DomainError(f"base must be >= 2, got {self.m}")
        object.__setattr__(self, "alpha", Fraction(1, self.m))


@dataclass(frozen=True)
class DigitSequence:
    """A finite digit string a_1..a_N in base m.

    ``terminated`` is True iff the shift orbit hit 0 exactly after the last
    recorded digit, i.e. the string represents its value exactly.
    ``precision_warning`` is set when a floating-point orbit dropped below
    FLOAT_PRECISION_FLOOR, after which digits are unreliable.
    """

    params: ExpansionParams
    digits: tuple[int, ...]
    terminated: bool
    precision_warning: bool = False

    def __post_init__(self) -> None:
        digits = tuple(int(a) for a in self.digits)
        if any(a < 0 for a in digits):
            raise DomainError(f"digits must be non-negative, got {digits}")
        object.__setattr__(self, "digits", digits)

    def __len__(self) -> int:
        return len(self.digits)


def _as_fraction(x: RealLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"value must be finite, got {x!r}")
        return Fraction(x)
    raise DomainError(f"unsupported numeric type {type(x).__name__!r}")


def digit_of(x: RealLike, params: ExpansionParams) -> int:
    """Digit of x: the unique a >= 0 with m^-(a+1) < x <= m^-a.

    A floating log gives the starting guess; the bracket is then fixed up by
    exact integer comparison, so boundary inputs x = m^-a return a exactly.
    """
    xf = _as_fraction(x)
    if not 0 < xf <= 1:
        raise DomainError(f"digit_of requires 0 < x <= 1, got {x!r}")
    m = params.m
    num, den = xf.numerator, xf.denominator
    guess = (math.log(den) - math.log(num)) / math.log(m)
    a = max(0, int(guess))
    # largest a with num * m^a <= den, i.e. x <= m^-a
    while num * m**a > den:
        a -= 1
    while num * m ** (a + 1) <= den:
        a += 1
    return a


def step(x: RealLike, params: ExpansionParams) -> tuple[int, RealLike]:
    """One shift step: the digit of x and the shifted point y in [0,1).

    y = (m^-a / x - 1) / (m - 1).  Fraction input stays exact; float input
    is stepped through exact rationals and rounded once, so each float step
    is correctly rounded.
    """
    a = digit_of(x, params)
    m = params.m
    y = (Fraction(1, m**a) / _as_fraction(x) - 1) / (m - 1)
    if isinstance(x, Fraction):
        return a, y
    return a, float(y)


def tau(x: RealLike, params: ExpansionParams) -> RealLike:
    """The digit shift on [0,1]: tau(0) = 0, otherwise the y of step()."""
    xf = _as_fraction(x)
    if not 0 <= xf <= 1:
        raise DomainError(f"tau requires 0 <= x <= 1, got {x!r}")
    if xf == 0:
        return Fraction(0) if isinstance(x, Fraction) else 0.0
    return step(x, params)[1]


def encode(x: RealLike, params: ExpansionParams, max_digits: int) -> DigitSequence:
    """Digit string of x in (0,1), at most max_digits long.

    Fraction input is iterated exactly and ``terminated`` is decided
    exactly; float input follows the correctly-rounded float orbit (note a
    float literal like 0.3 is a binary rational, not 3/10, so its exact
    expansion differs from the decimal one).
    """
    if max_digits < 1:
        raise DomainError(f"max_digits must be >= 1, got {max_digits}")
    xf = _as_fraction(x)
    if not 0 < xf < 1:
        raise DomainError(f"encode requires 0 < x < 1, got {x!r}")
    exact = isinstance(x, Fraction)
    cur: RealLike = x if exact else float(x)
    digits: list[int] = []
    terminated = False
    warned = False
    for _ in range(max_digits):
        if not exact and 0 < cur < FLOAT_PRECISION_FLOOR:
            warned = True
        a, cur = step(cur, params)
        digits.append(a)
        if cur == 0:
            terminated = True
            break
    return DigitSequence(params, tuple(digits), terminated, warned)


def decode(seq: DigitSequence) -> tuple[Fraction, float]:
    """Value of a finite digit string, with the innermost tail taken as 0.

    Evaluates the continued fraction bottom-up in exact rationals and
    returns (exact, float(exact)).
    """
    if not seq.digits:
        raise DomainError("cannot decode an empty digit sequence")
    m = seq.params.m
    tail = Fraction(0)
    for a in reversed(seq.digits[1:]):
        tail = Fraction(m - 1, m**a) / (1 + tail)
    exact = Fraction(1, m ** seq.digits[0]) / (1 + tail)
    return exact, float(exact)


def convergents(seq: DigitSequence) -> list[Fraction]:
    """Values of all prefixes of the digit string, as exact rationals.

    Uses the standard three-term recurrence h_k = h_{k-1} + b_k h_{k-2}
    with partial numerators b_1 = m^-a_1 and b_k = (m-1) m^-a_k for k >= 2;
    the k-th entry equals decode() of the first k digits.
    """
    if not seq.digits:
        raise DomainError("cannot take convergents of an empty digit sequence")
    m = seq.params.m
    num_prev2, num_prev1 = Fraction(1), Fraction(0)
    den_prev2, den_prev1 = Fraction(0), Fraction(1)
    out: list[Fraction] = []
    for k, a in enumerate(seq.digits):
        b = Fraction(1, m**a) if k == 0 else Fraction(m - 1, m**a)
        num = num_prev1 + b * num_prev2
        den = den_prev1 + b * den_prev2
        out.append(num / den)
        num_prev2, num_prev1 = num_prev1, num
        den_prev2, den_prev1 = den_prev1, den
    return out
