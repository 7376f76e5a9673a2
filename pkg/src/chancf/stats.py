"""Monte Carlo check of the leading-digit law under the invariant measure.

Orbits start uniform on (0,1), are burned in for a fixed number of shift
steps (geometric convergence makes ~10 steps plenty at sampling noise
scales), and the next digit is recorded.  Sampling is chunked with
per-chunk seeds derived from (seed, chunk index) and merged in fixed order,
so reports are bit-identical for a given seed regardless of worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2 as _chi2

from .errors import DomainError
from .measure import MeasureParams, digit_probability, digit_tail_mass

CHUNK_SIZE = 1 << 16
DEFAULT_POOL_ABOVE = 8
SIGNIFICANCE = 0.001

_ENV_THREADS = "CHANCF_THREADS"
_TABLE_LEN = 1200


@dataclass(frozen=True)
class DigitLawReport:
    """Observed digit counts against the invariant digit probabilities."""

    m: int
    n_samples: int
    burn_in: int
    seed: int
    counts: dict[int, int]
    expected: dict[int, float]
    chi_square: float
    max_abs_freq_error: float


@dataclass(frozen=True)
class ChiSquareResult:
    """Pearson goodness-of-fit outcome at the fixed 0.001 significance."""

    chi_square: float
    dof: int
    passed: bool
    critical_value: float
    significance: float = SIGNIFICANCE


def _power_table(m: int) -> np.ndarray:
    # m^-j for j = 0.._TABLE_LEN-1; deep entries underflow to 0.0, which the
    # bracket fixup never selects because orbit values stay positive
    return float(m) ** -np.arange(_TABLE_LEN, dtype=float)


def _digits_vec(x: np.ndarray, m: int, table: np.ndarray) -> np.ndarray:
    """Vectorized digit extraction with bracket fixup against the power table."""
    a = np.floor(np.log(x) * (-1.0 / math.log(m))).astype(np.int64)
    np.clip(a, 0, _TABLE_LEN - 2, out=a)
    for _ in range(4):
        hi = x > table[a]
        if hi.any():
            a[hi] -= 1
        lo = x <= table[a + 1]
        if lo.any():
            a[lo] += 1
        if not (hi.any() or lo.any()):
            break
    return a


def _chunk_counts(seed: int, chunk_idx: int, size: int, burn_in: int, m: int,
                  table: np.ndarray) -> np.ndarray:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chunk_idx,))
    rng = np.random.Generator(np.random.PCG64(ss))
    # dyadic uniforms on (0,1): k / 2^53 with k in [1, 2^53)
    x = rng.integers(1, 1 << 53, size=size).astype(np.float64) * 2.0**-53
    for _ in range(burn_in):
        a = _digits_vec(x, m, table)
        x = (table[a] / x - 1.0) / (m - 1)
        bad = ~((x > 0.0) & (x < 1.0))
        if bad.any():
            # exact terminations and rounding onto the boundary are
            # measure-zero; restart those orbits deterministically
            x[bad] = 0.5
    a = _digits_vec(x, m, table)
    return np.bincount(a, minlength=64)


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        raw = os.environ.get(_ENV_THREADS, "1")
        try:
            workers = int(raw)
        except ValueError as exc:
            raise DomainError(f"{_ENV_THREADS} must be a positive integer, got {raw!r}") from exc
    if workers < 1:
        raise DomainError(f"worker count must be >= 1, got {workers}")
    return workers


def _pearson(counts: dict[int, int], n: int, mp: MeasureParams, pool_above: int) -> ChiSquareResult:
    observed = [counts.get(i, 0) for i in range(pool_above)]
    observed.append(n - sum(observed))
    probs = [digit_probability(i, mp) for i in range(pool_above)]
    probs.append(digit_tail_mass(pool_above, mp))
    expected = [n * p for p in probs]
    small = [e for e in expected if e < 5.0]
    if small:
        raise DomainError(
            f"expected count {min(small):.3f} below 5 after pooling digits >= {pool_above}; "
            "lower pool_above or draw more samples"
        )
    stat = math.fsum((o - e) ** 2 / e for o, e in zip(observed, expected))
    dof = pool_above  # cells - 1
    critical = float(_chi2.ppf(1.0 - SIGNIFICANCE, dof))
    return ChiSquareResult(chi_square=stat, dof=dof, passed=stat <= critical,
                           critical_value=critical)


def sample_orbit(
    seed: int,
    n_samples: int,
    burn_in: int,
    mp: MeasureParams,
    workers: int | None = None,
) -> DigitLawReport:
    """Sample the digit law after burn-in; deterministic for a fixed seed.

    Orbits are advanced with the same bracket law as the scalar API but
    against a floating power table (boundary hits are measure-zero).  The
    worker count (default from CHANCF_THREADS) only partitions work; it
    never changes the result.
    """
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got {n_samples}")
    if burn_in < 0:
        raise DomainError(f"burn_in must be >= 0, got {burn_in}")
    if not 0 <= seed < 2**64:
        raise DomainError(f"seed must fit in 64 bits, got {seed}")
    workers = _resolve_workers(workers)
    m = mp.m
    table = _power_table(m)

    sizes = [CHUNK_SIZE] * (n_samples // CHUNK_SIZE)
    if n_samples % CHUNK_SIZE:
        sizes.append(n_samples % CHUNK_SIZE)

    def job(idx_size: tuple[int, int]) -> np.ndarray:
        idx, size = idx_size
        return _chunk_counts(seed, idx, size, burn_in, m, table)

    jobs = list(enumerate(sizes))
    if workers == 1:
        partials = [job(js) for js in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(job, jobs))

    width = max(p.shape[0] for p in partials)
    total = np.zeros(width, dtype=np.int64)
    for p in partials:  # fixed merge order
        total[: p.shape[0]] += p

    max_digit = int(np.max(np.nonzero(total)[0])) if total.any() else 0
    counts = {i: int(total[i]) for i in range(max_digit + 1)}
    expected = {
        i: digit_probability(i, mp) for i in range(max(max_digit, DEFAULT_POOL_ABOVE) + 1)
    }
    max_err = max(abs(counts.get(i, 0) / n_samples - p) for i, p in expected.items())
    chi = _pearson(counts, n_samples, mp, DEFAULT_POOL_ABOVE)
    return DigitLawReport(
        m=m,
        n_samples=n_samples,
        burn_in=burn_in,
        seed=seed,
        counts=counts,
        expected=expected,
        chi_square=chi.chi_square,
        max_abs_freq_error=max_err,
    )


def digit_law_test(report: DigitLawReport, pool_above: int = DEFAULT_POOL_ABOVE) -> ChiSquareResult:
    """Pearson test of the report's counts against the invariant digit law.

    Digits >= pool_above are merged into one tail cell (their expected
    counts decay like m^-i and chi-square cells need mass).  Raises
    DomainError when a pooled cell still expects fewer than 5 counts.
    """
    if pool_above < 1:
        raise DomainError(f"pool_above must be >= 1, got {pool_above}")
    mp = MeasureParams.for_base(report.m)
    return _pearson(report.counts, report.n_samples, mp, pool_above)
