import math
from fractions import Fraction

import numpy as np
import pytest

from chancf import (
    DegenerateInputError,
    DensityGrid,
    DomainError,
    MeasureParams,
    audit_final_chain,
    contraction_audit,
    delta,
    density_transfer,
    qm,
)

MP2 = MeasureParams.for_base(2)


def series_oracle(m, terms=61):
    """Independent high-precision summation in exact rationals."""
    total = Fraction(0)
    for i in range(terms):
        total += Fraction(1, (m ** (i + 1) + m - 1) ** 2)
    return (m - 1) ** 2 * (m * m + 1) * total


class TestDelta:
    def test_zero_index(self):
        for m in (2, 3, 10):
            assert delta(0, MeasureParams.for_base(m)) == 0.0

    def test_index_one(self):
        for m in (2, 3, 10):
            mp = MeasureParams.for_base(m)
            assert abs(delta(1, mp) - (m - 1) / m**2) < 1e-16

    def test_example_base2(self):
        assert delta(2, MP2) == 3 / 16

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            delta(-1, MP2)


class TestQm:
    def test_base2_value_and_contraction(self):
        bound = qm(2)
        oracle = float(series_oracle(2))
        assert abs(bound.value - oracle) <= bound.tail_bound + 1e-15
        assert 0.8403 <= bound.value <= 0.8413
        assert bound.below_one

    def test_base3_exceeds_one(self):
        bound = qm(3)
        oracle = float(series_oracle(3))
        assert abs(bound.value - oracle) <= bound.tail_bound + 1e-15
        assert 1.97 <= bound.value <= 2.00
        assert not bound.below_one

    @pytest.mark.parametrize("m", range(2, 17))
    def test_nested_truncation_consistency(self, m):
        tight = qm(m, 1e-12)
        loose = qm(m, 1e-6)
        assert abs(tight.value - loose.value) < 1e-6
        assert tight.truncation_index >= loose.truncation_index

    @pytest.mark.parametrize("m", [2, 3, 7])
    def test_certified_interval(self, m):
        bound = qm(m, 1e-10)
        prefactor = (m - 1) ** 2 * (m * m + 1)
        refined = prefactor * math.fsum(
            1.0 / (m ** (i + 1) + m - 1) ** 2
            for i in range(4 * (bound.truncation_index + 1))
        )
        assert bound.value <= refined <= bound.value + bound.tail_bound

    def test_partial_sums_strictly_increase(self):
        m = 2
        prefactor = (m - 1) ** 2 * (m * m + 1)
        partials = np.cumsum([1.0 / (m ** (i + 1) + m - 1) ** 2 for i in range(25)])
        assert np.all(np.diff(prefactor * partials) > 0)

    def test_only_base2_contracts(self):
        assert qm(2).below_one
        assert all(not qm(m).below_one for m in range(3, 17))

    def test_domain(self):
        with pytest.raises(DomainError):
            qm(1)
        with pytest.raises(DomainError):
            qm(2, tol=0.0)
        with pytest.raises(DomainError):
            qm(2.0)


class TestAuditFinalChain:
    def test_base2_exposes_the_discrepancy(self):
        audit = audit_final_chain(2)
        # printed chain: 5 * (1/9 + 1/5 + 1/40) = 121/72
        assert audit.printed_value == float(Fraction(121, 72))
        assert not audit.printed_at_most_one
        # squared middle term instead: 5 * (1/9 + 1/25 + 1/40) = 317/360
        assert audit.squared_value == float(Fraction(317, 360))
        assert audit.squared_at_most_one
        assert audit.series.below_one
        assert audit.verdict == "printed-chain-exceeds-one-series-contracts"

    def test_base3_fails_both_ways(self):
        audit = audit_final_chain(3)
        assert audit.printed_value > 1.0
        assert not audit.series.below_one
        assert audit.verdict == "printed-chain-exceeds-one-series-exceeds-one"

    def test_terms_match_definitions(self):
        audit = audit_final_chain(4)
        assert audit.prefactor == 9 * 17
        assert audit.term_first == 1.0 / 49.0
        assert audit.term_middle_printed == 1.0 / 19.0
        assert audit.term_middle_squared == 1.0 / 361.0
        assert audit.term_tail == 1.0 / (64 * 27 * 17)

    def test_both_numbers_always_reported(self):
        for m in (2, 3, 5, 9):
            audit = audit_final_chain(m)
            assert audit.printed_value > 0 and audit.series.value > 0
            assert isinstance(audit.verdict, str)

    def test_domain(self):
        with pytest.raises(DomainError):
            audit_final_chain(1)


class TestContractionAudit:
    def test_single_step_base2(self):
        f = DensityGrid.lebesgue(MP2, 4097)
        audit = contraction_audit(MP2, f)
        assert audit.m_before == pytest.approx(5.0, abs=1e-6)
        assert audit.ratio <= qm(2).value + 1e-3
        assert audit.ratio == pytest.approx(audit.m_after / audit.m_before)

    def test_ten_step_chain_base2(self):
        bound = qm(2).value + 1e-3
        f = DensityGrid.lebesgue(MP2, 4097)
        for _ in range(10):
            audit = contraction_audit(MP2, f)
            assert audit.ratio <= bound
            f = density_transfer(f, MP2, 1e-12)

    def test_constant_is_degenerate(self):
        with pytest.raises(DegenerateInputError):
            contraction_audit(MP2, DensityGrid.constant(MP2, 1025))

    def test_base3_informational(self):
        mp3 = MeasureParams.for_base(3)
        audit = contraction_audit(mp3, DensityGrid.lebesgue(mp3, 4097))
        assert audit.ratio > 0  # no assertion against the >1 series bound
