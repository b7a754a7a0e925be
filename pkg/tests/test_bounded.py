import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unseenbound import (
    BoundedConfig,
    IncidenceSample,
    bonferroni_bound,
    bounded_dd_bound,
    homogeneous_bound,
    m_b_statistic,
    least_favourable_threshold,
    worst_case_bound,
)

# Frozen values: extended-precision evaluation of the closed forms.
BONF_2000_10000 = 0.006103036322765087
BONF_1000_1500 = 0.010308952660644293
WC_2000_10000 = 0.006102923582335791
HOM_AT_E_QUARTER = 0.679570457114761
DD_ALLZERO_RAW = 0.007712659822984046
LF_THRESHOLD_100_1 = 0.029513049606885343
LF_THRESHOLD_1000_10 = 0.005261453719729520


class TestBonferroni:
    def test_spot_values(self):
        assert bonferroni_bound(2000, 10000, 0.05) == pytest.approx(BONF_2000_10000, abs=1e-12)
        assert bonferroni_bound(1000, 1500, 0.05) == pytest.approx(BONF_1000_1500, abs=1e-12)

    def test_unit_case(self):
        assert bonferroni_bound(1, 1, math.exp(-1)) == pytest.approx(1.0, abs=1e-14)

    def test_invalid_alpha(self):
        for alpha in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValueError, match="alpha"):
                bonferroni_bound(10, 10, alpha)

    @given(
        n=st.integers(1, 10 ** 6),
        M=st.integers(1, 10 ** 6),
        alpha=st.floats(0.001, 0.999),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotonicity(self, n, M, alpha):
        base = bonferroni_bound(n, M, alpha)
        assert bonferroni_bound(n + 1, M, alpha) < base
        assert bonferroni_bound(n, M + 1, alpha) > base
        assert bonferroni_bound(n, M, min(alpha * 1.1, 0.9995)) <= base


class TestWorstCase:
    def test_spot_value(self):
        assert worst_case_bound(2000, 10000, 0.05) == pytest.approx(WC_2000_10000, abs=1e-10)
        assert worst_case_bound(2000, 10000, 0.05) == pytest.approx(0.0061035, abs=1e-6)

    def test_prefactor_is_e(self):
        # (M/alpha)^(1/r) at r = log(M/alpha) is e by construction
        for M, alpha in [(10, 0.5), (10 ** 4, 0.05), (3, 0.013)]:
            r = math.log(M / alpha)
            assert (M / alpha) ** (1.0 / r) == pytest.approx(math.e, rel=1e-12)

    def test_agrees_with_bonferroni_large_n(self):
        wc = worst_case_bound(10 ** 6, 1000, 0.05)
        bf = bonferroni_bound(10 ** 6, 1000, 0.05)
        assert abs(wc / bf - 1.0) <= 1e-5

    def test_scaled_gap_bounded(self):
        # |worst_case - bonferroni| <= C / n^2 over four decades
        gaps = []
        for n in (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6):
            gaps.append(n * n * abs(worst_case_bound(n, 1000, 0.05) - bonferroni_bound(n, 1000, 0.05)))
        assert max(gaps) <= 0.5
        assert gaps == sorted(gaps, reverse=True)


class TestHomogeneous:
    def test_hand_value(self):
        # (1/alpha) * 1/2 * 1/2 with alpha = 1/e gives e/4
        assert homogeneous_bound(1, 1, math.exp(-1), 1.0) == pytest.approx(HOM_AT_E_QUARTER, rel=1e-12)

    def test_never_above_worst_case_at_rstar(self):
        for n, M, alpha in [(2000, 10000, 0.05), (500, 100, 0.1), (10 ** 5, 10 ** 4, 0.01)]:
            r = math.log(M / alpha)
            hom = homogeneous_bound(n, M, alpha, r)
            assert hom <= worst_case_bound(n, M, alpha) + 1e-15

    def test_spot_window(self):
        r = math.log(10000 / 0.05)
        v = homogeneous_bound(2000, 10000, 0.05, r)
        assert 0.0060 < v < 0.0062

    def test_r_below_one_rejected(self):
        with pytest.raises(ValueError, match="r must"):
            homogeneous_bound(10, 10, 0.05, 0.5)


class TestMbStatistic:
    def test_nothing_observed(self):
        s = IncidenceSample(n=10, counts={})
        assert m_b_statistic(s, 100, 2.0) == 100.0

    def test_everything_always_observed(self):
        s = IncidenceSample(n=5, counts={f"s{i}": 5 for i in range(4)})
        assert m_b_statistic(s, 4, 3.0) == 0.0

    def test_hand_value(self):
        s = IncidenceSample(n=4, counts={"a": 2, "b": 4, "c": 0})
        assert m_b_statistic(s, 3, 2.0) == pytest.approx(1.25, abs=1e-15)

    def test_m_smaller_than_distinct_rejected(self):
        s = IncidenceSample(n=4, counts={"a": 1, "b": 1, "c": 1})
        with pytest.raises(ValueError, match="distinct"):
            m_b_statistic(s, 2, 2.0)

    @given(
        counts=st.lists(st.integers(0, 6), min_size=1, max_size=8),
        b=st.floats(1.0, 12.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_range_and_monotonicity(self, counts, b):
        n = 6
        M = len(counts) + 2
        s = IncidenceSample(n=n, counts={f"s{i}": c for i, c in enumerate(counts)})
        val = m_b_statistic(s, M, b)
        assert 0.0 <= val <= M
        # raising any one count never raises the statistic
        for i, c in enumerate(counts):
            if c < n:
                bumped = dict(s.counts)
                bumped[f"s{i}"] = c + 1
                s2 = IncidenceSample(n=n, counts=bumped)
                assert m_b_statistic(s2, M, b) <= val + 1e-12


class TestBoundedDD:
    def test_all_zero_chain(self):
        s = IncidenceSample(n=1000, counts={})
        cfg = BoundedConfig(alpha=0.05, delta=0.0005)
        est = bounded_dd_bound(s, 100, cfg)
        assert est.raw_value == pytest.approx(DD_ALLZERO_RAW, rel=1e-12)
        assert est.diagnostics["eps_corr"] == pytest.approx(6.022398969630174, rel=1e-12)
        assert est.diagnostics["m_b"] == 100.0
        assert est.delta == 0.0005

    def test_m_b_zero_leaves_correction_term(self):
        s = IncidenceSample(n=100, counts={f"s{i}": 100 for i in range(5)})
        cfg = BoundedConfig(alpha=0.05, delta=0.01)
        est = bounded_dd_bound(s, 5, cfg)
        b = math.log(100)
        eps = b * math.sqrt(5 / 100 * math.log(1 / 0.01))
        assert est.raw_value == pytest.approx(math.log(eps / 0.05) / (100 - b), rel=1e-12)

    def test_nothing_seen_dominates_bonferroni(self):
        # m_b = M and a small correction keep the bound above log(M/alpha)/n
        for n, M in [(100, 50), (1000, 100), (5000, 2000)]:
            s = IncidenceSample(n=n, counts={})
            est = bounded_dd_bound(s, M, BoundedConfig(alpha=0.05, delta=0.9))
            assert est.raw_value >= bonferroni_bound(n, M, 0.05)

    def test_counts_growth_never_widens(self):
        gen = np.random.default_rng(8)
        n, M = 50, 30
        counts = gen.integers(0, 20, size=M)
        cfg = BoundedConfig.default()
        s1 = IncidenceSample(n=n, counts={f"s{i}": int(c) for i, c in enumerate(counts)})
        bumped = counts + gen.integers(0, 5, size=M)
        bumped = np.minimum(bumped, n)
        s2 = IncidenceSample(n=n, counts={f"s{i}": int(c) for i, c in enumerate(bumped)})
        assert bounded_dd_bound(s2, M, cfg).raw_value <= bounded_dd_bound(s1, M, cfg).raw_value + 1e-12

    def test_b_must_stay_below_n(self):
        s = IncidenceSample(n=3, counts={"a": 1})
        cfg = BoundedConfig(alpha=0.05, delta=0.01, b_rule="explicit", b=5.0)
        with pytest.raises(ValueError, match="b=5.0 must be < n"):
            bounded_dd_bound(s, 10, cfg)

    def test_reported_clamped_for_tiny_n(self):
        s = IncidenceSample(n=3, counts={})
        est = bounded_dd_bound(s, 1000, BoundedConfig.default())
        assert est.raw_value > 1.0
        assert est.reported_value == 1.0


class TestLeastFavourableThreshold:
    def test_single_category_matches_zero_success_bound(self):
        t = least_favourable_threshold(100, 1, 0.05)
        assert t == pytest.approx(LF_THRESHOLD_100_1, rel=1e-12)
        assert t == pytest.approx(1 - 0.05 ** 0.01, rel=1e-12)

    def test_spot_value_and_asymptote(self):
        t = least_favourable_threshold(1000, 10, 0.05)
        assert t == pytest.approx(LF_THRESHOLD_1000_10, rel=1e-12)
        assert math.log(10 / 0.05) / 1000 == pytest.approx(0.0052983, abs=1e-7)
        assert t < math.log(10 / 0.05) / 1000

    @pytest.mark.parametrize("n,k0", [(100, 1), (1000, 10), (10000, 100)])
    @pytest.mark.parametrize("alpha", [0.01, 0.05])
    def test_defining_identity(self, n, k0, alpha):
        t = least_favourable_threshold(n, k0, alpha)
        cover = (-math.expm1(n * math.log1p(-t))) ** k0
        assert cover == pytest.approx(1 - alpha, abs=1e-12)

    def test_as_printed_variant_not_coverage_exact(self):
        # the alternate display solves a different equation once k0 > 1
        n, k0, alpha = 1000, 10, 0.05
        t = least_favourable_threshold(n, k0, alpha, as_printed=True)
        cover = (-math.expm1(n * math.log1p(-t))) ** k0
        assert abs(cover - (1 - alpha)) > 1e-3
