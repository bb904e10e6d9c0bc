import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmcmax import (
    EULER_GAMMA,
    MaxCdfApprox,
    Order,
    QueueParams,
    UnstableQueueError,
    ValidationError,
    cdf_high_order,
    cdf_low_order,
    clump_rate_constant,
    gumbel_moments,
    mean_estimate,
    pmf,
)

from .conftest import PAPER_C, paper_params, random_stable


def displayed_clump_constant(c, lam, mu):
    """The five hand-written specializations, term for term."""
    if c == 1:
        return lam * (mu - lam) ** 2 / mu**2
    if c == 2:
        return lam * (2 * mu - lam) ** 2 / (mu * (2 * mu + lam))
    if c == 3:
        return 3 * lam * (3 * mu - lam) ** 2 / (6 * mu**2 + 4 * lam * mu + lam**2)
    if c == 4:
        return 16 * lam * mu * (4 * mu - lam) ** 2 / (
            24 * mu**3 + 18 * lam * mu**2 + 6 * lam**2 * mu + lam**3)
    if c == 5:
        return 125 * lam * mu**2 * (5 * mu - lam) ** 2 / (
            120 * mu**4 + 96 * lam * mu**3 + 36 * lam**2 * mu**2 + 8 * lam**3 * mu + lam**4)
    raise ValueError(c)


def displayed_log_argument(c, lam, mu):
    """Argument of the logarithm in the five hand-written mean formulas."""
    if c == 1:
        return lam**2 * (mu - lam) ** 2 / mu**3
    if c == 2:
        return lam**2 * (2 * mu - lam) ** 2 / (2 * mu**2 * (2 * mu + lam))
    if c == 3:
        return lam**2 * (3 * mu - lam) ** 2 / (mu * (6 * mu**2 + 4 * lam * mu + lam**2))
    if c == 4:
        return 4 * lam**2 * (4 * mu - lam) ** 2 / (24 * mu**3 + 18 * lam * mu**2 + 6 * lam**2 * mu + lam**3)
    if c == 5:
        return 25 * lam**2 * mu * (5 * mu - lam) ** 2 / (
            120 * mu**4 + 96 * lam * mu**3 + 36 * lam**2 * mu**2 + 8 * lam**3 * mu + lam**4)
    raise ValueError(c)


def literal_high_order(c, lam, mu, n, m, dps=60):
    """High-order CDF evaluated verbatim in the real offset h, at high precision."""
    with mp.workdps(dps):
        lam, mu, n = mp.mpf(lam), mp.mpf(mu), mp.mpf(n)
        h = m - mp.log(n) / mp.log(c * mu / lam)
        s = mp.fsum(mp.factorial(j) * mp.binomial(c - 1, j - 1) * lam ** (c - j) * mu ** (j - 1)
                    for j in range(1, c + 1))
        brace = n * lam ** (c - 1) * (c * mu) ** (h + 1) - lam ** (h + 1) * (c * mu) ** (c - 1)
        if brace <= 0:
            return 0.0
        num = n * mp.mpf(c) ** (c - 2) * lam ** (h + c + 1) * mu ** (c - 3) * (c * mu - lam) ** 2
        return float(mp.exp(-num / (brace * s)))


def literal_low_order(c, lam, mu, n, m, dps=60):
    with mp.workdps(dps):
        lam, mu, n = mp.mpf(lam), mp.mpf(mu), mp.mpf(n)
        h = m - mp.log(n) / mp.log(c * mu / lam)
        s = mp.fsum(mp.factorial(j) * mp.binomial(c - 1, j - 1) * lam ** (c - j) * mu ** (j - 1)
                    for j in range(1, c + 1))
        big_b = mp.mpf(c) ** (c - 2) * lam * mu ** (c - 3) * (c * mu - lam) ** 2 / s
        return float(mp.exp(-big_b * (lam / (c * mu)) ** (h + 1)))


class TestClumpRate:
    def test_c1_hand_value(self):
        assert clump_rate_constant(QueueParams(1, 1 / 3, 1 / 2)) == pytest.approx(1 / 27, rel=1e-14)

    def test_c2_hand_value(self):
        assert clump_rate_constant(QueueParams(2, 1 / 3, 1 / 4)) == pytest.approx(2 / 45, rel=1e-14)

    @pytest.mark.parametrize("c", PAPER_C)
    def test_general_matches_displayed(self, c, rng):
        for _ in range(200):
            p = random_stable(rng, c)
            assert clump_rate_constant(p) == pytest.approx(
                displayed_clump_constant(c, p.lam, p.mu), rel=1e-14)

    def test_unstable(self):
        with pytest.raises(UnstableQueueError):
            clump_rate_constant(QueueParams(1, 1.0, 0.5))


class TestLowOrder:
    def test_c1_n1000_m20(self):
        approx = MaxCdfApprox(QueueParams(1, 1 / 3, 1 / 2), 1000)
        assert cdf_low_order(approx, 20) == pytest.approx(0.99260210115860255588, rel=1e-13)

    def test_pmf_at_zero_is_tiny(self):
        approx = MaxCdfApprox(QueueParams(1, 1 / 3, 1 / 2), 1000)
        # exp(-(1/27) * 1000 * (2/3)), from 50-digit arithmetic
        assert pmf(approx, 0) == pytest.approx(1.8909474471301274597e-11, rel=1e-12)

    def test_tends_to_one(self, paper_config):
        approx = MaxCdfApprox(paper_config, 1000)
        assert approx.cdf(400) == 1.0
        assert 1 - approx.cdf(100) < 1e-12

    def test_doubling_horizon_squares(self):
        p = QueueParams(1, 1 / 3, 1 / 2)
        a1, a2 = MaxCdfApprox(p, 1000), MaxCdfApprox(p, 2000)
        assert a2.cdf(20) == pytest.approx(0.98525893122447266141, rel=1e-13)
        for m in range(0, 60):
            assert a2.cdf(m) == pytest.approx(a1.cdf(m) ** 2, rel=1e-12, abs=1e-300)

    def test_power_of_unit_horizon(self, paper_config):
        unit = MaxCdfApprox(paper_config, 1.0)
        for n in (7.0, 1000.0, 2500.0):
            a = MaxCdfApprox(paper_config, n)
            for m in range(10, 60):
                assert a.cdf(m) == pytest.approx(unit.cdf(m) ** n, rel=1e-10)

    def test_strictly_increasing(self, paper_config):
        a = MaxCdfApprox(paper_config, 1000)
        values = [a.cdf(m) for m in range(0, 80)]
        assert np.all(np.diff(values) > 0)

    @pytest.mark.parametrize("c", PAPER_C)
    def test_matches_literal_formula(self, c):
        p = paper_params(c)
        a = MaxCdfApprox(p, 1000)
        for m in range(0, 60, 3):
            assert a.cdf(m) == pytest.approx(literal_low_order(c, p.lam, p.mu, 1000, m), rel=1e-11)

    def test_no_underflow_in_exponent(self):
        a = MaxCdfApprox(QueueParams(1, 1 / 3, 1 / 2), 1e300)
        assert a.exponent(2000) > 0


class TestHighOrder:
    @pytest.mark.parametrize("c", PAPER_C)
    @pytest.mark.parametrize("n", [10.0, 1000.0, 2500.0])
    def test_matches_literal_formula(self, c, n):
        p = paper_params(c)
        a = MaxCdfApprox(p, n, Order.HIGH)
        for m in range(0, 60):
            assert a.cdf(m) == pytest.approx(literal_high_order(c, p.lam, p.mu, n, m),
                                             rel=1e-10, abs=1e-300)

    @settings(max_examples=150, deadline=None)
    @given(c=st.integers(1, 6), rho=st.floats(0.05, 0.95), mu=st.floats(0.01, 10),
           n=st.floats(2, 1e6), m=st.integers(0, 80))
    def test_matches_literal_random(self, c, rho, mu, n, m):
        p = QueueParams(c, rho * c * mu, mu)
        got = MaxCdfApprox(p, n, Order.HIGH).cdf(m)
        assert got == pytest.approx(literal_high_order(c, p.lam, p.mu, n, m), rel=1e-9, abs=1e-300)

    def test_large_n_reduces_to_low(self, paper_config):
        low = MaxCdfApprox(paper_config, 1e9, Order.LOW)
        high = MaxCdfApprox(paper_config, 1e9, Order.HIGH)
        for m in range(0, 121):
            assert abs(high.cdf(m) - low.cdf(m)) < 1e-6

    def test_below_low_near_mode(self):
        p = QueueParams(1, 1 / 3, 1 / 2)
        low, high = MaxCdfApprox(p, 1000), MaxCdfApprox(p, 1000, Order.HIGH)
        for m in range(5, 16):
            assert cdf_high_order(high, m) < cdf_low_order(low, m)

    def test_regime(self):
        p = paper_params(4)
        high = MaxCdfApprox(p, 1000, Order.HIGH)
        assert [high.in_regime(m) for m in range(5)] == [False, False, False, True, True]
        assert high.cdf(2) == 0.0
        assert 0 < high.cdf(40) < 1
        flags = high.table(10).flags
        assert len(flags) == 1 and "m=0..2" in flags[0]

    def test_in_regime_when_bracket_term_positive(self, paper_config):
        # large m: (lam/(c mu))^(h+1) < 1/n, the bracket is positive
        a = MaxCdfApprox(paper_config, 1000, Order.HIGH)
        for m in range(20, 40):
            assert a.in_regime(m) and 0 < a.cdf(m) < 1


class TestPmf:
    def test_telescopes_to_cdf(self, paper_config):
        for order in Order:
            a = MaxCdfApprox(paper_config, 1000, order)
            tab = a.table(70)
            assert math.fsum(tab.pmf) == pytest.approx(a.cdf(70), abs=1e-14)
            assert math.fsum(pmf(a, m) for m in range(71)) == pytest.approx(a.cdf(70), abs=1e-14)
            assert tab.pmf[0] == a.cdf(0)

    def test_low_order_unimodal(self, paper_config):
        p = MaxCdfApprox(paper_config, 1000).table(60).pmf
        mode = int(np.argmax(p))
        assert np.all(np.diff(p[: mode + 1]) >= 0)
        assert np.all(np.diff(p[mode:]) <= 0)

    def test_nonnegative(self, paper_config):
        for order in Order:
            assert np.all(MaxCdfApprox(paper_config, 2500, order).table(80).pmf >= 0)

    def test_support_end(self, paper_config):
        a = MaxCdfApprox(paper_config, 1000)
        end = a.support_end(1e-9)
        assert a.cdf(end) > 1 - 1e-9 >= a.cdf(end - 1)

    @pytest.mark.parametrize("m", [-1, 1.5, True])
    def test_bad_level(self, m):
        with pytest.raises(ValidationError):
            MaxCdfApprox(paper_params(1), 10).cdf(m)


class TestGumbelMoments:
    @pytest.mark.parametrize("c,intercept", [
        (1, -7.2049448811), (2, -6.7552845943), (3, -6.2049448811),
        (4, -5.6015876099), (5, -4.9642624490),
    ])
    def test_paper_constants(self, c, intercept):
        g = gumbel_moments(paper_params(c))
        assert g.slope == pytest.approx(2.4663034623, abs=1e-9)
        assert g.intercept == pytest.approx(intercept, abs=1e-9)

    @pytest.mark.parametrize("c", PAPER_C)
    def test_intercept_uses_displayed_log_argument(self, c, rng):
        for _ in range(50):
            p = random_stable(rng, c)
            log_r = math.log(c * p.mu / p.lam)
            expected = (EULER_GAMMA + math.log(displayed_log_argument(c, p.lam, p.mu))) / log_r + 0.5
            assert gumbel_moments(p).intercept == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_variance(self, paper_config):
        g = gumbel_moments(paper_config)
        assert g.variance == pytest.approx((math.pi**2 / 6) / math.log(1.5) ** 2 + 1 / 12, rel=1e-14)
        assert g.variance == pytest.approx(10.089, abs=5e-4)

    def test_invariants(self, rng):
        for c in range(1, 9):
            g = gumbel_moments(random_stable(rng, c))
            assert g.slope > 0 and g.variance > 1 / 12

    def test_mean_estimate(self):
        p = QueueParams(1, 1 / 3, 1 / 2)
        assert mean_estimate(p, 1000) == pytest.approx(2.4663034623 * math.log(1000) - 7.2049448811, abs=1e-8)
        assert mean_estimate(p, 1000) == pytest.approx(9.831, abs=1e-3)
        assert mean_estimate(p, 1) == gumbel_moments(p).intercept
        q = paper_params(2)
        assert mean_estimate(q, 1000) == pytest.approx(2.4663034623 * math.log(1000) - 6.7552845943, abs=1e-8)

    def test_mean_minus_slope_term_constant(self, paper_config):
        g = gumbel_moments(paper_config)
        rest = [mean_estimate(paper_config, n) - g.slope * math.log(n) for n in (2, 50, 1e3, 1e7)]
        assert np.ptp(rest) < 1e-12

    def test_mean_matches_low_order_pmf_mean(self, paper_config):
        # the moment estimates approximate the mean of the discrete Gumbel law itself
        n = 1e6
        p = MaxCdfApprox(paper_config, n).table(200).pmf
        m = np.arange(len(p))
        assert float((m * p).sum()) == pytest.approx(mean_estimate(paper_config, n), abs=0.05)
