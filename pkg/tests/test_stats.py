import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from froglab import stats
from froglab.oracle import exact_law


class TestNormalCdf:
    def test_zero(self):
        assert stats.normal_cdf(0.0) == 0.5

    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0, 3.0])
    def test_symmetry(self, x):
        assert stats.normal_cdf(-x) == pytest.approx(1 - stats.normal_cdf(x), abs=1e-12)

    def test_196(self):
        assert stats.normal_cdf(1.96) == pytest.approx(0.9750021, abs=1e-6)

    @given(st.floats(-8, 8))
    def test_against_mpmath(self, x):
        with mpmath.workdps(40):
            ref = float(mpmath.ncdf(x))
        assert abs(stats.normal_cdf(x) - ref) <= 1e-7

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            stats.normal_cdf(float("nan"))


class TestKs:
    def test_single_sample_at_zero(self):
        assert stats.ks_statistic([0.0]) == pytest.approx(0.5)

    def test_quantile_midpoints(self):
        m = 200
        z = [float(mpmath.sqrt(2) * mpmath.erfinv(2 * (i - 0.5) / m - 1)) for i in range(1, m + 1)]
        assert stats.ks_statistic(z) == pytest.approx(0.5 / m, abs=1e-9)

    def test_permutation_invariance_and_shift(self):
        z = np.random.default_rng(3).standard_normal(500)
        d = stats.ks_statistic(z)
        assert stats.ks_statistic(z[::-1]) == d
        assert stats.ks_statistic(z + 0.1) != d
        assert 0 <= d <= 1

    def test_empty(self):
        with pytest.raises(ValueError):
            stats.ks_statistic([])


class TestStandardize:
    def test_example(self, constants):
        assert stats.standardize(8000, 10 ** 4, constants) == pytest.approx(0.603, abs=0.01)

    def test_centering_and_scale(self, constants):
        n = 10 ** 4
        tol = 1 / (constants.sigma * math.sqrt(n))
        assert abs(stats.standardize(round(constants.q * n), n, constants)) <= tol
        v = round(constants.q * n + constants.sigma * math.sqrt(n))
        assert stats.standardize(v, n, constants) == pytest.approx(1.0, abs=0.02)

    def test_linear_extension(self, constants):
        n = 12345
        for t in (-2.0, 0.5, 3.0):
            v = constants.q * n + constants.sigma * math.sqrt(n) * t
            assert stats.standardize(v, n, constants) == pytest.approx(t, abs=1e-12)

    def test_monotone(self, constants):
        z = stats.standardize(np.arange(1, 101), 100, constants)
        assert np.all(np.diff(z) > 0)


def test_moments():
    mean, sd, skew = stats.moments([1.0, 2.0, 3.0, 10.0])
    assert mean == 4.0
    assert sd == pytest.approx(np.std([1, 2, 3, 10], ddof=1))
    assert skew > 0
    assert stats.moments([5.0, 5.0])[1:] == (0.0, 0.0)


class TestOracleComparison:
    def test_proportional_counts(self):
        law = exact_law(3)
        counts = np.array([9, 8, 10]) * 1000
        tv, p = stats.compare_to_oracle(counts, law)
        assert tv == pytest.approx(0.0, abs=1e-15)
        assert p == pytest.approx(1.0)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            stats.compare_to_oracle(np.ones(4), exact_law(3))

    def test_pooling(self):
        e, o = stats.pooled_cells([1, 2, 3, 10, 1, 1], [0, 1, 2, 3, 4, 5])
        assert e.tolist() == [6, 12] and o.tolist() == [3, 12]
        assert all(x >= 5 for x in e)

    def test_n3_chain(self):
        v = stats.sample_v(3, 10 ** 5, 1, "chain")
        tv, p = stats.compare_to_oracle(stats.histogram(v, 3), exact_law(3))
        assert tv <= 0.01

    def test_n10_level_mean(self):
        law = exact_law(10)
        v = stats.sample_v(10, 10 ** 5, 5, "level")
        se = math.sqrt(law.variance / v.size)
        assert abs(v.mean() - law.mean) <= 3 * se


class TestExperiments:
    def test_small_clt_deterministic(self):
        a = stats.run_clt_experiment(2000, 500, 9)
        b = stats.run_clt_experiment(2000, 500, 9)
        assert a == b
        assert a.ks >= 0 and a.sd_z >= 0
        d = a.to_dict()
        assert d["experiment"] == "clt" and d["pass"] == a.passed

    def test_clt_rejects_few_replicates(self):
        with pytest.raises(ValueError):
            stats.run_clt_experiment(100, 99, 1)

    def test_thresholds_decide_pass(self):
        v = stats.sample_v(5000, 400, 2, "level")
        loose = stats.clt_report(v, 5000, 2, "level", stats.CltThresholds(10, 10, 1))[0]
        tight = stats.clt_report(v, 5000, 2, "level", stats.CltThresholds(1e-9, 1e-9, 1e-9))[0]
        assert loose.passed and not tight.passed

    def test_events_small(self):
        r = stats.run_event_experiment(400, 200, 3)
        for f in (r.freq_b0, r.freq_b1, r.freq_b2):
            assert 0 <= f <= 1
        assert r.tau_violations <= r.tau_checked <= r.replicates
        with pytest.raises(ValueError):
            stats.run_event_experiment(15, 10, 1)
