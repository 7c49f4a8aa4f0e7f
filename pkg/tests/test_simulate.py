import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from froglab import _backend, analysis, simulate
from froglab.rng import RngStream
from froglab.simulate import ChainState, chain_step, sample_geometric


class TestChainStep:
    def test_single_vertex_dies(self):
        s = chain_step(ChainState.initial(1), 0.0)
        assert (s.active, s.dead, s.inactive, s.jumps) == (0, 1, 0, 1)

    def test_activation_below_inactive_fraction(self):
        s = chain_step(ChainState(1, 0, 1, 0, 2), 0.3)
        assert (s.active, s.dead, s.inactive) == (2, 0, 0)

    def test_no_inactives_forces_death(self):
        s = chain_step(ChainState(2, 1, 0, 4, 3), 0.99)
        assert (s.active, s.dead, s.inactive) == (1, 2, 0)

    def test_absorbed_state(self):
        with pytest.raises(RuntimeError):
            chain_step(ChainState(0, 3, 0, 5, 3), 0.5)

    @given(st.integers(1, 50), st.data())
    def test_invariants(self, n, data):
        state = ChainState.initial(n)
        visited = state.visited
        while state.active > 0:
            nxt = chain_step(state, data.draw(st.floats(0.0, 1.0, exclude_max=True)))
            assert nxt.active + nxt.dead + nxt.inactive == n
            assert abs(nxt.active - state.active) == 1
            assert nxt.visited >= visited
            visited = nxt.visited
            state = nxt
        assert state.jumps == 2 * state.dead - 1 <= 2 * n - 1


class TestGeometric:
    def test_degenerate(self):
        assert sample_geometric(1.0, 0.7) == 1

    def test_inversion_arithmetic(self):
        assert math.log(0.9) / math.log(0.5) == pytest.approx(0.152, abs=1e-3)
        assert sample_geometric(0.5, 0.1) == 1
        assert sample_geometric(0.5, 0.8) == math.ceil(math.log(0.2) / math.log(0.5))

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            sample_geometric(0.0, 0.5)
        with pytest.raises(ValueError):
            sample_geometric(0.5, 0.0)

    def test_backends_agree(self):
        for name in _backend.available():
            k = _backend.load(name)
            assert k.sample_geometric(0.3, 0.6543) == math.ceil(math.log1p(-0.6543) / math.log1p(-0.3))

    def test_mean(self):
        u = RngStream(2024, 0).draw(10 ** 6)
        draws = np.fromiter((sample_geometric(0.2, x) for x in u), dtype=np.float64)
        assert draws.min() >= 1
        assert draws.mean() == pytest.approx(5.0, abs=0.03)

    def test_pmf(self):
        u = RngStream(7, 3).draw(200_000)
        draws = np.fromiter((sample_geometric(0.4, x) for x in u), dtype=np.int64)
        for k in (1, 2, 3, 4):
            expected = 0.6 ** (k - 1) * 0.4
            se = math.sqrt(expected * (1 - expected) / draws.size)
            assert abs((draws == k).mean() - expected) < 4 * se


class TestRuns:
    def test_n1(self, kernels):
        for rep in range(20):
            stream = RngStream(5, rep)
            for out in (simulate.run_chain(1, stream, kernels=kernels),
                        simulate.run_level(1, stream, kernels=kernels)):
                assert (out.v_inf, out.rho) == (1, 1)

    def test_n2_outcomes(self, kernels):
        v, rho, _ = simulate.chain_batch(2, 11, 20_000, kernels=kernels)
        assert set(zip(v.tolist(), rho.tolist())) == {(1, 1), (2, 3)}
        assert (v == 1).mean() == pytest.approx(0.5, abs=0.015)

    @pytest.mark.parametrize("n", [1, 2, 5, 40, 300])
    def test_counting_identity(self, kernels, n):
        for batch in (simulate.chain_batch(n, 3, 500, kernels=kernels),
                      simulate.level_batch(n, 3, 500, kernels=kernels)):
            v, rho = batch[0], batch[1]
            assert np.all(rho == 2 * v - 1)
            assert np.all((1 <= v) & (v <= n))

    def test_stepwise_reference_matches_kernel(self, kernels):
        for n in (1, 3, 17, 250):
            for rep in range(10):
                stream = RngStream(99, rep)
                assert simulate.run_chain_stepwise(n, stream) == simulate.run_chain(n, stream, kernels=kernels)

    def test_first_level_death(self, kernels):
        n = 8
        v, _, _ = simulate.chain_batch(n, 1, 80_000, kernels=kernels)
        p = 1 / n
        assert abs((v == 1).mean() - p) < 4 * math.sqrt(p * (1 - p) / v.size)

    def test_b0_frequency_matches_product_formula(self):
        n = 16  # ceil(n^{1/4}) = 2 jumps must both activate
        _, _, b0 = simulate.chain_batch(n, 8, 100_000)
        expected = (15 / 16) * (14 / 16)
        assert abs(b0.mean() - expected) < 4 * math.sqrt(expected * (1 - expected) / b0.size)

    def test_b0_untracked(self):
        assert simulate.run_chain(50, RngStream(1, 1), track_b0=False).b0 is None


class TestBackends:
    """The pure-Python fallback reproduces the compiled kernels bit for bit."""

    pytestmark = pytest.mark.skipif(len(_backend.available()) < 2, reason="compiled core not built")

    @pytest.mark.parametrize("n", [1, 2, 3, 10, 257])
    def test_chain_level(self, n):
        c, p = _backend.load("compiled"), _backend.load("python")
        for fn in (simulate.chain_batch, simulate.level_batch):
            a = fn(n, 2 ** 63 + 5, 300, kernels=c)
            b = fn(n, 2 ** 63 + 5, 300, kernels=p)
            for x, y in zip(a, b):
                np.testing.assert_array_equal(x, y)

    @pytest.mark.parametrize("n", [16, 500])
    def test_ideal(self, n):
        a = simulate.ideal_batch(n, 4, 40, kernels=_backend.load("compiled"))
        b = simulate.ideal_batch(n, 4, 40, kernels=_backend.load("python"))
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)

    def test_exact_pmf(self):
        a = _backend.load("compiled").exact_pmf(400)
        b = _backend.load("python").exact_pmf(400)
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-15)


def test_thread_schedule_does_not_change_results():
    a = simulate.level_batch(500, 42, 3000, threads=1)
    b = simulate.level_batch(500, 42, 3000, threads=4)
    c = np.concatenate([simulate.level_batch(500, 42, 1000, start=s)[0] for s in (0, 1000, 2000)])
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[0], c)


def ideal_reference(n, stream, c):
    """Plain re-derivation of the ideal outcome from the substream."""
    qn = math.floor(c.q * n)
    width = analysis.b2_window(n, c.q)
    slack = math.log(n) ** 3 * n ** 0.25
    draws = stream.uniforms()
    w = [0]
    drift = [0.0]
    tau = None
    s = 0
    while tau is None or s < qn + width:
        s += 1
        if s >= n:
            tau = tau or n
            break
        x = sample_geometric((n - s) / n, next(draws))
        w.append(w[-1] + 2 - x)
        drift.append(drift[-1] + 2 - 1 / (1 - s / n))
        if tau is None and w[-1] <= 0:
            tau = s
    lo = analysis.fourth_root_ceil(n)
    b1 = all(abs(w[s] - drift[s]) <= math.log(s) * math.sqrt(s) for s in range(lo, qn + 1))
    up = all(abs(w[qn + i] - w[qn] - i * c.mu_r) <= slack for i in range(width + 1))
    down = all(abs(w[qn - 1] - w[qn - 1 - i] - i * c.mu_r) <= slack for i in range(width + 1))
    return tau, w[qn] - drift[qn], b1, up and down


class TestIdeal:
    @pytest.mark.parametrize("n", [16, 100, 3000])
    def test_matches_reference(self, n, constants, kernels):
        for rep in range(6):
            stream = RngStream(31, rep)
            out = simulate.run_ideal(n, stream, constants, kernels=kernels)
            tau, wstar, b1, b2 = ideal_reference(n, stream, constants)
            assert (out.tau, out.b1, out.b2) == (tau, b1, b2)
            assert out.w_star_qn == pytest.approx(wstar, abs=1e-6)
            assert out.tau_predicted == pytest.approx(constants.q * n - wstar / constants.mu_r, abs=1e-6)

    @pytest.mark.parametrize("n", [16, 64, 1000, 20000])
    def test_zero_coincides_with_level_outcome(self, n, kernels):
        """Shared substream: the ideal walk's first zero is exactly v_inf."""
        tau = simulate.ideal_batch(n, 77, 300, kernels=kernels)[0]
        v = simulate.level_batch(n, 77, 300, kernels=kernels)[0]
        np.testing.assert_array_equal(tau, v)

    def test_step_mean_matches_drift(self):
        n = 10 ** 4
        s = math.floor(analysis.solve_q() * n)
        p = (n - s) / n
        u = RngStream(5, 5).draw(10 ** 6)
        y = 2 - np.fromiter((sample_geometric(p, x) for x in u), dtype=np.float64)
        se = y.std() / math.sqrt(y.size)
        assert abs(y.mean() - analysis.drift_mu(s, n)) < 3 * se

    def test_tau_positive_and_small_n_rejected(self, constants):
        tau = simulate.ideal_batch(100, 1, 200, constants)[0]
        assert tau.min() >= 1
        with pytest.raises(ValueError):
            simulate.run_ideal(15, RngStream(0, 0), constants)


def test_reproducible_outcomes():
    s = RngStream(123, 456)
    assert simulate.run_chain(400, s) == simulate.run_chain(400, s)
    assert simulate.run_ideal(400, s) == simulate.run_ideal(400, s)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 200), st.integers(0, 2 ** 64 - 1), st.integers(0, 2 ** 40))
def test_level_and_chain_terminate_within_bounds(n, seed, rep):
    stream = RngStream(seed, rep)
    for out in (simulate.run_chain(n, stream), simulate.run_level(n, stream)):
        assert 1 <= out.v_inf <= n
        assert out.rho == 2 * out.v_inf - 1 <= 2 * n - 1


class TestCsv:
    def test_chain_rows(self):
        buf = io.StringIO()
        simulate.write_csv(buf, "chain", simulate.iter_rows("chain", 10, 1, 3))
        lines = buf.getvalue().splitlines()
        assert lines[0] == "replicate,n,v_inf,rho,b0"
        assert len(lines) == 4
        rep, n, v, rho, b0 = lines[1].split(",")
        assert (rep, n) == ("0", "10") and int(rho) == 2 * int(v) - 1 and b0 in ("0", "1")

    def test_ideal_rows(self):
        buf = io.StringIO()
        simulate.write_csv(buf, "ideal", simulate.iter_rows("ideal", 100, 1, 2))
        lines = buf.getvalue().splitlines()
        assert lines[0] == "replicate,n,tau,w_star_qn,tau_predicted,b1,b2"
        fields = lines[2].split(",")
        assert fields[0] == "1" and float(fields[4]) > 0 and fields[5] in ("0", "1")

    def test_block_boundaries_do_not_matter(self):
        a = list(simulate.iter_rows("level", 50, 9, 10, block=3))
        b = list(simulate.iter_rows("level", 50, 9, 10, block=100))
        assert a == b
