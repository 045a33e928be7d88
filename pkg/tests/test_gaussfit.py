import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from drivestyle.errors import NonPositiveWidth, TooFewSamples
from drivestyle.gaussfit import (
    GaussianPair,
    eval_two_gaussians,
    fit_two_gaussians,
    gauss_features,
    initial_guess,
    jacobian,
)
from drivestyle.synth import ScenarioSpec, generate

from conftest import make_segment

P_STAR = np.array([1.0, 10.0, 2.0, 0.5, 30.0, 4.0])


def grid(t_end=40.0, rate=20.0):
    return np.arange(int(round(t_end * rate)) + 1) / rate


class TestEval:
    def test_examples(self):
        assert eval_two_gaussians((1, 0, 1, 0, 10, 1), 0.0) == 1.0
        assert eval_two_gaussians((1, 0, 1, 1, 0, 1), 0.0) == 2.0
        assert eval_two_gaussians((2, 5, 1.5, -1, 9, 0.5), 5.0) == pytest.approx(2.0, abs=1e-10)

    def test_nonpositive_width(self):
        with pytest.raises(NonPositiveWidth):
            eval_two_gaussians((1, 0, 0, 1, 0, 1), 0.0)
        with pytest.raises(NonPositiveWidth):
            GaussianPair(1, 0, 1, 1, 0, -1)

    @given(st.integers(0, 100_000))
    def test_jacobian_vs_central_differences(self, seed):
        rng = np.random.default_rng(seed)
        p = np.array([rng.normal(), rng.uniform(0, 10), rng.uniform(0.3, 3),
                      rng.normal(), rng.uniform(0, 10), rng.uniform(0.3, 3)])
        x = rng.uniform(-2, 12, 15)
        j = jacobian(p, x)
        h = 1e-6
        for k in range(6):
            e = np.zeros(6)
            e[k] = h
            fd = (eval_two_gaussians(p + e, x) - eval_two_gaussians(p - e, x)) / (2 * h)
            assert np.all(np.abs(fd - j[:, k]) <= 1e-5 * np.maximum(1.0, np.abs(j[:, k])))


class TestFit:
    def test_noiseless_recovery(self):
        t = grid()
        pair = fit_two_gaussians(t, eval_two_gaussians(P_STAR, t))
        np.testing.assert_allclose(pair.params, P_STAR, rtol=1e-3)
        assert pair.rmse < 1e-6 and pair.converged

    def test_zero_signal(self):
        t = grid(5.0)
        pair = fit_two_gaussians(t, np.zeros_like(t))
        assert abs(pair.a1) < 1e-9 and abs(pair.a2) < 1e-9
        assert pair.rmse < 1e-9 and pair.converged

    def test_too_few_samples(self):
        with pytest.raises(TooFewSamples):
            fit_two_gaussians(np.arange(11.0), np.zeros(11))

    def test_time_must_increase(self):
        with pytest.raises(ValueError):
            fit_two_gaussians(np.r_[1.0, np.arange(12.0)], np.zeros(13))

    def test_residual_trace_never_increases(self):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            t = grid(10.0)
            p = [rng.uniform(0.5, 2), rng.uniform(1, 4), rng.uniform(0.3, 1.5),
                 rng.uniform(-2, 2), rng.uniform(5, 9), rng.uniform(0.3, 1.5)]
            ys = eval_two_gaussians(p, t) + rng.normal(0, 0.05, t.size)
            trace = fit_two_gaussians(t, ys).sse_trace
            assert np.all(np.diff(trace) <= 0)

    def test_swap_gives_same_canonical_pair(self):
        a = GaussianPair(1.0, 2.0, 0.5, -1.0, 7.0, 0.8)
        b = GaussianPair(-1.0, 7.0, 0.8, 1.0, 2.0, 0.5)
        assert a.canonical() == b.canonical()
        assert b.canonical().b1 <= b.canonical().b2

    def test_initial_guess_picks_extrema(self):
        t = grid(10.0)
        ys = eval_two_gaussians((1.0, 3.0, 0.5, -0.7, 7.0, 0.5), t)
        p0 = initial_guess(t, ys)
        assert p0[1] == pytest.approx(3.0) and p0[4] == pytest.approx(7.0)
        assert p0[2] == pytest.approx(10.0 / 6)


class TestSegments:
    def test_lane_change_signs_and_order(self):
        seg = generate(ScenarioSpec.default("lane_change", "safe", seed=2))
        pair = fit_two_gaussians(seg.t, seg.gz)
        assert pair.b1 < pair.b2
        assert np.sign(pair.a1) != np.sign(pair.a2)

    def test_noiseless_lane_change_centers(self):
        spec = ScenarioSpec.default("lane_change", "safe", noise_std=0.0)
        seg = generate(spec)
        span = seg.t[-1] - seg.t[0]
        pair = fit_two_gaussians(seg.t, seg.gz)
        assert abs(pair.b1 - span / 3) < 1 / 20
        assert abs(pair.b2 - 2 * span / 3) < 1 / 20

    def test_dangerous_is_narrower(self):
        safe = gauss_features(generate(ScenarioSpec.default("lane_change", "safe", seed=1)))
        fast = gauss_features(generate(ScenarioSpec.default("lane_change", "dangerous", seed=1)))
        assert fast[2] < safe[2] and fast[5] < safe[5]

    @given(st.floats(-500, 500))
    def test_shift_invariance(self, dt):
        seg = generate(ScenarioSpec.default("lane_change", "dangerous", seed=5))
        np.testing.assert_allclose(gauss_features(seg.shifted(dt)), gauss_features(seg), atol=1e-6)

    def test_flat_gz_gives_zero_amplitudes(self):
        f = gauss_features(make_segment(80))
        assert abs(f[0]) < 1e-9 and abs(f[3]) < 1e-9
