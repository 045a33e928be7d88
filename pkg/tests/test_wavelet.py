import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from drivestyle.errors import EmptyInput, EmptySignal, ShapeMismatch, TooShort
from drivestyle.wavelet import (
    HAAR,
    DwtDecomposition,
    FilterPair,
    decompose4,
    dwt_step,
    idwt_step,
    reconstruct,
    variance,
)

from oracles import R2, naive_decompose, naive_step

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


class TestFilterPair:
    def test_haar_is_orthonormal(self):
        assert sum(c * c for c in HAAR.low) == pytest.approx(1.0, abs=1e-12)
        assert sum(c * c for c in HAAR.high) == pytest.approx(1.0, abs=1e-12)
        assert abs(np.dot(HAAR.low, HAAR.high)) < 1e-12

    def test_rejects_non_unit_filters(self):
        with pytest.raises(ValueError):
            FilterPair(low=(0.5, 0.5), high=(0.5, -0.5))

    def test_rejects_non_orthogonal(self):
        with pytest.raises(ValueError):
            FilterPair(low=(1 / R2, 1 / R2), high=(1 / R2, 1 / R2))


class TestStep:
    def test_constant_has_no_detail(self):
        a, d = dwt_step([1, 1, 1, 1])
        np.testing.assert_allclose(a, [R2, R2], atol=1e-15)
        np.testing.assert_allclose(d, [0, 0], atol=1e-15)

    def test_ramp(self):
        a, d = dwt_step([1, 2, 3, 4])
        np.testing.assert_allclose(a, [3 / R2, 7 / R2], atol=1e-15)
        np.testing.assert_allclose(d, [-1 / R2, -1 / R2], atol=1e-15)
        lo, hi = naive_step([1, 2, 3, 4], HAAR.low, HAAR.high)
        np.testing.assert_allclose(a, lo, atol=1e-15)
        np.testing.assert_allclose(d, hi, atol=1e-15)

    def test_single_sample_pads(self):
        a, d = dwt_step([5])
        np.testing.assert_allclose(a, [5 * R2])
        np.testing.assert_allclose(d, [0.0])

    def test_odd_length_output_length(self):
        a, d = dwt_step(np.arange(7.0))
        assert a.shape == d.shape == (4,)

    @pytest.mark.parametrize("bad", [[], [1.0, float("nan")], [float("inf"), 1.0]])
    def test_empty_or_nonfinite(self, bad):
        with pytest.raises(EmptySignal):
            dwt_step(bad)

    @given(arrays(np.float64, st.integers(2, 40), elements=finite),
           arrays(np.float64, 40, elements=finite), finite, finite)
    def test_linearity(self, x, y_full, alpha, beta):
        y = y_full[: x.size]
        ax, dx = dwt_step(x)
        ay, dy = dwt_step(y)
        az, dz = dwt_step(alpha * x + beta * y)
        scale = 1.0 + np.max(np.abs(alpha * x)) + np.max(np.abs(beta * y))
        assert np.max(np.abs(az - (alpha * ax + beta * ay))) <= 1e-12 * scale
        assert np.max(np.abs(dz - (alpha * dx + beta * dy))) <= 1e-12 * scale

    def test_matches_naive_on_four_tap_filter(self):
        # a longer orthonormal pair exercises the periodic wrap branch
        h = np.array([1 + math.sqrt(3), 3 + math.sqrt(3), 3 - math.sqrt(3), 1 - math.sqrt(3)]) / (4 * R2)
        g = np.array([h[3], -h[2], h[1], -h[0]])
        fp = FilterPair(low=tuple(h), high=tuple(g))
        x = np.random.default_rng(3).normal(size=32)
        a, d = dwt_step(x, fp)
        lo, hi = naive_step(x, h, g)
        np.testing.assert_allclose(a, lo, atol=1e-12)
        np.testing.assert_allclose(d, hi, atol=1e-12)
        np.testing.assert_allclose(idwt_step(a, d, fp), x, atol=1e-12)


class TestDecompose:
    def test_constant_length_32(self):
        dec = decompose4(np.full(32, 2.5))
        for det in dec.details:
            np.testing.assert_allclose(det, 0.0, atol=1e-12)
        np.testing.assert_allclose(dec.a4, [10.0, 10.0], atol=1e-12)

    def test_lengths(self):
        dec = decompose4(np.arange(64.0))
        assert [b.size for b in dec.bands()] == [4, 4, 8, 16, 32]

    def test_too_short(self):
        with pytest.raises(TooShort):
            decompose4(np.ones(15))

    def test_length_17_follows_parity_rule(self):
        x = np.random.default_rng(17).normal(size=17)
        dec = decompose4(x)
        # 17 -> pad 18 -> 9 -> pad 10 -> 5 -> pad 6 -> 3 -> pad 4 -> 2
        assert [dec.d1.size, dec.d2.size, dec.d3.size, dec.d4.size, dec.a4.size] == [9, 5, 3, 2, 2]
        a, details = naive_decompose(x)
        for got, want in zip((dec.d1, dec.d2, dec.d3, dec.d4), details):
            np.testing.assert_allclose(got, want, atol=1e-12)
        np.testing.assert_allclose(dec.a4, a, atol=1e-12)

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            x = rng.normal(size=int(rng.integers(16, 100)))
            dec = decompose4(x)
            a, details = naive_decompose(x)
            np.testing.assert_allclose(dec.a4, a, atol=1e-12)
            for got, want in zip((dec.d1, dec.d2, dec.d3, dec.d4), details):
                np.testing.assert_allclose(got, want, atol=1e-12)

    @given(arrays(np.float64, st.sampled_from([16, 32, 48, 64]), elements=finite),
           st.floats(-100, 100))
    def test_constant_shift_moves_only_a4(self, x, c):
        d0, d1 = decompose4(x), decompose4(x + c)
        for u, v in zip(d0.details, d1.details):
            assert np.max(np.abs(u - v)) < 1e-9
        assert d1.a4 == pytest.approx(d0.a4 + 4 * c, abs=1e-9)

    @given(arrays(np.float64, st.sampled_from([16, 32, 64, 96]), elements=finite))
    def test_parseval(self, x):
        energy = float(x @ x)
        bands = sum(float(b @ b) for b in decompose4(x).bands())
        assert abs(bands - energy) <= 1e-9 * max(energy, 1e-300) + 1e-300


class TestReconstruct:
    def test_counting_signal(self):
        x = np.arange(1.0, 17.0)
        assert np.max(np.abs(reconstruct(decompose4(x), 16) - x)) < 1e-9

    def test_zero_decomposition(self):
        dec = DwtDecomposition(a4=np.zeros(4), d4=np.zeros(4), d3=np.zeros(8), d2=np.zeros(16), d1=np.zeros(32))
        np.testing.assert_array_equal(reconstruct(dec, 64), np.zeros(64))

    @given(arrays(np.float64, st.sampled_from([16, 32, 64, 128]), elements=finite))
    def test_perfect_reconstruction(self, x):
        assert np.max(np.abs(reconstruct(decompose4(x), x.size) - x)) < 1e-9

    def test_inconsistent_shapes(self):
        dec = decompose4(np.arange(64.0))
        with pytest.raises(ShapeMismatch):
            reconstruct(dec, 80)
        with pytest.raises(ShapeMismatch):
            idwt_step(np.zeros(3), np.zeros(4))

    def test_odd_lengths_keep_prefix_length(self):
        x = np.random.default_rng(5).normal(size=37)
        assert reconstruct(decompose4(x), 37).shape == (37,)


class TestVariance:
    @pytest.mark.parametrize("xs, want", [([3, 3, 3], 0.0), ([0, 2], 1.0), ([1, 2, 3, 4], 1.25)])
    def test_examples(self, xs, want):
        assert variance(xs) == pytest.approx(want, abs=1e-15)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            variance([])
