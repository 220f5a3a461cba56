import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fastpascal import conv
from fastpascal.conv import (
    conv_full_transpose,
    conv_valid,
    fft_symbol,
    kernel_by_convolution,
    make_kernel,
)


def _max_rel(a, b):
    return np.max(np.abs(a - b)) / np.max(np.abs(a))


class TestKernels:
    def test_binomial_examples(self):
        np.testing.assert_array_equal(make_kernel("binomial_normalized", 2).taps, [0.25, 0.5, 0.25])
        np.testing.assert_array_equal(make_kernel("binomial_unnormalized", 3).taps, [1, 3, 3, 1])

    def test_bernstein_example(self):
        np.testing.assert_allclose(make_kernel("bernstein", 2, 0.25).taps, [9 / 16, 6 / 16, 1 / 16], rtol=1e-15)

    def test_order_zero_is_identity(self):
        for kind in conv.KINDS:
            assert make_kernel(kind, 0, 0.3).taps.tolist() == [1.0]

    @pytest.mark.parametrize("m", [1, 5, 40, 300])
    def test_normalized_sums_to_one(self, m):
        assert abs(make_kernel("binomial_normalized", m).taps.sum() - 1) <= 1e-14

    @given(st.integers(1, 200), st.floats(0, 1))
    def test_bernstein_sums_to_one(self, m, t):
        assert abs(make_kernel("bernstein", m, t).taps.sum() - 1) <= 1e-13

    @given(st.integers(0, 30), st.integers(0, 30))
    def test_semigroup(self, a, b):
        lhs = np.convolve(make_kernel("binomial_normalized", a).taps, make_kernel("binomial_normalized", b).taps)
        np.testing.assert_allclose(lhs, make_kernel("binomial_normalized", a + b).taps, rtol=1e-13, atol=1e-300)

    @pytest.mark.parametrize("kind,t", [("binomial_normalized", None), ("binomial_unnormalized", None),
                                        ("bernstein", 0.3)])
    def test_repeated_convolution(self, kind, t):
        for m in (1, 4, 17, 33):
            np.testing.assert_allclose(make_kernel(kind, m, t).taps, kernel_by_convolution(kind, m, t), rtol=1e-12)

    def test_bernstein_half_is_binomial(self):
        for m in (1, 8, 51):
            np.testing.assert_allclose(make_kernel("bernstein", m, 0.5).taps,
                                       make_kernel("binomial_normalized", m).taps, rtol=1e-13)

    def test_large_unnormalized_overflow(self):
        taps = make_kernel("binomial_unnormalized", 1100).taps
        assert taps[0] == 1 and np.isinf(taps[550])

    @pytest.mark.parametrize("args", [("gauss", 2), ("bernstein", 2, 1.5), ("bernstein", 2, None),
                                      ("binomial_normalized", -1), ("binomial_normalized", 2.5)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            make_kernel(*args)


class TestSymbols:
    def test_matches_fft_of_taps(self):
        kern = make_kernel("binomial_normalized", 7)
        padded = np.zeros(32)
        padded[:8] = kern.taps
        assert np.max(np.abs(fft_symbol(kern, 32).values - np.fft.fft(padded))) <= 1e-14

    @pytest.mark.parametrize("kind,t", [("binomial_normalized", None), ("bernstein", 0.7)])
    @pytest.mark.parametrize("m,n", [(1, 2), (3, 5), (64, 128), (255, 512), (500, 1001)])
    def test_closed_form_symbols(self, kind, t, m, n):
        kern = make_kernel(kind, m, t)
        padded = np.zeros(n)
        padded[: m + 1] = kern.taps
        assert np.max(np.abs(fft_symbol(kern, n).values - np.fft.fft(padded))) <= 1e-13

    def test_dc_value(self):
        assert abs(fft_symbol(make_kernel("binomial_normalized", 9), 16).values[0] - 1) <= 1e-15

    def test_too_small(self):
        with pytest.raises(ValueError):
            fft_symbol(make_kernel("binomial_normalized", 9), 8)


class TestConvolution:
    def test_valid_example(self):
        y = conv_valid(make_kernel("binomial_normalized", 1), np.array([1.0, 3.0, 5.0]), path="direct")
        np.testing.assert_array_equal(y, [2, 4])

    def test_full_transpose_example(self):
        y = conv_full_transpose(make_kernel("binomial_unnormalized", 1), np.array([1.0, 2.0]), path="direct")
        np.testing.assert_array_equal(y, [1, 3, 2])

    @pytest.mark.parametrize("t,shift", [(0.0, 0), (1.0, 1)])
    def test_bernstein_endpoints_shift(self, t, shift, rng):
        x = rng.standard_normal(50)
        m = 9
        for path in ("direct", "fft"):
            y = conv_valid(make_kernel("bernstein", m, t), x, path=path)
            expect = x[m:] if shift else x[: 50 - m]
            np.testing.assert_allclose(y, expect, atol=1e-14 * np.max(np.abs(x)))

    @pytest.mark.parametrize("n", [2, 3, 16, 100, 1000, 4096])
    @pytest.mark.parametrize("kind", ["binomial_normalized", "bernstein"])
    def test_paths_agree(self, n, kind, rng):
        for m in sorted({1, n // 4, n // 2, n - 1}):
            if m < 1:
                continue
            kern = make_kernel(kind, m, 0.35)
            x = rng.standard_normal(n)
            a = conv_valid(kern, x, path="direct")
            for size in ("exact", "fast"):
                b = conv_valid(kern, x, path="fft", fft_size=size)
                assert _max_rel(a, b) <= 1e-12
            z = rng.standard_normal(n - m)
            a = conv_full_transpose(kern, z, path="direct")
            b = conv_full_transpose(kern, z, path="fft")
            assert _max_rel(a, b) <= 1e-12

    @pytest.mark.parametrize("n,m", [(10, 3), (257, 128), (2048, 1024)])
    def test_adjoint(self, n, m, rng):
        kern = make_kernel("binomial_normalized", m)
        x, y = rng.standard_normal(n), rng.standard_normal(n - m)
        lhs = np.dot(conv_valid(kern, x, path="fft"), y)
        rhs = np.dot(x, conv_full_transpose(kern, y, path="fft"))
        assert abs(lhs - rhs) <= 1e-12 * (np.abs(x).sum() * np.abs(y).max())

    def test_out_may_alias_input(self, rng):
        x = rng.standard_normal(64)
        expect = conv_valid(make_kernel("binomial_normalized", 20), x.copy())
        conv_valid(make_kernel("binomial_normalized", 20), x, out=x[20:])
        np.testing.assert_array_equal(x[20:], expect)

    def test_order_zero_copies(self, rng):
        x = rng.standard_normal(5)
        np.testing.assert_array_equal(conv_valid(make_kernel("bernstein", 0, 0.2), x), x)

    def test_errors(self):
        kern = make_kernel("binomial_normalized", 4)
        with pytest.raises(ValueError):
            conv_valid(kern, np.ones(4))
        with pytest.raises(ValueError):
            conv_valid(kern, np.ones(8), out=np.empty(3))
        with pytest.raises(ValueError):
            conv_valid(kern, np.ones(8), path="magic")
        with pytest.raises(ValueError):
            conv_valid(kern, np.ones(8), path="fft", fft_size="huge")
        with pytest.raises(ValueError):
            conv_full_transpose(kern, np.ones(0))

    def test_swappable_backend(self, rng):
        calls = []

        class Counting(conv.ScipyFFT):
            def rfft(self, x, n):
                calls.append(n)
                return super().rfft(x, n)

        x = rng.standard_normal(40)
        try:
            conv.set_fft_backend(Counting())
            conv_valid(make_kernel("binomial_normalized", 10), x, path="fft")
        finally:
            conv.set_fft_backend(conv.ScipyFFT())
        assert calls == [40]
