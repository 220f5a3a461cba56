"""Binomial and Bernstein filter kernels and the banded products they define.

For a kernel with taps ``c_0 .. c_m`` and a vector ``x`` of length ``n``,

* :func:`conv_valid` computes ``out_i = sum_k c_k x_{i+k}`` for
  ``i = 0 .. n-m-1``: the (n-m) x n banded matrix with the taps on each row;
* :func:`conv_full_transpose` is its adjoint, the full convolution of the
  taps with a length ``n-m`` vector.

Both run either as a sliding dot product or through a length-``n``
circulant diagonalized by the FFT.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.fft
from scipy.stats import binom

log = logging.getLogger(__name__)

KINDS = ("binomial_normalized", "binomial_unnormalized", "bernstein")

# auto picks the FFT when m*(n-m) > DIRECT_FFT_CROSSOVER * n*log2(n)
DIRECT_FFT_CROSSOVER = 16.0

# Bernstein taps up to this order are rounded from exact integer ratios
EXACT_BERNSTEIN_MAX = 256


@dataclass(frozen=True)
class ConvKernel:
    kind: str
    m: int
    t: float | None = None
    taps: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def key(self):
        return (self.kind, self.m, self.t)


@dataclass(frozen=True)
class FftSymbol:
    """Length-``n`` DFT of the zero-padded taps (``numpy.fft`` sign convention)."""

    length: int
    values: np.ndarray


class ScipyFFT:
    """Real-input transforms backed by :mod:`scipy.fft`; plans are cached there."""

    def rfft(self, x, n):
        return scipy.fft.rfft(x, n)

    def irfft(self, x, n):
        return scipy.fft.irfft(x, n)

    def fast_size(self, n):
        return scipy.fft.next_fast_len(n, real=True)


_backend = ScipyFFT()


def set_fft_backend(backend) -> None:
    """Swap the transform provider (needs ``rfft``, ``irfft``, ``fast_size``)."""
    global _backend
    _backend = backend
    _half_symbol.cache_clear()


def _pascal_row(m: int) -> list[int]:
    row = [1] * (m + 1)
    c = 1
    for k in range(m):
        c = c * (m - k) // (k + 1)
        row[k + 1] = c
    return row


def _to_float(c: int, shift: int) -> float:
    try:
        return c / (1 << shift) if shift else float(c)
    except OverflowError:
        return math.inf


def _bernstein_exact(m: int, t: float) -> np.ndarray:
    # t is dyadic, so C(m, k) t^k (1-t)^(m-k) is a ratio of integers; int
    # division rounds correctly
    num, den = float(t).as_integer_ratio()
    rest = den - num
    total = den**m
    out = np.empty(m + 1)
    up = 1
    down = [1] * (m + 1)
    for k in range(1, m + 1):
        down[k] = down[k - 1] * rest
    for k, c in enumerate(_pascal_row(m)):
        out[k] = (c * up * down[m - k]) / total
        up *= num
    return out


@lru_cache(maxsize=256)
def _taps(kind: str, m: int, t: float | None) -> np.ndarray:
    if kind == "bernstein":
        taps = _bernstein_exact(m, t) if m <= EXACT_BERNSTEIN_MAX else binom.pmf(np.arange(m + 1), m, t)
    else:
        shift = m if kind == "binomial_normalized" else 0
        taps = np.array([_to_float(c, shift) for c in _pascal_row(m)])
    taps.setflags(write=False)
    return taps


def make_kernel(kind: str, m: int, t: float | None = None) -> ConvKernel:
    """Kernel of order ``m``.

    ``binomial_normalized`` has taps ``2^-m C(m, k)``, ``binomial_unnormalized``
    has ``C(m, k)`` and ``bernstein`` has ``C(m, k) t^k (1-t)^(m-k)``.  Order 0
    is the identity kernel ``(1,)`` for every kind.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kernel kind {kind!r}")
    if m < 0 or int(m) != m:
        raise ValueError(f"order must be a nonnegative integer, got {m!r}")
    if kind == "bernstein":
        if t is None or not 0.0 <= t <= 1.0:
            raise ValueError(f"bernstein kernels need 0 <= t <= 1, got {t!r}")
        t = float(t)
    else:
        t = None
    return ConvKernel(kind, int(m), t, _taps(kind, int(m), t))


def kernel_by_convolution(kind: str, m: int, t: float | None = None) -> np.ndarray:
    """Taps built as ``c_m = c_{m-1} * c_1``; slow, used to cross-check :func:`make_kernel`."""
    if kind == "bernstein":
        base = np.array([1.0 - t, t])
    elif kind == "binomial_normalized":
        base = np.array([0.5, 0.5])
    else:
        base = np.array([1.0, 1.0])
    taps = np.ones(1)
    for _ in range(m):
        taps = np.convolve(taps, base)
    return taps


def _binomial_half_symbol(m: int, n: int, scale_log: float) -> np.ndarray:
    # ((1 + w^j)/2)^m = cos(pi j/n)^m * exp(-i pi m j/n)
    j = np.arange(n // 2 + 1)
    jj = np.minimum(j, n - j)
    # |cos(pi jj/n)|: 1 - 2 sin^2 near zero frequency, a sine near the zero
    s = np.sin(np.pi * jj / (2 * n))
    c = np.sin(np.pi * (n - 2 * jj) / (2 * n))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        logc = np.where(4 * jj <= n, np.log1p(-2.0 * s * s), np.log(c))
        mag = np.exp(m * logc + scale_log)
    if m % 2:
        mag = np.where(2 * j > n, -mag, mag)
    if m and n % 2 == 0:
        mag[n // 2] = 0.0
    phase = np.pi * ((m * j) % (2 * n)) / n
    return mag * np.exp(-1j * phase)


@lru_cache(maxsize=1024)
def _half_symbol(kind: str, m: int, t: float | None, n: int) -> np.ndarray:
    if kind == "binomial_normalized":
        out = _binomial_half_symbol(m, n, 0.0)
    elif kind == "binomial_unnormalized":
        out = _binomial_half_symbol(m, n, m * math.log(2.0))
    else:
        out = _backend.rfft(_taps(kind, m, t), n)
    out.setflags(write=False)
    return out


def fft_symbol(kernel: ConvKernel, n: int) -> FftSymbol:
    """DFT of the taps zero-padded to length ``n``.

    Binomial kernels use the closed form ``((1 + e^{-2 pi i j/n})/2)^m``
    (times ``2^m`` when unnormalized); Bernstein kernels transform their taps.
    """
    if n < kernel.m + 1:
        raise ValueError(f"transform size {n} too small for order {kernel.m}")
    half = _half_symbol(kernel.kind, kernel.m, kernel.t, n)
    full = np.empty(n, dtype=complex)
    full[: half.size] = half
    rest = n - half.size
    if rest:
        full[half.size :] = np.conj(half[1 : rest + 1][::-1])
    return FftSymbol(n, full)


def _use_fft(path: str, n: int, m: int) -> bool:
    if path == "fft":
        return True
    if path == "direct":
        return False
    if path != "auto":
        raise ValueError(f"unknown path {path!r}")
    return m * (n - m) > DIRECT_FFT_CROSSOVER * n * math.log2(max(n, 2))


def _transform_size(n: int, fft_size: str) -> int:
    if fft_size == "exact":
        return n
    if fft_size == "fast":
        return _backend.fast_size(n)
    raise ValueError(f"unknown fft_size {fft_size!r}")


def conv_valid(kernel: ConvKernel, x: np.ndarray, out: np.ndarray | None = None,
               path: str = "auto", fft_size: str = "exact") -> np.ndarray:
    """``out_i = sum_k taps_k x_{i+k}``, the banded product B_{n,m} x.

    ``out`` may alias ``x[m:]``.  The FFT path uses a length-``n`` circulant
    (or a zero-extended fast length when ``fft_size="fast"``) and keeps the
    first ``n - m`` outputs, none of which wrap.
    """
    n, m = x.shape[0], kernel.m
    if n <= m:
        raise ValueError(f"need len(x) > order, got n={n}, m={m}")
    if out is None:
        out = np.empty(n - m)
    elif out.shape != (n - m,):
        raise ValueError(f"output buffer has shape {out.shape}, expected ({n - m},)")
    if m == 0:
        out[:] = x
        return out
    if _use_fft(path, n, m):
        size = _transform_size(n, fft_size)
        sym = _half_symbol(kernel.kind, m, kernel.t, size)
        y = _backend.irfft(_backend.rfft(x, size) * np.conj(sym), size)
        out[:] = y[: n - m]
    else:
        out[:] = np.correlate(x, kernel.taps, "valid")
    return out


def conv_full_transpose(kernel: ConvKernel, x: np.ndarray, out: np.ndarray | None = None,
                        path: str = "auto", fft_size: str = "exact") -> np.ndarray:
    """Full convolution of the taps with ``x``: the adjoint B_{n,m}^T x."""
    m = kernel.m
    n = x.shape[0] + m
    if x.shape[0] < 1:
        raise ValueError("need a nonempty input")
    if out is None:
        out = np.empty(n)
    elif out.shape != (n,):
        raise ValueError(f"output buffer has shape {out.shape}, expected ({n},)")
    if m == 0:
        out[:] = x
        return out
    if _use_fft(path, n, m):
        size = _transform_size(n, fft_size)
        sym = _half_symbol(kernel.kind, m, kernel.t, size)
        out[:] = _backend.irfft(_backend.rfft(x, size) * sym, size)[:n]
    else:
        out[:] = np.convolve(kernel.taps, x)
    return out


def fft_flops(size: int) -> int:
    """Nominal add+multiply count of one real transform of length ``size``."""
    return int(2.5 * size * math.log2(max(size, 2)))
