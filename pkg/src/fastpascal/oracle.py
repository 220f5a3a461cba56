"""Ground-truth products and the uniform relative error metric.

Two evaluation paths, both rounded to double only at the very end:

* exact: the input is scaled to integers and pushed through the additive
  Pascal sweeps in Python integers, with the W and D^(2^{+-1}) factors
  folded into signs and shifts.  No rounding happens before the final
  conversion, so this is at least as good as any finite digit count.
* fixed point: for the normalized Q and Q^T at large n, the bidiagonal
  sweeps run in multi-limb fixed point carrying ``decimal_digits`` digits
  plus guard bits (relative to max|x|).

Other products above ``EXACT_CAP`` are refused; their entries grow like
2^n or 3^n and do not fit in a double anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import _fixedpoint
from .pascal import MatrixSpec, _dyadic_to_float

ORACLE_CAP = 2**17
EXACT_CAP = 4096
FIXED_POINT_FROM = 512


class OracleCapError(ValueError):
    """The requested size is beyond what the oracle evaluates."""


@dataclass(frozen=True)
class PrecisionConfig:
    decimal_digits: int = 50

    def __post_init__(self):
        if self.decimal_digits < 1:
            raise ValueError("decimal_digits must be positive")

    def fraction_bits(self, n: int) -> int:
        bits = self.decimal_digits * math.log2(10) + math.log2(max(n, 2)) + 8
        return 64 * math.ceil(bits / 64)


def _to_ints(x: np.ndarray) -> tuple[list[int], int]:
    """Integers ``X`` and exponent ``e`` with ``x == X * 2**e`` exactly."""
    ratios = [v.as_integer_ratio() for v in x.tolist()]
    e = min((1 - q.bit_length() for _, q in ratios), default=0)
    return [p << (1 - q.bit_length() - e) for p, q in ratios], e


def _lower_sweep(X: np.ndarray) -> None:
    # x_j += x_{j-1} for j >= k, k = 1..n-1; right-hand side uses old values
    for k in range(1, X.shape[0]):
        X[k:] = X[k:] + X[k - 1:-1]


def _upper_sweep(X: np.ndarray) -> None:
    # x_j += x_{j+1} for j >= k-1, k = n-1..1
    n = X.shape[0]
    for k in range(n - 1, 0, -1):
        X[k - 1:n - 1] = X[k - 1:n - 1] + X[k:n]


def _exact(spec: MatrixSpec, x: np.ndarray) -> np.ndarray:
    n = spec.n
    ints, e = _to_ints(x)
    X = np.empty(n, dtype=object)
    X[:] = ints
    sign = np.array([(-1) ** i for i in range(n)], dtype=object)
    shift = np.zeros(n, dtype=np.int64)
    q = spec.family == "Q"
    idx = np.arange(n)
    if spec.variant == "identity":
        _lower_sweep(X)
        if q:
            shift = -idx
    elif spec.variant == "transpose":
        if q:
            # P^T D^(1/2) x = 2^{-(n-1)} P^T (2^{n-1-i} x_i)
            X = np.array([v << (n - 1 - i) for i, v in enumerate(X)], dtype=object)
            shift = np.full(n, -(n - 1))
        _upper_sweep(X)
    elif spec.variant == "inverse":
        X = X * sign
        if q:
            X = np.array([v << i for i, v in enumerate(X)], dtype=object)
        _lower_sweep(X)
        X = X * sign
    else:
        X = X * sign
        _upper_sweep(X)
        X = X * sign
        if q:
            shift = idx
    return np.array([_dyadic_to_float(int(c), int(s) + e) for c, s in zip(X, shift)])


def _fixed(spec: MatrixSpec, x: np.ndarray, cfg: PrecisionConfig) -> np.ndarray:
    n = spec.n
    peak = float(np.max(np.abs(x)))
    if peak == 0.0:
        return np.zeros(n)
    # work on x / 2^s with max |x| / 2^s <= 1/2 so the integer limb never overflows
    s = math.frexp(peak)[1] + 1
    F = cfg.fraction_bits(n)
    L = F // 64 + 1
    width = 64 * L
    mask = (1 << width) - 1
    buf = bytearray()
    for v in x.tolist():
        p, qd = v.as_integer_ratio()
        iv = (p << F) // (qd << s) if s >= 0 else (p << (F - s)) // qd
        buf += (iv & mask).to_bytes(8 * L, "big")
    a = np.frombuffer(bytes(buf), dtype=">u8").astype(np.uint64).reshape(n, L)
    a = np.ascontiguousarray(a)
    if spec.variant == "identity":
        _fixedpoint.q_sweep(a)
    else:
        _fixedpoint.qt_sweep(a)
    raw = a.astype(">u8").tobytes()
    out = np.empty(n)
    top = 1 << (width - 1)
    for i in range(n):
        iv = int.from_bytes(raw[8 * L * i: 8 * L * (i + 1)], "big")
        if iv & top:
            iv -= 1 << width
        out[i] = _dyadic_to_float(iv, s - F)
    return out


def oracle_apply(spec: MatrixSpec, x, cfg: PrecisionConfig | None = None) -> np.ndarray:
    """High-precision ``M x`` rounded once to double."""
    cfg = PrecisionConfig() if cfg is None else cfg
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != spec.n:
        raise ValueError(f"dimension mismatch: len(x)={x.shape[0] if x.ndim else 0} but n={spec.n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input must be finite")
    n = spec.n
    if n > ORACLE_CAP:
        raise OracleCapError(f"n={n} exceeds the oracle cap {ORACLE_CAP}")
    if spec.family == "Q" and spec.variant in ("identity", "transpose") and n >= FIXED_POINT_FROM:
        return _fixed(spec, x, cfg)
    if n > EXACT_CAP:
        raise OracleCapError(f"{spec.label} at n={n} exceeds the exact oracle cap {EXACT_CAP}")
    return _exact(spec, x)


def uniform_relative_error(y_true, y_hat) -> float:
    """``max|y - y_hat| / max|y|``; infinite if ``y_hat`` is not finite."""
    y_true = np.asarray(y_true, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y_true.shape != y_hat.shape:
        raise ValueError(f"shape mismatch: {y_true.shape} vs {y_hat.shape}")
    if not np.all(np.isfinite(y_true)):
        raise ValueError("reference vector is not finite")
    scale = np.max(np.abs(y_true)) if y_true.size else 0.0
    if scale == 0.0:
        raise ValueError("reference vector is all zero")
    if not np.all(np.isfinite(y_hat)):
        return math.inf
    return float(np.max(np.abs(y_true - y_hat)) / scale)


def bezier_oracle(points, t: float, cfg: PrecisionConfig | None = None) -> np.ndarray:
    """Bernstein-sum evaluation of a Bezier curve in ``decimal_digits`` precision."""
    cfg = PrecisionConfig() if cfg is None else cfg
    p = np.asarray(points, dtype=np.float64)
    if p.ndim == 1:
        p = p[:, None]
    n = p.shape[0] - 1
    with mpmath.workdps(cfg.decimal_digits + 10):
        tt = mpmath.mpf(t)
        s = 1 - tt
        acc = [mpmath.mpf(0)] * p.shape[1]
        c = 1
        for i in range(n + 1):
            w = c * tt**i * s ** (n - i)
            for d in range(p.shape[1]):
                acc[d] += w * mpmath.mpf(p[i, d])
            c = c * (n - i) // (i + 1)
        return np.array([float(v) for v in acc])
