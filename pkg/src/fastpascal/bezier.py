"""Bezier curves: De Casteljau, Bernstein matrices and FFT-accelerated evaluation.

The Bernstein matrix at ``t`` has entries ``C(i, j) t^j (1-t)^(i-j)``; its
row ``n`` applied to control points ``p_0..p_n`` evaluates the curve.  It
factors into bidiagonal sweeps ``p_j <- (1-t) p_{j-1} + t p_j`` (De
Casteljau) and obeys the same block recursion as the normalized Pascal
matrix, with Bernstein kernels ``C(m, k) t^k (1-t)^(m-k)`` in place of the
binomial filters.  At t = 1/2 it is exactly Q.

:func:`fast_eval` convolves the control points down to ``k + 1``
survivors and finishes with De Casteljau, O(d n log n) for
``k ~ sqrt(n log n)``; ``k = 0`` is a single convolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.fft
from scipy.stats import binom

from . import conv
from .fastmul import RecursionPlan, bernstein_recursive


class CurveFormatError(ValueError):
    """A curve file could not be parsed."""


@dataclass(frozen=True)
class BezierCurve:
    """Control points as an ``(n + 1) x d`` array, one point per row."""

    points: np.ndarray

    def __post_init__(self):
        p = np.array(self.points, dtype=np.float64)
        if p.ndim == 1:
            p = p[:, None]
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError(f"control points must be an (n+1) x d array, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("control points must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    @property
    def degree(self) -> int:
        return self.points.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class BernsteinMatrixSpec:
    t: float
    n: int

    def __post_init__(self):
        _check_t(self.t)
        if self.n < 0:
            raise ValueError(f"degree must be nonnegative, got {self.n}")


def read_curve(path) -> BezierCurve:
    """Parse ``n d`` then ``n + 1`` lines of ``d`` numbers."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise CurveFormatError("empty curve file")
    try:
        n, d = (int(v) for v in lines[0].split())
    except ValueError:
        raise CurveFormatError(f"bad header {lines[0]!r}, expected 'n d'") from None
    if n < 0 or d < 1:
        raise CurveFormatError(f"bad header values n={n}, d={d}")
    rows = lines[1:]
    if len(rows) != n + 1:
        raise CurveFormatError(f"expected {n + 1} control points, found {len(rows)}")
    try:
        pts = np.array([[float(v) for v in r.split()] for r in rows])
    except ValueError as exc:
        raise CurveFormatError(f"non-numeric control point: {exc}") from None
    if pts.shape != (n + 1, d):
        raise CurveFormatError(f"control points must have {d} coordinates each")
    return BezierCurve(pts)


def write_curve(curve: BezierCurve, path) -> None:
    lines = [f"{curve.degree} {curve.dim}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in curve.points]
    Path(path).write_text("\n".join(lines) + "\n")


def _check_t(t) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    return t


def bernstein_poly(n: int, i: int, t: float) -> float:
    """``C(n, i) t^i (1-t)^(n-i)``; log space once the direct product could over- or underflow."""
    t = _check_t(t)
    if not 0 <= i <= n:
        raise ValueError(f"need 0 <= i <= n, got i={i}, n={n}")
    if n <= 1000:
        v = math.comb(n, i) * (t**i * (1.0 - t) ** (n - i))
        if v == 0.0 or v >= 1e-290:
            return v
    return float(binom.pmf(i, n, t))


def default_k(n: int) -> int:
    return min(n, max(0, round(math.sqrt(n * math.log2(n + 2)))))


def _casteljau_rows(p: np.ndarray, t: float) -> np.ndarray:
    # p <- G_n ... G_1 p in place; row j becomes the degree-j evaluation
    s = 1.0 - t
    for r in range(1, p.shape[0]):
        p[r:] = s * p[r - 1:-1] + t * p[r:]
    return p


def de_casteljau(curve: BezierCurve, t: float) -> np.ndarray:
    """Curve point at ``t`` by repeated convex combinations; O(d n^2)."""
    t = _check_t(t)
    return _casteljau_rows(curve.points.copy(), t)[-1].copy()


def bernstein_matrix_apply(spec: BernsteinMatrixSpec, x, plan: RecursionPlan | None = None) -> np.ndarray:
    """Bernstein matrix times ``x`` (``(n + 1) x d``) by the fast recursion.

    Row ``n`` of the result is the curve point; row ``j`` is the point of
    the degree-``j`` curve on the first ``j + 1`` control points.
    """
    x = np.asarray(x, dtype=np.float64)
    flat = x.ndim == 1
    cols = x[:, None] if flat else x
    if cols.shape[0] != spec.n + 1:
        raise ValueError(f"expected {spec.n + 1} rows, got {cols.shape[0]}")
    out = np.array(cols, order="F", copy=True)
    for c in range(out.shape[1]):
        col = np.ascontiguousarray(out[:, c])
        bernstein_recursive(spec.t, col, plan)
        out[:, c] = col
    return out[:, 0] if flat else np.ascontiguousarray(out)


def fast_eval(curve: BezierCurve, t: float, k: int | None = None, path: str = "auto") -> np.ndarray:
    """Curve point at ``t``: one order ``n - k`` Bernstein convolution then De Casteljau.

    ``path`` picks the convolution engine (``"auto"``, ``"fft"``, ``"direct"``).
    """
    t = _check_t(t)
    n = curve.degree
    k = default_k(n) if k is None else int(k)
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    kern = conv.make_kernel("bernstein", n - k, t)
    survivors = np.empty((k + 1, curve.dim))
    for c in range(curve.dim):
        survivors[:, c] = conv.conv_valid(kern, np.ascontiguousarray(curve.points[:, c]), path=path)
    return _casteljau_rows(survivors, t)[-1].copy()


def batch_eval(curve: BezierCurve, ts, k: int | None = None) -> np.ndarray:
    """Curve points at every ``t`` in ``ts`` (one row each), sharing the data transform."""
    ts = np.asarray(ts, dtype=np.float64).ravel()
    if ts.size == 0:
        raise ValueError("need at least one t")
    if not np.all((ts >= 0.0) & (ts <= 1.0)):
        raise ValueError("every t must lie in [0, 1]")
    n = curve.degree
    k = default_k(n) if k is None else int(k)
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    m, size = n - k, n + 1
    if m == 0:
        surv = np.broadcast_to(curve.points, (ts.size, size, curve.dim)).copy()
    else:
        data = scipy.fft.rfft(curve.points, size, axis=0)
        taps = binom.pmf(np.arange(m + 1)[None, :], m, ts[:, None])
        sym = np.conj(scipy.fft.rfft(taps, size, axis=1))
        surv = scipy.fft.irfft(sym[:, :, None] * data[None, :, :], size, axis=1)[:, : k + 1, :]
    s = (1.0 - ts)[:, None, None]
    tt = ts[:, None, None]
    for r in range(1, k + 1):
        surv[:, r:, :] = s * surv[:, r - 1:-1, :] + tt * surv[:, r:, :]
    return surv[:, -1, :].copy()
