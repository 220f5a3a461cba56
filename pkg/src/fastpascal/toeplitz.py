"""Toeplitz-factorization products with the Pascal matrix.

Unstable by design.  This is the classical O(n log n) method, kept as a
baseline: with ``f_k = alpha^k / k!``, ``Lambda = diag(f)`` and ``T`` the
lower-triangular Toeplitz matrix with first column ``f``,

    P = Lambda^{-1} T Lambda,

and ``T`` is applied through a circulant of size ``2n``.  The diagonal
scaling spans many orders of magnitude, so all digits are lost by n ~ 100
in double precision.  Use :mod:`fastpascal.fastmul` for real work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cache

import numpy as np
import scipy.fft
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from .pascal import MatrixSpec, _check_vector, apply_diagonal, apply_sign


def alpha_objective(alpha: float, n: int) -> float:
    """log of max(a^a / a!, a^a (n-1)! / (a^(n-1) a!)), the largest scaled entry."""
    base = alpha * math.log(alpha) - math.lgamma(alpha + 1.0)
    return max(base, base + math.lgamma(n) - (n - 1) * math.log(alpha))


@cache
def optimal_alpha(n: int) -> float:
    """Minimizer of :func:`alpha_objective` over ``1 <= alpha < n - 1``.

    Bounded Brent search; the minimum sits near ``(n - 1)/e``.  ``n = 2``
    has an empty search interval and returns 1.
    """
    if n < 2:
        raise ValueError(f"optimal_alpha needs n >= 2, got {n}")
    if n == 2:
        return 1.0
    res = minimize_scalar(alpha_objective, bounds=(1.0, n - 1.0), args=(n,),
                          method="bounded", options={"xatol": 1e-10})
    return float(res.x)


@dataclass(frozen=True)
class ToeplitzPlan:
    n: int
    alpha: float
    scale_vec: np.ndarray = field(repr=False, compare=False)
    symbol: np.ndarray = field(repr=False, compare=False)


def make_toeplitz_plan(n: int, alpha: float | None = None) -> ToeplitzPlan:
    """Plan for size ``n``; ``alpha`` defaults to :func:`optimal_alpha`."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if alpha is None:
        alpha = optimal_alpha(n) if n >= 2 else 1.0
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    k = np.arange(n)
    with np.errstate(over="ignore"):
        f = np.exp(k * math.log(alpha) - gammaln(k + 1.0))
    symbol = scipy.fft.fft(f, 2 * n)
    f.setflags(write=False)
    symbol.setflags(write=False)
    return ToeplitzPlan(n, float(alpha), f, symbol)


def _lower_toeplitz(plan: ToeplitzPlan, x: np.ndarray) -> None:
    n = plan.n
    y = scipy.fft.irfft(scipy.fft.rfft(x, 2 * n) * plan.symbol[: n + 1], 2 * n)
    x[:] = y[:n]


def _p_lower(plan: ToeplitzPlan, x: np.ndarray) -> None:
    x *= plan.scale_vec
    _lower_toeplitz(plan, x)
    x /= plan.scale_vec


def _p_upper(plan: ToeplitzPlan, x: np.ndarray) -> None:
    # P^T = Lambda J T J Lambda^{-1}
    x /= plan.scale_vec
    x[:] = x[::-1]
    _lower_toeplitz(plan, x)
    x[:] = x[::-1]
    x *= plan.scale_vec


def toeplitz_apply(spec: MatrixSpec, plan: ToeplitzPlan, x: np.ndarray) -> np.ndarray:
    """In-place ``x <- M x`` through the Toeplitz factorization of P."""
    _check_vector(x, spec.n)
    if plan.n != spec.n:
        raise ValueError(f"plan is for n={plan.n}, got n={spec.n}")
    if spec.n == 1:
        return x
    q = spec.family == "Q"
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if spec.variant == "identity":
            _p_lower(plan, x)
            if q:
                apply_diagonal(0.5, x)
        elif spec.variant == "transpose":
            if q:
                apply_diagonal(0.5, x)
            _p_upper(plan, x)
        elif spec.variant == "inverse":
            apply_sign(x)
            if q:
                apply_diagonal(2.0, x)
            _p_lower(plan, x)
            apply_sign(x)
        else:
            apply_sign(x)
            _p_upper(plan, x)
            if q:
                apply_diagonal(2.0, x)
            apply_sign(x)
    return x
