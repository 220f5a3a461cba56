"""Triangular Pascal matrices and their O(n^2) in-place products.

Two families are supported:

* ``P``, the lower-triangular Pascal matrix, ``P[i, j] = C(i, j)``;
* ``Q = D^(1/2) P``, its l-infinity normalized version with unit row sums.

Each comes in four variants (identity, transpose, inverse, inverse
transpose).  Inverses reduce to products through ``P^{-1} = W P W`` and
``Q^{-1} = W P D^(2) W`` where ``W = diag((-1)^k)`` and
``D^(delta) = diag(delta^k)``.

Every variant has two quadratic kernels built from the bidiagonal
factorizations ``D^(d) P = E_{n-1} ... E_1`` and ``P D^(d) = F_{n-1} ... F_1``:
``direct_multiply`` multiplies the factors and ``solve`` runs forward/back
substitution through the factors of the inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from numba import njit

from . import _sweeps

FAMILIES = ("P", "Q")
VARIANTS = ("identity", "transpose", "inverse", "inverse_transpose")
STRATEGIES = ("direct_multiply", "solve")

DENSE_CAP = 2048

_INVERSE_OF = {
    "identity": "inverse",
    "inverse": "identity",
    "transpose": "inverse_transpose",
    "inverse_transpose": "transpose",
}
_TRANSPOSE_OF = {
    "identity": "transpose",
    "transpose": "identity",
    "inverse": "inverse_transpose",
    "inverse_transpose": "inverse",
}


@dataclass(frozen=True)
class MatrixSpec:
    """One of the 16 matrices {P, Q} x {variant} at size ``n``."""

    family: str
    variant: str
    n: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")

    @classmethod
    def parse(cls, text: str, n: int) -> MatrixSpec:
        """Build a spec from ``"Q"`` or ``"Q:inverse_transpose"``."""
        family, _, variant = text.partition(":")
        return cls(family.strip(), variant.strip() or "identity", n)

    @property
    def label(self) -> str:
        return f"{self.family}:{self.variant}"

    @property
    def is_lower(self) -> bool:
        return self.variant in ("identity", "inverse")

    def inverse(self) -> MatrixSpec:
        return MatrixSpec(self.family, _INVERSE_OF[self.variant], self.n)

    def transpose(self) -> MatrixSpec:
        return MatrixSpec(self.family, _TRANSPOSE_OF[self.variant], self.n)

    def resized(self, n: int) -> MatrixSpec:
        return MatrixSpec(self.family, self.variant, n)


def all_specs(n: int) -> list[MatrixSpec]:
    return [MatrixSpec(f, v, n) for f in FAMILIES for v in VARIANTS]


def _dyadic_to_float(c: int, e: int) -> float:
    """Correctly rounded ``c * 2**e`` for an exact integer ``c``."""
    try:
        if e >= 0:
            return float(c << e)
        return c / (1 << -e)
    except OverflowError:
        return float("inf") if c > 0 else float("-inf")


def _scale(spec: MatrixSpec, c: int, i: int, j: int) -> tuple[int, int]:
    """Sign and power-of-two scaling that turn ``c = C(a, b)`` into entry (i, j)."""
    if spec.variant in ("inverse", "inverse_transpose") and (i + j) % 2:
        c = -c
    if spec.family == "P":
        return c, 0
    # Q = D^(1/2) P and Q^{-1} = W P D^(2) W
    if spec.variant == "identity":
        return c, -i
    if spec.variant == "transpose":
        return c, -j
    if spec.variant == "inverse":
        return c, j
    return c, i


def pascal_entry(spec: MatrixSpec, i: int, j: int) -> float:
    """Entry ``(i, j)`` of the matrix named by ``spec``, correctly rounded."""
    if not (0 <= i < spec.n and 0 <= j < spec.n):
        raise IndexError(f"index ({i}, {j}) out of range for n={spec.n}")
    a, b = (i, j) if spec.is_lower else (j, i)
    if b > a:
        return 0.0
    return _dyadic_to_float(*_scale(spec, comb(a, b), i, j))


def dense_materialize(spec: MatrixSpec, cap: int = DENSE_CAP) -> np.ndarray:
    """Full dense matrix for ``spec``; entries come from exact integer binomials."""
    n = spec.n
    if n > cap:
        raise ValueError(f"n={n} exceeds the dense materialization cap {cap}")
    out = np.zeros((n, n))
    row = [1]
    for a in range(n):
        if a:
            row = [1] + [row[k - 1] + row[k] for k in range(1, a)] + [1]
        for b, c in enumerate(row):
            i, j = (a, b) if spec.is_lower else (b, a)
            out[i, j] = _dyadic_to_float(*_scale(spec, c, i, j))
    return out


def _check_vector(x, n: int | None = None) -> np.ndarray:
    if not isinstance(x, np.ndarray) or x.dtype != np.float64 or x.ndim != 1:
        raise TypeError("expected a 1-D float64 numpy array for an in-place product")
    if not x.flags.writeable:
        raise ValueError("array is read-only")
    if n is not None and x.shape[0] != n:
        raise ValueError(f"dimension mismatch: len(x)={x.shape[0]} but n={n}")
    return x


def apply_sign(x: np.ndarray) -> np.ndarray:
    """Multiply by W in place: negate every odd-indexed entry."""
    odd = x[1::2]
    np.negative(odd, out=odd)
    return x


@njit(cache=True)
def _running_power(x, delta):
    p = 1.0
    for k in range(x.shape[0]):
        x[k] = x[k] * p
        p = p * delta


def apply_diagonal(delta: float, x: np.ndarray) -> np.ndarray:
    """Multiply by D^(delta) in place using a running power."""
    if x.shape[0] and delta != 1.0:
        if x.flags.c_contiguous:
            _running_power(x, float(delta))
        else:
            tmp = np.ascontiguousarray(x)
            _running_power(tmp, float(delta))
            x[:] = tmp
    return x


# variant, strategy -> (conjugate by W, sweep, factor letter)
_TABLE = {
    ("identity", "direct_multiply"): (False, _sweeps.e_forward, "E"),
    ("identity", "solve"): (True, _sweeps.f_inverse, "F"),
    ("transpose", "direct_multiply"): (False, _sweeps.et_forward, "E"),
    ("transpose", "solve"): (True, _sweeps.ft_inverse, "F"),
    ("inverse", "direct_multiply"): (True, _sweeps.f_forward, "F"),
    ("inverse", "solve"): (False, _sweeps.e_inverse, "E"),
    ("inverse_transpose", "direct_multiply"): (True, _sweeps.ft_forward, "F"),
    ("inverse_transpose", "solve"): (False, _sweeps.et_inverse, "E"),
}


def quadratic_flops(spec: MatrixSpec) -> tuple[int, int]:
    """(adds, multiplies) performed by :func:`apply_quadratic` on ``spec``."""
    n = spec.n
    adds = n * (n - 1) // 2
    return adds, (0 if spec.family == "P" else adds)


def apply_quadratic(spec: MatrixSpec, strategy: str, x: np.ndarray) -> np.ndarray:
    """In-place ``x <- M x`` for the matrix ``M`` named by ``spec``.

    ``strategy`` selects the factor product (``"direct_multiply"``) or the
    substitution through the inverse factors (``"solve"``).  Uses O(1)
    extra memory.  For the Q family the factors are E^(1/2) and F^(2); the P
    family uses E^(1) = F^(1) and performs additions only.
    """
    _check_vector(x, spec.n)
    try:
        conj, sweep, letter = _TABLE[(spec.variant, strategy)]
    except KeyError:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}") from None
    if spec.n == 1:
        return x
    if spec.family == "P":
        d = 1.0
    else:
        d = 0.5 if letter == "E" else 2.0
    buf = x if x.flags.c_contiguous else np.ascontiguousarray(x)
    if conj:
        apply_sign(buf)
    sweep(buf, d)
    if conj:
        apply_sign(buf)
    if buf is not x:
        x[:] = buf
    return x
