"""Divide-and-conquer O(n log^2 n) products with the Pascal matrices.

For a partition ``n = n_1 + ... + n_k`` with prefix sums ``c_i``, row block
``i`` of ``Q_n x`` equals ``Q_{n_i} B_{c_i, c_{i-1}} x[:c_i]`` where
``B_{c, m}`` is the valid convolution with the order-``m`` binomial filter.
The same holds for ``P_n`` with unnormalized filters ``C(m, k)``.  Taking
``k = 2`` and splitting at ``floor(n/2)`` at every level gives the two-way
recursion; below a size threshold the O(n^2) kernels take over.

Transposes run the adjoint recursion (children first, then full
convolutions accumulate into the prefix).  Inverses use ``P^{-1} = W P W``
and ``Q^{-1} = W P D^(2) W = W D^(3) B W`` where ``B`` is the Bernstein
matrix at t = 2/3, entries ``C(i, j) 2^j / 3^i``.  Routing Q^{-1} through the
stochastic matrix ``B`` keeps the FFT rounding relative to quantities of
the size of the output; the unnormalized P recursion would cancel
catastrophically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _sweeps, conv
from .pascal import (
    MatrixSpec,
    _check_vector,
    apply_quadratic,
    apply_sign,
    quadratic_flops,
)

DEFAULT_THRESHOLD = 452


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        if not self.parts or any(p < 1 for p in self.parts):
            raise ValueError(f"partition parts must be positive, got {self.parts}")

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def prefixes(self) -> tuple[int, ...]:
        c = [0]
        for p in self.parts:
            c.append(c[-1] + p)
        return tuple(c)


def partition_uniform(n: int, k: int) -> Partition:
    """Split ``n`` into ``k`` parts of size floor(n/k) or ceil(n/k), larger ones first."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    q, r = divmod(n, k)
    return Partition(tuple([q + 1] * r + [q] * (k - r)))


@dataclass(frozen=True)
class RecursionPlan:
    """How the recursion splits.

    Sizes ``n <= threshold`` go to the quadratic kernel.  Larger sizes split
    at ``splits[n]`` when listed (tuned plans), else at ``floor(n/2)``.
    """

    threshold: int = DEFAULT_THRESHOLD
    k: int = 2
    partition: str = "uniform"
    splits: tuple[tuple[int, int], ...] = ()
    conv_path: str = "fft"
    fft_size: str = "exact"
    _split_map: dict = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self):
        if int(self.threshold) != self.threshold or self.threshold < 1:
            raise ValueError(f"threshold must be a positive integer, got {self.threshold!r}")
        if self.k < 2:
            raise ValueError(f"branching factor must be at least 2, got {self.k}")
        if self.partition not in ("uniform", "explicit"):
            raise ValueError(f"unknown partition rule {self.partition!r}")
        for n, m in self.splits:
            if not 1 <= m < n:
                raise ValueError(f"split {m} invalid for size {n}")
        object.__setattr__(self, "_split_map", dict(self.splits))

    def split(self, n: int) -> int:
        return self._split_map.get(n, n // 2)


@dataclass
class FlopCounter:
    """Tallies nominal floating point operations of a product."""

    adds: int = 0
    muls: int = 0
    ffts: int = 0
    fft_flops: int = 0

    @property
    def total(self) -> int:
        return self.adds + self.muls + self.fft_flops

    def quadratic(self, spec: MatrixSpec) -> None:
        a, m = quadratic_flops(spec)
        self.adds += a
        self.muls += m

    def convolution(self, n: int, m: int, fft: bool, size: int) -> None:
        if m == 0:
            return
        if fft:
            self.ffts += 2
            self.fft_flops += 2 * conv.fft_flops(size)
            self.muls += 6 * (size // 2 + 1)
        else:
            self.muls += (m + 1) * (n - m)
            self.adds += m * (n - m)


def _kernel(family: str, m: int) -> conv.ConvKernel:
    kind = "binomial_normalized" if family == "Q" else "binomial_unnormalized"
    return conv.make_kernel(kind, m)


class _Runner:
    """Two-way and k-way recursions for one lower-triangular family.

    ``family`` is ``"P"``, ``"Q"`` or ``"B"`` (the Bernstein matrix at ``t``).
    """

    def __init__(self, family: str, plan: RecursionPlan, counter: FlopCounter | None,
                 t: float | None = None):
        self.family = family
        self.plan = plan
        self.counter = counter
        self.t = t

    def kernel(self, m: int) -> conv.ConvKernel:
        if self.family == "B":
            return conv.make_kernel("bernstein", m, self.t)
        return _kernel(self.family, m)

    def _base(self, variant: str, x: np.ndarray) -> None:
        n = x.shape[0]
        if self.family == "B":
            if self.counter is not None:
                self.counter.adds += n * (n - 1) // 2
                self.counter.muls += n * (n - 1)
            sweep = _sweeps.g_forward if variant == "identity" else _sweeps.gt_forward
            buf = x if x.flags.c_contiguous else np.ascontiguousarray(x)
            sweep(buf, self.t)
            if buf is not x:
                x[:] = buf
            return
        spec = MatrixSpec(self.family, variant, n)
        if self.counter is not None:
            self.counter.quadratic(spec)
        apply_quadratic(spec, "direct_multiply", x)

    def _count(self, n: int, m: int) -> None:
        if self.counter is not None:
            fft = conv._use_fft(self.plan.conv_path, n, m)
            size = conv._transform_size(n, self.plan.fft_size) if fft else n
            self.counter.convolution(n, m, fft, size)

    def valid(self, m: int, x: np.ndarray, out: np.ndarray) -> None:
        self._count(x.shape[0], m)
        conv.conv_valid(self.kernel(m), x, out, self.plan.conv_path, self.plan.fft_size)

    def full(self, m: int, y: np.ndarray, out: np.ndarray) -> None:
        self._count(y.shape[0] + m, m)
        conv.conv_full_transpose(self.kernel(m), y, out, self.plan.conv_path, self.plan.fft_size)

    def lower(self, x: np.ndarray) -> None:
        n = x.shape[0]
        if n <= self.plan.threshold:
            if n > 1:
                self._base("identity", x)
            return
        m = self.plan.split(n)
        self.valid(m, x, x[m:])
        self.lower(x[m:])
        self.lower(x[:m])

    def upper(self, x: np.ndarray) -> None:
        n = x.shape[0]
        if n <= self.plan.threshold:
            if n > 1:
                self._base("transpose", x)
            return
        m = self.plan.split(n)
        self.upper(x[m:])
        self.upper(x[:m])
        t = np.empty(n)
        self.full(m, x[m:], t)
        x[:m] += t[:m]
        x[m:] = t[m:]

    def kway_lower(self, x: np.ndarray, part: Partition) -> None:
        c = part.prefixes
        for i in range(part.k, 0, -1):
            lo, hi = c[i - 1], c[i]
            if lo:
                self.valid(lo, x[:hi], x[lo:hi])
            self.lower(x[lo:hi])

    def kway_upper(self, x: np.ndarray, part: Partition) -> None:
        c = part.prefixes
        out = np.zeros(x.shape[0])
        t = np.empty(x.shape[0])
        for i in range(part.k, 0, -1):
            lo, hi = c[i - 1], c[i]
            block = x[lo:hi].copy()
            self.upper(block)
            if lo:
                self.full(lo, block, t[:hi])
                out[:hi] += t[:hi]
            else:
                out[:hi] += block
        x[:] = out


@lru_cache(maxsize=64)
def _powers_of_three(n: int) -> np.ndarray:
    out = np.empty(n)
    for i in range(n):
        try:
            out[i] = float(3**i)
        except OverflowError:
            out[i:] = np.inf
            break
    out.setflags(write=False)
    return out


def _dispatch(spec: MatrixSpec, x: np.ndarray, plan: RecursionPlan,
              counter: FlopCounter | None, lower, upper) -> np.ndarray:
    """Rewrite ``spec`` onto a lower/upper recursion with W and diagonal wrappers."""
    inverse = spec.variant in ("inverse", "inverse_transpose")
    if not inverse:
        run = _Runner(spec.family, plan, counter)
        (lower if spec.is_lower else upper)(run, x)
        return x
    apply_sign(x)
    if spec.family == "P":
        # P^{-1} = W P W
        run = _Runner("P", plan, counter)
        (lower if spec.variant == "inverse" else upper)(run, x)
    else:
        # Q^{-1} = W P D^(2) W = W D^(3) B^(2/3) W, B the Bernstein matrix
        run = _Runner("B", plan, counter, t=2.0 / 3.0)
        with np.errstate(over="ignore", invalid="ignore"):
            if spec.variant == "inverse":
                lower(run, x)
                x *= _powers_of_three(spec.n)
            else:
                x *= _powers_of_three(spec.n)
                upper(run, x)
    apply_sign(x)
    return x


def bernstein_recursive(t: float, x: np.ndarray, plan: RecursionPlan | None = None,
                        transpose: bool = False, counter: FlopCounter | None = None) -> np.ndarray:
    """In-place product with the Bernstein matrix at ``t`` (or its transpose)."""
    plan = RecursionPlan() if plan is None else plan
    run = _Runner("B", plan, counter, t=float(t))
    (run.upper if transpose else run.lower)(x)
    return x


def recursive_apply(spec: MatrixSpec, plan: RecursionPlan | None, x: np.ndarray,
                    counter: FlopCounter | None = None) -> np.ndarray:
    """In-place ``x <- M x`` by the two-way recursion.

    Sizes at or below ``plan.threshold`` call :func:`apply_quadratic`
    directly with the requested matrix.  ``counter`` collects nominal flops.
    """
    plan = RecursionPlan() if plan is None else plan
    _check_vector(x, spec.n)
    if spec.n <= plan.threshold:
        if counter is not None:
            counter.quadratic(spec)
        return apply_quadratic(spec, "direct_multiply", x)
    return _dispatch(spec, x, plan, counter, _Runner.lower, _Runner.upper)


def kway_apply(spec: MatrixSpec, k: int, plan: RecursionPlan | None, x: np.ndarray,
               counter: FlopCounter | None = None,
               partition: Partition | None = None) -> np.ndarray:
    """In-place product whose first level splits into ``k`` blocks.

    The blocks form a uniform partition unless ``partition`` is given; each
    block's square factor is then computed by the two-way recursion.
    """
    plan = RecursionPlan() if plan is None else plan
    _check_vector(x, spec.n)
    if partition is None:
        if not 2 <= k <= spec.n:
            raise ValueError(f"need 2 <= k <= n, got k={k}, n={spec.n}")
        if k == 2:
            return recursive_apply(spec, plan, x, counter)
        partition = partition_uniform(spec.n, k)
    elif partition.n != spec.n:
        raise ValueError(f"partition sums to {partition.n}, expected {spec.n}")
    return _dispatch(spec, x, plan, counter,
                     lambda run, v: run.kway_lower(v, partition),
                     lambda run, v: run.kway_upper(v, partition))
