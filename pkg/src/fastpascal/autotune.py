"""Cost models and dynamic programs that pick the recursion threshold.

With ``A_n`` the cost of the quadratic kernel and ``B_n`` the cost of one
FFT convolution of length n, the cheapest two-way recursion costs

    T_n = min(A_n, T_{m} + T_{n-m} + B_n)

with ``m = floor(n/2)`` (:func:`solve_dynprog_fixed`) or the best ``m``
(:func:`solve_dynprog_free`).  The threshold is ``N = min{n : A_n > T_n}``.
Costs come from a least-squares fit of
``A_n = a0 + a1 n + a2 n^2`` and ``B_n = b0 + b1 n + b2 n log n``.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import conv
from .fastmul import RecursionPlan
from .pascal import MatrixSpec, apply_quadratic

log = logging.getLogger(__name__)

PLAN_ENV = "FASTPASCAL_PLAN"
PLAN_VERSION = 1
DEFAULT_MAX_N = 2**20
# timing sizes for the cost fit; a few non-powers of two keep the design well spread
TUNE_SIZES = tuple(sorted([2**p for p in range(4, 12)] + [384, 768, 1536]))


@dataclass(frozen=True)
class CostModel:
    a0: float
    a1: float
    a2: float
    b0: float
    b1: float
    b2: float

    def A(self, n):
        n = np.asarray(n, dtype=float)
        return self.a0 + self.a1 * n + self.a2 * n * n

    def B(self, n):
        n = np.asarray(n, dtype=float)
        return self.b0 + self.b1 * n + self.b2 * n * np.log(n)


@dataclass(frozen=True)
class TabulatedCosts:
    """Explicit cost tables indexed by n (entry 0 unused); handy for exact tests."""

    a: tuple
    b: tuple

    def A(self, n):
        return np.asarray(self.a, dtype=float)[np.asarray(n)]

    def B(self, n):
        return np.asarray(self.b, dtype=float)[np.asarray(n)]


@dataclass(frozen=True)
class CostSample:
    n: int
    a: float
    b: float


@dataclass(frozen=True)
class FitReport:
    residual_a: np.ndarray
    residual_b: np.ndarray

    @property
    def rms_a(self) -> float:
        return float(np.sqrt(np.mean(self.residual_a**2)))

    @property
    def rms_b(self) -> float:
        return float(np.sqrt(np.mean(self.residual_b**2)))


@dataclass(frozen=True)
class TuneResult:
    """Optimal costs ``table[n]`` for n = 1..max_n and the threshold ``N``.

    ``splits[n]`` is the split used when recursing at ``n``.
    """

    threshold: int
    max_n: int
    table: np.ndarray = field(repr=False)
    quadratic: np.ndarray = field(repr=False)
    splits: dict = field(repr=False, default_factory=dict)
    mode: str = "fixed"

    def to_plan(self) -> RecursionPlan:
        """Plan that runs the quadratic kernel exactly where ``n < N``."""
        base = max(1, self.threshold - 1)
        extra = tuple(sorted((n, m) for n, m in self.splits.items() if n > base and m != n // 2))
        return RecursionPlan(threshold=base, splits=extra)


def _timeit(fn, min_time: float) -> float:
    reps = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        dt = time.perf_counter() - t0
        if dt >= min_time:
            return dt / reps
        reps = reps * 2 if dt <= 0 else max(reps * 2, int(reps * min_time / dt * 1.2) + 1)


def measure_costs(sizes, trials: int = 3, min_time: float = 1e-3, seed: int = 0) -> list[CostSample]:
    """Minimum-over-trials wall time of the quadratic kernel and one FFT convolution.

    Each measurement repeats its call until at least ``min_time`` seconds
    elapse, so small sizes are not lost in timer resolution.
    """
    sizes = [int(n) for n in sizes]
    if not sizes:
        raise ValueError("need at least one size")
    if trials < 3:
        raise ValueError("need at least 3 trials")
    rng = np.random.default_rng(seed)
    out = []
    for n in sizes:
        x = rng.standard_normal(n)
        work = x.copy()
        spec = MatrixSpec("Q", "identity", n)
        kern = conv.make_kernel("binomial_normalized", n // 2)
        dst = np.empty(n - n // 2)

        def quad():
            work[:] = x
            apply_quadratic(spec, "direct_multiply", work)

        def fft():
            conv.conv_valid(kern, x, dst, path="fft")

        fft()
        a = min(_timeit(quad, min_time) for _ in range(trials))
        b = min(_timeit(fft, min_time) for _ in range(trials))
        log.debug("n=%d A=%.3g B=%.3g", n, a, b)
        out.append(CostSample(n, a, b))
    return out


def fit_cost_model(samples) -> tuple[CostModel, FitReport]:
    """Least-squares coefficients for A and B, plus residuals.

    Rows are weighted by the inverse observed cost, so each size counts by
    its relative error.  Residuals are reported in the original units.
    """
    n = np.array([s.n for s in samples], dtype=float)
    if len(set(n.tolist())) < 3:
        raise ValueError("need samples at 3 or more distinct sizes to fit the cost model")
    a = np.array([s.a for s in samples], dtype=float)
    b = np.array([s.b for s in samples], dtype=float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("costs must be positive")
    Va = np.column_stack([np.ones_like(n), n, n * n])
    Vb = np.column_stack([np.ones_like(n), n, n * np.log(n)])
    ca, cb = _relative_lstsq(Va, a), _relative_lstsq(Vb, b)
    model = CostModel(*ca.tolist(), *cb.tolist())
    return model, FitReport(a - Va @ ca, b - Vb @ cb)


def _relative_lstsq(V: np.ndarray, y: np.ndarray) -> np.ndarray:
    # timing noise is multiplicative, so minimize relative residuals;
    # column scaling keeps the system well conditioned
    W = V / y[:, None]
    scale = np.abs(W).max(axis=0)
    c, *_ = np.linalg.lstsq(W / scale, np.ones_like(y), rcond=None)
    return c / scale


def _tables(model, max_n: int):
    if max_n < 2:
        raise ValueError(f"max_n must be at least 2, got {max_n}")
    idx = np.arange(1, max_n + 1)
    A = np.zeros(max_n + 1)
    B = np.zeros(max_n + 1)
    A[1:] = model.A(idx)
    B[1:] = model.B(idx)
    return A, B


def _threshold(A: np.ndarray, T: np.ndarray, max_n: int) -> int:
    hits = np.nonzero(A[1:] > T[1:])[0]
    return int(hits[0]) + 1 if hits.size else max_n + 1


def solve_dynprog_fixed(model, max_n: int = DEFAULT_MAX_N) -> TuneResult:
    """Bottom-up ``T_n = min(A_n, T_{n//2} + T_{n - n//2} + B_n)``; ties keep A_n."""
    A, B = _tables(model, max_n)
    T = A.copy()
    Al, Bl, Tl = A.tolist(), B.tolist(), T.tolist()
    splits = {}
    for n in range(2, max_n + 1):
        m = n // 2
        r = Tl[m] + Tl[n - m] + Bl[n]
        if r < Al[n]:
            Tl[n] = r
            splits[n] = m
    T = np.array(Tl)
    return TuneResult(_threshold(A, T, max_n), max_n, T, A, splits, "fixed")


def solve_dynprog_free(model, max_n: int = 4096, prune: bool = False) -> TuneResult:
    """Like :func:`solve_dynprog_fixed` but minimizing over the split too.

    The cost is symmetric in ``m <-> n - m``, so only ``m <= n/2`` is
    searched; ties go to the largest such ``m`` and then to A_n.
    ``prune`` restricts the search to ``n/4 <= m <= n/2``.
    """
    A, B = _tables(model, max_n)
    T = A.copy()
    splits = {}
    for n in range(2, max_n + 1):
        h = n // 2
        lo = max(1, -(-n // 4)) if prune else 1
        ms = np.arange(h, lo - 1, -1)
        cand = T[ms] + T[n - ms]
        i = int(np.argmin(cand))
        r = cand[i] + B[n]
        m = int(ms[i])
        if r < A[n]:
            T[n] = r
        splits[n] = m
    return TuneResult(_threshold(A, T, max_n), max_n, T, A, splits, "free")


def solve_dynprog_kway(model, max_n: int, k: int) -> np.ndarray:
    """Optimal cost when every level splits into exactly ``k`` parts (exploratory).

    Uses the block cost ``sum_{i>=2} B_{c_i} + sum_i T_{n_i}`` over all
    ``k``-part compositions, found with an inner prefix DP.  Returns the
    cost table indexed by n.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    A, B = _tables(model, max_n)
    T = A.copy()
    # G[j][c]: best cost of splitting a prefix of length c into j parts
    G = np.full((k + 1, max_n + 1), np.inf)
    for c in range(1, max_n + 1):
        for j in range(2, min(k, c) + 1):
            prev = np.arange(j - 1, c)
            G[j][c] = np.min(G[j - 1][prev] + T[c - prev]) + B[c]
        if G[k][c] < A[c]:
            T[c] = G[k][c]
        G[1][c] = T[c]
    return T


class PlanFormatError(ValueError):
    """The plan file could not be parsed."""


class PlanValidationError(ValueError):
    """The plan file parsed but violates an invariant."""


@dataclass(frozen=True)
class PlanFile:
    N: int
    max_n: int
    splits: tuple[tuple[int, int], ...] = ()

    def to_plan(self) -> RecursionPlan:
        base = max(1, self.N - 1)
        return RecursionPlan(threshold=base, splits=tuple((n, m) for n, m in self.splits if n > base))


def save_plan(result: TuneResult, path) -> None:
    """Write the threshold and any non-default splits as a text plan file."""
    lines = [f"version {PLAN_VERSION}", f"N {result.threshold}", f"maxn {result.max_n}"]
    for n, m in sorted(result.splits.items()):
        if n >= result.threshold and m != n // 2:
            lines.append(f"split {n} {m}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_plan_file(path) -> PlanFile:
    """Parse and validate a plan file; a missing file raises FileNotFoundError."""
    text = Path(path).read_text(encoding="utf-8")
    fields: dict = {}
    splits = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, *vals = line.split()
        try:
            nums = [int(v) for v in vals]
        except ValueError:
            raise PlanFormatError(f"line {lineno}: non-integer value in {raw!r}") from None
        if key == "split":
            if len(nums) != 2:
                raise PlanFormatError(f"line {lineno}: split needs two integers")
            splits.append((nums[0], nums[1]))
        elif key in ("version", "N", "maxn"):
            if len(nums) != 1:
                raise PlanFormatError(f"line {lineno}: {key} needs one integer")
            if key in fields:
                raise PlanFormatError(f"line {lineno}: duplicate {key}")
            fields[key] = nums[0]
        else:
            raise PlanFormatError(f"line {lineno}: unknown key {key!r}")
    for key in ("version", "N", "maxn"):
        if key not in fields:
            raise PlanFormatError(f"missing {key} line")
    if fields["version"] != PLAN_VERSION:
        raise PlanFormatError(f"unsupported plan version {fields['version']}")
    if fields["N"] < 1:
        raise PlanValidationError(f"N must be at least 1, got {fields['N']}")
    if fields["maxn"] < 1:
        raise PlanValidationError(f"maxn must be at least 1, got {fields['maxn']}")
    for n, m in splits:
        if not 1 <= m < n:
            raise PlanValidationError(f"split {m} invalid for size {n}")
    return PlanFile(fields["N"], fields["maxn"], tuple(splits))


def load_plan(path) -> RecursionPlan:
    return read_plan_file(path).to_plan()


def default_plan() -> RecursionPlan:
    """Plan named by ``$FASTPASCAL_PLAN`` if set, else the shipped default."""
    path = os.environ.get(PLAN_ENV)
    if path:
        return load_plan(path)
    return RecursionPlan()


def crossover_size(sizes, trials: int = 5, seed: int = 0) -> int | None:
    """Smallest size in ``sizes`` where one recursion level beats the quadratic kernel.

    One level means an FFT convolution plus two quadratic half-size
    products, which is the comparison that defines ``N``.  Returns ``None``
    if the recursion never wins.
    """
    from .fastmul import recursive_apply

    rng = np.random.default_rng(seed)
    for n in sorted(int(v) for v in sizes):
        if n < 2:
            continue
        x = rng.standard_normal(n)
        spec = MatrixSpec("Q", "identity", n)
        one_level = RecursionPlan(threshold=n - 1)
        w = x.copy()

        def quad():
            w[:] = x
            apply_quadratic(spec, "direct_multiply", w)

        def rec():
            w[:] = x
            recursive_apply(spec, one_level, w)

        tq = min(_timeit(quad, 1e-3) for _ in range(trials))
        tr = min(_timeit(rec, 1e-3) for _ in range(trials))
        if tr < tq:
            return n
    return None
