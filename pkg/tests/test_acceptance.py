"""End-to-end acceptance checks.

Each test records one pass/fail line per criterion, printed in the terminal
summary, and then asserts so that a failing criterion also fails the run.
"""

import math
import time

import numpy as np
import pytest
from treecosts import cost_sets, explicit_costs, int_table

from fastpascal import autotune
from fastpascal.autotune import (
    TabulatedCosts,
    crossover_size,
    solve_dynprog_fixed,
    solve_dynprog_free,
)
from fastpascal.bezier import (
    BernsteinMatrixSpec,
    BezierCurve,
    bernstein_matrix_apply,
    de_casteljau,
    default_k,
    fast_eval,
)
from fastpascal.cli import main, read_table
from fastpascal.conv import conv_full_transpose, conv_valid, make_kernel
from fastpascal.fastmul import kway_apply, recursive_apply
from fastpascal.oracle import oracle_apply, uniform_relative_error
from fastpascal.pascal import MatrixSpec, apply_quadratic, apply_sign, dense_materialize
from fastpascal.toeplitz import make_toeplitz_plan, toeplitz_apply

pytestmark = pytest.mark.acceptance

VARIANTS = ("identity", "transpose", "inverse", "inverse_transpose")
SIZES = (2**4, 2**8, 2**12, 2**16)
TRIALS = 10


def _error(truth_fn, y):
    # an overflowed product has no finite error; skip the oracle for it
    if not np.all(np.isfinite(y)):
        return math.inf
    return uniform_relative_error(truth_fn(), y)


@pytest.fixture(scope="module")
def stability(gaussian_cases):
    """Mean oracle error of the quadratic and recursive kernels per (variant, n)."""
    out = {}
    for variant in VARIANTS:
        for n in SIZES:
            spec = MatrixSpec("Q", variant, n)
            quad, rec = [], []
            for trial in range(TRIALS):
                x = gaussian_cases.x(n, trial)
                with np.errstate(all="ignore"):
                    yq = apply_quadratic(spec, "direct_multiply", x.copy())
                    yr = recursive_apply(spec, None, x.copy())
                quad.append(_error(lambda: gaussian_cases.truth(variant, n, trial), yq))
                rec.append(_error(lambda: gaussian_cases.truth(variant, n, trial), yr))
            out[variant, n] = (float(np.mean(quad)), float(np.mean(rec)))
    return out


def test_criterion_01_quadratic_stability(stability, acceptance):
    bad = {k: v[0] for k, v in stability.items() if not v[0] <= 1e-10}
    worst = max(v[0] for k, v in stability.items() if k not in bad)
    acceptance(1, "quadratic kernels stable vs oracle", not bad,
               f"worst finite mean {worst:.2e}" + (f"; over bound at {sorted(bad)}" if bad else ""))
    assert not bad


def test_criterion_02_recursive_stability(stability, acceptance):
    bad = [k for k, (q, r) in stability.items() if not (r <= 10 * q or r <= 1e-15) or not r <= 1e-9]
    finite = [r for q, r in stability.values() if np.isfinite(r)]
    acceptance(2, "recursive error within 10x quadratic and 1e-9", not bad,
               f"worst finite mean {max(finite):.2e}" + (f"; failing {sorted(bad)}" if bad else ""))
    assert not bad


def _toeplitz_mean(n, alpha=None, trials=TRIALS):
    spec = MatrixSpec("Q", "identity", n)
    plan = make_toeplitz_plan(n, alpha)
    draws = np.random.default_rng(12345).standard_normal((trials, n))
    errs = []
    for x in draws:
        with np.errstate(all="ignore"):
            y = toeplitz_apply(spec, plan, x.copy())
        errs.append(_error(lambda: oracle_apply(spec, x), y))
    return float(np.mean(errs))


def test_criterion_03_toeplitz_instability(acceptance):
    large = {n: _toeplitz_mean(n) for n in (128, 256, 512, 1024, 2048, 4096)}
    crossover = next((n for n in range(2, 129) if _toeplitz_mean(n) >= 1), None)
    ok = all(e >= 1 for e in large.values()) and crossover is not None and crossover <= 128
    acceptance(3, "Toeplitz loses every digit by n = 128", ok,
               f"crossover n = {crossover}, min error for n >= 128 is {min(large.values()):.2e}")
    assert ok


def test_criterion_04_alpha_direction(acceptance):
    rows = {n: (_toeplitz_mean(n), _toeplitz_mean(n, alpha=1.0)) for n in (16, 32, 64)}
    ok = all(opt <= one for opt, one in rows.values())
    acceptance(4, "optimal alpha beats alpha = 1", ok,
               ", ".join(f"n={n}: {a:.1e} vs {b:.1e}" for n, (a, b) in rows.items()))
    assert ok


def _best(fn, x, trials):
    best = math.inf
    for _ in range(trials):
        w = x.copy()
        t0 = time.perf_counter()
        fn(w)
        best = min(best, time.perf_counter() - t0)
    return best


def test_criterion_05_speed_crossover(tuned, acceptance):
    _, result = tuned
    n = 2**16
    spec = MatrixSpec("Q", "identity", n)
    plan = result.to_plan()
    x = np.random.default_rng(5).standard_normal(n)
    recursive_apply(spec, plan, x.copy())
    t_quad = _best(lambda w: apply_quadratic(spec, "direct_multiply", w), x, 3)
    t_rec = _best(lambda w: recursive_apply(spec, plan, w), x, 5)
    N = result.threshold
    sizes = sorted({int(v) for v in np.geomspace(16, 8192, 40)})
    cross = crossover_size(sizes, trials=5)
    speed_ok = t_quad >= 10 * t_rec
    band_ok = cross is not None and N / 4 <= cross <= 4 * N
    acceptance(5, "recursion 10x faster at 2^16, crossover near tuned N", speed_ok and band_ok,
               f"speedup {t_quad / t_rec:.1f}x, measured crossover {cross}, tuned N {N}")
    assert speed_ok and band_ok


SYNTHETIC = {
    "quadratic": (lambda n: n * n, lambda n: 20 * n),
    "affine": (lambda n: 5 + 3 * n + n * n, lambda n: 50 + 2 * n * n.bit_length()),
    "ragged": (lambda n: n * n + 37 * (n % 5), lambda n: 30 * n + 11 * (n % 7)),
}


def test_criterion_06_dp_exhaustive(acceptance):
    failures = []
    for name, (fa, fb) in SYNTHETIC.items():
        a, b = int_table(fa, 128), int_table(fb, 128)
        model = TabulatedCosts(a, b)
        fixed, free = solve_dynprog_fixed(model, 128), solve_dynprog_free(model, 128)
        if list(fixed.table[1:]) != cost_sets(a, b, 128, free=False)[1:]:
            failures.append(f"{name} fixed")
        if list(free.table[1:]) != cost_sets(a, b, 128, free=True)[1:]:
            failures.append(f"{name} free")
        small = [min(explicit_costs(a, b, n, free=True)) for n in range(1, 11)]
        if list(solve_dynprog_free(model, 10).table[1:]) != small:
            failures.append(f"{name} explicit")
        if not np.all(free.table <= fixed.table):
            failures.append(f"{name} free > fixed")
    acceptance(6, "dynamic programs match exhaustive trees", not failures, ", ".join(failures))
    assert not failures


def test_criterion_07_round_trip_and_identity(acceptance):
    rng = np.random.default_rng(7)
    errs = {}
    for n in (4, 8, 16, 32, 64, 256, 1024, 4096):
        x = rng.standard_normal(n)
        for fwd, back in (("identity", "inverse"), ("transpose", "inverse_transpose")):
            with np.errstate(all="ignore"):
                y = recursive_apply(MatrixSpec("Q", fwd, n), None, x.copy())
                z = recursive_apply(MatrixSpec("Q", back, n), None, y)
            errs[fwd, n] = _error(lambda: x, z)
    bad = sorted(k for k, e in errs.items() if not e <= 1e-10)
    exact_ok = True
    for n in range(1, 49):
        # entries stay below 2^53 here, so the integer conversion is exact
        p = dense_materialize(MatrixSpec("P", "identity", n)).astype(np.int64).astype(object)
        pinv = dense_materialize(MatrixSpec("P", "inverse", n)).astype(np.int64).astype(object)
        w = np.diag([(-1) ** k for k in range(n)]).astype(object)
        exact_ok &= np.array_equal(w.dot(p).dot(w), pinv)
        exact_ok &= np.array_equal(p.dot(pinv), np.eye(n, dtype=int).astype(object))
    x = rng.standard_normal(48)
    exact_ok &= np.array_equal(
        oracle_apply(MatrixSpec("P", "inverse", 48), x),
        apply_sign(oracle_apply(MatrixSpec("P", "identity", 48), apply_sign(x.copy()))))
    ok = not bad and exact_ok
    first = min((n for _, n in bad), default=None)
    acceptance(7, "Q round trip within 1e-10 to 4096, P^-1 = WPW", ok,
               f"round trip fails from n = {first}; WPW {'exact' if exact_ok else 'mismatch'}")
    assert ok


def test_criterion_08_bezier(acceptance):
    rng = np.random.default_rng(8)
    worst = 0.0
    props = True
    for n in (1, 2, 10, 100, 1000, 4096):
        for d in (1, 2, 3):
            c = BezierCurve(rng.standard_normal((n + 1, d)))
            for t in (0.0, 0.13, 0.5, 0.81, 1.0):
                ref = de_casteljau(c, t)
                others = [fast_eval(c, t, k) for k in sorted({0, default_k(n), n})]
                others.append(bernstein_matrix_apply(BernsteinMatrixSpec(t, n), c.points)[n])
                worst = max(worst, *(uniform_relative_error(ref, y) for y in others))
            props &= np.array_equal(de_casteljau(c, 0.0), c.points[0])
            props &= np.array_equal(de_casteljau(c, 1.0), c.points[-1])
            if n <= 1000:
                M, v = rng.standard_normal((d, d)), rng.standard_normal(d)
                moved = BezierCurve(c.points @ M.T + v)
                scale = np.abs(c.points).max() * np.abs(M).sum(axis=1).max() + np.abs(v).max()
                for t in (0.27, 0.64):
                    props &= np.max(np.abs(de_casteljau(moved, t) - (M @ de_casteljau(c, t) + v))) <= 1e-12 * scale
    ok = worst <= 1e-11 and props
    acceptance(8, "Bezier evaluators agree to 1e-11", ok, f"worst error {worst:.2e}")
    assert ok


def test_criterion_09_convolution(acceptance):
    rng = np.random.default_rng(9)
    worst_path = worst_adj = 0.0
    for n in (2, 3, 17, 64, 255, 1024, 4096):
        for m in sorted({0, 1, n // 8, n // 2, n - 1}):
            for kind, t in (("binomial_normalized", None), ("bernstein", 0.3), ("bernstein", 0.5)):
                kern = make_kernel(kind, m, t)
                x = rng.standard_normal(n)
                worst_path = max(worst_path, uniform_relative_error(conv_valid(kern, x, path="direct"),
                                                                    conv_valid(kern, x, path="fft")))
                y = rng.standard_normal(n - m)
                lhs = math.fsum(conv_valid(kern, x, path="fft") * y)
                rhs = math.fsum(x * conv_full_transpose(kern, y, path="fft"))
                scale = math.fsum(conv_valid(kern, np.abs(x), path="direct") * np.abs(y))
                worst_adj = max(worst_adj, abs(lhs - rhs) / scale)
    ok = worst_path <= 1e-12 and worst_adj <= 1e-13
    acceptance(9, "FFT and direct convolution agree, adjoint holds", ok,
               f"path error {worst_path:.2e}, adjoint {worst_adj:.2e}")
    assert ok


def test_criterion_10_kway(tmp_path, acceptance, capsys):
    worst = 0.0
    for p in range(13, 17):
        n = 2**p
        x = np.random.default_rng(p).standard_normal(n)
        for variant in ("identity", "transpose"):
            spec = MatrixSpec("Q", variant, n)
            ref = recursive_apply(spec, None, x.copy())
            for k in (4, 6, 8):
                worst = max(worst, uniform_relative_error(ref, kway_apply(spec, k, None, x.copy())))
    out = tmp_path / "kway.txt"
    code = main(["kway", "--sizes", "8192,16384,32768,65536", "--ks", "2,3,4,5,6,7,8", "--trials", "3",
                 "--out", str(out)])
    header, rows = read_table(out)
    with capsys.disabled():
        print("\n" + out.read_text(), end="")
    ok = worst <= 1e-11 and code == 0 and len(rows) == 7 and len(header) == 5
    acceptance(10, "k-way matches two-way recursion", ok, f"worst error {worst:.2e}")
    assert ok


def test_tuned_threshold_reported(tuned, capsys):
    # context for criterion 5: the threshold this machine chose
    model, result = tuned
    with capsys.disabled():
        print(f"\ntuned N = {result.threshold} (max_n {result.max_n})")
    assert result.threshold >= 2
    assert isinstance(model, autotune.CostModel)
