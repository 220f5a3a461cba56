"""A short tour of why the normalized Pascal product needs care.

Run with ``python3 demos/stability_tour.py``.  It multiplies Gaussian
vectors by Q = D^(1/2) P three ways and scores each against the exact
oracle:

* the in-place quadratic sweeps (stable, O(n^2)),
* the divide-and-conquer recursion (stable, O(n log^2 n)),
* the classical Toeplitz/FFT factorization (fast, but it loses every digit
  somewhere below n = 100).
"""

import time

import numpy as np

from fastpascal import (
    MatrixSpec,
    apply_quadratic,
    make_toeplitz_plan,
    oracle_apply,
    recursive_apply,
    toeplitz_apply,
    uniform_relative_error,
)


def score(spec, x):
    truth = oracle_apply(spec, x)
    quad = apply_quadratic(spec, "direct_multiply", x.copy())
    rec = recursive_apply(spec, None, x.copy())
    with np.errstate(all="ignore"):
        toep = toeplitz_apply(spec, make_toeplitz_plan(spec.n), x.copy())
    return [uniform_relative_error(truth, y) if np.all(np.isfinite(y)) else np.inf for y in (quad, rec, toep)]


def main():
    rng = np.random.default_rng(0)
    print(f"{'n':>6} {'quadratic':>11} {'recursive':>11} {'toeplitz':>11}")
    for n in (8, 32, 64, 128, 512, 2048):
        errs = score(MatrixSpec("Q", "identity", n), rng.standard_normal(n))
        print(f"{n:6d} " + " ".join(f"{e:11.2e}" for e in errs))

    # the inverse is a different story: its entries grow like 3^n
    x = rng.standard_normal(40)
    y = recursive_apply(MatrixSpec("Q", "identity", 40), None, x.copy())
    back = recursive_apply(MatrixSpec("Q", "inverse", 40), None, y)
    print(f"\nround trip Q then Q^-1 at n = 40: error {uniform_relative_error(x, back):.1e}"
          f" (condition number 3^39 = {3.0**39:.1e})")

    n = 2**16
    spec = MatrixSpec("Q", "identity", n)
    x = rng.standard_normal(n)
    recursive_apply(spec, None, x.copy())
    t0 = time.perf_counter()
    apply_quadratic(spec, "direct_multiply", x.copy())
    t1 = time.perf_counter()
    recursive_apply(spec, None, x.copy())
    t2 = time.perf_counter()
    print(f"\nn = 2^16: quadratic {t1 - t0:.2f} s, recursive {t2 - t1:.3f} s")


if __name__ == "__main__":
    main()
