"""Evaluating a high-degree Bezier curve.

Run with ``python3 demos/bezier_curves.py``.  A random planar curve of
degree 4096 is evaluated at a few parameters with De Casteljau's
algorithm (O(n^2) convex combinations) and with the fast evaluator, which
runs n - k De Casteljau steps as one Bernstein convolution and finishes
the last k by hand.  The two agree to about 1e-13.
"""

import time

import numpy as np

from fastpascal import (
    BezierCurve,
    batch_eval,
    de_casteljau,
    fast_eval,
    uniform_relative_error,
)
from fastpascal.bezier import default_k


def main():
    rng = np.random.default_rng(1)
    n = 4096
    curve = BezierCurve(np.cumsum(rng.standard_normal((n + 1, 2)), axis=0))
    print(f"degree {n}, default k = {default_k(n)}")

    for t in (0.1, 0.5, 0.9):
        t0 = time.perf_counter()
        ref = de_casteljau(curve, t)
        t1 = time.perf_counter()
        fast = fast_eval(curve, t)
        t2 = time.perf_counter()
        print(f"t = {t}: point {fast}, error {uniform_relative_error(ref, fast):.1e},"
              f" De Casteljau {t1 - t0:.3f} s, fast {t2 - t1:.4f} s")

    # all k from 0 (one big convolution) to n (plain De Casteljau) give the same point
    ref = de_casteljau(curve, 0.3)
    for k in (0, 16, default_k(n), 1024, n):
        print(f"k = {k:4d}: error {uniform_relative_error(ref, fast_eval(curve, 0.3, k)):.1e}")

    ts = np.linspace(0, 1, 200)
    pts = batch_eval(curve, ts)
    print(f"\n200 parameters in one batch: {pts.shape[0]} points, endpoints {pts[0]} and {pts[-1]}")


if __name__ == "__main__":
    main()
