"""Choosing the recursion threshold for this machine.

Run with ``python3 demos/tune_threshold.py [plan.txt]``.  It times the
quadratic kernel (A_n) and one FFT convolution (B_n) at a handful of sizes,
fits the cost model, and solves the recursion-tree dynamic program for the
size N at which recursing first pays off.  With a path argument the result
is saved as a plan file; point ``FASTPASCAL_PLAN`` at it to make it the
default.
"""

import sys

from fastpascal import autotune


def main():
    samples = autotune.measure_costs(autotune.TUNE_SIZES, trials=3)
    for s in samples:
        print(f"n = {s.n:5d}: A = {s.a:.2e} s, B = {s.b:.2e} s")
    model, report = autotune.fit_cost_model(samples)
    print(f"\nA_n = {model.a0:.2e} + {model.a1:.2e} n + {model.a2:.2e} n^2")
    print(f"B_n = {model.b0:.2e} + {model.b1:.2e} n + {model.b2:.2e} n log n")
    print(f"residual rms: A {report.rms_a:.1e} s, B {report.rms_b:.1e} s")

    fixed = autotune.solve_dynprog_fixed(model, 2**16)
    free = autotune.solve_dynprog_free(model, 4096)
    print(f"\nhalving splits: N = {fixed.threshold}")
    print(f"free splits:    N = {free.threshold}, saving "
          f"{1 - free.table[4096] / fixed.table[4096]:.1%} of the modelled time at n = 4096")
    if len(sys.argv) > 1:
        autotune.save_plan(fixed, sys.argv[1])
        print(f"plan written to {sys.argv[1]}")


if __name__ == "__main__":
    main()
