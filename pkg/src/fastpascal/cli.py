"""Command-line experiments: stability, timings, strategy ratios, k-way ratios, tuning, Bezier.

Exit status is 0 on success, 1 when arguments or inputs fail validation and
2 when a run fails.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import autotune, bezier, oracle
from .fastmul import RecursionPlan, kway_apply, recursive_apply
from .pascal import VARIANTS, MatrixSpec, apply_quadratic
from .toeplitz import make_toeplitz_plan, toeplitz_apply

METHODS = ("quadratic", "recursive", "toeplitz")
_SUFFIX = {"recursive": "rec", "quadratic": "small", "toeplitz": "toep"}
_TAG = {"identity": "", "transpose": "T", "inverse": "inv", "inverse_transpose": "invT"}
_RATIO_COLS = {"identity": "normal", "transpose": "transpose", "inverse": "inverse",
               "inverse_transpose": "invtrans"}


class ValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class ExperimentConfig:
    sizes: list
    trials: int = 10
    seed: int = 0
    methods: tuple = METHODS
    spec: str = "Q:identity"
    out: str | None = None
    fmt: str = "whitespace"
    digits: int = 50
    plan: RecursionPlan | None = None

    def validate(self) -> None:
        if self.trials < 1:
            raise ValidationError("trials must be at least 1")
        if self.digits < 30:
            raise ValidationError("digits must be at least 30 for oracle comparisons")
        if not self.sizes or any(n < 1 for n in self.sizes):
            raise ValidationError("sizes must be positive")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValidationError("sizes must be strictly increasing")
        for m in self.methods:
            if m not in METHODS:
                raise ValidationError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
        try:
            MatrixSpec.parse(self.spec, 1)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            lo, hi, *step = (int(v) for v in part.split(":"))
            out.extend(range(lo, hi + 1, step[0] if step else 1))
        elif part:
            out.append(int(part))
    return out


def _column(spec: MatrixSpec, method: str) -> str:
    return f"{spec.family}{_TAG[spec.variant]}_mult_{_SUFFIX[method]}"


def _write_table(path, header, rows, comments, fmt) -> None:
    sep = "," if fmt == "csv" else " "
    lines = [f"# {c}" for c in comments]
    lines.append(sep.join(header))
    for row in rows:
        lines.append(sep.join(v if isinstance(v, str) else f"{v:.6e}" if isinstance(v, float) else str(v)
                              for v in row))
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def read_table(path):
    """Parse a file written by this tool: returns (header, rows of floats)."""
    header, rows = None, []
    with open(path) as fh:
        for line in fh:
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.replace(",", " ").split()
            if header is None:
                header = fields
            else:
                rows.append([float(v) for v in fields])
    return header, rows


def _runner(method: str, spec: MatrixSpec, plan: RecursionPlan):
    if method == "quadratic":
        return lambda x: apply_quadratic(spec, "direct_multiply", x)
    if method == "recursive":
        return lambda x: recursive_apply(spec, plan, x)
    tp = make_toeplitz_plan(spec.n)
    return lambda x: toeplitz_apply(spec, tp, x)


def _min_time(fn, x: np.ndarray, trials: int) -> float:
    best = float("inf")
    w = np.empty_like(x)
    for _ in range(trials):
        reps, elapsed = 0, 0.0
        while elapsed < 1e-3:
            w[:] = x
            t0 = time.perf_counter()
            fn(w)
            elapsed += time.perf_counter() - t0
            reps += 1
        best = min(best, elapsed / reps)
    return best


def cmd_errors(cfg: ExperimentConfig) -> int:
    cfg.validate()
    if cfg.sizes[-1] > oracle.ORACLE_CAP:
        raise ValidationError(f"size {cfg.sizes[-1]} exceeds the oracle cap {oracle.ORACLE_CAP}")
    pcfg = oracle.PrecisionConfig(cfg.digits)
    rng = np.random.default_rng(cfg.seed)
    header = ["N"] + [_column(MatrixSpec.parse(cfg.spec, 1), m) for m in cfg.methods]
    rows = []
    for n in cfg.sizes:
        spec = MatrixSpec.parse(cfg.spec, n)
        runs = {m: _runner(m, spec, cfg.plan) for m in cfg.methods}
        errs = {m: [] for m in cfg.methods}
        for _ in range(cfg.trials):
            x = rng.standard_normal(n)
            outs = {}
            with np.errstate(all="ignore"):
                for m, fn in runs.items():
                    outs[m] = fn(x.copy())
            truth = None
            for m in cfg.methods:
                if not np.all(np.isfinite(outs[m])):
                    errs[m].append(float("inf"))
                    continue
                if truth is None:
                    truth = oracle.oracle_apply(spec, x, pcfg)
                errs[m].append(oracle.uniform_relative_error(truth, outs[m]))
        rows.append([n] + [float(np.mean(errs[m])) for m in cfg.methods])
    comments = [f"uniform relative error vs oracle, mean of {cfg.trials} trials",
                f"spec={cfg.spec} seed={cfg.seed} digits={cfg.digits}"]
    _write_table(cfg.out, header, rows, comments, cfg.fmt)
    return 0


def cmd_timings(cfg: ExperimentConfig) -> int:
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    header = ["N"] + [_column(MatrixSpec.parse(cfg.spec, 1), m) for m in cfg.methods]
    rows = []
    for n in cfg.sizes:
        spec = MatrixSpec.parse(cfg.spec, n)
        x = rng.standard_normal(n)
        with np.errstate(all="ignore"):
            rows.append([n] + [_min_time(_runner(m, spec, cfg.plan), x, cfg.trials) for m in cfg.methods])
    comments = [f"minimum wall time in seconds over {cfg.trials} trials",
                f"spec={cfg.spec} seed={cfg.seed}"]
    _write_table(cfg.out, header, rows, comments, cfg.fmt)
    return 0


def cmd_ratio(cfg: ExperimentConfig) -> int:
    """Runtime ratio direct/solve of the quadratic kernels for each Q variant."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    family = MatrixSpec.parse(cfg.spec, 1).family
    rows = []
    for n in cfg.sizes:
        x = rng.standard_normal(n)
        row = [n]
        for v in VARIANTS:
            spec = MatrixSpec(family, v, n)
            d = apply_quadratic(spec, "direct_multiply", x.copy())
            s = apply_quadratic(spec, "solve", x.copy())
            ok = np.isfinite(d) & np.isfinite(s)
            if ok.any() and np.max(np.abs(d[ok] - s[ok])) > 1e-10 * np.max(np.abs(d[ok])):
                raise RuntimeError(f"direct and solve disagree for {spec.label} at n={n}")
            td = _min_time(lambda w: apply_quadratic(spec, "direct_multiply", w), x, cfg.trials)
            ts = _min_time(lambda w: apply_quadratic(spec, "solve", w), x, cfg.trials)
            row.append(td / ts)
        rows.append(row)
    header = ["n"] + [_RATIO_COLS[v] for v in VARIANTS]
    comments = [f"t_direct / t_solve, minimum of {cfg.trials} trials", f"family={family} seed={cfg.seed}"]
    _write_table(cfg.out, header, rows, comments, cfg.fmt)
    return 0


def cmd_kway(cfg: ExperimentConfig, ks) -> int:
    """Ratio of two-way to k-way recursion time, one row per k."""
    cfg.validate()
    if any(n & (n - 1) for n in cfg.sizes):
        raise ValidationError("k-way sizes must be powers of two")
    if any(k < 2 for k in ks):
        raise ValidationError("k must be at least 2")
    rng = np.random.default_rng(cfg.seed)
    spec0 = MatrixSpec.parse(cfg.spec, 1)
    table = {k: [] for k in ks}
    for n in cfg.sizes:
        spec = spec0.resized(n)
        x = rng.standard_normal(n)
        t2 = _min_time(lambda w: recursive_apply(spec, cfg.plan, w), x, cfg.trials)
        for k in ks:
            if k == 2:
                # the same computation as the baseline
                table[k].append(1.0)
                continue
            tk = _min_time(lambda w: kway_apply(spec, k, cfg.plan, w), x, cfg.trials)
            table[k].append(t2 / tk)
    header = ["k"] + [str(n) for n in cfg.sizes]
    rows = [[k] + table[k] for k in ks]
    comments = [f"t_two_way / t_k_way, minimum of {cfg.trials} trials", f"spec={cfg.spec} seed={cfg.seed}"]
    _write_table(cfg.out, header, rows, comments, cfg.fmt)
    return 0


def cmd_tune(args) -> int:
    if args.synthetic:
        try:
            coeffs = [float(v) for v in args.synthetic.split(",")]
        except ValueError:
            raise ValidationError("--synthetic needs six comma-separated numbers") from None
        if len(coeffs) != 6:
            raise ValidationError("--synthetic needs six comma-separated numbers")
        model = autotune.CostModel(*coeffs)
        report = None
    else:
        if args.trials < 3:
            raise ValidationError("tuning needs at least 3 trials")
        sizes = _int_list(args.sizes) if args.sizes else list(autotune.TUNE_SIZES)
        samples = autotune.measure_costs(sorted(sizes), trials=args.trials, seed=args.seed)
        model, report = autotune.fit_cost_model(samples)
    if args.mode == "free":
        result = autotune.solve_dynprog_free(model, args.max_n, prune=args.prune)
    else:
        result = autotune.solve_dynprog_fixed(model, args.max_n)
    print(f"A_n = {model.a0:.6e} + {model.a1:.6e} n + {model.a2:.6e} n^2")
    print(f"B_n = {model.b0:.6e} + {model.b1:.6e} n + {model.b2:.6e} n log n")
    if report is not None:
        print(f"residual rms: A {report.rms_a:.3e}  B {report.rms_b:.3e}")
    print(f"N = {result.threshold}")
    if args.out:
        autotune.save_plan(result, args.out)
        print(f"plan written to {args.out}")
    return 0


def cmd_bezier(args) -> int:
    curve = bezier.read_curve(args.curve)
    try:
        ts = [float(v) for v in args.ts.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"bad --ts {args.ts!r}") from None
    if not ts or any(not 0.0 <= t <= 1.0 for t in ts):
        raise ValidationError("every t must lie in [0, 1]")
    k = args.k
    if args.method == "bernstein-fourier":
        k = 0
    if k is not None and not 0 <= k <= curve.degree:
        raise ValidationError(f"k must lie in [0, {curve.degree}]")
    worst = 0.0
    for t in ts:
        if args.method == "decasteljau":
            pt = bezier.de_casteljau(curve, t)
        else:
            pt = bezier.fast_eval(curve, t, k, path="fft" if args.method == "bernstein-fourier" else "auto")
        print(" ".join([repr(t)] + [repr(float(v)) for v in pt]))
        if args.check:
            ref = bezier.de_casteljau(curve, t)
            scale = np.max(np.abs(ref))
            err = float(np.max(np.abs(ref - pt)) / scale) if scale else float(np.max(np.abs(pt)))
            worst = max(worst, err)
    if args.check:
        print(f"# max relative error vs de_casteljau: {worst:.3e}")
    return 0


def _plan_arg(path):
    if path:
        return autotune.load_plan(path)
    return autotune.default_plan()


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fastpascal", description="Pascal matrix product experiments")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, sizes, trials=10, methods=True):
        sp.add_argument("--sizes", default=sizes, help="comma list; lo:hi:step ranges allowed")
        sp.add_argument("--trials", type=int, default=trials)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--spec", default="Q:identity", help="family[:variant], e.g. Q:inverse_transpose")
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=("whitespace", "csv"), default="whitespace")
        sp.add_argument("--plan", default=None, help=f"tuning plan file (default: ${autotune.PLAN_ENV})")
        if methods:
            sp.add_argument("--methods", default=",".join(METHODS))

    e = sub.add_parser("errors", help="stability vs the high-precision oracle")
    common(e, ",".join(str(2**p) for p in range(11)))
    e.add_argument("--digits", type=int, default=50)
    t = sub.add_parser("timings", help="minimum wall time per method")
    common(t, ",".join(str(2**p) for p in range(13)))
    r = sub.add_parser("ratio", help="direct/solve runtime ratio of the quadratic kernels")
    common(r, "16:640:16", trials=10, methods=False)
    k = sub.add_parser("kway", help="two-way / k-way recursion runtime ratios")
    common(k, "8192,16384,32768,65536", trials=5, methods=False)
    k.add_argument("--ks", default="4,6,8")

    tu = sub.add_parser("tune", help="measure costs, fit, solve the dynamic program, write a plan")
    tu.add_argument("--max-n", type=int, default=autotune.DEFAULT_MAX_N)
    tu.add_argument("--trials", type=int, default=5)
    tu.add_argument("--sizes", default=None)
    tu.add_argument("--seed", type=int, default=0)
    tu.add_argument("--mode", choices=("fixed", "free"), default="fixed")
    tu.add_argument("--prune", action="store_true")
    tu.add_argument("--synthetic", default=None, help="a0,a1,a2,b0,b1,b2 instead of measuring")
    tu.add_argument("--out", default=None)

    b = sub.add_parser("bezier", help="evaluate a Bezier curve file")
    b.add_argument("curve")
    b.add_argument("--ts", required=True, help="comma list of t values in [0, 1]")
    b.add_argument("--method", choices=("decasteljau", "fast", "bernstein-fourier"), default="fast")
    b.add_argument("--k", type=int, default=None)
    b.add_argument("--check", action="store_true")
    return p


def _config(args) -> ExperimentConfig:
    try:
        sizes = _int_list(args.sizes)
    except ValueError:
        raise ValidationError(f"bad --sizes {args.sizes!r}") from None
    methods = tuple(m.strip() for m in getattr(args, "methods", "").split(",") if m.strip())
    return ExperimentConfig(sizes=sizes, trials=args.trials, seed=args.seed, methods=methods or METHODS,
                            spec=args.spec, out=args.out, fmt=args.format,
                            digits=getattr(args, "digits", 50), plan=_plan_arg(args.plan))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "tune":
            return cmd_tune(args)
        if args.command == "bezier":
            return cmd_bezier(args)
        cfg = _config(args)
        if args.command == "errors":
            return cmd_errors(cfg)
        if args.command == "timings":
            return cmd_timings(cfg)
        if args.command == "ratio":
            return cmd_ratio(cfg)
        return cmd_kway(cfg, _int_list(args.ks))
    except (ValidationError, ValueError, FileNotFoundError) as exc:
        print(f"fastpascal: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"fastpascal: runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
