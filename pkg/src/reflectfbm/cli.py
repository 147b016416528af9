"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 runtime or solver error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .experiments import (
    ExperimentConfig, driver_for, emit_config, emit_report, load_config, run_mc, write_rows, young_corpus,
)
from .fbm import FbmSpec, derive_seed, measure_regularity, sample_fbm
from .paths import DiscretePath, read_path_csv, write_columns_csv, write_path_csv
from .skorokhod import counterexample, solve_skorokhod
from .solver import direct_solve, picard_solve


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.out is not None:
        overrides["out_dir"] = args.out
    return replace(cfg, **overrides) if overrides else cfg


def _out(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_fbm(args) -> int:
    cfg = _config(args)
    if args.hurst is not None:
        cfg = replace(cfg, hurst=args.hurst, gamma=None, lambda0=None)
    out = _out(cfg)
    rows = []
    for i in range(args.count):
        seed = derive_seed(cfg.master_seed, i)
        w = sample_fbm(FbmSpec(cfg.hurst, cfg.driver_dim, cfg.grid, seed), method=args.method)
        write_path_csv(out / f"fbm_{i:04d}.csv", w)
        rep = measure_regularity(w, cfg.hurst, cfg.epsilon) if cfg.n_steps >= 32 else None
        rows.append((i, seed, cfg.hurst - cfg.epsilon,
                     rep.holder_value if rep else float("nan"),
                     rep.estimated_exponent if rep else float("nan"),
                     rep.eta_proxy if rep else float("nan")))
    write_rows(out / "regularity.csv", ["i", "seed", "lambda", "holder_value", "estimated_exponent", "eta_proxy"], rows)
    return 0


def cmd_young(args) -> int:
    cfg = _config(args)
    out = _out(cfg)
    recs = young_corpus(seed=cfg.master_seed, n_smooth=args.n_smooth, n_fbm=args.n_fbm, hurst=args.hurst)
    write_rows(
        out / "young.csv", ["pair_id", "window", "integral", "bound", "beta", "defect_rate"],
        [(r.pair_id, f"{r.window[0]:.17g}:{r.window[1]:.17g}", r.integral, r.bound, r.beta, r.defect_rate) for r in recs],
    )
    bad = [r for r in recs if not r.ok]
    print(f"young: {len(recs)} checks, {len(bad)} bound violations")
    return 2 if bad else 0


def cmd_skorokhod(args) -> int:
    cfg = _config(args)
    out = _out(cfg)
    if args.input:
        z = read_path_csv(args.input)
    else:
        g = driver_for(cfg, derive_seed(cfg.master_seed, 0))
        z = DiscretePath(g.grid, g.values + 0.1)
    sol = solve_skorokhod(z)
    d = z.dim
    header = ["t"] + [f"z_{i + 1}" for i in range(d)] + [f"x_{i + 1}" for i in range(d)] + [f"y_{i + 1}" for i in range(d)]
    write_columns_csv(out / "skorokhod.csv", header, np.column_stack([z.times, z.values, sol.x.values, sol.y.values]))
    return 0


def cmd_counterexample(args) -> int:
    cfg = _config(args)
    out = _out(cfg)
    rep = counterexample(args.t1, args.t2, args.t, args.lam, args.n_steps)
    write_rows(out / "counterexample.csv", ["t1", "t2", "t", "lambda", "norm_ydiff", "norm_zdiff", "ratio"],
               [(rep.t1, rep.t2, rep.t, rep.lam, rep.norm_ydiff, rep.norm_zdiff, rep.ratio)])
    return 0


def cmd_solve(args) -> int:
    cfg = _config(args)
    out = _out(cfg)
    if args.driver:
        g = read_path_csv(args.driver)
    else:
        g = driver_for(cfg, derive_seed(cfg.master_seed, 0))
    coeffs = replace(cfg.coefficients(), horizon=g.grid.length)
    solve = picard_solve if (args.method or cfg.solver) == "picard" else direct_solve
    sol = solve(coeffs, g, np.array(cfg.x0), cfg.solver_config())
    d = coeffs.d
    header = ["t"] + [f"x_{i + 1}" for i in range(d)] + [f"y_{i + 1}" for i in range(d)] + [f"z_{i + 1}" for i in range(d)]
    write_columns_csv(out / "solution.csv", header, np.column_stack([g.times, sol.x.values, sol.y.values, sol.z.values]))
    write_rows(out / "ledger.csv", ["name", "value"], sol.ledger.as_rows())
    emit_config(cfg, out / "config.txt")
    return 0


def cmd_mc(args) -> int:
    cfg = _config(args)
    out = _out(cfg)
    report = run_mc(cfg, workers=args.workers)
    emit_report(report, out)
    emit_config(cfg, out / "config.txt")
    failed = sum(not r.ok for r in report.paths)
    for m in report.moments:
        print(f"p={m.p:g}: E||X||^p = {m.estimate:.6g} +- {m.stderr:.2g} (n={m.n})")
    print(f"a priori bound held on {len(report.paths) - failed}/{len(report.paths)} paths")
    return 0


class _Parser(argparse.ArgumentParser):
    # usage errors are validation errors, not argparse's default exit status 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--out", help="output directory (overrides the config)")
    common.add_argument("--workers", type=int, default=1, help="worker processes for Monte Carlo")

    p = _Parser(prog="reflectfbm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("fbm", parents=[common], help="sample fBm paths to CSV")
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--hurst", type=float)
    s.add_argument("--method", choices=["cholesky", "levinson"], default="cholesky")
    s.set_defaults(fn=cmd_fbm)

    s = sub.add_parser("young", parents=[common], help="Young bound and refinement corpus")
    s.add_argument("--n-smooth", type=int, default=20)
    s.add_argument("--n-fbm", type=int, default=50)
    s.add_argument("--hurst", type=float, default=0.8)
    s.set_defaults(fn=cmd_young)

    s = sub.add_parser("skorokhod", parents=[common], help="reflect a path at zero")
    s.add_argument("--input", help="CSV path t,z_1,...,z_d (default: 0.1 + fBm draw)")
    s.set_defaults(fn=cmd_skorokhod)

    s = sub.add_parser("counterexample", parents=[common], help="regulator Hölder counterexample")
    s.add_argument("--t1", type=float, default=0.4)
    s.add_argument("--t2", type=float, default=0.5)
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--lam", type=float, default=0.5)
    s.add_argument("--n-steps", type=int, default=100)
    s.set_defaults(fn=cmd_counterexample)

    s = sub.add_parser("solve", parents=[common], help="solve one reflected equation")
    s.add_argument("--driver", help="driver CSV t,g_1,...,g_m (default: fBm draw)")
    s.add_argument("--method", choices=["direct", "picard"])
    s.set_defaults(fn=cmd_solve)

    s = sub.add_parser("mc", parents=[common], help="Monte Carlo moments of the solution's Hölder norm")
    s.set_defaults(fn=cmd_mc)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
