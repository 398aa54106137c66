"""Command-line front end: DoE generation, fitting, prediction, benchmarks.

Exit codes: 0 success, 2 parse/usage error, 3 DoE generation error,
4 numerical failure, 5 validation error, 6 benchmark failure under
--strict.  Environment variables MIXEDGP_SEED and MIXEDGP_JITTER override
the built-in defaults of --seed and --jitter.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import benchmarks as bm
from . import gp
from . import kernels as kr
from .doe import grid, lhs
from .errors import (
    LevelOutOfRange,
    MixedGpError,
    NumericalFailure,
    ObjectiveFailure,
    OutOfBounds,
    ParseError,
    SizeOverflow,
)
from .optimize import write_trace
from .space import (
    Categorical,
    _point_to_row,
    load_dataset,
    load_points,
    load_space,
    save_points,
)

EXIT_PARSE = 2
EXIT_GENERATION = 3
EXIT_NUMERICAL = 4
EXIT_VALIDATION = 5
EXIT_BENCHMARK = 6

_KERNEL_CHOICES = [k.value for k in kr.CategoricalKernelKind]


def _default_seed() -> int:
    return int(os.environ.get("MIXEDGP_SEED", "0"))


def _default_jitter() -> float:
    return float(os.environ.get("MIXEDGP_JITTER", repr(gp.JITTER_DEFAULT)))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixedgp",
        description="Gaussian-process surrogates over mixed continuous/integer/categorical inputs.",
        epilog=(
            "Environment overrides: MIXEDGP_SEED sets the default --seed, "
            "MIXEDGP_JITTER the default --jitter."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_doe = sub.add_parser("doe", help="generate a design of experiments")
    p_doe.add_argument("space_file")
    p_doe.add_argument("--n", type=int, default=10, help="number of LHS points")
    p_doe.add_argument("--seed", type=int, default=None)
    p_doe.add_argument("--method", choices=["lhs", "grid"], default="lhs")
    p_doe.add_argument(
        "--grid-counts",
        default=None,
        help="comma list, one count per continuous/integer variable (grid method; defaults to --n each)",
    )
    p_doe.add_argument("--out", required=True)

    p_fit = sub.add_parser("fit", help="fit a GP model to a dataset")
    p_fit.add_argument("space_file")
    p_fit.add_argument("data_file")
    p_fit.add_argument("--kernel", choices=_KERNEL_CHOICES, default="ehh")
    p_fit.add_argument("--p", type=int, choices=[1, 2], default=2)
    p_fit.add_argument("--starts", type=int, default=10)
    p_fit.add_argument("--seed", type=int, default=None)
    p_fit.add_argument("--budget", type=int, default=None, help="optimizer evaluations per start")
    p_fit.add_argument("--jitter", type=float, default=None)
    p_fit.add_argument("--trace", default=None, help="write per-start search log here")
    p_fit.add_argument("--out-model", required=True)

    p_pred = sub.add_parser("predict", help="predict at points from a fitted model")
    p_pred.add_argument("model_file")
    p_pred.add_argument("points_file")
    p_pred.add_argument("--out", required=True)

    p_bench = sub.add_parser("benchmark", help="run a benchmark problem")
    p_bench.add_argument("--problem", required=True, choices=["cosine", "beam", "dragon-audit"])
    p_bench.add_argument("--kernels", default="gd,cr,ehh", help="comma list of kernel kinds")
    p_bench.add_argument("--doe-size", type=int, default=98)
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.add_argument("--p", type=int, choices=[1, 2], default=2)
    p_bench.add_argument("--starts", type=int, default=10)
    p_bench.add_argument("--budget", type=int, default=None)
    p_bench.add_argument("--strict", action="store_true", help="exit 6 if any kernel fit fails")
    p_bench.add_argument("--export-corr-dir", default=None,
                         help="write each kind's first correlation matrix to this directory")
    p_bench.add_argument("--out", default=None, help="benchmark report file")

    p_info = sub.add_parser("kernel-info", help="hyperparameter counts for a space")
    p_info.add_argument("space_file")
    p_info.add_argument("--kernel", choices=_KERNEL_CHOICES, default=None,
                        help="restrict the table to one kind")

    p_corr = sub.add_parser("export-corr", help="export a fitted categorical correlation matrix")
    p_corr.add_argument("model_file")
    p_corr.add_argument("--variable", type=int, default=None,
                        help="1-based variable index in the space (default: first categorical)")
    p_corr.add_argument("--out", required=True)

    return parser


def _write_matrix(matrix: np.ndarray, level_names, path) -> None:
    lines = [",".join(level_names)]
    for row in matrix:
        lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def _cmd_doe(args) -> int:
    space = load_space(args.space_file)
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        if args.method == "lhs":
            points = lhs(space, args.n, seed)
        else:
            n_numeric = space.n_continuous + space.n_integer
            if args.grid_counts:
                counts = tuple(int(c) for c in args.grid_counts.split(","))
            else:
                counts = (args.n,) * n_numeric
            points = grid(space, counts)
    except (SizeOverflow, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    save_points(space, points, args.out)
    print(f"wrote {len(points)} points to {args.out}")
    return 0


def _cmd_fit(args) -> int:
    space = load_space(args.space_file)
    dataset = load_dataset(space, args.data_file)
    kind = kr.CategoricalKernelKind.parse(args.kernel)
    config = gp.FitConfig(
        n_starts=args.starts,
        max_evals=args.budget,
        jitter=args.jitter if args.jitter is not None else _default_jitter(),
        seed=args.seed if args.seed is not None else _default_seed(),
    )
    try:
        model = gp.fit(dataset, kind, args.p, config)
    except (NumericalFailure, ObjectiveFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    gp.save_model(model, args.out_model)
    if args.trace is not None:
        write_trace(model.start_log, args.trace)
    n_hyper = kr.hyperparameter_count(space, kind)
    print(
        f"kernel={kind.value} n_hyper={n_hyper} "
        f"log_likelihood={model.log_likelihood:.6f} fit_seconds={model.fit_seconds:.3f}"
    )
    return 0


def _cmd_predict(args) -> int:
    model = gp.load_model(args.model_file)
    points = load_points(model.dataset.space, args.points_file)
    try:
        means, variances = gp.predict(model, points)
    except (OutOfBounds, LevelOutOfRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    space = model.dataset.space
    lines = [",".join(list(space.names()) + ["mean", "stddev"])]
    for w, m, v in zip(points, means, variances):
        lines.append(",".join(_point_to_row(space, w) + [repr(float(m)), repr(float(np.sqrt(v)))]))
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(points)} predictions to {args.out}")
    return 0


def _cmd_benchmark(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.problem == "dragon-audit":
        report = bm.dragon_space_audit()
        counts = report["hyperparameters"]
        print(
            f"relaxed={report['relaxed_total']} gd={counts['gd']} "
            f"cr={counts['cr']} ehh={counts['ehh']}"
        )
        if args.out:
            with open(args.out, "w") as fh:
                fh.write("quantity,value\n")
                fh.write(f"relaxed_total,{report['relaxed_total']}\n")
                for kind, count in counts.items():
                    fh.write(f"n_hyper_{kind},{count}\n")
        return 0

    kinds = [kr.CategoricalKernelKind.parse(k) for k in args.kernels.split(",") if k]
    fit_config = gp.FitConfig(n_starts=args.starts, max_evals=args.budget, seed=seed)
    if args.problem == "cosine":
        results, corr, errors = bm.run_cosine_benchmark(
            kinds, args.doe_size, seed, args.p, fit_config
        )
        unit = ""
    else:
        results, corr, errors = bm.run_cantilever_benchmark(
            kinds, args.doe_size, seed, args.p, fit_config=fit_config
        )
        unit = " cm"
    for res in results:
        shown = res.rmse * 100.0 if args.problem == "beam" else res.rmse
        print(
            f"{res.kind.value}: n_hyper={res.n_hyper} rmse={shown:.4f}{unit} "
            f"pva={res.pva:.3f} fit_seconds={res.fit_seconds:.2f}"
        )
    for kind, exc in errors.items():
        print(f"{kind.value}: failed ({exc})", file=sys.stderr)
    if args.out:
        bm.write_benchmark_report(results, errors, args.out)
    if args.export_corr_dir:
        os.makedirs(args.export_corr_dir, exist_ok=True)
        space = bm.cosine_space() if args.problem == "cosine" else bm.beam_space()
        levels = space.categorical[0].levels
        for kind, matrix in corr.items():
            _write_matrix(matrix, levels, os.path.join(args.export_corr_dir, f"corr_{kind.value}.csv"))
    if errors and args.strict:
        return EXIT_BENCHMARK
    return 0


def _cmd_kernel_info(args) -> int:
    space = load_space(args.space_file)
    kinds = (
        [kr.CategoricalKernelKind.parse(args.kernel)]
        if args.kernel
        else list(kr.CategoricalKernelKind)
    )
    print(
        f"space: {space.n_continuous} continuous, {space.n_integer} integer, "
        f"{space.n_categorical} categorical (levels {list(space.level_counts)}), "
        f"relaxed dimension {space.n_continuous + space.n_integer + space.relaxed_dim}"
    )
    for kind in kinds:
        print(f"{kind.value}: {kr.hyperparameter_count(space, kind)} hyperparameters")
    return 0


def _cmd_export_corr(args) -> int:
    model = gp.load_model(args.model_file)
    space = model.dataset.space
    if args.variable is None:
        cat_positions = [i for i, v in enumerate(space.variables) if isinstance(v, Categorical)]
        if not cat_positions:
            print("error: model space has no categorical variable", file=sys.stderr)
            return EXIT_VALIDATION
        position = cat_positions[0]
    else:
        position = args.variable - 1
        if not 0 <= position < len(space.variables) or not isinstance(
            space.variables[position], Categorical
        ):
            print(f"error: variable {args.variable} is not categorical", file=sys.stderr)
            return EXIT_VALIDATION
    cat_index = sum(
        1 for v in space.variables[:position] if isinstance(v, Categorical)
    )
    matrix = kr.categorical_matrix(
        model.kind, model.theta_star.theta_cat[cat_index], model.epsilon
    )
    _write_matrix(matrix, space.variables[position].levels, args.out)
    print(f"wrote {matrix.shape[0]}x{matrix.shape[1]} correlation matrix to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "doe": _cmd_doe,
        "fit": _cmd_fit,
        "predict": _cmd_predict,
        "benchmark": _cmd_benchmark,
        "kernel-info": _cmd_kernel_info,
        "export-corr": _cmd_export_corr,
    }
    try:
        return handlers[args.command](args)
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OutOfBounds, LevelOutOfRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except MixedGpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
