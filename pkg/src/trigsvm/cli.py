"""
Command-line front end.

Subcommands::

    synth       generate circles or noisy-sine data as CSV
    train       fit a C-SVC on an 80/20 split, write model JSON and a run report
    predict     apply a saved model to a CSV
    tune        cross-validated (C, sigma) grid search
    heuristic   per-class distance statistics and the suggested sigma range
    audit       randomized positive-definiteness survey of a kernel
    svr-demo    epsilon-SVR on the noisy sine curve, writes the fitted curve
    sweep       sigma sweep at fixed C: #SV / #TrE / #TsE table
    compare     polynomial, gaussian, trig and mixed kernels on one dataset

Exit status is 0 on success, 1 on a runtime error (one-line diagnostic on
stderr) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .audit import randomized_psd_survey
from .datasets import dataset_to_csv, format_float, gen_circles, gen_svr_sine, load_csv, standardize
from .errors import ParseError, TrigSVMError
from .kernels import KINDS, KernelSpec
from .persistence import load_model, model_to_json
from .selection import (
    accuracy,
    class_distance_stats,
    grid_search,
    holdout_split,
    log2_grid,
    recommend_sigma_range,
    spec_for,
    tune_svr_sigma,
)
from .svc import SolverConfig, SvcModel, count_stats, decision_function, fit_svc
from .svr import fit_svr, predict_svr, svr_rmse

DEFAULT_SEED = 42
KERNEL_ALIASES = {"poly": "polynomial"}
# the four kernels of the comparison table, in row order
COMPARE_KERNELS = (("K1", "polynomial"), ("K2", "gaussian"), ("K3", "trig"), ("K4", "mixed"))


@dataclass
class RunReport:
    command: list[str]
    config: dict
    rows: list[dict] = field(default_factory=list)
    seed: int = DEFAULT_SEED
    timing_s: float | None = None

    def to_json(self) -> str:
        # timing varies run to run and would break byte-identical artifacts
        data = {k: v for k, v in asdict(self).items() if k != "timing_s"}
        return json.dumps(data, indent=2) + "\n"


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _kernel_name(text: str) -> str:
    name = KERNEL_ALIASES.get(text, text)
    if name not in KINDS:
        raise argparse.ArgumentTypeError(f"unknown kernel {text!r}; choose from poly, {', '.join(KINDS[1:])}")
    return name


def _build_spec(args) -> KernelSpec:
    kind = args.kernel
    if kind == "polynomial":
        return KernelSpec.polynomial(args.p)
    if kind == "rbf":
        return KernelSpec.rbf(args.gamma)
    if kind == "sigmoid":
        return KernelSpec.sigmoid(args.alpha, args.beta if args.beta is not None else 1.0)
    if kind == "mixed":
        return KernelSpec.mixed(args.sigma, 0.5 if args.beta is None else args.beta)
    return KernelSpec(kind, sigma=args.sigma)


def _write_text(path, text: str) -> None:
    Path(path).write_text(text)


def _table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[str(h) for h in header]] + [[_fmt(c) for c in r] for r in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def _load_split(args):
    ds = load_csv(args.data)
    train, test = holdout_split(ds, args.train_fraction, args.seed)
    scaling = None
    if getattr(args, "standardize", False):
        train, test, scaling = standardize(train, test)
    return ds, train, test, scaling


# ---------------------------------------------------------------- commands


def cmd_synth(args) -> int:
    if args.name == "circles":
        ds = gen_circles(args.n, args.seed, noise=args.noise if args.noise is not None else 0.2)
        text = dataset_to_csv(ds)
    else:
        noise = args.noise if args.noise is not None else 0.1
        x, y_noisy, y_true = gen_svr_sine(args.n, args.seed, noise)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y_noisy", "y_true"])
        for row in zip(x, y_noisy, y_true):
            w.writerow([format_float(v) for v in row])
        text = buf.getvalue()
    if args.out:
        _write_text(args.out, text)
        print(f"wrote {args.n} rows to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_train(args) -> int:
    start = time.perf_counter()
    spec = _build_spec(args)
    ds, train, test, scaling = _load_split(args)
    config = SolverConfig(C=args.C, seed=args.seed)
    model = fit_svc(train.features, train.target, spec, config, scaling=scaling)
    # evaluate on the unscaled split; the model applies its own scaling
    raw_train, raw_test = holdout_split(ds, args.train_fraction, args.seed)
    stats = count_stats(model, raw_train, raw_test)
    test_acc = 1.0 - stats.test_errors / raw_test.n if raw_test.n else float("nan")
    row = {
        "kernel": spec.label(),
        "C": args.C,
        "SV": stats.sv_count,
        "TrE": stats.train_errors,
        "TsE": stats.test_errors,
        "test_accuracy": test_acc,
    }
    report = RunReport(
        command=["train", *args.argv],
        config=_resolved(args, kernel=spec.to_dict(), n_train=train.n, n_test=test.n, jitter=model.jitter),
        rows=[row],
        seed=args.seed,
        timing_s=time.perf_counter() - start,
    )
    print(_table(list(row), [list(row.values())]))
    if args.out:
        _write_text(args.out, model_to_json(model))
        report_path = args.report or f"{args.out}.report.json"
        _write_text(report_path, report.to_json())
        print(f"model written to {args.out}; report to {report_path}")
    print(f"time {report.timing_s:.2f}s")
    return 0


def _read_features(path, dim: int) -> np.ndarray:
    """First ``dim`` columns of a CSV; a non-numeric first row is a header."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows:
        try:
            [float(c) for c in rows[0][:dim]]
        except ValueError:
            rows = rows[1:]
    X = np.empty((len(rows), dim))
    for i, row in enumerate(rows):
        if len(row) < dim:
            raise ParseError(f"{len(row)} columns, model expects {dim}", row=i + 1)
        for k in range(dim):
            try:
                X[i, k] = float(row[k])
            except ValueError:
                raise ParseError(f"non-numeric value {row[k]!r}",
                                 row=i + 1, column=k + 1) from None
    return X


def cmd_predict(args) -> int:
    model = load_model(args.model)
    X = _read_features(args.data, model.dim)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(model, SvcModel):
        w.writerow(["decision", "label"])
        for v in np.atleast_1d(decision_function(model, X)):
            w.writerow([format_float(v), 1 if v >= 0 else -1])
    else:
        w.writerow(["prediction"])
        for v in np.atleast_1d(predict_svr(model, X)):
            w.writerow([format_float(v)])
    if args.out:
        _write_text(args.out, buf.getvalue())
        print(f"wrote {X.shape[0]} predictions to {args.out}")
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def cmd_tune(args) -> int:
    ds = load_csv(args.data)
    sigmas = args.sigmas
    if args.heuristic:
        sigmas = recommend_sigma_range(class_distance_stats(ds)).sigma_subgrid
    report = grid_search(ds, args.kernel, args.Cs, sigmas, args.folds, args.seed, beta=args.beta or 0.5)
    best = report.best_cell
    print(f"{len(report.cells)} cells; best C={best.C:g} sigma={best.sigma:g} "
          f"cv_accuracy={best.mean_cv_accuracy:.4f} (+/- {best.fold_std:.4f}), mean #SV {best.sv_count_mean:g}")
    if args.out:
        out = Path(args.out)
        _write_text(out, report.to_json() + "\n")
        _write_text(out.with_suffix(".csv"), report.to_csv())
        print(f"grid report written to {out} and {out.with_suffix('.csv')}")
    return 0


def cmd_heuristic(args) -> int:
    ds = load_csv(args.data)
    if args.standardize:
        ds, _, _ = standardize(ds)
    stats = class_distance_stats(ds, seed=args.seed)
    rec = recommend_sigma_range(stats, args.threshold)
    rows = [[f"{label:+g}", c.sample_count, c.min_pairwise_distance, c.max_pairwise_distance]
            for label, c in stats.per_class.items()]
    print(_table(["class", "n", "min_dist", "max_dist"], rows))
    print(f"regime: {rec.regime} (max distance {rec.max_distance:.4g}, threshold {args.threshold:g})")
    print("sigma sub-grid: " + ", ".join(f"{s:g}" for s in rec.sigma_subgrid))
    if args.out:
        data = {"stats": stats.to_dict(), "regime": rec.regime, "sigma_subgrid": rec.sigma_subgrid,
                "threshold": args.threshold}
        _write_text(args.out, json.dumps(data, indent=2) + "\n")
    return 0


def cmd_audit(args) -> int:
    if args.sigma is None:
        base = spec_for(args.kernel, 1.0, 0.5 if args.beta is None else args.beta) if args.kernel in ("trig", "gaussian", "mixed") else _build_spec(args)
        sigmas = log2_grid() if base.sigma is not None else None
    else:
        base, sigmas = _build_spec(args), None
    report = randomized_psd_survey(base, args.trials, args.n_max, args.d_max, args.seed, sigmas=sigmas)
    print(f"kernel {report.kernel}: {report.trials} trials, global min eigenvalue {report.min_eigenvalue:.6g}, "
          f"{len(report.violations)} violations (< -1e-6)")
    if args.out:
        _write_text(args.out, report.to_json() + "\n")
        print(f"survey written to {args.out}")
    return 0


def cmd_svr_demo(args) -> int:
    if args.kernel not in ("trig", "mixed", "gaussian"):
        raise TrigSVMError(f"svr-demo supports trig, mixed and gaussian kernels, not {args.kernel}")
    x, y_noisy, y_true = gen_svr_sine(args.n, args.seed, args.noise)
    beta = 0.5 if args.beta is None else args.beta
    sigma = args.sigma
    if sigma is None:
        sigma = tune_svr_sigma(x, y_noisy, args.kernel, log2_grid(), C=args.C, epsilon=args.epsilon,
                               folds=args.folds, seed=args.seed, beta=beta).sigma
    spec = spec_for(args.kernel, sigma, beta)
    model = fit_svr(x[:, None], y_noisy, spec, C=args.C, epsilon=args.epsilon)
    y_pred = predict_svr(model, x[:, None])
    rmse = svr_rmse(model, x[:, None], y_true)
    print(f"kernel {spec.label()}, C={args.C:g}, epsilon={args.epsilon:g}: "
          f"{model.n_support} support vectors, RMSE vs noiseless curve {rmse:.4f}")
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y_noisy", "y_true", "y_pred"])
        for row in zip(x, y_noisy, y_true, y_pred):
            w.writerow([format_float(v) for v in row])
        _write_text(args.out, buf.getvalue())
        report = RunReport(
            command=["svr-demo", *args.argv],
            config=_resolved(args, kernel=spec.to_dict()),
            rows=[{"kernel": spec.label(), "SV": model.n_support, "rmse": rmse}],
            seed=args.seed,
        )
        _write_text(f"{args.out}.report.json", report.to_json())
        print(f"curve written to {args.out}")
    return 0


def cmd_sweep(args) -> int:
    ds, train, test, scaling = _load_split(args)
    config = SolverConfig(C=args.C, seed=args.seed)
    columns = {}
    for sigma in args.sigmas:
        spec = spec_for(args.kernel, sigma, 0.5 if args.beta is None else args.beta)
        model = fit_svc(train.features, train.target, spec, config)
        columns[sigma] = count_stats(model, train, test)
    header = ["Results"] + [f"sigma={s:g}" for s in args.sigmas]
    rows = [
        ["# SV"] + [c.sv_count for c in columns.values()],
        ["# TrE."] + [c.train_errors for c in columns.values()],
        ["# TsE."] + [c.test_errors for c in columns.values()],
    ]
    print(f"{args.kernel} kernel, C={args.C:g}, {train.n} train / {test.n} test")
    print(_table(header, rows))
    if args.out:
        report = RunReport(
            command=["sweep", *args.argv],
            config=_resolved(args),
            rows=[{"sigma": s, "SV": c.sv_count, "TrE": c.train_errors, "TsE": c.test_errors}
                  for s, c in columns.items()],
            seed=args.seed,
        )
        _write_text(args.out, report.to_json())
    return 0


def cmd_compare(args) -> int:
    ds, train, test, scaling = _load_split(args)
    rows = []
    for tag, family in COMPARE_KERNELS:
        grid = [float(args.p)] if family == "polynomial" else args.sigmas
        beta = 0.5 if args.beta is None else args.beta
        report = grid_search(train, family, args.Cs, grid, args.folds, args.seed, beta=beta)
        best = report.best_cell
        spec = spec_for(family, best.sigma, beta)
        model = fit_svc(train.features, train.target, spec, SolverConfig(C=best.C, seed=args.seed))
        acc = accuracy(np.where(decision_function(model, test.features) >= 0, 1, -1), test.target)
        rows.append({"kernel": tag, "family": spec.label(), "C": best.C,
                     "cv_accuracy": best.mean_cv_accuracy, "test_accuracy": acc})
    print(f"{Path(args.data).name}: {train.n} train / {test.n} test")
    print(_table(["kernel", "family", "C", "cv_acc", "test_acc"], [list(r.values()) for r in rows]))
    if args.out:
        report = RunReport(command=["compare", *args.argv], config=_resolved(args), rows=rows, seed=args.seed)
        _write_text(args.out, report.to_json())
    return 0


def _resolved(args, **extra) -> dict:
    skip = {"func", "argv", "command"}
    cfg = {k: v for k, v in vars(args).items() if k not in skip}
    cfg["version"] = __version__
    cfg.update(extra)
    return cfg


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trigsvm", description="Trigonometric-kernel SVM toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=True, kernel=True):
        if data:
            p.add_argument("--data", required=True, help="input CSV (label in last column)")
        if kernel:
            p.add_argument("--kernel", type=_kernel_name, default="trig",
                           help="poly | gaussian | rbf | sigmoid | trig | mixed")
            p.add_argument("--sigma", type=float, default=None)
            p.add_argument("--p", type=int, default=2, help="polynomial degree")
            p.add_argument("--beta", type=float, default=None, help="mixed weight or sigmoid slope")
            p.add_argument("--gamma", type=float, default=None, help="rbf width")
            p.add_argument("--alpha", type=float, default=None, help="sigmoid offset")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", default=None)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--name", choices=("circles", "svr-sine"), required=True)
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--noise", type=float, default=None)
    common(p, data=False, kernel=False)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="fit a C-SVC and write a model file")
    common(p)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--report", default=None, help="run report path (default <out>.report.json)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="apply a saved model to a CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("tune", help="cross-validated grid search")
    common(p)
    p.add_argument("--Cs", type=_float_list, default=log2_grid())
    p.add_argument("--sigmas", type=_float_list, default=log2_grid())
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--heuristic", action="store_true", help="restrict sigma to the recommended half-grid")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("heuristic", help="distance statistics and suggested sigma range")
    common(p, kernel=False)
    p.add_argument("--threshold", type=float, default=10.0)
    p.add_argument("--standardize", action="store_true")
    p.set_defaults(func=cmd_heuristic)

    p = sub.add_parser("audit", help="randomized positive-definiteness survey")
    common(p, data=False)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--n-max", type=int, default=15)
    p.add_argument("--d-max", type=int, default=4)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("svr-demo", help="epsilon-SVR on the noisy sine curve")
    common(p, data=False)
    p.set_defaults(kernel="mixed")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--C", type=float, default=10.0)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--folds", type=int, default=5)
    p.set_defaults(func=cmd_svr_demo)

    p = sub.add_parser("sweep", help="sigma sweep at fixed C")
    common(p)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--sigmas", type=_float_list, default=[0.1, 1, 2, 10, 50, 100, 1000])
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="K1-K4 kernel comparison on one dataset")
    common(p, kernel=False)
    p.add_argument("--p", type=int, default=2, help="polynomial degree for K1")
    p.add_argument("--beta", type=float, default=None, help="mixed weight for K4 (default 0.5)")
    p.add_argument("--Cs", type=_float_list, default=log2_grid())
    p.add_argument("--sigmas", type=_float_list, default=log2_grid())
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv[1:]
    kernel = getattr(args, "kernel", None)
    if kernel is not None and args.command in ("train", "sweep", "tune", "audit", "svr-demo"):
        if kernel in ("gaussian", "trig", "mixed") and args.sigma is None and args.command in ("train",):
            parser.error(f"--sigma is required for the {kernel} kernel")
        if kernel == "rbf" and args.gamma is None and args.command in ("train", "audit"):
            parser.error("--gamma is required for the rbf kernel")
        if kernel == "sigmoid" and args.alpha is None and args.command in ("train", "audit"):
            parser.error("--alpha is required for the sigmoid kernel")
    try:
        return args.func(args)
    except (TrigSVMError, OSError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"trigsvm {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
