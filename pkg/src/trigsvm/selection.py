"""
Parameter selection: the power-of-two grid, cross-validated grid search,
the compact/sparse distance heuristic and holdout splitting.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .datasets import CLASSIFICATION, Dataset, philox
from .errors import ConvergenceError, EmptyInputError, InvalidParameterError, ProtocolError, ShapeError
from .kernels import KernelSpec, gram
from .svc import SolverConfig, fit_svc
from .svr import fit_svr, predict_svr

# Largest intra-class pairwise distance still considered "compact".
COMPACT_THRESHOLD = 10.0
# Per-class sample cap for exact pairwise distances.
DISTANCE_SAMPLE_CAP = 20_000


def log2_grid() -> list[float]:
    """``[2**-5, 2**-4, ..., 2**10]``."""
    return [2.0**k for k in range(-5, 11)]


def spec_for(family: str, value: float, beta: float = 0.5) -> KernelSpec:
    """Kernel of ``family`` with its single tuned parameter set to ``value``.

    ``value`` is sigma for trig/gaussian/mixed, gamma for rbf and the degree
    for polynomial.
    """
    if family in ("trig", "gaussian"):
        return KernelSpec(family, sigma=value)
    if family == "mixed":
        return KernelSpec.mixed(value, beta)
    if family == "rbf":
        return KernelSpec.rbf(value)
    if family == "polynomial":
        return KernelSpec.polynomial(value)
    raise InvalidParameterError(f"kernel family {family!r} has no single tunable parameter")


def accuracy(predictions, labels) -> float:
    p = np.asarray(predictions).reshape(-1)
    t = np.asarray(labels).reshape(-1)
    if p.size == 0:
        raise EmptyInputError("accuracy of an empty prediction set")
    if p.shape != t.shape:
        raise ShapeError(f"{p.size} predictions vs {t.size} labels")
    return float(np.mean(p == t))


# ---------------------------------------------------------------- distances


@dataclass(frozen=True)
class ClassDistance:
    min_pairwise_distance: float
    max_pairwise_distance: float
    sample_count: int


@dataclass(frozen=True)
class DistanceStats:
    per_class: dict[float, ClassDistance]

    @property
    def max_distance(self) -> float:
        return max(c.max_pairwise_distance for c in self.per_class.values())

    def to_dict(self) -> dict:
        return {str(int(k)) if float(k).is_integer() else str(k): asdict(v) for k, v in self.per_class.items()}


def _pairwise_extremes(P: np.ndarray, block: int = 512) -> tuple[float, float]:
    n = P.shape[0]
    if n < 2:
        return 0.0, 0.0
    lo, hi = math.inf, 0.0
    for start in range(0, n - 1, block):
        A = P[start : start + block]
        B = P[start + 1 :]
        diff = A[:, None, :] - B[None, :, :]
        D = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        # keep pairs (start + a, start + 1 + b) with b >= a
        mask = np.arange(B.shape[0])[None, :] >= np.arange(A.shape[0])[:, None]
        vals = D[mask]
        lo = min(lo, float(vals.min()))
        hi = max(hi, float(vals.max()))
    return lo, hi


def class_distance_stats(dataset: Dataset, seed: int = 0) -> DistanceStats:
    """Exact min/max Euclidean distance between samples of each class.

    Classes larger than ``DISTANCE_SAMPLE_CAP`` are subsampled with a seeded
    draw. A singleton class reports (0, 0).
    """
    if dataset.n == 0:
        raise EmptyInputError("dataset is empty")
    out = {}
    for k, label in enumerate(np.unique(dataset.target)):
        idx = np.flatnonzero(dataset.target == label)
        if idx.size > DISTANCE_SAMPLE_CAP:
            idx = np.sort(philox(seed, k).choice(idx, DISTANCE_SAMPLE_CAP, replace=False))
        lo, hi = _pairwise_extremes(dataset.features[idx])
        out[float(label)] = ClassDistance(lo, hi, int(np.sum(dataset.target == label)))
    return DistanceStats(out)


@dataclass(frozen=True)
class SigmaRecommendation:
    regime: str
    sigma_subgrid: list[float]
    max_distance: float


def recommend_sigma_range(stats: DistanceStats | float, threshold: float = COMPACT_THRESHOLD) -> SigmaRecommendation:
    """Compact data (max distance <= threshold) gets the large half of the
    grid, sparse data the small half. Accepts a DistanceStats or a bare
    maximum distance."""
    max_d = float(stats) if isinstance(stats, (int, float)) else stats.max_distance
    grid = log2_grid()
    if max_d <= threshold:
        return SigmaRecommendation("compact", grid[8:], max_d)
    return SigmaRecommendation("sparse", grid[:8], max_d)


# ---------------------------------------------------------------- splitting


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def holdout_indices(target, train_fraction: float = 0.8, seed: int = 42, stratify: bool = True):
    """Index arrays ``(train, test)`` for a seeded, optionally stratified split.

    The train size is ``round(train_fraction * n)``; per-class quotas are
    allocated by largest remainder so the total is exact.
    """
    if not 0.0 < train_fraction < 1.0:
        raise InvalidParameterError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    y = np.asarray(target).reshape(-1)
    n = y.shape[0]
    if n == 0:
        raise EmptyInputError("cannot split an empty dataset")
    total = _round_half_up(train_fraction * n)
    rng = philox(seed, 1)
    if not stratify:
        perm = rng.permutation(n)
        return np.sort(perm[:total]), np.sort(perm[total:])

    classes = np.unique(y)
    groups = [rng.permutation(np.flatnonzero(y == c)) for c in classes]
    exact = [train_fraction * g.size for g in groups]
    quota = [int(math.floor(e)) for e in exact]
    order = sorted(range(len(groups)), key=lambda k: (-(exact[k] - quota[k]), k))
    for k in order[: total - sum(quota)]:
        quota[k] += 1
    train = np.concatenate([g[:q] for g, q in zip(groups, quota)])
    test = np.concatenate([g[q:] for g, q in zip(groups, quota)])
    return np.sort(train), np.sort(test)


def holdout_split(dataset: Dataset, train_fraction: float = 0.8, seed: int = 42):
    """Stratified ``(train, test)`` datasets (plain shuffle for regression)."""
    tr, te = holdout_indices(dataset.target, train_fraction, seed, stratify=dataset.task == CLASSIFICATION)
    return dataset.subset(tr), dataset.subset(te)


def stratified_folds(target, folds: int, seed: int) -> np.ndarray:
    """Fold id per sample; each class is shuffled then dealt round-robin."""
    if folds < 2:
        raise ProtocolError(f"need at least 2 folds, got {folds}")
    y = np.asarray(target).reshape(-1)
    assignment = np.empty(y.shape[0], dtype=np.intp)
    rng = philox(seed, 2)
    offset = 0
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        if idx.size < folds:
            raise ProtocolError(f"class {c:g} has {idx.size} samples, fewer than {folds} folds")
        perm = rng.permutation(idx)
        # continue the round-robin across classes so fold sizes stay balanced
        assignment[perm] = (np.arange(perm.size) + offset) % folds
        offset += perm.size
    return assignment


def plain_folds(n: int, folds: int, seed: int) -> np.ndarray:
    if folds < 2 or n < folds:
        raise ProtocolError(f"cannot make {folds} folds from {n} samples")
    assignment = np.empty(n, dtype=np.intp)
    assignment[philox(seed, 2).permutation(n)] = np.arange(n) % folds
    return assignment


# ---------------------------------------------------------------- grid search


@dataclass(frozen=True)
class GridCell:
    C: float
    sigma: float
    mean_cv_accuracy: float
    fold_std: float
    sv_count_mean: float


@dataclass
class GridReport:
    cells: list[GridCell]
    best: int
    protocol: dict = field(default_factory=dict)

    @property
    def best_cell(self) -> GridCell:
        return self.cells[self.best]

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "best": self.best,
            "best_cell": asdict(self.best_cell),
            "cells": [asdict(c) for c in self.cells],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["C", "sigma", "mean_acc", "std", "mean_sv"])
        for c in self.cells:
            w.writerow([repr(c.C), repr(c.sigma), repr(c.mean_cv_accuracy), repr(c.fold_std), repr(c.sv_count_mean)])
        return buf.getvalue()


def _best_index(cells: Sequence[GridCell]) -> int:
    scored = [k for k, c in enumerate(cells) if not math.isnan(c.mean_cv_accuracy)]
    if not scored:
        raise ConvergenceError("no grid cell could be trained", violation=math.inf, iterations=0)
    return min(scored, key=lambda k: (-cells[k].mean_cv_accuracy, cells[k].C, cells[k].sigma))


def grid_search(
    dataset: Dataset,
    kernel_family: str,
    C_grid: Sequence[float] | None = None,
    sigma_grid: Sequence[float] | None = None,
    folds: int = 5,
    seed: int = 42,
    beta: float = 0.5,
    kkt_tol: float = 1e-3,
) -> GridReport:
    """Stratified k-fold CV accuracy for every (C, sigma) pair.

    Cells are listed C-major in the order given. The best cell has the highest
    mean accuracy; ties go to the smaller C, then the smaller sigma. A cell
    whose fit fails to converge is scored NaN and never selected.
    """
    C_grid = list(log2_grid() if C_grid is None else C_grid)
    sigma_grid = list(log2_grid() if sigma_grid is None else sigma_grid)
    if not C_grid or not sigma_grid:
        raise EmptyInputError("empty parameter grid")
    assignment = stratified_folds(dataset.target, folds, seed)
    splits = [(np.flatnonzero(assignment != f), np.flatnonzero(assignment == f)) for f in range(folds)]

    # one Gram per sigma, sliced for every fold and every C
    grams = {float(sigma): gram(spec_for(kernel_family, sigma, beta), dataset.features).values
             for sigma in sigma_grid}
    cells = []
    for C in C_grid:
        config = SolverConfig(C=C, kkt_tol=kkt_tol, seed=seed)
        for sigma in sigma_grid:
            spec = spec_for(kernel_family, sigma, beta)
            K = grams[float(sigma)]
            accs, svs = [], []
            try:
                for tr, te in splits:
                    model = fit_svc(dataset.features[tr], dataset.target[tr], spec, config,
                                    kernel_matrix=K[np.ix_(tr, tr)])
                    f = K[np.ix_(te, tr[model.support_indices])] @ model.dual_coef + model.bias
                    accs.append(accuracy(np.where(f >= 0, 1.0, -1.0), dataset.target[te]))
                    svs.append(model.n_support)
            except ConvergenceError:
                cells.append(GridCell(float(C), float(sigma), math.nan, math.nan, math.nan))
                continue
            cells.append(GridCell(float(C), float(sigma), float(np.mean(accs)), float(np.std(accs)), float(np.mean(svs))))

    protocol = {"folds": folds, "seed": seed, "kernel_family": kernel_family, "kkt_tol": kkt_tol}
    if kernel_family == "mixed":
        protocol["beta"] = beta
    return GridReport(cells=cells, best=_best_index(cells), protocol=protocol)


@dataclass(frozen=True)
class SvrTuning:
    sigma: float
    cv_rmse: dict[float, float]


def tune_svr_sigma(
    X,
    y,
    kernel_family: str,
    sigma_grid: Sequence[float] | None = None,
    C: float = 10.0,
    epsilon: float = 0.1,
    folds: int = 5,
    seed: int = 42,
    beta: float = 0.5,
) -> SvrTuning:
    """Pick the kernel width minimizing k-fold CV RMSE on the (noisy) targets.

    Ties go to the smaller sigma.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=np.float64)
    sigma_grid = list(log2_grid() if sigma_grid is None else sigma_grid)
    assignment = plain_folds(X.shape[0], folds, seed)
    scores = {}
    for sigma in sigma_grid:
        spec = spec_for(kernel_family, sigma, beta)
        sq = 0.0
        try:
            for f in range(folds):
                tr, te = assignment != f, assignment == f
                model = fit_svr(X[tr], y[tr], spec, C=C, epsilon=epsilon)
                sq += float(np.sum((predict_svr(model, X[te]) - y[te]) ** 2))
        except ConvergenceError:
            scores[float(sigma)] = math.inf
            continue
        scores[float(sigma)] = math.sqrt(sq / X.shape[0])
    best = min(scores, key=lambda s: (scores[s], s))
    return SvrTuning(best, scores)
