"""
Kernel C-SVC trained by SMO.

The dual solved is

    min_a  1/2 sum_ij a_i a_j y_i y_j K_ij - sum_i a_i
    s.t.   sum_i y_i a_i = 0,   0 <= a_i <= C

and the classifier is ``f(x) = sum_i a_i y_i K(x_i, x) + b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import smo
from .audit import jitter_regularize
from .errors import ConvergenceError, DegenerateDataError, InvalidParameterError, LabelError, RegularizationError, ShapeError
from .kernels import GramMatrix, KernelRows, KernelSpec, _as_matrix, cross_gram
from .scaling import ScalingStats


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    ``max_iter`` defaults to ``10 * n * max(n, 1000)`` pair updates when None.
    ``seed`` is recorded for reproducibility; working-set selection itself is
    deterministic.
    """

    C: float = 1.0
    kkt_tol: float = 1e-3
    max_iter: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.C > 0:
            raise InvalidParameterError(f"C must be positive, got {self.C}")
        if not self.kkt_tol > 0:
            raise InvalidParameterError(f"kkt_tol must be positive, got {self.kkt_tol}")
        if self.max_iter is not None and self.max_iter < 1:
            raise InvalidParameterError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class SvcModel:
    support_indices: np.ndarray
    dual_coef: np.ndarray
    bias: float
    spec: KernelSpec
    support_vectors: np.ndarray
    C: float
    scaling: ScalingStats | None = None
    # diagonal shift applied to the training Gram when the raw one failed to converge
    jitter: float = 0.0
    iterations: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n_support(self) -> int:
        return int(self.support_indices.shape[0])

    @property
    def dim(self) -> int:
        if self.scaling is not None:
            return self.scaling.dim
        return int(self.support_vectors.shape[1])


def _check_labels(y, n: int) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.shape[0] != n:
        raise ShapeError(f"{n} samples but {y.shape[0]} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise LabelError("labels must be -1 or +1")
    return y


def _fit_dual(rows: KernelRows, y: np.ndarray, config: SolverConfig) -> smo.DualSolution:
    n = rows.n
    max_iter = config.max_iter or smo.default_max_iter(n)
    return smo.solve(rows.row, rows.diag, -np.ones(n), y, config.C, config.kkt_tol, max_iter)


def fit_svc(X, y, spec: KernelSpec, config: SolverConfig | None = None,
            scaling: ScalingStats | None = None, kernel_matrix=None) -> SvcModel:
    """Train a binary C-SVC.

    ``X`` is used as given; pass ``scaling`` when ``X`` was standardized so
    the model applies the same transform at prediction time.
    ``kernel_matrix`` may carry the precomputed Gram of ``X`` under ``spec``.

    If SMO fails to converge on the raw Gram matrix, the matrix is shifted
    with :func:`~trigsvm.audit.jitter_regularize` and the fit is retried once.
    """
    config = config or SolverConfig()
    X = _as_matrix(X, "X")
    y = _check_labels(y, X.shape[0])
    if X.shape[0] < 2:
        raise DegenerateDataError("need at least two samples")
    if np.all(y == y[0]):
        raise DegenerateDataError("training labels contain a single class")

    rows = KernelRows(spec, X, matrix=kernel_matrix)
    jitter = 0.0
    try:
        sol = _fit_dual(rows, y, config)
    except ConvergenceError as first:
        if rows._full is None:
            raise
        try:
            shifted, jitter = jitter_regularize(rows.matrix())
        except RegularizationError as exc:
            raise first from exc
        sol = _fit_dual(KernelRows.from_matrix(spec, X, shifted), y, config)

    sv = np.flatnonzero(sol.alpha > 0)
    return SvcModel(
        support_indices=sv,
        dual_coef=sol.alpha[sv] * y[sv],
        bias=sol.bias,
        spec=spec,
        support_vectors=X[sv].copy(),
        C=config.C,
        scaling=scaling,
        jitter=jitter,
        iterations=sol.iterations,
        meta={"kkt_gap": sol.gap, "objective": sol.objective},
    )


def _prepare(model, x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    A = arr[None, :] if single else arr
    if A.ndim != 2 or A.shape[1] != model.dim:
        raise ShapeError(f"expected {model.dim} features, got shape {arr.shape}")
    if model.scaling is not None:
        A = model.scaling.transform(A)
    return A, single


def kernel_expansion(model, x):
    """``sum_i coef_i K(sv_i, x) + bias`` for a vector or a matrix of rows."""
    A, single = _prepare(model, x)
    if model.dual_coef.size == 0:
        out = np.full(A.shape[0], float(model.bias))
    else:
        out = cross_gram(model.spec, A, model.support_vectors) @ model.dual_coef + model.bias
    return float(out[0]) if single else out


def decision_function(model: SvcModel, x):
    """Decision value(s); a 1-D ``x`` gives a float, a 2-D ``x`` an array."""
    return kernel_expansion(model, x)


def predict(model: SvcModel, x):
    """Labels in {-1, +1}; a decision value of exactly 0 maps to +1."""
    f = decision_function(model, x)
    if np.ndim(f) == 0:
        return 1 if f >= 0 else -1
    return np.where(f >= 0, 1, -1)


def dual_objective(alpha, y, G) -> float:
    """``1/2 sum_ij a_i a_j y_i y_j G_ij - sum_i a_i``."""
    alpha = np.asarray(alpha, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    G = np.asarray(G, dtype=np.float64)
    if alpha.shape != y.shape or G.shape != (alpha.size, alpha.size):
        raise ShapeError(f"alpha {alpha.shape}, y {y.shape} and G {G.shape} disagree")
    ay = alpha * y
    return float(0.5 * ay @ G @ ay - alpha.sum())


def full_alpha(model: SvcModel, n: int) -> np.ndarray:
    alpha = np.zeros(n)
    alpha[model.support_indices] = np.abs(model.dual_coef)
    return alpha


def kkt_violation(model: SvcModel, X, y, G: GramMatrix | np.ndarray | None = None) -> float:
    """Largest KKT violation of ``model`` over its training set.

    Per point, with margin ``m = y_i f(x_i)``: ``max(0, 1 - m)`` if
    ``a_i = 0``, ``max(0, m - 1)`` if ``a_i = C`` and ``|m - 1|`` otherwise.
    """
    X = _as_matrix(X, "X")
    y = _check_labels(y, X.shape[0])
    n = X.shape[0]
    alpha = full_alpha(model, n)
    if G is None:
        f = decision_function(model, X)
    else:
        G = np.asarray(G, dtype=np.float64)
        f = G[:, model.support_indices] @ model.dual_coef + model.bias
    margin = y * f
    viol = np.where(
        alpha == 0,
        np.maximum(0.0, 1.0 - margin),
        np.where(alpha >= model.C, np.maximum(0.0, margin - 1.0), np.abs(margin - 1.0)),
    )
    return float(viol.max())


class CountStats(NamedTuple):
    sv_count: int
    train_errors: int
    test_errors: int


def _errors(model: SvcModel, ds) -> int:
    if ds is None or ds.features.shape[0] == 0:
        return 0
    return int(np.sum(predict(model, ds.features) != ds.target))


def count_stats(model: SvcModel, train, test=None) -> CountStats:
    """Support-vector count and misclassification counts on train and test."""
    return CountStats(model.n_support, _errors(model, train), _errors(model, test))
