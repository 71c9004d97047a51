"""
Epsilon-insensitive support vector regression.

The standard dual over ``(a, a*)`` is stacked into one 2n-vector with signs
``z = (+1,...,+1, -1,...,-1)`` so that it fits the generic SMO form:

    Q = [[K, -K], [-K, K]],   p = (eps - y, eps + y),   z'(a, a*) = 0.

The regressor is ``f(x) = sum_i (a_i - a*_i) K(x_i, x) + b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import smo
from .audit import jitter_regularize
from .errors import ConvergenceError, DataError, EmptyInputError, InvalidParameterError, RegularizationError, ShapeError
from .kernels import KernelRows, KernelSpec, _as_matrix
from .scaling import ScalingStats
from .svc import SolverConfig, kernel_expansion

DEFAULT_EPSILON = 0.1


@dataclass(frozen=True)
class SvrModel:
    support_indices: np.ndarray
    dual_coef: np.ndarray
    bias: float
    epsilon: float
    spec: KernelSpec
    support_vectors: np.ndarray
    C: float
    scaling: ScalingStats | None = None
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


def _solve(rows: KernelRows, y: np.ndarray, epsilon: float, config: SolverConfig) -> smo.DualSolution:
    n = rows.n
    z = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([epsilon - y, epsilon + y])
    diag = np.concatenate([rows.diag, rows.diag])
    # y_s y_t Q_st is K at (s mod n, t mod n): each row is the kernel row twice
    if rows._full is not None:
        doubled = np.hstack([rows.matrix(), rows.matrix()])

        def row(s):
            return doubled[s % n]
    else:
        def row(s):
            r = rows.row(s % n)
            return np.concatenate([r, r])

    max_iter = config.max_iter or smo.default_max_iter(2 * n)
    return smo.solve(row, diag, p, z, config.C, config.kkt_tol, max_iter)


def fit_svr(X, y, spec: KernelSpec, C: float = 1.0, epsilon: float = DEFAULT_EPSILON,
            config: SolverConfig | None = None, scaling: ScalingStats | None = None) -> SvrModel:
    """Train an epsilon-SVR. ``C`` overrides ``config.C``."""
    config = replace(config or SolverConfig(), C=C)
    if not epsilon >= 0:
        raise InvalidParameterError(f"epsilon must be non-negative, got {epsilon}")
    X = _as_matrix(X, "X")
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    n = X.shape[0]
    if y.shape[0] != n:
        raise ShapeError(f"{n} samples but {y.shape[0]} targets")
    if n < 2:
        raise EmptyInputError("need at least two samples")
    if not np.all(np.isfinite(y)):
        raise DataError("targets contain non-finite values")

    rows = KernelRows(spec, X)
    jitter = 0.0
    try:
        sol = _solve(rows, y, epsilon, config)
    except ConvergenceError as first:
        if rows._full is None:
            raise
        try:
            shifted, jitter = jitter_regularize(rows.matrix())
        except RegularizationError as exc:
            raise first from exc
        sol = _solve(KernelRows.from_matrix(spec, X, shifted), y, epsilon, config)

    a, a_star = sol.alpha[:n].copy(), sol.alpha[n:].copy()
    # both sides active only when eps == 0; cancelling leaves beta unchanged
    common = np.minimum(a, a_star)
    a -= common
    a_star -= common
    beta = a - a_star
    sv = np.flatnonzero(beta != 0)
    return SvrModel(
        support_indices=sv,
        dual_coef=beta[sv],
        bias=sol.bias,
        epsilon=float(epsilon),
        spec=spec,
        support_vectors=X[sv].copy(),
        C=config.C,
        scaling=scaling,
        jitter=jitter,
        iterations=sol.iterations,
        meta={"kkt_gap": sol.gap, "alpha": a, "alpha_star": a_star},
    )


def predict_svr(model: SvrModel, x):
    """Regression value(s) for a vector or a matrix of rows."""
    return kernel_expansion(model, x)


def svr_rmse(model: SvrModel, X, y_ref) -> float:
    y_ref = np.asarray(y_ref, dtype=np.float64).reshape(-1)
    if y_ref.size == 0:
        raise EmptyInputError("no reference values")
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1 and model.dim == 1:
        X = X[:, None]
    pred = np.atleast_1d(predict_svr(model, X))
    if pred.shape != y_ref.shape:
        raise ShapeError(f"{pred.shape[0]} predictions vs {y_ref.shape[0]} references")
    return float(np.sqrt(np.mean((pred - y_ref) ** 2)))


def svr_dual_objective(beta_pos, beta_neg, y, K, epsilon: float) -> float:
    """``1/2 b'Kb + eps * sum(a + a*) - y'b`` with ``b = a - a*``."""
    a = np.asarray(beta_pos, dtype=np.float64)
    a_star = np.asarray(beta_neg, dtype=np.float64)
    K = np.asarray(K, dtype=np.float64)
    b = a - a_star
    return float(0.5 * b @ K @ b + epsilon * np.sum(a + a_star) - np.asarray(y) @ b)


def svr_kkt_violation(model: SvrModel, X, y) -> float:
    """Largest KKT violation over both dual variables of every training point."""
    X = _as_matrix(X, "X")
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    n = X.shape[0]
    a = np.zeros(n)
    a_star = np.zeros(n)
    a[model.support_indices] = np.maximum(model.dual_coef, 0.0)
    a_star[model.support_indices] = np.maximum(-model.dual_coef, 0.0)
    r = y - predict_svr(model, X)
    eps, C = model.epsilon, model.C
    viol = np.zeros(n)
    viol = np.maximum(viol, np.where(a < C, r - eps, 0.0))
    viol = np.maximum(viol, np.where(a > 0, eps - r, 0.0))
    viol = np.maximum(viol, np.where(a_star > 0, r + eps, 0.0))
    viol = np.maximum(viol, np.where(a_star < C, -r - eps, 0.0))
    return float(viol.max())
