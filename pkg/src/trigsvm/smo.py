"""
Sequential minimal optimization for the generic box-constrained dual

    min_a  1/2 a'Qa + p'a    s.t.  y'a = 0,  0 <= a_t <= C,  y_t in {-1, +1}

C-SVC and epsilon-SVR are both instances with ``Q_st = y_s y_t K_st``, so the
solver only ever needs kernel rows: it tracks ``v = -y * grad`` directly and
``v`` moves along ``K_i - K_j`` at each step.

The working pair is the maximal violating pair: ``i`` maximizes ``v`` over
the "up" set and ``j`` minimizes it over the "low" set, ties broken by lowest
index. The gap ``v_i - v_j`` bounds the KKT violation of the resulting model,
so iteration stops once it drops to ``tol``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError

MIN_STEP = 1e-12


@dataclass
class DualSolution:
    alpha: np.ndarray
    grad: np.ndarray
    bias: float
    gap: float
    iterations: int
    objective: float


def default_max_iter(n: int) -> int:
    return 10 * n * max(n, 1000)


def _index_sets(alpha, y, C):
    pos = y > 0
    up = np.where(pos, alpha < C, alpha > 0)
    low = np.where(pos, alpha > 0, alpha < C)
    return up, low


def _bias(alpha, v, y, C) -> float:
    """Mean of ``v`` over free variables, else the midpoint of its KKT bounds."""
    free = (alpha > 0) & (alpha < C)
    if np.any(free):
        return float(np.mean(v[free]))
    up, low = _index_sets(alpha, y, C)
    lo = float(np.max(v[up])) if np.any(up) else -np.inf
    hi = float(np.min(v[low])) if np.any(low) else np.inf
    if np.isfinite(lo) and np.isfinite(hi):
        return (lo + hi) / 2.0
    return lo if np.isfinite(lo) else hi


def solve(
    krow: Callable[[int], np.ndarray],
    kdiag: np.ndarray,
    p: np.ndarray,
    y: np.ndarray,
    C: float,
    tol: float,
    max_iter: int,
) -> DualSolution:
    """Run SMO from ``a = 0``.

    ``krow(t)`` must return ``y_t * y * Q[t]`` (the plain kernel row for SVC
    and SVR); ``kdiag`` is the diagonal of ``Q``.

    Raises
    ------
    ConvergenceError
        If ``max_iter`` pair updates do not bring the gap under ``tol``, or if
        the working pair can no longer move (step below ``MIN_STEP``).
    """
    y = np.asarray(y, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    n = p.shape[0]
    alpha = np.zeros(n)
    v = -y * p
    pos = y > 0
    up = pos.copy()
    low = ~pos
    vu = np.empty(n)
    vl = np.empty(n)
    ninf = -np.inf

    it = 0
    while True:
        np.copyto(vu, v)
        vu[~up] = ninf
        np.copyto(vl, v)
        vl[~low] = np.inf
        i = int(vu.argmax())
        j = int(vl.argmin())
        gap = float(vu[i] - vl[j])
        if gap <= tol or not np.isfinite(gap):
            break
        if it >= max_iter:
            raise ConvergenceError(
                f"SMO did not converge in {max_iter} iterations (KKT gap {gap:.3e} > {tol:g})",
                violation=gap,
                iterations=it,
            )

        Ki = krow(i)
        Kj = krow(j)
        yi, yj = y[i], y[j]
        # a_i += yi*lam, a_j -= yj*lam keeps y'a fixed
        room_i = C - alpha[i] if yi > 0 else alpha[i]
        room_j = alpha[j] if yj > 0 else C - alpha[j]
        lam_max = min(room_i, room_j)
        eta = kdiag[i] + kdiag[j] - 2.0 * Ki[j]
        if eta > 0:
            lam = min(lam_max, gap / eta)
        else:
            # non-convex along the pair: take the better box endpoint
            phi_end = -gap * lam_max + 0.5 * eta * lam_max * lam_max
            lam = lam_max if phi_end < 0 else 0.0
        if lam < MIN_STEP and lam < lam_max:
            raise ConvergenceError(
                f"SMO stalled on pair ({i}, {j}) with step {lam:.3e} (KKT gap {gap:.3e})",
                violation=gap,
                iterations=it,
            )

        ai = alpha[i] + yi * lam
        aj = alpha[j] - yj * lam
        if lam == room_i:
            ai = C if yi > 0 else 0.0
        if lam == room_j:
            aj = 0.0 if yj > 0 else C
        alpha[i] = ai
        alpha[j] = aj
        for t, a in ((i, ai), (j, aj)):
            if y[t] > 0:
                up[t] = a < C
                low[t] = a > 0
            else:
                up[t] = a > 0
                low[t] = a < C
        v -= lam * (Ki - Kj)
        it += 1

    grad = -y * v
    objective = 0.5 * float(alpha @ (grad - p)) + float(p @ alpha)
    return DualSolution(
        alpha=alpha,
        grad=grad,
        bias=_bias(alpha, v, y, C),
        gap=max(gap, 0.0) if np.isfinite(gap) else 0.0,
        iterations=it,
        objective=objective,
    )
