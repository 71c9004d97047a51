"""
Brute-force reference solvers for small box-constrained duals.

Every face of the feasible polytope is visited: each variable is pinned to
0, pinned to C, or left free, and the stationarity system on the free set is
solved exactly. The best feasible candidate is the global minimum, convex or
not, because a minimizer of a quadratic over a polytope is a stationary point
of the relative interior of some face.
"""

from __future__ import annotations

import itertools

import numpy as np

FEAS_TOL = 1e-10


def _face_candidate(Q, p, y, C, lower, upper):
    """Stationary point with ``lower`` at 0, ``upper`` at C, the rest free."""
    n = p.shape[0]
    a = np.zeros(n)
    a[upper] = C
    free = ~(lower | upper)
    rhs_eq = -float(y[~free] @ a[~free])
    if not free.any():
        return a if abs(rhs_eq) <= FEAS_TOL else None
    F = np.flatnonzero(free)
    m = F.size
    # [Q_FF  y_F] [a_F]   [-(p_F + Q_FB a_B)]
    # [y_F'   0 ] [nu ] = [ -y_B' a_B       ]
    A = np.zeros((m + 1, m + 1))
    A[:m, :m] = Q[np.ix_(F, F)]
    A[:m, m] = y[F]
    A[m, :m] = y[F]
    rhs = np.empty(m + 1)
    rhs[:m] = -(p[F] + Q[F][:, ~free] @ a[~free])
    rhs[m] = rhs_eq
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    if np.max(np.abs(A @ sol - rhs)) > 1e-9:
        return None
    aF = sol[:m]
    if np.any(aF < -FEAS_TOL) or np.any(aF > C + FEAS_TOL):
        return None
    a[F] = np.clip(aF, 0.0, C)
    return a


def _objective(Q, p, a):
    return float(0.5 * a @ Q @ a + p @ a)


def minimize_box_dual(Q, p, y, C, states=None):
    """Global minimum of ``1/2 a'Qa + p'a`` s.t. ``y'a = 0``, ``0 <= a <= C``.

    ``states`` optionally restricts the enumeration to an iterable of
    ``(lower, upper)`` boolean mask pairs. Returns ``(objective, alpha)``.
    """
    Q = np.asarray(Q, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = p.shape[0]
    if states is None:
        states = (
            (np.array([s == 0 for s in code]), np.array([s == 1 for s in code]))
            for code in itertools.product((0, 1, 2), repeat=n)
        )
    best, best_a = np.inf, None
    for lower, upper in states:
        a = _face_candidate(Q, p, y, C, lower, upper)
        if a is None:
            continue
        val = _objective(Q, p, a)
        if val < best:
            best, best_a = val, a
    return best, best_a


def svc_oracle(K, y, C):
    """Global optimum of the C-SVC dual ``1/2 sum a_i a_j y_i y_j K_ij - sum a_i``."""
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    Q = np.outer(y, y) * K
    return minimize_box_dual(Q, -np.ones(y.size), y, C)


def svr_oracle(K, y, C, epsilon):
    """Global optimum of the epsilon-SVR dual over ``(a, a*)``.

    With ``epsilon > 0`` an optimum never has both ``a_i`` and ``a*_i``
    positive, so each point takes one of five states: both zero, ``a_i``
    free or at C, ``a*_i`` free or at C.
    Returns ``(objective, a, a_star)``.
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    Q = np.block([[K, -K], [-K, K]])
    p = np.concatenate([epsilon - y, epsilon + y])
    z = np.concatenate([np.ones(n), -np.ones(n)])
    # per point: (state of a_i, state of a*_i) with 0 = zero, 1 = C, 2 = free
    per_point = ((0, 0), (2, 0), (1, 0), (0, 2), (0, 1))

    def states():
        for combo in itertools.product(per_point, repeat=n):
            codes = [c[0] for c in combo] + [c[1] for c in combo]
            yield np.array([c == 0 for c in codes]), np.array([c == 1 for c in codes])

    val, alpha = minimize_box_dual(Q, p, z, C, states())
    return val, alpha[:n], alpha[n:]
