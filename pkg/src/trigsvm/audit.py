"""
Positive-definiteness auditing of kernel Gram matrices.

Two independent routes classify a symmetric matrix:

* :func:`leading_minor_audit` eliminates column by column
  (``K'_jk = K_jk - K_j1 K_1k / K_11``) and reads each leading principal
  minor as a running product of pivots.
* :func:`eigen_audit` computes the smallest eigenvalue with a cyclic Jacobi
  eigensolver.

Agreement between them on "positive definite or not" is exactly Sylvester's
criterion, which makes each a check on the other.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError, NumericalFailureError, RegularizationError, ShapeError
from .kernels import KernelSpec, gram

POSITIVE_DEFINITE = "positive-definite"
BOUNDARY = "positive-semidefinite-boundary"
INDEFINITE = "indefinite"

# Eigenvalues below this (absolute, unit-diagonal Grams) count as genuine violations.
VIOLATION_TOL = -1e-6

JITTER_SCHEDULE = (0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2)


@dataclass(frozen=True)
class PsdVerdict:
    classification: str
    witness: int | float | None = None
    min_eigenvalue: float | None = None
    minors: tuple[float, ...] | None = None

    @property
    def is_positive_definite(self) -> bool:
        return self.classification == POSITIVE_DEFINITE


def _check_symmetric(G, tol: float = 1e-10) -> np.ndarray:
    A = np.asarray(G, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ShapeError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ShapeError("matrix contains non-finite entries")
    asym = np.max(np.abs(A - A.T))
    if asym > tol:
        raise ShapeError(f"matrix is not symmetric (max |G - G^T| = {asym:.3e})")
    return A


def leading_minors(G) -> np.ndarray:
    """Determinants of the 1x1, 2x2, ..., nxn leading principal submatrices.

    Uses symmetric elimination against the first remaining row; the k-th minor
    is the product of the first k pivots. If a pivot vanishes the recurrence
    cannot continue and the remaining minors are taken as direct determinants.
    """
    A = _check_symmetric(G).copy()
    n = A.shape[0]
    minors = np.empty(n)
    det = 1.0
    for k in range(n):
        pivot = A[k, k]
        det *= pivot
        minors[k] = det
        if pivot == 0.0:
            H = _check_symmetric(G)
            for m in range(k + 1, n):
                minors[m] = np.linalg.det(H[: m + 1, : m + 1])
            break
        # K'_jl = K_jl - K_jk K_kl / K_kk on the trailing block
        col = A[k + 1 :, k]
        A[k + 1 :, k + 1 :] -= np.outer(col, A[k, k + 1 :]) / pivot
    return minors


def leading_minor_audit(G, tol: float = 1e-12) -> PsdVerdict:
    minors = leading_minors(G)
    as_tuple = tuple(float(m) for m in minors)
    negative = np.flatnonzero(minors < -tol)
    if negative.size:
        return PsdVerdict(INDEFINITE, witness=int(negative[0]) + 1, minors=as_tuple)
    small = np.flatnonzero(np.abs(minors) <= tol)
    if small.size:
        return PsdVerdict(BOUNDARY, witness=int(small[0]) + 1, minors=as_tuple)
    return PsdVerdict(POSITIVE_DEFINITE, minors=as_tuple)


def jacobi_eigenvalues(G, max_sweeps: int = 100, tol: float = 1e-15) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.

    Raises
    ------
    NumericalFailureError
        If the off-diagonal mass does not vanish within ``max_sweeps`` sweeps.
    """
    A = _check_symmetric(G).copy()
    # solve on the exactly symmetrized matrix
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    if n == 1:
        return A.diagonal().copy()
    scale = max(np.max(np.abs(A)), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.triu(A, 1) ** 2)))
        if off <= tol * scale:
            return np.sort(A.diagonal())
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # rotate rows p, q then columns p, q
                rp = A[p].copy()
                rq = A[q].copy()
                A[p] = c * rp - s * rq
                A[q] = s * rp + c * rq
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                A[p, q] = A[q, p] = 0.0
    raise NumericalFailureError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def eigen_audit(G, tol: float = 1e-12) -> PsdVerdict:
    """Classify ``G`` by its smallest eigenvalue against ``tol * n * max|G|``."""
    A = _check_symmetric(G)
    eig = jacobi_eigenvalues(A)
    lam = float(eig[0])
    threshold = tol * A.shape[0] * float(np.max(np.abs(A)))
    if lam > threshold:
        return PsdVerdict(POSITIVE_DEFINITE, min_eigenvalue=lam)
    if lam >= -threshold:
        return PsdVerdict(BOUNDARY, witness=lam, min_eigenvalue=lam)
    return PsdVerdict(INDEFINITE, witness=lam, min_eigenvalue=lam)


@dataclass(frozen=True)
class JitterPolicy:
    schedule: tuple[float, ...] = JITTER_SCHEDULE
    tol: float = 1e-12


def jitter_regularize(G, policy: JitterPolicy | None = None) -> tuple[np.ndarray, float]:
    """Shift ``G`` by the smallest scheduled ``lambda * I`` that makes it positive definite.

    Schedule entries are relative to ``trace(G) / n``. Returns the shifted
    matrix and the absolute shift used (0.0 if ``G`` already passes).
    """
    policy = policy or JitterPolicy()
    A = _check_symmetric(G)
    n = A.shape[0]
    unit = float(np.trace(A)) / n
    last = None
    for factor in policy.schedule:
        lam = factor * unit
        shifted = A + lam * np.eye(n) if lam else A.copy()
        verdict = eigen_audit(shifted, policy.tol)
        if verdict.is_positive_definite:
            return shifted, lam
        last = verdict
    raise RegularizationError(
        f"no shift up to {policy.schedule[-1]:g} * trace/n made the matrix positive definite "
        f"(min eigenvalue {last.min_eigenvalue:.3e})",
        min_eigenvalue=last.min_eigenvalue,
    )


@dataclass
class Violation:
    seed_offset: int
    n: int
    d: int
    sigma: float | None
    min_eig: float
    points: np.ndarray = field(repr=False)


@dataclass
class SurveyReport:
    kernel: str
    trials: int
    seed: int
    n_max: int
    d_max: int
    min_eigenvalue: float
    violations: list[Violation]
    # per-trial smallest eigenvalue, in trial order
    trial_min_eigenvalues: list[float] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "trials": self.trials,
            "seed": self.seed,
            "n_max": self.n_max,
            "d_max": self.d_max,
            "min_eigenvalue": self.min_eigenvalue,
            "violations": [
                {k: v for k, v in asdict(viol).items() if k != "points"} for viol in self.violations
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def survey_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based Philox stream for one survey trial."""
    return np.random.Generator(np.random.Philox(key=[seed, trial]))


def _with_sigma(spec: KernelSpec, sigma: float) -> KernelSpec:
    params = dict(spec.params)
    params["sigma"] = sigma
    return KernelSpec(spec.kind, **params)


def survey_trial(spec: KernelSpec, trial: int, n_max: int, d_max: int, seed: int,
                 sigmas: Sequence[float] | None = None):
    """Draw one random configuration; returns ``(points, kernel_spec, gram_values)``."""
    rng = survey_rng(seed, trial)
    n = int(rng.integers(1, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    points = rng.standard_normal((n, d))
    trial_spec = spec
    if sigmas is not None and spec.sigma is not None:
        trial_spec = _with_sigma(spec, float(sigmas[int(rng.integers(0, len(sigmas)))]))
    return points, trial_spec, gram(trial_spec, points).values


def randomized_psd_survey(
    spec: KernelSpec,
    trials: int,
    n_max: int,
    d_max: int,
    seed: int = 42,
    sigmas: Sequence[float] | None = None,
) -> SurveyReport:
    """Empirically probe whether ``spec`` yields PSD Gram matrices.

    Each trial draws ``n <= n_max`` standard-normal points in ``d <= d_max``
    dimensions (and, if ``sigmas`` is given and the kernel has a width, a
    width from ``sigmas``), builds the Gram and records its smallest
    eigenvalue. Trials whose smallest eigenvalue is below ``VIOLATION_TOL``
    are reported with their configuration.
    """
    if trials < 1 or n_max < 1 or d_max < 1:
        raise InvalidParameterError("trials, n_max and d_max must all be >= 1")
    violations: list[Violation] = []
    mins: list[float] = []
    for t in range(trials):
        points, trial_spec, G = survey_trial(spec, t, n_max, d_max, seed, sigmas)
        lam = float(jacobi_eigenvalues(G)[0])
        mins.append(lam)
        if lam < VIOLATION_TOL:
            violations.append(Violation(t, points.shape[0], points.shape[1], trial_spec.sigma, lam, points))
    return SurveyReport(
        kernel=spec.label() if sigmas is None else f"{spec.kind}(sigma in grid)",
        trials=trials,
        seed=seed,
        n_max=n_max,
        d_max=d_max,
        min_eigenvalue=min(mins),
        violations=violations,
        trial_min_eigenvalues=mins,
    )
