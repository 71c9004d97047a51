"""
Kernel specifications and evaluation.

Six families are supported::

    polynomial  (1 + x.y)^p
    gaussian    exp(-|x-y|^2 / (2 sigma^2))
    rbf         exp(-gamma |x-y|^2)
    sigmoid     tanh(alpha + beta x.y)
    trig        sin(pi / (2 + sigma |x-y|^2))
    mixed       beta * trig(sigma) + (1 - beta) * gaussian(sigma)

Note that ``sigma`` means opposite things for ``trig`` and ``gaussian``: it
multiplies the squared distance in the former and divides it in the latter,
so a large ``sigma`` makes the trig kernel *narrower*.

``rbf(gamma)`` coincides with ``gaussian(sigma)`` for ``gamma = 1/(2 sigma^2)``;
the two are kept as separate families.

Examples
--------
>>> import numpy as np
>>> spec = KernelSpec.trig(1.0)
>>> round(eval_kernel(spec, np.zeros(2), np.array([1.0, 0.0])), 7)
0.8660254
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DataError, EmptyInputError, InvalidParameterError, ShapeError

KINDS = ("polynomial", "gaussian", "rbf", "sigmoid", "trig", "mixed")

# Full Gram precomputation below this sample count; above it rows come on demand.
FULL_GRAM_LIMIT = 10_000
_BLOCK_ROWS = 256


def _positive(name: str, value: Any) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"{name} must be a real number, got {value!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")
    return v


def _finite(name: str, value: Any) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(v):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")
    return v


@dataclass(frozen=True)
class KernelSpec:
    """Immutable description of one kernel family and its parameters.

    Use the named constructors (:meth:`trig`, :meth:`gaussian`, ...) rather
    than the raw initializer; parameters irrelevant to ``kind`` must be None.
    """

    kind: str
    sigma: float | None = None
    p: int | None = None
    gamma: float | None = None
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidParameterError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        required = _REQUIRED[self.kind]
        for name in ("sigma", "p", "gamma", "alpha", "beta"):
            value = getattr(self, name)
            if name in required and value is None:
                raise InvalidParameterError(f"{self.kind} kernel requires {name}")
            if name not in required and value is not None:
                raise InvalidParameterError(f"{self.kind} kernel does not take {name}")

        if self.sigma is not None:
            object.__setattr__(self, "sigma", _positive("sigma", self.sigma))
        if self.gamma is not None:
            object.__setattr__(self, "gamma", _positive("gamma", self.gamma))
        if self.p is not None:
            if isinstance(self.p, bool) or int(self.p) != self.p or self.p < 1:
                raise InvalidParameterError(f"p must be an integer >= 1, got {self.p!r}")
            object.__setattr__(self, "p", int(self.p))
        if self.alpha is not None:
            object.__setattr__(self, "alpha", _finite("alpha", self.alpha))
        if self.beta is not None:
            beta = _finite("beta", self.beta)
            if self.kind == "mixed" and not 0.0 <= beta <= 1.0:
                raise InvalidParameterError(f"mixed kernel beta must lie in [0, 1], got {beta}")
            object.__setattr__(self, "beta", beta)

    @classmethod
    def polynomial(cls, p: int) -> KernelSpec:
        return cls("polynomial", p=p)

    @classmethod
    def gaussian(cls, sigma: float) -> KernelSpec:
        return cls("gaussian", sigma=sigma)

    @classmethod
    def rbf(cls, gamma: float) -> KernelSpec:
        return cls("rbf", gamma=gamma)

    @classmethod
    def sigmoid(cls, alpha: float, beta: float) -> KernelSpec:
        return cls("sigmoid", alpha=alpha, beta=beta)

    @classmethod
    def trig(cls, sigma: float) -> KernelSpec:
        return cls("trig", sigma=sigma)

    @classmethod
    def mixed(cls, sigma: float, beta: float = 0.5) -> KernelSpec:
        return cls("mixed", sigma=sigma, beta=beta)

    @property
    def is_radial(self) -> bool:
        """True for the shift-invariant families (unit diagonal)."""
        return self.kind in ("gaussian", "rbf", "trig", "mixed")

    @property
    def params(self) -> dict[str, float | int]:
        return {name: getattr(self, name) for name in _REQUIRED[self.kind]}

    def to_dict(self) -> dict[str, Any]:
        return {"variant": self.kind, "params": self.params}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> KernelSpec:
        try:
            return cls(data["variant"], **data["params"])
        except (KeyError, TypeError) as exc:
            raise InvalidParameterError(f"malformed kernel description: {data!r}") from exc

    def label(self) -> str:
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.kind}({inner})"


_REQUIRED = {
    "polynomial": ("p",),
    "gaussian": ("sigma",),
    "rbf": ("gamma",),
    "sigmoid": ("alpha", "beta"),
    "trig": ("sigma",),
    "mixed": ("sigma", "beta"),
}


def eval_h(x: float, sigma: float) -> float:
    """Angle ``pi / (2 + sigma x^2)``, in (0, pi/2]."""
    sigma = _positive("sigma", sigma)
    return math.pi / (2.0 + sigma * x * x)


def eval_psi(x: float, sigma: float) -> float:
    """Scalar profile ``sin(eval_h(x, sigma))`` of the trig kernel, in (0, 1]."""
    return math.sin(eval_h(x, sigma))


def _from_sqdist(spec: KernelSpec, d2):
    """Radial kernel value(s) from squared distance(s)."""
    if spec.kind == "trig":
        return np.sin(np.pi / (2.0 + spec.sigma * d2))
    if spec.kind == "gaussian":
        return np.exp(-d2 / (2.0 * spec.sigma * spec.sigma))
    if spec.kind == "rbf":
        return np.exp(-spec.gamma * d2)
    # mixed: plain convex combination; at d2 == 0 it is exactly 1 for any beta
    trig = np.sin(np.pi / (2.0 + spec.sigma * d2))
    gauss = np.exp(-d2 / (2.0 * spec.sigma * spec.sigma))
    return spec.beta * trig + (1.0 - spec.beta) * gauss


def _from_dot(spec: KernelSpec, dot):
    if spec.kind == "polynomial":
        return np.power(np.asarray(1.0 + dot), float(spec.p))
    return np.tanh(spec.alpha + spec.beta * dot)


def _as_vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ShapeError(f"{name} must be a non-empty 1-D vector, got shape {v.shape}")
    return v


def eval_kernel(spec: KernelSpec, x, y) -> float:
    """Evaluate ``spec`` on a single pair of vectors.

    The result is symmetric in ``x`` and ``y`` bit for bit: squared distances
    use ``(x - y)**2`` (negation is exact) and dot products multiply
    elementwise before summing in a fixed order. Gram matrices use the same
    reduction, so their entries match this function exactly.
    """
    x = _as_vector(x, "x")
    y = _as_vector(y, "y")
    if x.shape != y.shape:
        raise ShapeError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    if spec.is_radial:
        diff = x - y
        return float(_from_sqdist(spec, _ordered_sum(diff * diff)))
    return float(_from_dot(spec, _ordered_sum(x * y)))


def _ordered_sum(P: np.ndarray) -> np.ndarray:
    """Sum over the last axis strictly left to right (no pairwise/SIMD reordering)."""
    s = np.array(P[..., 0], dtype=np.float64)
    for k in range(1, P.shape[-1]):
        s += P[..., k]
    return s


def _as_matrix(X, name: str) -> np.ndarray:
    A = np.asarray(X, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ShapeError(f"{name} must be a 2-D matrix, got shape {A.shape}")
    if A.shape[0] == 0 or A.shape[1] == 0:
        raise EmptyInputError(f"{name} is empty (shape {A.shape})")
    if not np.all(np.isfinite(A)):
        raise DataError(f"{name} contains non-finite entries")
    return A


def _block(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # Per-pair reductions (not the |a|^2 + |b|^2 - 2ab expansion) so every
    # entry equals eval_kernel on the same pair.
    if spec.is_radial:
        diff = A[:, None, :] - B[None, :, :]
        return _from_sqdist(spec, _ordered_sum(diff * diff))
    return _from_dot(spec, _ordered_sum(A[:, None, :] * B[None, :, :]))


def _kernel_matrix(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = np.empty((A.shape[0], B.shape[0]))
    for start in range(0, A.shape[0], _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, A.shape[0])
        out[start:stop] = _block(spec, A[start:stop], B)
    return out


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric kernel matrix over one sample set.

    ``values`` is read-only; the lower triangle is a mirror of the upper one.
    """

    values: np.ndarray
    spec: KernelSpec

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def _mirror_upper(V: np.ndarray) -> np.ndarray:
    upper = np.triu(V)
    return upper + np.triu(V, 1).T


def gram(spec: KernelSpec, X) -> GramMatrix:
    X = _as_matrix(X, "X")
    values = _mirror_upper(_kernel_matrix(spec, X, X))
    values.setflags(write=False)
    return GramMatrix(values, spec)


def cross_gram(spec: KernelSpec, X, Z) -> np.ndarray:
    """Kernel values between rows of ``X`` (n x d) and rows of ``Z`` (m x d)."""
    X = _as_matrix(X, "X")
    Z = _as_matrix(Z, "Z")
    if X.shape[1] != Z.shape[1]:
        raise ShapeError(f"dimension mismatch: X has {X.shape[1]} columns, Z has {Z.shape[1]}")
    return _kernel_matrix(spec, X, Z)


class KernelRows:
    """Row access to the Gram matrix of ``X`` under ``spec``.

    Up to :data:`FULL_GRAM_LIMIT` samples the whole matrix is computed once.
    Larger problems compute rows lazily and keep the most recently used ones
    in a bounded cache.
    """

    def __init__(self, spec: KernelSpec, X, cache_rows: int = 2048, matrix=None):
        self.spec = spec
        self.X = _as_matrix(X, "X")
        self.n = self.X.shape[0]
        self._cache: OrderedDict[int, np.ndarray] = OrderedDict()
        self._cache_rows = cache_rows
        if matrix is not None:
            self._full = np.asarray(matrix, dtype=np.float64)
            if self._full.shape != (self.n, self.n):
                raise ShapeError(f"matrix shape {self._full.shape} does not match {self.n} samples")
        elif self.n <= FULL_GRAM_LIMIT:
            self._full = gram(spec, self.X).values
        else:
            self._full = None
        if self._full is not None:
            self.diag = np.diag(self._full).copy()
        else:
            self.diag = np.array([eval_kernel(spec, row, row) for row in self.X])

    @classmethod
    def from_matrix(cls, spec: KernelSpec, X, matrix) -> KernelRows:
        """Wrap an already computed (possibly regularized) Gram matrix."""
        return cls(spec, X, matrix=matrix)

    def row(self, i: int) -> np.ndarray:
        if self._full is not None:
            return self._full[i]
        cached = self._cache.get(i)
        if cached is not None:
            self._cache.move_to_end(i)
            return cached
        r = _block(self.spec, self.X[i : i + 1], self.X)[0]
        self._cache[i] = r
        if len(self._cache) > self._cache_rows:
            self._cache.popitem(last=False)
        return r

    def matrix(self) -> np.ndarray:
        if self._full is None:
            raise ShapeError(f"full Gram matrix not materialized for n={self.n}")
        return self._full
