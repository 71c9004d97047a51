"""
Datasets: CSV ingestion, standardization and the synthetic generators.

Random draws use numpy's Philox4x64 counter-based generator keyed by the
user seed, so a seed reproduces the same stream on every platform.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, EmptyInputError, InvalidParameterError, LabelError, ParseError, ShapeError
from .scaling import ScalingStats

CLASSIFICATION = "classification"
REGRESSION = "regression"


def philox(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[int(seed), int(stream)]))


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus targets.

    ``target`` holds labels in {-1, +1} when ``task`` is classification and
    arbitrary reals for regression. ``label_map`` records which raw label
    became -1 and which +1.
    """

    features: np.ndarray
    target: np.ndarray
    task: str = CLASSIFICATION
    feature_names: tuple[str, ...] | None = None
    provenance: str = ""
    label_map: tuple[str, str] | None = None

    def __post_init__(self) -> None:
        X = np.asarray(self.features, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.target, dtype=np.float64).reshape(-1)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ShapeError(f"features {X.shape} and target {y.shape} disagree")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DataError("dataset contains non-finite values")
        if self.task == CLASSIFICATION and not np.all(np.isin(y, (-1.0, 1.0))):
            raise LabelError("classification targets must be -1 or +1")
        if self.task not in (CLASSIFICATION, REGRESSION):
            raise InvalidParameterError(f"unknown task {self.task!r}")
        if self.feature_names is not None and len(self.feature_names) != X.shape[1]:
            raise ShapeError("feature_names length does not match feature count")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "target", y)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, indices) -> Dataset:
        idx = np.asarray(indices, dtype=np.intp)
        return replace(self, features=self.features[idx], target=self.target[idx])

    def with_features(self, features) -> Dataset:
        return replace(self, features=features)


def _map_labels(raw: list[str]) -> tuple[np.ndarray, tuple[str, str]]:
    distinct = sorted(set(raw), key=_label_key)
    if len(distinct) > 2:
        raise LabelError(f"expected at most 2 distinct labels, found {len(distinct)}: {distinct[:5]}")
    if len(distinct) == 1:
        # a lone label is treated as the positive class
        lo, hi = "", distinct[0]
    else:
        lo, hi = distinct
    y = np.array([1.0 if r == hi else -1.0 for r in raw])
    return y, (lo, hi)


def _label_key(label: str):
    # numeric labels sort numerically, everything else lexically after them
    try:
        return (0, float(label), label)
    except ValueError:
        return (1, 0.0, label)


def load_csv(
    path,
    label_column: int | str = -1,
    has_header: bool | None = None,
    task: str = CLASSIFICATION,
) -> Dataset:
    """Read a comma-delimited file into a :class:`Dataset`.

    Parameters
    ----------
    label_column : int or str
        Column index (negative counts from the end; default last) or header name.
    has_header : bool, optional
        Whether the first row is a header. When None it is sniffed: a first row
        with any non-numeric feature cell is taken as a header.
    task : {"classification", "regression"}
        Classification maps the two distinct raw labels to -1/+1 in ascending
        order (numeric order when both parse as numbers).
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(cell.strip() for cell in r)]
    if not rows:
        raise EmptyInputError(f"{path} contains no rows")

    header = None
    if has_header is None:
        if isinstance(label_column, str):
            has_header = True
        else:
            skip = label_column % len(rows[0])
            has_header = not all(_is_number(c) for j, c in enumerate(rows[0]) if j != skip)
    if has_header:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise EmptyInputError(f"{path} has a header but no data rows")

    width = len(rows[0])
    if isinstance(label_column, str):
        if header is None or label_column not in header:
            raise ParseError(f"label column {label_column!r} not found in header")
        label_idx = header.index(label_column)
    else:
        label_idx = label_column % width
    feat_idx = [j for j in range(width) if j != label_idx]
    if not feat_idx:
        raise ParseError("file has no feature columns")

    X = np.empty((len(rows), len(feat_idx)))
    raw_labels = []
    first_data_row = 2 if has_header else 1
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ParseError(f"expected {width} cells, found {len(r)}", row=i + first_data_row, column=None)
        for k, j in enumerate(feat_idx):
            cell = r[j].strip()
            try:
                X[i, k] = float(cell)
            except ValueError:
                name = header[j] if header else j + 1
                raise ParseError(f"non-numeric feature cell {cell!r}", row=i + first_data_row, column=name) from None
            if not math.isfinite(X[i, k]):
                raise DataError(f"non-finite feature at row {i + first_data_row}, column {j + 1}")
        raw_labels.append(r[label_idx].strip())

    names = tuple(header[j] for j in feat_idx) if header else None
    if task == CLASSIFICATION:
        y, label_map = _map_labels(raw_labels)
    else:
        try:
            y = np.array([float(v) for v in raw_labels])
        except ValueError as exc:
            raise ParseError(f"non-numeric regression target: {exc}") from None
        label_map = None
    return Dataset(X, y, task=task, feature_names=names, provenance=str(path), label_map=label_map)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def format_float(v: float) -> str:
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(v))


def dataset_to_csv(ds: Dataset, header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        names = ds.feature_names or tuple(f"x{j + 1}" for j in range(ds.d))
        w.writerow([*names, "label" if ds.task == CLASSIFICATION else "target"])
    for row, t in zip(ds.features, ds.target):
        label = str(int(t)) if ds.task == CLASSIFICATION else format_float(t)
        w.writerow([*(format_float(v) for v in row), label])
    return buf.getvalue()


def write_csv(ds: Dataset, path, header: bool = True) -> None:
    Path(path).write_text(dataset_to_csv(ds, header=header))


def standardize(train: Dataset, test: Dataset | None = None):
    """Z-score both sets with statistics from ``train`` only.

    Returns ``(train', test', stats)``; ``test'`` is None when ``test`` is.
    """
    if test is not None and test.d != train.d:
        raise ShapeError(f"train has {train.d} features, test has {test.d}")
    stats = ScalingStats.fit(train.features)
    train_s = train.with_features(stats.transform(train.features))
    test_s = test.with_features(stats.transform(test.features)) if test is not None else None
    return train_s, test_s, stats


def gen_circles(n: int = 400, seed: int = 42, inner: float = 1.0, outer: float = 3.0,
                noise: float = 0.2) -> Dataset:
    """Two concentric noisy circles: class +1 on the inner radius, -1 on the outer.

    Rows alternate +1/-1 so any prefix stays balanced.
    """
    if n < 4 or n % 2:
        raise InvalidParameterError(f"n must be even and >= 4, got {n}")
    if noise < 0:
        raise InvalidParameterError("noise must be non-negative")
    rng = philox(seed)
    angles = rng.uniform(0.0, 2.0 * np.pi, n)
    radial = rng.standard_normal(n) * noise
    labels = np.tile([1.0, -1.0], n // 2)
    radius = np.where(labels > 0, inner, outer) + radial
    X = np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])
    return Dataset(X, labels, feature_names=("x1", "x2"), provenance=f"circles(n={n}, seed={seed})")


def sine_curve(x):
    """Noiseless regression target ``sin(x) * exp(-0.2 x)``."""
    x = np.asarray(x, dtype=np.float64)
    return np.sin(x) * np.exp(-0.2 * x)


def gen_svr_sine(n: int = 200, seed: int = 42, noise_scale: float = 0.1,
                 low: float = 0.0, high: float = 10.0):
    """Equally spaced ``x`` on ``[low, high]`` with Gaussian-noised sine targets.

    Returns ``(x, y_noisy, y_true)``.
    """
    if n < 2:
        raise InvalidParameterError(f"n must be >= 2, got {n}")
    if noise_scale < 0:
        raise InvalidParameterError(f"noise_scale must be >= 0, got {noise_scale}")
    x = np.linspace(low, high, n)
    y_true = sine_curve(x)
    y_noisy = y_true + noise_scale * philox(seed).standard_normal(n)
    return x, y_noisy, y_true


def class_indices(y: Sequence[float]) -> dict[float, np.ndarray]:
    y = np.asarray(y)
    return {float(c): np.flatnonzero(y == c) for c in np.unique(y)}
