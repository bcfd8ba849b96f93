"""Datasets: CSV ingestion, min-max scaling, seeded splits and the synthetic benchmark."""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ContractError, ParseError

REGRESSION = "regression"
CLASSIFICATION = "classification"

# (train, test, inputs, outputs) for the seven benchmark sets
BENCHMARK_SHAPES = {
    "DB1": (2000, 400, 1, 1),
    "DB2": (2444, 258, 561, 6),
    "DB3": (7200, 5330, 8, 1),
    "DB4": (1120, 479, 15, 3),
    "DB5": (105, 45, 4, 3),
    "DB6": (7563, 2947, 15, 1),
    "DB7": (1237, 523, 1, 1),
}


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    Y: np.ndarray
    task: str = REGRESSION
    feature_names: Optional[tuple[str, ...]] = None
    classes: Optional[tuple[float, ...]] = None  # label value of each one-hot column

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        Y = np.asarray(self.Y, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if Y.ndim == 1:
            Y = Y[:, None]
        if X.shape[0] != Y.shape[0]:
            raise ContractError(f"X has {X.shape[0]} rows, Y has {Y.shape[0]}")
        if np.isnan(X).any() or np.isnan(Y).any():
            raise ContractError("dataset contains NaN")
        if self.task not in (REGRESSION, CLASSIFICATION):
            raise ContractError(f"unknown task {self.task!r}")
        if self.task == CLASSIFICATION and Y.size:
            if not (np.isin(Y, (0.0, 1.0)).all() and np.all(Y.sum(axis=1) == 1.0)):
                raise ContractError("classification targets must be one-hot")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.Y.shape[1]

    def take(self, idx) -> "Dataset":
        return replace(self, X=self.X[idx], Y=self.Y[idx])


@dataclass(frozen=True)
class NormParams:
    """Per-column min/max used for [0, 1] scaling. Target bounds are None for classification."""

    x_min: np.ndarray
    x_max: np.ndarray
    y_min: Optional[np.ndarray] = None
    y_max: Optional[np.ndarray] = None

    @staticmethod
    def _scale(A, lo, hi):
        span = hi - lo
        out = np.zeros_like(A, dtype=np.float64)
        live = span > 0
        out[:, live] = (A[:, live] - lo[live]) / span[live]
        return out

    @staticmethod
    def _unscale(A, lo, hi):
        return A * (hi - lo) + lo

    def normalize_inputs(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.x_min.shape[0]:
            raise ContractError(
                f"expected {self.x_min.shape[0]} input features, got "
                f"{X.shape[1] if X.ndim == 2 else X.shape}"
            )
        return self._scale(X, self.x_min, self.x_max)

    def denormalize_inputs(self, X) -> np.ndarray:
        return self._unscale(np.asarray(X, dtype=np.float64), self.x_min, self.x_max)

    def normalize_targets(self, Y) -> np.ndarray:
        Y = np.asarray(Y, dtype=np.float64)
        if self.y_min is None:
            return Y
        return self._scale(Y, self.y_min, self.y_max)

    def denormalize_targets(self, Y) -> np.ndarray:
        Y = np.asarray(Y, dtype=np.float64)
        if self.y_min is None:
            return Y
        return self._unscale(Y, self.y_min, self.y_max)

    def apply(self, ds: Dataset) -> Dataset:
        return replace(ds, X=self.normalize_inputs(ds.X), Y=self.normalize_targets(ds.Y))

    def to_dict(self) -> dict:
        out = {"x_min": self.x_min.tolist(), "x_max": self.x_max.tolist()}
        if self.y_min is not None:
            out["y_min"] = self.y_min.tolist()
            out["y_max"] = self.y_max.tolist()
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "NormParams":
        arr = lambda k: None if d.get(k) is None else np.asarray(d[k], dtype=np.float64)
        return cls(arr("x_min"), arr("x_max"), arr("y_min"), arr("y_max"))


def normalize(ds: Dataset) -> tuple[Dataset, NormParams]:
    """Min-max scale inputs (and regression targets) to [0, 1]; constant columns map to 0."""
    if len(ds) == 0:
        raise ContractError("cannot normalize an empty dataset")
    params = NormParams(ds.X.min(axis=0), ds.X.max(axis=0))
    if ds.task == REGRESSION:
        params = replace(params, y_min=ds.Y.min(axis=0), y_max=ds.Y.max(axis=0))
    return params.apply(ds), params


def one_hot(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Integer-code ``labels`` (sorted unique order) and one-hot encode them."""
    classes, codes = np.unique(labels, return_inverse=True)
    Y = np.zeros((labels.shape[0], classes.shape[0]))
    Y[np.arange(labels.shape[0]), codes] = 1.0
    return Y, classes


def load_csv(
    path: Union[str, Path],
    targets: Sequence[Union[int, str]] = (-1,),
    task: str = REGRESSION,
    header: bool = False,
    classes: Optional[Sequence[float]] = None,
) -> Dataset:
    """Read a comma-separated numeric file.

    ``targets`` selects the target columns by index (negative allowed) or, when
    ``header`` is set, by name. For classification exactly one target column of
    labels is expected; it is one-hot encoded against ``classes`` when given
    (so a held-out file maps onto the training columns), else against the
    sorted labels present.
    """
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"data file not found: {path}")
    rows: list[list[float]] = []
    names = None
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if header and names is None:
                names = [c.strip() for c in row]
                continue
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric cell in {row!r}") from None
            if rows and len(vals) != len(rows[0]):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(rows[0])} fields, got {len(vals)}"
                )
            if not np.all(np.isfinite(vals)):
                raise ParseError(f"{path}:{lineno}: non-finite value")
            rows.append(vals)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    data = np.array(rows)
    ncol = data.shape[1]

    idx = []
    for t in targets:
        if isinstance(t, str) and not t.lstrip("-").isdigit():
            if names is None or t not in names:
                raise ParseError(f"{path}: unknown target column {t!r}")
            idx.append(names.index(t))
        else:
            i = int(t)
            if not -ncol <= i < ncol:
                raise ParseError(f"{path}: target column {i} out of range for {ncol} columns")
            idx.append(i % ncol)
    if len(set(idx)) != len(idx) or len(idx) == ncol:
        raise ParseError(f"{path}: target columns {list(targets)} leave no inputs")
    feat = [j for j in range(ncol) if j not in idx]

    X = data[:, feat]
    if task == CLASSIFICATION:
        if len(idx) != 1:
            raise ParseError("classification needs exactly one label column")
        labels = data[:, idx[0]]
        if classes is None:
            Y, classes = one_hot(labels)
        else:
            classes = np.asarray(classes, dtype=np.float64)
            pos = {c: i for i, c in enumerate(classes.tolist())}
            unknown = sorted(set(labels.tolist()) - pos.keys())
            if unknown:
                raise ParseError(f"{path}: labels {unknown} not among known classes")
            Y = np.zeros((labels.shape[0], classes.shape[0]))
            Y[np.arange(labels.shape[0]), [pos[v] for v in labels.tolist()]] = 1.0
    else:
        Y = data[:, idx]
        classes = None
    feature_names = tuple(names[j] for j in feat) if names else None
    return Dataset(X, Y, task, feature_names,
                   None if classes is None else tuple(float(c) for c in np.asarray(classes)))


def target_function(x) -> np.ndarray:
    """Two-peak benchmark curve ``1/((x-.3)^2+.01) + 1/((x-.9)^2+.04) - 6``."""
    x = np.asarray(x, dtype=np.float64)
    return 1.0 / ((x - 0.3) ** 2 + 0.01) + 1.0 / ((x - 0.9) ** 2 + 0.04) - 6.0


def synth_function(n: int, seed: int = 0, noise: float = 0.0) -> Dataset:
    """``n`` samples of :func:`target_function` with x uniform on [0, 1]."""
    if n < 1:
        raise ContractError("n must be >= 1")
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, size=n)
    y = target_function(x)
    if noise > 0:
        y = y + noise * rng.standard_normal(n)
    return Dataset(x[:, None], y[:, None], REGRESSION, ("x",))


def split(ds: Dataset, train_count: int, test_count: int, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Disjoint train/test subsets drawn by a seeded permutation."""
    if train_count < 0 or test_count < 0 or train_count + test_count > len(ds):
        raise ContractError(
            f"train_count + test_count = {train_count + test_count} exceeds {len(ds)} rows"
        )
    perm = np.random.default_rng(seed).permutation(len(ds))
    return ds.take(perm[:train_count]), ds.take(perm[train_count:train_count + test_count])
