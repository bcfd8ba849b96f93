"""Error metrics and kernel density estimates of prediction errors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DegenerateDistributionError

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def _pair(pred, target):
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ContractError(f"shape mismatch: {pred.shape} vs {target.shape}")
    return pred, target


def rmse(pred, target) -> float:
    """Root mean squared error over all N*m entries."""
    pred, target = _pair(pred, target)
    if pred.size == 0:
        raise ContractError("rmse of empty arrays")
    return float(np.sqrt(np.mean((pred - target) ** 2)))


def accuracy(pred, labels) -> float:
    """Fraction of rows whose argmax matches the one-hot label (first index wins ties)."""
    pred, labels = _pair(pred, labels)
    if pred.ndim != 2 or pred.shape[1] < 2:
        raise ContractError("accuracy needs N x m scores with m >= 2")
    return float(np.mean(pred.argmax(axis=1) == labels.argmax(axis=1)))


@dataclass(frozen=True)
class DensityEstimate:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def integral(self) -> float:
        return float(_trapezoid(self.density, self.grid))


def silverman_bandwidth(x: np.ndarray) -> float:
    """``0.9 * min(std, IQR/1.34) * n^(-1/5)``; falls back to std when the IQR is zero."""
    sigma = x.std(ddof=1)
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sigma, (q75 - q25) / 1.34)
    if spread <= 0:
        spread = sigma
    return 0.9 * spread * x.shape[0] ** (-0.2)


def kde(errors, grid_points: int = 512) -> DensityEstimate:
    """Gaussian KDE on a grid spanning ``[min - 4h, max + 4h]``."""
    x = np.asarray(errors, dtype=np.float64).ravel()
    if x.shape[0] < 2:
        raise DegenerateDistributionError("kde needs at least two samples")
    if np.ptp(x) == 0:
        raise DegenerateDistributionError("all error samples are identical")
    if grid_points < 2:
        raise ContractError("grid_points must be >= 2")
    h = silverman_bandwidth(x)
    grid = np.linspace(x.min() - 4 * h, x.max() + 4 * h, grid_points)
    density = np.empty(grid_points)
    norm = 1.0 / (x.shape[0] * h * np.sqrt(2 * np.pi))
    # chunk over grid rows to bound memory for large samples
    step = max(1, 2_000_000 // x.shape[0])
    for i in range(0, grid_points, step):
        u = (grid[i:i + step, None] - x[None, :]) / h
        density[i:i + step] = np.exp(-0.5 * u * u).sum(axis=1) * norm
    return DensityEstimate(grid, density, float(h))
