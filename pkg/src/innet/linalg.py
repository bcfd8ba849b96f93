"""Dense least squares: SVD pseudoinverse and Greville column-append updates.

All arrays are float64. ``H`` is the ``N x L`` hidden-output matrix, ``f`` the
``N x m`` target matrix and ``beta`` the ``L x m`` output weights.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DegenerateNodeError, NumericalError

#: relative threshold on ||c|| below which an appended column counts as dependent
GREVILLE_DEPENDENT_TOL = 1e-12


def _as_matrix(A, name: str = "A") -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ContractError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ContractError(f"{name} contains NaN or Inf")
    return A


def pinv(A) -> np.ndarray:
    """Moore-Penrose pseudoinverse via thin SVD.

    Singular values below ``eps * max(rows, cols) * sigma_max`` are treated as
    zero. A 1-D input is read as a single column.
    """
    A = _as_matrix(A)
    if A.size == 0:
        raise ContractError("pinv of an empty matrix")
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    cutoff = np.finfo(np.float64).eps * max(A.shape) * s[0]
    keep = s > cutoff
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (Vt.T * s_inv) @ U.T


def lstsq(A, B) -> np.ndarray:
    """Minimum-norm least-squares solution ``X = pinv(A) @ B``."""
    A = _as_matrix(A)
    B = np.asarray(B, dtype=np.float64)
    squeeze = B.ndim == 1
    B = _as_matrix(B, "B")
    if A.shape[0] != B.shape[0]:
        raise ContractError(f"row mismatch: A has {A.shape[0]} rows, B has {B.shape[0]}")
    X = pinv(A) @ B
    return X[:, 0] if squeeze else X


@dataclass(frozen=True)
class GrevilleState:
    """Pseudoinverse ``H_L^+`` (L x N) and output weights (L x m) after L appends."""

    pinv: np.ndarray
    beta: np.ndarray
    node_count: int = 0

    @classmethod
    def empty(cls, n_samples: int, n_outputs: int = 0) -> "GrevilleState":
        return cls(np.zeros((0, n_samples)), np.zeros((0, n_outputs)), 0)

    @property
    def n_samples(self) -> int:
        return self.pinv.shape[1]


def greville_vectors(state: GrevilleState, H_prev, g) -> tuple[np.ndarray, np.ndarray]:
    """Return the Greville update vectors ``(d, b)`` for appending column ``g``.

    ``d = H^+ g`` (with one step of iterative refinement) has length L-1 and
    ``b`` has length N, so that
    ``[H g]^+ = [H^+ - d b^T; b^T]``. Both the independent-column branch
    (``b = c / ||c||^2`` with ``c = g - H d``) and the dependent-column branch
    (``b = (H^+)^T d / (1 + d^T d)``) are handled.
    """
    g = np.asarray(g, dtype=np.float64).ravel()
    n = state.n_samples
    if g.shape[0] != n:
        raise ContractError(f"column has length {g.shape[0]}, expected {n}")
    g_norm = np.linalg.norm(g)
    if g_norm == 0.0:
        raise DegenerateNodeError("cannot append a zero column")

    if state.node_count == 0:
        return np.zeros(0), g / g_norm**2

    H_prev = np.asarray(H_prev, dtype=np.float64)
    if H_prev.shape != (n, state.node_count):
        raise ContractError(
            f"H_prev has shape {H_prev.shape}, state expects {(n, state.node_count)}"
        )
    d = state.pinv @ g
    c = g - H_prev @ d
    # one refinement step: drift in the accumulated H^+ otherwise leaves a
    # spurious c ~ drift * ||g|| that defeats the dependent-column test
    d += state.pinv @ c
    c = g - H_prev @ d
    c_norm = np.linalg.norm(c)
    if c_norm > GREVILLE_DEPENDENT_TOL * g_norm:
        b = c / c_norm**2
    else:
        b = (state.pinv.T @ d) / (1.0 + d @ d)
    return d, b


def greville_update_beta(state: GrevilleState, d, b, f) -> np.ndarray:
    """Output weights after an append: ``[beta_prev - d (b^T f); b^T f]``.

    ``state`` is the state *before* the append.
    """
    d = np.asarray(d, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    f = np.asarray(f, dtype=np.float64)
    if f.ndim == 1:
        f = f[:, None]
    if d.shape[0] != state.node_count:
        raise ContractError(f"d has length {d.shape[0]}, expected {state.node_count}")
    if b.shape[0] != f.shape[0] or b.shape[0] != state.n_samples:
        raise ContractError(
            f"b has length {b.shape[0]}, f has {f.shape[0]} rows, "
            f"state has {state.n_samples} samples"
        )
    if state.beta.shape[1] != f.shape[1] and state.node_count > 0:
        raise ContractError(
            f"f has {f.shape[1]} columns, previous beta has {state.beta.shape[1]}"
        )
    new_row = b @ f
    prev = state.beta.reshape(state.node_count, f.shape[1])
    return np.vstack([prev - np.outer(d, new_row), new_row[None, :]])


def greville_append(state: GrevilleState, H_prev, g, f=None) -> GrevilleState:
    """Append column ``g`` to ``H_prev`` and return the updated state.

    When the target matrix ``f`` is given the output weights are updated too;
    otherwise the returned state tracks zero output columns.
    """
    d, b = greville_vectors(state, H_prev, g)
    new_pinv = np.vstack([state.pinv - np.outer(d, b), b[None, :]])
    if f is None:
        beta = np.zeros((state.node_count + 1, 0))
    else:
        beta = greville_update_beta(state, d, b, f)
    return GrevilleState(new_pinv, beta, state.node_count + 1)
