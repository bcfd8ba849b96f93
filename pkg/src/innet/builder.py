"""Constructive trainers: IRW baseline, INN and IN+.

All three grow the hidden layer one node at a time. INN and IN+ draw a pool of
random candidates per step, keep the one best aligned with the current
residual, and gate it with the angle constraint
``max cos^2(theta) >= gamma_L * ||e_{L-1}||^2``. INN re-solves every output
weight by least squares after each append; IN+ reaches the same weights through
Greville's column-append recursion. IRW draws a single node per step and only
fits that node's own output weight.
"""
from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .data import Dataset, NormParams
from .errors import ContractError, DegenerateNodeError, EmptyPoolError
from .linalg import GrevilleState, greville_append, lstsq
from .metrics import rmse
from .model import Activation, HiddenNode, NetworkModel, hidden_matrix

log = logging.getLogger(__name__)

ALGORITHMS = ("irw", "inn", "inplus")

#: a node output g is degenerate when ||g|| < DEGENERATE_TOL * sqrt(N)
DEGENERATE_TOL = 1e-12

# cap on N * candidates evaluated at once
_CHUNK_ENTRIES = 4_000_000


def matlab_range(start: float, step: float, stop: float) -> tuple[float, ...]:
    """``start:step:stop`` with the end point included when it lies on the grid."""
    if step <= 0:
        raise ContractError("range step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    if n < 1:
        raise ContractError(f"empty range {start}:{step}:{stop}")
    return tuple(float(round(start + i * step, 12)) for i in range(n))


# Preset settings per benchmark: IRW scope, INN scope range, pool size, tolerance, max nodes.
PRESETS = {
    "DB1": dict(scope_fixed=15.0, zeta=(1, 1, 200), pool_size=10, tol=0.05, max_nodes=30),
    "DB2": dict(scope_fixed=1.5, zeta=(5, 1, 50), pool_size=5, tol=0.05, max_nodes=50),
    "DB3": dict(scope_fixed=2.0, zeta=(1, 0.1, 3), pool_size=1, tol=0.05, max_nodes=800),
    "DB4": dict(scope_fixed=3.0, zeta=(1, 1, 5), pool_size=30, tol=0.05, max_nodes=30),
    "DB5": dict(scope_fixed=50.0, zeta=(1, 5, 200), pool_size=15, tol=0.05, max_nodes=10),
    "DB6": dict(scope_fixed=0.5, zeta=(1.5, 0.1, 7), pool_size=5, tol=0.05, max_nodes=200),
    "DB7": dict(scope_fixed=2.0, zeta=(100, 10, 200), pool_size=16, tol=0.05, max_nodes=100),
}


@dataclass(frozen=True)
class TrainerConfig:
    algorithm: str = "inn"
    scope_list: tuple[float, ...] = (1.0,)
    scope_fixed: float = 1.0
    pool_size: int = 10
    r: float = 0.9
    tol: float = 0.05
    max_nodes: int = 30
    seed: int = 0
    max_retries: int = 5
    activation: str = "sigmoid"
    eps_floor: float = 1e-24

    def __post_init__(self):
        object.__setattr__(self, "scope_list", tuple(float(z) for z in self.scope_list))
        object.__setattr__(self, "activation", Activation(self.activation).value)
        if self.algorithm not in ALGORITHMS:
            raise ContractError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.pool_size < 1 or self.max_nodes < 1 or self.max_retries < 0:
            raise ContractError("pool_size and max_nodes must be >= 1, max_retries >= 0")
        if not self.tol > 0:
            raise ContractError("tol must be positive")
        if not 0 < self.r < 1:
            raise ContractError("r must lie in (0, 1)")
        if not self.scope_list or min(self.scope_list) <= 0:
            raise ContractError("scope_list must be non-empty with positive entries")
        if not self.scope_fixed > 0:
            raise ContractError("scope_fixed must be positive")

    @classmethod
    def from_table(cls, name: str, algorithm: str = "inn", **overrides) -> "TrainerConfig":
        row = dict(PRESETS[name])
        row["scope_list"] = matlab_range(*row.pop("zeta"))
        if algorithm == "irw":
            row["pool_size"] = 1
        row.update(overrides)
        return cls(algorithm=algorithm, **row)


@dataclass(frozen=True)
class GammaSchedule:
    r: float = 0.9
    eps_floor: float = 1e-24


def gamma(schedule: GammaSchedule, E, L: int) -> float:
    """``gamma_L = (1 - r - mu_L) / max(||E||^2, eps_floor)`` with ``mu_L = (1 - r)/(L + 1)``.

    ``gamma_L * ||E||^2 < 1``, so a candidate collinear with the residual always
    satisfies the constraint.
    """
    if L < 1:
        raise ContractError("L must be >= 1")
    E = np.asarray(E, dtype=np.float64)
    mu = (1.0 - schedule.r) / (L + 1)
    return (1.0 - schedule.r - mu) / max(float(np.sum(E * E)), schedule.eps_floor)


def _as_residual(E) -> np.ndarray:
    E = np.asarray(E, dtype=np.float64)
    return E[:, None] if E.ndim == 1 else E


def _check_node_vector(g: np.ndarray) -> float:
    g_norm2 = float(g @ g)
    if not g_norm2 > (DEGENERATE_TOL**2) * g.shape[0]:
        raise DegenerateNodeError(f"node output norm {math.sqrt(g_norm2):.3g} is degenerate")
    return g_norm2


def score_candidate(g, E) -> tuple[float, float]:
    """Residual reduction ``sum_q <E_q, g>^2 / ||g||^2`` and its share ``cos2`` of ``||E||_F^2``."""
    g = np.asarray(g, dtype=np.float64).ravel()
    E = _as_residual(E)
    if E.shape[0] != g.shape[0]:
        raise ContractError(f"g has length {g.shape[0]}, residual has {E.shape[0]} rows")
    g_norm2 = _check_node_vector(g)
    proj = E.T @ g
    score = float(proj @ proj) / g_norm2
    e_norm2 = float(np.sum(E * E))
    cos2 = score / e_norm2 if e_norm2 > 0 else 0.0
    return score, cos2


def local_beta(g, E) -> np.ndarray:
    """Single-node output weights ``<E_q, g> / ||g||^2`` (length m)."""
    g = np.asarray(g, dtype=np.float64).ravel()
    E = _as_residual(E)
    if E.shape[0] != g.shape[0]:
        raise ContractError(f"g has length {g.shape[0]}, residual has {E.shape[0]} rows")
    g_norm2 = _check_node_vector(g)
    return (E.T @ g) / g_norm2


@dataclass(frozen=True)
class Candidate:
    node: HiddenNode
    g: np.ndarray
    score: float
    cos2: float


def _substream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF, spawn_key=key)
    return np.random.default_rng(ss)


def _draw_scope_block(seed, node_index, attempt, scope_index, scope, count, d):
    """Weights (d x count) and biases (count,) uniform on [-scope, scope].

    The block comes from its own substream keyed by (node, attempt, scope
    index); candidate i is column i, so every candidate is a fixed function of
    its index regardless of evaluation order.
    """
    rng = _substream(seed, node_index, attempt, scope_index)
    draws = rng.uniform(-scope, scope, size=(count, d + 1))
    return draws[:, :d].T, draws[:, d]


@dataclass
class _PoolBest:
    score: float = -1.0
    weights: Optional[np.ndarray] = None
    bias: float = 0.0
    g: Optional[np.ndarray] = None
    valid: int = 0


def _scan_pool(X, activation, E, seed, node_index, attempt, scope_list, pool_size) -> _PoolBest:
    """Draw and score one pool, keeping only the first candidate with maximal score."""
    N, d = X.shape
    best = _PoolBest()
    per_chunk = max(1, _CHUNK_ENTRIES // max(N * pool_size, 1))
    threshold = (DEGENERATE_TOL**2) * N
    for start in range(0, len(scope_list), per_chunk):
        scopes = range(start, min(start + per_chunk, len(scope_list)))
        blocks = [
            _draw_scope_block(seed, node_index, attempt, s, scope_list[s], pool_size, d)
            for s in scopes
        ]
        W = np.hstack([w for w, _ in blocks])
        b = np.concatenate([bb for _, bb in blocks])
        G = X @ W
        G += b
        activation(G, out=G)
        g_norm2 = np.einsum("ij,ij->j", G, G)
        proj = E.T @ G
        ok = g_norm2 > threshold
        scores = np.full(G.shape[1], -np.inf)
        scores[ok] = np.einsum("ij,ij->j", proj[:, ok], proj[:, ok]) / g_norm2[ok]
        best.valid += int(ok.sum())
        if not ok.any():
            continue
        k = int(np.argmax(scores))
        if scores[k] > best.score:
            best.score = float(scores[k])
            best.weights = W[:, k].copy()
            best.bias = float(b[k])
            best.g = G[:, k].copy()
    return best


def candidate_pool(
    seed: int,
    scope_list: Sequence[float],
    pool_size: int,
    X,
    activation,
    E,
    node_index: int = 1,
    attempt: int = 0,
) -> list[Candidate]:
    """All non-degenerate candidates for one step, ordered by (scope, draw) index.

    ``pool_size`` nodes are drawn at every scope in ``scope_list``.
    """
    if pool_size < 1:
        raise ContractError("pool_size must be >= 1")
    X = np.asarray(X, dtype=np.float64)
    E = _as_residual(E)
    act = Activation(activation)
    N, d = X.shape
    e_norm2 = float(np.sum(E * E))
    pool = []
    for s, scope in enumerate(scope_list):
        W, b = _draw_scope_block(seed, node_index, attempt, s, float(scope), pool_size, d)
        G = act(X @ W + b)
        for k in range(pool_size):
            g = G[:, k]
            g_norm2 = float(g @ g)
            if not g_norm2 > (DEGENERATE_TOL**2) * N:
                continue
            proj = E.T @ g
            score = float(proj @ proj) / g_norm2
            pool.append(
                Candidate(HiddenNode(W[:, k], b[k]), g, score, score / e_norm2 if e_norm2 > 0 else 0.0)
            )
    if not pool:
        raise EmptyPoolError("every candidate in the pool was degenerate")
    return pool


def select_node(pool: Sequence[Candidate], E, gamma_L: float) -> tuple[Candidate, bool]:
    """Candidate with the largest ``cos2`` (lowest index on ties) and whether it meets the constraint."""
    if not pool:
        raise ContractError("cannot select from an empty pool")
    best = 0
    for i in range(1, len(pool)):
        if pool[i].cos2 > pool[best].cos2:
            best = i
    E = _as_residual(E)
    cand = pool[best]
    return cand, bool(cand.cos2 >= gamma_L * float(np.sum(E * E)))


@dataclass(frozen=True)
class NodeRecord:
    node_index: int
    residual_rmse: float
    selected_score: float
    cos2: float
    gamma: float
    constraint_satisfied: bool
    fallback_used: bool
    elapsed_seconds: float


TRACE_COLUMNS = ("node_index", "rmse", "score", "cos2", "gamma", "constraint_satisfied", "fallback_used")


@dataclass
class TrainingTrace:
    records: list[NodeRecord] = field(default_factory=list)
    initial_rmse: float = float("nan")
    train_rmse: float = float("nan")
    test_rmse: Optional[float] = None
    wall_time: float = 0.0

    def rmse_curve(self) -> np.ndarray:
        """Training RMSE after 0, 1, ..., L nodes."""
        return np.array([self.initial_rmse] + [r.residual_rmse for r in self.records])

    def rows(self) -> list[tuple]:
        return [
            (r.node_index, repr(r.residual_rmse), repr(r.selected_score), repr(r.cos2),
             repr(r.gamma), int(r.constraint_satisfied), int(r.fallback_used))
            for r in self.records
        ]

    def write_csv(self, path) -> None:
        """Deterministic columns only; per-node timings go to :meth:`write_timing_csv`."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRACE_COLUMNS)
            w.writerows(self.rows())

    def write_timing_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("node_index", "seconds"))
            w.writerows((r.node_index, repr(r.elapsed_seconds)) for r in self.records)


def _frob2(E: np.ndarray) -> float:
    return float(np.sum(E * E))


def _select_with_retries(config, X, act, E, node_index, gamma_L):
    """Pool search with fresh pools on constraint failure; falls back to the best seen."""
    e_norm2 = _frob2(E)
    overall = _PoolBest()
    valid = 0
    for attempt in range(config.max_retries + 1):
        best = _scan_pool(X, act, E, config.seed, node_index, attempt,
                          config.scope_list, config.pool_size)
        valid += best.valid
        if best.g is not None and best.score > overall.score:
            overall = best
        if overall.g is not None:
            cos2 = overall.score / e_norm2 if e_norm2 > 0 else 0.0
            if cos2 >= gamma_L * e_norm2:
                return overall, cos2, True, False
    if overall.g is None:
        raise EmptyPoolError(f"node {node_index}: all {config.max_retries + 1} pools degenerate")
    cos2 = overall.score / e_norm2 if e_norm2 > 0 else 0.0
    return overall, cos2, False, True


def _irw_draw(config, X, act, E, node_index):
    N, d = X.shape
    for attempt in range(config.max_retries + 1):
        W, b = _draw_scope_block(config.seed, node_index, attempt, 0, config.scope_fixed, 1, d)
        g = act(X @ W[:, 0] + b[0])
        if float(g @ g) > (DEGENERATE_TOL**2) * N:
            best = _PoolBest(0.0, W[:, 0].copy(), float(b[0]), g, 1)
            best.score, cos2 = score_candidate(g, E)
            return best, cos2
    raise EmptyPoolError(f"node {node_index}: {config.max_retries + 1} degenerate draws")


def train(
    config: TrainerConfig,
    train_set: Dataset,
    test_set: Optional[Dataset] = None,
    norm: Optional[NormParams] = None,
) -> tuple[NetworkModel, TrainingTrace]:
    """Grow a network on an already-normalized ``train_set``.

    Stops once the training RMSE reaches ``config.tol`` or after
    ``config.max_nodes`` nodes. ``norm`` is attached to the returned model so
    it can map predictions back to data units.
    """
    if len(train_set) == 0:
        raise ContractError("empty training set")
    X, F = train_set.X, train_set.Y
    N, d = X.shape
    m = F.shape[1]
    act = Activation(config.activation)
    schedule = GammaSchedule(config.r, config.eps_floor)

    H = np.empty((N, config.max_nodes))
    nodes: list[HiddenNode] = []
    beta = np.zeros((0, m))
    E = F.copy()
    state = GrevilleState.empty(N, m)
    trace = TrainingTrace()
    trace.initial_rmse = math.sqrt(_frob2(E) / (N * m))
    current = trace.initial_rmse

    t_start = time.perf_counter()
    for L in range(1, config.max_nodes + 1):
        if current <= config.tol:
            break
        t_node = time.perf_counter()
        if config.algorithm == "irw":
            best, cos2 = _irw_draw(config, X, act, E, L)
            gam, satisfied, fallback = float("nan"), True, False
        else:
            gam = gamma(schedule, E, L)
            best, cos2, satisfied, fallback = _select_with_retries(config, X, act, E, L, gam)

        g = best.g
        H[:, L - 1] = g
        nodes.append(HiddenNode(best.weights, best.bias))
        if config.algorithm == "irw":
            bl = local_beta(g, E)
            beta = np.vstack([beta, bl[None, :]])
            E = E - np.outer(g, bl)
        elif config.algorithm == "inn":
            beta = lstsq(H[:, :L], F)
            E = F - H[:, :L] @ beta
        else:
            state = greville_append(state, H[:, :L - 1], g, F)
            beta = state.beta
            E = F - H[:, :L] @ beta

        current = math.sqrt(_frob2(E) / (N * m))
        trace.records.append(NodeRecord(
            L, current, best.score, cos2, gam, satisfied, fallback, time.perf_counter() - t_node,
        ))
        log.debug("node %d rmse=%.6g cos2=%.4g fallback=%s", L, current, cos2, fallback)

    trace.wall_time = time.perf_counter() - t_start
    trace.train_rmse = current
    model = NetworkModel(
        act, nodes, beta, norm, train_set.task,
        meta={"algorithm": config.algorithm, "config": asdict(config)},
    )
    if test_set is not None and len(test_set) and nodes:
        trace.test_rmse = rmse(hidden_matrix(model, test_set.X) @ beta, test_set.Y)
    elif test_set is not None and len(test_set):
        trace.test_rmse = rmse(np.zeros_like(test_set.Y), test_set.Y)
    return model, trace
