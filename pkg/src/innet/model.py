"""Single-hidden-layer random-weight network: nodes, hidden matrix, prediction."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy.special import expit

from .data import NormParams
from .errors import ContractError, ParseError


class Activation(str, Enum):
    SIGMOID = "sigmoid"
    TANH = "tanh"

    def __call__(self, z: np.ndarray, out: Optional[np.ndarray] = None) -> np.ndarray:
        if self is Activation.SIGMOID:
            return expit(z, out=out)
        return np.tanh(z, out=out)


@dataclass(frozen=True)
class HiddenNode:
    weights: np.ndarray
    bias: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if not (np.all(np.isfinite(w)) and np.isfinite(self.bias)):
            raise ContractError("hidden node parameters must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def input_dim(self) -> int:
        return self.weights.shape[0]


@dataclass
class NetworkModel:
    """Trained network. ``beta`` is ``L x m``; ``norm`` maps outputs back to data units."""

    activation: Activation
    nodes: list[HiddenNode]
    beta: np.ndarray
    norm: Optional[NormParams] = None
    task: str = "regression"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.activation = Activation(self.activation)
        self.beta = np.asarray(self.beta, dtype=np.float64)
        if self.beta.ndim != 2 or self.beta.shape[0] != len(self.nodes):
            raise ContractError(
                f"beta shape {self.beta.shape} does not match {len(self.nodes)} nodes"
            )

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_outputs(self) -> int:
        return self.beta.shape[1]

    @property
    def input_dim(self) -> Optional[int]:
        return self.nodes[0].input_dim if self.nodes else None

    def weight_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """Stacked input weights (d x L) and biases (L,)."""
        W = np.column_stack([n.weights for n in self.nodes])
        b = np.array([n.bias for n in self.nodes])
        return W, b


def node_output(node: HiddenNode, activation: Activation, X) -> np.ndarray:
    """Column ``g = activation(X @ w + b)`` of the hidden matrix."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != node.input_dim:
        raise ContractError(
            f"X has shape {X.shape}, node expects {node.input_dim} input features"
        )
    return Activation(activation)(X @ node.weights + node.bias)


def hidden_matrix(model: NetworkModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if not model.nodes:
        raise ContractError("model has no hidden nodes")
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise ContractError(
            f"X has {X.shape[-1] if X.ndim else 0} features, model expects {model.input_dim}"
        )
    W, b = model.weight_matrix()
    return model.activation(X @ W + b)


def forward(model: NetworkModel, X) -> np.ndarray:
    """``H @ beta`` followed by output de-normalization when ``model.norm`` is set.

    ``X`` must already be in the model's (normalized) input space; use
    :func:`predict` for raw inputs.
    """
    out = hidden_matrix(model, X) @ model.beta
    if model.norm is not None:
        out = model.norm.denormalize_targets(out)
    return out


def predict(model: NetworkModel, X_raw) -> np.ndarray:
    """Prediction in data units: scale inputs, run :func:`forward`."""
    X = np.asarray(X_raw, dtype=np.float64)
    if model.norm is not None:
        X = model.norm.normalize_inputs(X)
    return forward(model, X)


def model_to_dict(model: NetworkModel) -> dict:
    return {
        "activation": model.activation.value,
        "task": model.task,
        "nodes": [{"weights": n.weights.tolist(), "bias": n.bias} for n in model.nodes],
        "beta": model.beta.tolist(),
        "n_outputs": model.n_outputs,
        "norm": None if model.norm is None else model.norm.to_dict(),
        "meta": model.meta,
    }


def model_from_dict(d: dict) -> NetworkModel:
    try:
        nodes = [HiddenNode(np.asarray(n["weights"], dtype=np.float64), n["bias"]) for n in d["nodes"]]
        beta = np.asarray(d["beta"], dtype=np.float64).reshape(len(nodes), int(d["n_outputs"]))
        norm = None if d.get("norm") is None else NormParams.from_dict(d["norm"])
        return NetworkModel(d["activation"], nodes, beta, norm, d.get("task", "regression"),
                            d.get("meta", {}))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ContractError):
            raise
        raise ParseError(f"malformed model document: {exc}") from exc
