"""Constructive random-weight networks with angle-constrained node pools.

Three trainers are provided: ``irw`` (one random node per step, local output
weight), ``inn`` (best-aligned node from a candidate pool, global least-squares
output weights) and ``inplus`` (same selection, Greville incremental
pseudoinverse).
"""

__version__ = "0.1.0"

from .builder import (
    Candidate,
    GammaSchedule,
    TrainerConfig,
    TrainingTrace,
    candidate_pool,
    gamma,
    local_beta,
    score_candidate,
    select_node,
    train,
)
from .data import Dataset, NormParams, load_csv, normalize, split, synth_function
from .linalg import GrevilleState, greville_append, greville_update_beta, lstsq, pinv
from .metrics import DensityEstimate, accuracy, kde, rmse
from .model import Activation, HiddenNode, NetworkModel, forward, hidden_matrix, node_output, predict

__all__ = [
    "Activation", "Candidate", "Dataset", "DensityEstimate", "GammaSchedule", "GrevilleState",
    "HiddenNode", "NetworkModel", "NormParams", "TrainerConfig", "TrainingTrace", "accuracy",
    "candidate_pool", "forward", "gamma", "greville_append", "greville_update_beta",
    "hidden_matrix", "kde", "load_csv", "local_beta", "lstsq", "node_output", "normalize",
    "pinv", "predict", "rmse", "score_candidate", "select_node", "split", "synth_function",
    "train",
]
