import math

import numpy as np
import pytest

from innet.data import NormParams
from innet.errors import ContractError, ParseError
from innet.model import (
    Activation,
    HiddenNode,
    NetworkModel,
    forward,
    hidden_matrix,
    model_from_dict,
    model_to_dict,
    node_output,
    predict,
)


def random_model(rng, d=3, L=3, m=2, activation="sigmoid", norm=None):
    nodes = [HiddenNode(rng.uniform(-2, 2, d), rng.uniform(-2, 2)) for _ in range(L)]
    return NetworkModel(activation, nodes, rng.standard_normal((L, m)), norm)


def test_zero_sigmoid_node_is_half(rng):
    X = rng.standard_normal((7, 2))
    g = node_output(HiddenNode(np.zeros(2), 0.0), Activation.SIGMOID, X)
    np.testing.assert_array_equal(g, np.full(7, 0.5))


def test_sigmoid_single_sample():
    g = node_output(HiddenNode([1.0], 0.0), "sigmoid", np.array([[1.0]]))
    assert g[0] == pytest.approx(1 / (1 + math.exp(-1)), abs=1e-15)
    assert g[0] == pytest.approx(0.73106, abs=1e-5)


def test_zero_tanh_node_is_zero(rng):
    g = node_output(HiddenNode(np.zeros(3), 0.0), "tanh", rng.standard_normal((4, 3)))
    np.testing.assert_array_equal(g, np.zeros(4))


def test_node_dimension_mismatch(rng):
    with pytest.raises(ContractError):
        node_output(HiddenNode(np.zeros(3), 0.0), "sigmoid", rng.standard_normal((4, 2)))


def test_node_rejects_nonfinite():
    with pytest.raises(ContractError):
        HiddenNode([np.inf], 0.0)


def test_hidden_matrix_columns(rng):
    model = random_model(rng)
    X = rng.standard_normal((11, 3))
    H = hidden_matrix(model, X)
    assert H.shape == (11, 3)
    for j, node in enumerate(model.nodes):
        np.testing.assert_allclose(H[:, j], node_output(node, model.activation, X), atol=1e-15)


def test_hidden_matrix_one_node(rng):
    model = random_model(rng, L=1)
    X = rng.standard_normal((5, 3))
    np.testing.assert_allclose(hidden_matrix(model, X)[:, 0], node_output(model.nodes[0], "sigmoid", X))


def test_hidden_matrix_duplicate_rows(rng):
    model = random_model(rng)
    x = rng.standard_normal((1, 3))
    H = hidden_matrix(model, np.vstack([x, x]))
    np.testing.assert_array_equal(H[0], H[1])


def test_hidden_matrix_empty_model():
    with pytest.raises(ContractError):
        hidden_matrix(NetworkModel("sigmoid", [], np.zeros((0, 1))), np.ones((2, 1)))


def test_beta_shape_checked(rng):
    with pytest.raises(ContractError):
        NetworkModel("sigmoid", [HiddenNode([1.0], 0.0)], np.zeros((2, 1)))


def test_forward_zero_beta(rng):
    model = random_model(rng)
    model.beta[:] = 0
    np.testing.assert_array_equal(forward(model, rng.standard_normal((4, 3))), np.zeros((4, 2)))


def test_forward_single_node_unit_beta(rng):
    node = HiddenNode([0.5, -1.0], 0.2)
    model = NetworkModel("tanh", [node], np.ones((1, 1)))
    X = rng.standard_normal((6, 2))
    np.testing.assert_array_equal(forward(model, X)[:, 0], node_output(node, "tanh", X))


def test_forward_is_h_beta_and_deterministic(rng):
    model = random_model(rng)
    X = rng.standard_normal((9, 3))
    out = forward(model, X)
    np.testing.assert_array_equal(out, hidden_matrix(model, X) @ model.beta)
    np.testing.assert_array_equal(out, forward(model, X))


def test_forward_denormalizes(rng):
    norm = NormParams(np.zeros(3), np.ones(3), np.array([10.0, -1.0]), np.array([20.0, 1.0]))
    model = random_model(rng, norm=norm)
    X = rng.uniform(size=(5, 3))
    raw = hidden_matrix(model, X) @ model.beta
    np.testing.assert_allclose(forward(model, X), raw * [10.0, 2.0] + [10.0, -1.0])


def test_predict_scales_inputs(rng):
    norm = NormParams(np.full(3, -2.0), np.full(3, 2.0), np.zeros(2), np.ones(2))
    model = random_model(rng, norm=norm)
    X_raw = rng.uniform(-2, 2, size=(5, 3))
    np.testing.assert_allclose(predict(model, X_raw), forward(model, (X_raw + 2) / 4))


def test_sigmoid_norm_bounds(rng):
    # 0 < ||g|| <= sqrt(N) for every sigmoid column
    X = rng.uniform(size=(300, 4))
    for _ in range(200):
        node = HiddenNode(rng.uniform(-200, 200, 4), rng.uniform(-200, 200))
        g = node_output(node, "sigmoid", X)
        assert 0 < np.linalg.norm(g) <= math.sqrt(300)


def test_dict_round_trip(rng):
    norm = NormParams(np.zeros(3), np.ones(3), np.zeros(2), np.full(2, 5.0))
    model = random_model(rng, activation="tanh", norm=norm)
    back = model_from_dict(model_to_dict(model))
    X = rng.standard_normal((4, 3))
    np.testing.assert_array_equal(forward(back, X), forward(model, X))
    assert back.activation is Activation.TANH


def test_dict_malformed():
    with pytest.raises(ParseError):
        model_from_dict({"nodes": []})
