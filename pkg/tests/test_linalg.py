import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from innet.errors import ContractError, DegenerateNodeError
from innet.linalg import (
    GrevilleState,
    greville_append,
    greville_update_beta,
    greville_vectors,
    lstsq,
    pinv,
)

from conftest import moore_penrose_residuals, random_rank_matrix


def rank_factor_pinv(B, C):
    """Independent pseudoinverse: A = B C with B full column rank, C full row rank."""
    B_pinv = np.linalg.solve(B.T @ B, B.T)
    C_pinv = C.T @ np.linalg.inv(C @ C.T)
    return C_pinv @ B_pinv


def sigmoid_columns(rng, n, L, d=10, scale=3.0):
    # d=10, scale 3 keeps cond(H) around 1e3: Greville error grows like cond^2 * eps
    X = rng.uniform(size=(n, d))
    W = rng.uniform(-scale, scale, size=(d, L))
    b = rng.uniform(-scale, scale, size=L)
    return 1.0 / (1.0 + np.exp(-(X @ W + b)))


def build_greville(H, f=None):
    state = GrevilleState.empty(H.shape[0], 0 if f is None else f.shape[1])
    for j in range(H.shape[1]):
        state = greville_append(state, H[:, :j], H[:, j], f)
    return state


class TestPinv:
    def test_identity(self):
        np.testing.assert_array_equal(pinv(np.eye(2)), np.eye(2))

    def test_column(self):
        np.testing.assert_allclose(pinv(np.array([[3.0], [4.0]])), [[3 / 25, 4 / 25]], atol=1e-15)

    def test_rank_deficient_against_rank_factorization(self, rng):
        A, B, C = random_rank_matrix(rng, 7, 4, 3)
        np.testing.assert_allclose(pinv(A), rank_factor_pinv(B, C), atol=1e-8)

    def test_zero_matrix(self):
        np.testing.assert_array_equal(pinv(np.zeros((3, 2))), np.zeros((2, 3)))

    def test_rejects_nonfinite(self):
        with pytest.raises(ContractError):
            pinv(np.array([[1.0, np.nan]]))

    def test_rejects_empty(self):
        with pytest.raises(ContractError):
            pinv(np.zeros((0, 3)))

    @settings(max_examples=60, deadline=None)
    @given(
        rows=st.integers(1, 40),
        cols=st.integers(1, 25),
        deficit=st.integers(0, 5),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_moore_penrose_conditions(self, rows, cols, deficit, seed):
        rng = np.random.default_rng(seed)
        rank = max(1, min(rows, cols) - deficit)
        A, _, _ = random_rank_matrix(rng, rows, cols, rank)
        tol = 1e-8 * np.linalg.norm(A)
        assert max(moore_penrose_residuals(A, pinv(A))) <= tol


class TestLstsq:
    def test_identity(self, rng):
        B = rng.standard_normal((3, 2))
        np.testing.assert_allclose(lstsq(np.eye(3), B), B, atol=1e-15)

    def test_consistent_system(self, rng):
        A = rng.standard_normal((12, 4))
        X0 = rng.standard_normal((4, 3))
        np.testing.assert_allclose(lstsq(A, A @ X0), X0, atol=1e-8)

    def test_normal_equations(self, rng):
        A = rng.standard_normal((20, 5))
        B = rng.standard_normal((20, 2))
        X = lstsq(A, B)
        assert np.abs(A.T @ (A @ X - B)).max() < 1e-8
        np.testing.assert_allclose(X, np.linalg.solve(A.T @ A, A.T @ B), atol=1e-10)

    def test_vector_rhs(self, rng):
        A = rng.standard_normal((6, 2))
        y = rng.standard_normal(6)
        assert lstsq(A, y).shape == (2,)

    def test_shape_mismatch(self):
        with pytest.raises(ContractError):
            lstsq(np.eye(3), np.ones((4, 1)))


class TestGreville:
    def test_first_column(self, rng):
        g = rng.standard_normal(9)
        state = greville_append(GrevilleState.empty(9), np.zeros((9, 0)), g)
        assert state.node_count == 1
        np.testing.assert_allclose(state.pinv, g[None, :] / (g @ g), atol=1e-15)

    def test_matches_svd_pinv(self, rng):
        H = sigmoid_columns(rng, 200, 30)
        state = build_greville(H)
        np.testing.assert_allclose(state.pinv, pinv(H), atol=1e-6)
        assert state.pinv.shape == (30, 200)

    def test_dependent_column_branch(self, rng):
        H = sigmoid_columns(rng, 50, 6)
        state = build_greville(H)
        g = H[:, 0].copy()
        d, b = greville_vectors(state, H, g)
        # dependent branch: b = (H^+)^T d / (1 + d^T d)
        np.testing.assert_allclose(b, state.pinv.T @ d / (1 + d @ d), atol=1e-12)
        new = greville_append(state, H, g)
        H2 = np.column_stack([H, g])
        assert max(moore_penrose_residuals(H2, new.pinv)) < 1e-6
        np.testing.assert_allclose(new.pinv, pinv(H2), atol=1e-6)

    def test_dependent_column_after_long_accumulation(self, rng):
        # drift accumulated over many appends must not hide a dependent column
        H = sigmoid_columns(rng, 1000, 120)
        state = build_greville(H)
        d, b = greville_vectors(state, H, H[:, 3])
        np.testing.assert_allclose(d, np.eye(120)[3], atol=1e-9)
        new = greville_append(state, H, H[:, 3])
        np.testing.assert_allclose(new.pinv, pinv(np.column_stack([H, H[:, 3]])), atol=1e-6)

    def test_zero_column_rejected(self):
        with pytest.raises(DegenerateNodeError):
            greville_append(GrevilleState.empty(4), np.zeros((4, 0)), np.zeros(4))

    def test_length_mismatch(self, rng):
        with pytest.raises(ContractError):
            greville_append(GrevilleState.empty(4), np.zeros((4, 0)), np.ones(5))

    def test_h_prev_inconsistent(self, rng):
        H = sigmoid_columns(rng, 10, 2)
        state = build_greville(H)
        with pytest.raises(ContractError):
            greville_append(state, H[:, :1], np.ones(10))


class TestGrevilleBeta:
    def test_first_node_is_local_beta(self, rng):
        g = rng.uniform(size=15)
        f = rng.standard_normal((15, 2))
        state = GrevilleState.empty(15, 2)
        beta = greville_update_beta(state, np.zeros(0), g / (g @ g), f)
        np.testing.assert_allclose(beta, (f.T @ g / (g @ g))[None, :], atol=1e-14)

    def test_matches_lstsq_every_step(self, rng):
        H = sigmoid_columns(rng, 120, 20)
        f = rng.standard_normal((120, 3))
        state = GrevilleState.empty(120, 3)
        for j in range(H.shape[1]):
            state = greville_append(state, H[:, :j], H[:, j], f)
            np.testing.assert_allclose(state.beta, lstsq(H[:, :j + 1], f), atol=1e-6)

    def test_zero_target(self, rng):
        H = sigmoid_columns(rng, 30, 5)
        state = build_greville(H, np.zeros((30, 1)))
        np.testing.assert_array_equal(state.beta, np.zeros((5, 1)))

    def test_residual_never_grows(self, rng):
        H = sigmoid_columns(rng, 80, 15)
        f = rng.standard_normal((80, 1))
        state = GrevilleState.empty(80, 1)
        prev = np.linalg.norm(f)
        for j in range(H.shape[1]):
            state = greville_append(state, H[:, :j], H[:, j], f)
            res = np.linalg.norm(H[:, :j + 1] @ state.beta - f)
            assert res <= prev + 1e-10
            prev = res

    def test_shape_errors(self, rng):
        state = GrevilleState.empty(10, 1)
        with pytest.raises(ContractError):
            greville_update_beta(state, np.zeros(1), np.ones(10), np.ones((10, 1)))
        with pytest.raises(ContractError):
            greville_update_beta(state, np.zeros(0), np.ones(9), np.ones((10, 1)))
