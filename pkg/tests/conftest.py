import numpy as np
import pytest

_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance.items():
        terminalreporter.write_line(f"{'PASS' if outcome == 'PASSED' else 'FAIL'}  {name}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_rank_matrix(rng, rows, cols, rank):
    """rows x cols matrix of the given rank, plus its rank factors."""
    B = rng.standard_normal((rows, rank))
    C = rng.standard_normal((rank, cols))
    return B @ C, B, C


def moore_penrose_residuals(A, P):
    """Max abs residual of each of the four Moore-Penrose conditions."""
    AP = A @ P
    PA = P @ A
    return (
        np.abs(AP @ A - A).max(),
        np.abs(PA @ P - P).max(),
        np.abs(AP.T - AP).max(),
        np.abs(PA.T - PA).max(),
    )
