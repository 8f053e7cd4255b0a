"""Pytest configuration and fixtures."""

from io import StringIO

import numpy as np
import pytest
from loguru import logger

from sreda.core import RunStreams
from sreda.problems import QuadraticSaddle, make_finite_sum_saddle, make_quadratic_saddle


@pytest.fixture
def captured_logs():
    """Fixture to capture loguru logs."""
    log_stream = StringIO()
    handler_id = logger.add(log_stream, format="{message}")
    yield log_stream
    logger.remove(handler_id)


@pytest.fixture
def noisy_saddle() -> QuadraticSaddle:
    """Gaussian-noise quadratic saddle, d1 = d2 = 3, kappa = 4, sigma = 0.5."""
    return make_quadratic_saddle(3, 3, kappa_target=4.0, seed=7, sigma=0.5)


@pytest.fixture
def exact_saddle() -> QuadraticSaddle:
    """Noiseless quadratic saddle, d1 = d2 = 3, kappa = 3."""
    return make_quadratic_saddle(3, 3, kappa_target=3.0, seed=11, sigma=0.0)


@pytest.fixture
def finite_saddle() -> QuadraticSaddle:
    """Finite-sum quadratic saddle with n = 12 components, kappa = 4."""
    return make_finite_sum_saddle(3, 2, 12, kappa_target=4.0, seed=5)


@pytest.fixture
def scalar_saddle() -> QuadraticSaddle:
    """f(x, y) = -1/2 y^2 with d1 = d2 = 1 and no noise."""
    return QuadraticSaddle(np.zeros((1, 1)), np.zeros((1, 1)), np.zeros(1), 1.0)


@pytest.fixture
def streams() -> RunStreams:
    return RunStreams.from_seed(3)


@pytest.fixture
def isolated_app_dir(tmp_path, monkeypatch):
    """Point the app data directory (logs, traces) at a temp dir."""
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "config"))
    monkeypatch.setenv("APPDATA", str(tmp_path / "config"))
    monkeypatch.setenv("SREDA_LOG_FILE", str(tmp_path / "sreda.log"))
    return tmp_path
