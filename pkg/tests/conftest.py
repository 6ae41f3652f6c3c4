import logging

import numpy as np
import pytest

from src.components.distributions import (
    Dataset,
    make_line_distribution,
    make_two_circles_distribution,
    make_two_segments_distribution,
)


@pytest.fixture(scope="session")
def line():
    return make_line_distribution()


@pytest.fixture(scope="session")
def circles():
    return make_two_circles_distribution()


@pytest.fixture(scope="session")
def segments():
    return make_two_segments_distribution()


@pytest.fixture
def two_points():
    """S = {0 (+1), 1 (-1)} in one dimension."""
    return Dataset.from_arrays(np.array([[0.0], [1.0]]), np.array([1, -1]), seed=0,
                               tiebreak_keys=np.array([0.25, 0.75]))


@pytest.fixture(autouse=True)
def _restore_log_propagation():
    # the CLI detaches the package logger from the root; caplog listens on the root
    yield
    logging.getLogger("src").propagate = True
