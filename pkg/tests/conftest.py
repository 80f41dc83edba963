"""Shared fixtures: a session-wide dataset root and the desk-scale corpus."""

import numpy as np
import pytest

from memgan.data import load_training_images


@pytest.fixture(scope="session")
def data_root(tmp_path_factory):
    """Directory holding the synthesized IDX corpus (built once per session)."""
    root = tmp_path_factory.mktemp("corpus")
    load_training_images(root, 1)  # trigger synthesis
    return root


@pytest.fixture(scope="session")
def corpus(data_root) -> np.ndarray:
    """1000 training images, (n, 28, 28, 1) floats in [-1, 1]."""
    return load_training_images(data_root, 1000)
