"""
Configuration file for pytest.
"""
import os
import sys

import pytest

# Add the parent directory to sys.path to allow importing from the project
parent_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if parent_dir not in sys.path:
    sys.path.insert(0, parent_dir)

from gradord.core.random_orders import DeterministicRandom

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


@pytest.fixture
def data_dir():
    """Directory holding the input documents and golden reports."""
    return DATA_DIR


@pytest.fixture
def rng():
    """A fresh generator with a fixed seed for each test."""
    return DeterministicRandom("gradord-tests")
