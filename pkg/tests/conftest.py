"""
Pytest configuration file for the tests.
"""

import pytest


def pytest_addoption(parser):
    """
    Add the --run-slow option to pytest.
    """
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="run slow tests (long time grids and optimizer runs)",
    )


def pytest_configure(config):
    """
    Register the slow marker.
    """
    config.addinivalue_line("markers", "slow: mark test as slow to run")


def pytest_collection_modifyitems(config, items):
    """
    Skip slow tests if the --run-slow flag is not given.
    """
    if not config.getoption("--run-slow"):
        skip_slow = pytest.mark.skip(reason="need --run-slow option to run")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_slow)
