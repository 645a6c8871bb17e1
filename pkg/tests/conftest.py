"""
Shared pytest configuration for the vnlcm tests.
"""

import logging

import pytest


@pytest.fixture(autouse=True)
def reset_vnlcm_logger():
    """Drop handlers the CLI attaches, so they never outlive a captured stream."""
    yield
    logger = logging.getLogger("vnlcm")
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)
        handler.close()
    logger.setLevel(logging.NOTSET)
