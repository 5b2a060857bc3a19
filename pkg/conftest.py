"""
Shared pytest fixtures for the cornerflm test scripts
"""

import os
import sys

import pytest

sys.path.append(os.path.dirname(__file__))

from cornerflm.config import settings  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="Run golden enumerations at the full cutoffs.")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: golden run at a full cutoff, skipped without --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    """Point the enumeration cache at a throwaway directory."""
    directory = tmp_path / "cache"
    monkeypatch.setattr(settings, "cache_dir", str(directory))
    monkeypatch.setattr(settings, "use_cache", True)
    return directory


@pytest.fixture
def single_thread(monkeypatch):
    monkeypatch.setattr(settings, "threads", 1)
