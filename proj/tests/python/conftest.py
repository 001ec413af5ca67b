import os
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def data_dir():
    return Path(os.environ.get("CFRBC_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("CFRBC_CLI")
    if not path:
        pytest.skip("CFRBC_CLI not set")
    return path
