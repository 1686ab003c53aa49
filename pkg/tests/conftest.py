from pathlib import Path

import pytest

from invoiceval.config import default_config
from invoiceval.normalize import NormalizationPolicy

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def cfg():
    return default_config()


@pytest.fixture
def policy():
    return NormalizationPolicy(default_currency="USD")


@pytest.fixture
def fixtures_dir():
    return FIXTURES
