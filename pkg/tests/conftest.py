from pathlib import Path

import pytest

from wsmatch.lexicon import load_lexicon
from wsmatch.textsim import SimilarityCalculator
from wsmatch.wsdl import parse_wsdl_location


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::", 1)[-1]
        print(f"ACCEPTANCE {name}: {report.outcome.upper()}", flush=True)

FIXTURES = Path(__file__).parent / "fixtures"
WSDL_DIR = FIXTURES / "wsdl"


@pytest.fixture(scope="session")
def fixture_lexicon():
    return load_lexicon(FIXTURES / "lexicon.txt")


@pytest.fixture
def calc(fixture_lexicon):
    return SimilarityCalculator(fixture_lexicon)


@pytest.fixture
def bare_calc():
    """Calculator without a lexicon: every word compares via Jaro-Winkler."""
    return SimilarityCalculator(None)


def _service(name):
    return parse_wsdl_location(str(WSDL_DIR / name))


@pytest.fixture(scope="session")
def weather_a():
    return _service("weather-a.wsdl")


@pytest.fixture(scope="session")
def weather_b():
    return _service("weather-b.wsdl")


@pytest.fixture(scope="session")
def relations_a():
    return _service("relations-a.wsdl")


@pytest.fixture(scope="session")
def relations_b():
    return _service("relations-b.wsdl")


@pytest.fixture(scope="session")
def unrelated():
    return _service("unrelated.wsdl")
