import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

FIXTURE = os.path.join(os.path.dirname(__file__), "data", "fixture.tsv")


@pytest.fixture
def fixture_path() -> str:
    return FIXTURE


@pytest.fixture
def tiny_dict():
    from offtweet.spell import FrequencyDictionary

    return FrequencyDictionary({"the": 50, "cat": 20, "on": 30, "mat": 10})
