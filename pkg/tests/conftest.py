import json
import os

import hypothesis
import pytest

hypothesis.settings.register_profile(
    "default",
    deadline=None,
    derandomize=True,
    max_examples=200,
)
hypothesis.settings.load_profile("default")

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def golden():
    """Frozen arbitrary-precision oracle values (see scripts/gen_golden.py)."""
    with open(os.path.join(DATA_DIR, "golden_bounds.json"), encoding="utf-8") as fh:
        return json.load(fh)
