import os

import pytest

# quick hypothesis runs by default; set QDEF_OSC_THOROUGH=1 for more examples
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("thorough", max_examples=1000, deadline=None)
settings.load_profile("thorough" if os.environ.get("QDEF_OSC_THOROUGH") == "1" else "default")


@pytest.fixture
def report(capsys):
    """Print straight to the terminal even under output capture."""

    def emit(line):
        with capsys.disabled():
            print(line)

    return emit
