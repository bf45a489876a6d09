import warnings

import pytest


@pytest.fixture(autouse=True)
def _strict_warnings():
    # unexpected warnings inside library code should surface in test output
    with warnings.catch_warnings():
        warnings.simplefilter("default")
        yield
