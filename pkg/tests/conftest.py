import os

import pytest

from qhomology.cyclo import field_new
from qhomology.wznw import build_model


def pytest_collection_modifyitems(config, items):
    if os.environ.get("QHOMOLOGY_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set QHOMOLOGY_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def ctx2():
    return field_new(2)


@pytest.fixture
def ctx3():
    return field_new(3)


@pytest.fixture(scope="session")
def model2():
    return build_model(2)


@pytest.fixture(scope="session")
def model3():
    return build_model(3)


@pytest.fixture(scope="session", params=[4, 5], ids=["h4", "h5"])
def large_model(request):
    return build_model(request.param)
