import numpy as np
import pytest

from carnotcurv.groups import build_group


@pytest.fixture(scope="session")
def models():
    return {spec: build_group(spec)
            for spec in ("goursat:3", "goursat:4", "goursat:5", "goursat:6",
                         "cartan")}


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
