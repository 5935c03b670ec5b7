import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from phodge.frames import CoefficientFrame
from phodge import io as pio


@pytest.fixture(scope="session")
def frame():
    return CoefficientFrame(p=5)


@pytest.fixture(scope="session")
def corpus():
    def load(name, site=None):
        return pio.load_object(pio.resolve(name), site=site)

    return load


@pytest.fixture(scope="session")
def point_datum(corpus):
    return corpus("point.datum")


@pytest.fixture(scope="session")
def p1_datum(corpus):
    return corpus("p1.datum")


@pytest.fixture(scope="session")
def gm_datum(corpus):
    return corpus("gm.datum")


@pytest.fixture(scope="session")
def elliptic_datum(corpus):
    return corpus("elliptic.datum")
