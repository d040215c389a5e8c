import numpy as np
import pytest

import dimlab as dl
from dimlab.covering import ScaleGrid


@pytest.fixture(scope="session")
def point():
    return dl.single_point()


@pytest.fixture(scope="session")
def point2d():
    return dl.single_point([0.0, 0.0])


@pytest.fixture(scope="session")
def two_points():
    return dl.PointCloud.from_array([0.0, 0.5], 2.0 ** -40, label="two")


@pytest.fixture(scope="session")
def corners():
    pts = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]
    return dl.PointCloud.from_array(pts, 2.0 ** -40, label="corners")


@pytest.fixture(scope="session")
def interval12():
    return dl.unit_interval_grid(2.0 ** -12)


@pytest.fixture(scope="session")
def interval14():
    return dl.unit_interval_grid(2.0 ** -14)


@pytest.fixture(scope="session")
def cantor8():
    return dl.middle_third_cantor(8)


@pytest.fixture(scope="session")
def cantor10():
    return dl.middle_third_cantor(10)


@pytest.fixture(scope="session")
def cantor12():
    return dl.middle_third_cantor(12)


@pytest.fixture(scope="session")
def f1_small():
    return dl.gen_sequence_set(1.0, 2000)


@pytest.fixture(scope="session")
def f1_full():
    return dl.gen_sequence_set(1.0, 10 ** 4)


@pytest.fixture(scope="session")
def logset_small():
    return dl.gen_log_set(5000)


@pytest.fixture(scope="session")
def cc5():
    c = dl.middle_third_cantor(5)
    return dl.product(c, c)


@pytest.fixture(scope="session")
def cc6():
    c = dl.middle_third_cantor(6)
    return dl.product(c, c)


def half_octave_grid(k_lo: float, k_hi: float, theta: float = 1.0) -> ScaleGrid:
    ks = np.arange(k_lo, k_hi + 1e-9, 0.5)
    return ScaleGrid(tuple(2.0 ** -k for k in ks), theta=theta)
