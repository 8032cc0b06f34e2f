import numpy as np
import pytest

from cyclicfan import validate

# Skew-symmetric matrix of the three-cycle quiver with doubled arrows;
# mutation negates it in every direction.
MARKOV = [[0, -2, 2], [2, 0, -2], [-2, 2, 0]]

# Large integer matrix whose decreasing sequence is [1, 2, 3, 2, 1].
B228 = [[0, -228, 1795], [228, 0, -409252], [-1795, 409252, 0]]

# Its minimum representative.
MIN228 = [[0, 4, -3], [-4, 0, 4], [3, -4, 0]]

# Integer matrix with Markov constant 4 (affine boundary case).
EXB = [[0, -3, 18], [3, 0, -7], [-18, 7, 0]]

# Minimum representative of the EXB class.
MIN_EXB = [[0, -3, 3], [3, 0, -2], [-3, 2, 0]]

# Real matrix with an infinite decreasing sequence.
INF_DELTA = [[0, -14.5, 4.75], [14.5, 0, -3.5], [-4.75, 3.5, 0]]

# Skew-symmetrizable with d = (1, 4, 1); its skew-symmetrization has all
# off-diagonal magnitudes equal to 2.
RIGID = [[0, -4, 2], [1, 0, -1], [-2, 4, 0]]


@pytest.fixture
def markov():
    return validate(MARKOV)


@pytest.fixture
def b228():
    return validate(B228)


@pytest.fixture
def min228():
    return validate(MIN228)


@pytest.fixture
def exb():
    return validate(EXB)


@pytest.fixture
def min_exb():
    return validate(MIN_EXB)


@pytest.fixture
def rigid():
    return validate(RIGID)


def assert_matrix_equal(actual, expected, **kw):
    np.testing.assert_allclose(np.asarray(actual, float), np.asarray(expected, float), **kw)
