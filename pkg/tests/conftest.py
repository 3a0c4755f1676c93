import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from groupess import GroupGame, GroupWeights, PayoffMatrix2

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

HD = PayoffMatrix2.hawk_dove()
SH = PayoffMatrix2.stag_hunt()
PD = PayoffMatrix2.prisoners_dilemma()

# rounded so affine maps cannot wipe out a difference through underflow
entry = st.floats(-5, 5, allow_nan=False, allow_infinity=False).map(lambda x: round(x, 6))
prob = st.floats(0, 1)


@st.composite
def matrices(draw):
    return PayoffMatrix2(draw(entry), draw(entry), draw(entry), draw(entry))


@st.composite
def weights(draw, n_min=1, n_max=4):
    n = draw(st.integers(n_min, n_max))
    raw = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n)))
    w = raw / raw.sum()
    w[-1] = 1.0 - w[:-1].sum()
    return GroupWeights(tuple(float(x) for x in w))


@st.composite
def games(draw, n_min=1, n_max=4):
    return GroupGame(draw(weights(n_min, n_max)), draw(matrices()))


def random_weights(rng, n):
    w = rng.uniform(0.05, 1.0, n)
    w /= w.sum()
    w[-1] = 1.0 - w[:-1].sum()
    return GroupWeights(tuple(float(x) for x in w))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@st.composite
def int_matrices(draw):
    """Small integer payoffs: ties are exact, so tolerance choices never matter."""
    k = st.integers(-4, 4)
    return PayoffMatrix2(*(float(draw(k)) for _ in range(4)))
