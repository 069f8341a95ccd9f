import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from fuchsian_affine.cocycle import SeriesDivergenceWarning
from fuchsian_affine.halfplane import MoebiusElement, translation_along_imaginary_axis

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def sl2(x, y, z):
    return MoebiusElement.from_matrix(expm(np.array([[x, y], [z, -x]])))


coord = st.floats(-1.5, 1.5, allow_nan=False)
moebius = st.builds(sl2, coord, coord, coord)
points = st.builds(complex, st.floats(-3, 3), st.floats(0.2, 4))


@st.composite
def hyperbolic(draw, min_length=0.3, max_length=3.0):
    h = draw(st.builds(sl2, st.floats(-0.8, 0.8), st.floats(-0.8, 0.8), st.floats(-0.8, 0.8)))
    ell = draw(st.floats(min_length, max_length))
    return h @ translation_along_imaginary_axis(ell) @ h.inverse()


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


@pytest.fixture(autouse=True)
def _quiet_series():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SeriesDivergenceWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
