import numpy as np
import pytest

from markov_ginv import validate_chain

from .cases import C0, C1, C2, FIXTURES


@pytest.fixture
def c0():
    return validate_chain(C0["P"])


@pytest.fixture
def c1():
    return validate_chain(C1["P"])


@pytest.fixture
def c2():
    return validate_chain(C2["P"])


@pytest.fixture(params=["C0", "C1", "C2"])
def fixture_case(request):
    data = FIXTURES[request.param]
    return validate_chain(data["P"]), data


@pytest.fixture
def rng():
    return np.random.default_rng(20121917)
