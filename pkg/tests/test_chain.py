import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markov_ginv import is_irreducible, stationary_distribution, validate_chain
from markov_ginv.errors import NotIrreducible, NotStochastic
from markov_ginv.oracle import power_iteration_pi
from markov_ginv.sampling import random_chain

from .cases import FIXTURES


def test_validate_c1():
    chain = validate_chain(FIXTURES["C1"]["P"])
    np.testing.assert_allclose(chain.pi, [1 / 3, 2 / 3], atol=1e-15)
    assert chain.m == 2
    assert not chain.P.flags.writeable


def test_identity_is_reducible():
    with pytest.raises(NotIrreducible):
        validate_chain(np.eye(2))


def test_row_sum_off():
    with pytest.raises(NotStochastic) as info:
        validate_chain([[0.5, 0.6], [0.25, 0.75]])
    assert info.value.row == 0


def test_negative_entry():
    with pytest.raises(NotStochastic) as info:
        validate_chain([[0.5, 0.5], [1.25, -0.25]])
    assert info.value.row == 1


def test_rows_renormalized_exactly():
    chain = validate_chain([[0.5 + 1e-12, 0.5], [0.25, 0.75]])
    assert np.abs(chain.P.sum(axis=1) - 1.0).max() <= 2e-16


@pytest.mark.parametrize(
    "P, expected",
    [([[0, 1], [1, 0]], True), (np.eye(2), False), ([[0, 1, 0], [0, 0, 1], [1, 0, 0]], True),
     ([[0.5, 0.5, 0], [0.5, 0.5, 0], [0, 0.5, 0.5]], False)],
)
def test_is_irreducible(P, expected):
    assert is_irreducible(np.array(P)) is expected


@pytest.mark.parametrize("name", ["C0", "C1", "C2"])
def test_stationary_fixtures(name):
    data = FIXTURES[name]
    np.testing.assert_allclose(stationary_distribution(data["P"]), data["pi"], atol=1e-15)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, m=st.integers(2, 8))
def test_stationary_properties(seed, m):
    chain = random_chain(np.random.default_rng(seed), m)
    pi = chain.pi
    assert np.abs(pi @ chain.P - pi).max() <= 1e-10
    assert abs(pi.sum() - 1.0) <= 1e-15
    # alternative u: first standard basis vector
    np.testing.assert_allclose(stationary_distribution(chain.P, u=np.eye(m)[0]), pi, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, m=st.integers(2, 8))
def test_stationary_matches_power_iteration(seed, m):
    chain = random_chain(np.random.default_rng(seed), m)
    # the lazy chain is aperiodic whatever P is
    np.testing.assert_allclose(power_iteration_pi(chain.P, lazy=True), chain.pi, atol=1e-8)
