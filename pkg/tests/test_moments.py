import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markov_ginv import ginverse as gi
from markov_ginv import moments as mo
from markov_ginv.errors import NotAGInverse, NotIn15a
from markov_ginv.ginverse import GInverseParams
from markov_ginv.oracle import SimConfig, simulate_first_passage
from markov_ginv.passage import mfpt_direct
from markov_ginv.sampling import random_chain, random_params

from .cases import C1, C1_G_UNIFORM_BETA

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_second_moments_fixtures(fixture_case):
    chain, data = fixture_case
    M = mfpt_direct(chain).M
    np.testing.assert_allclose(mo.second_moment_diag_from_M(chain, M), data["Md2"], atol=1e-10)
    np.testing.assert_allclose(mo.second_moment_diag_from_tau(chain.pi, data["tau"]), data["Md2"], atol=1e-10)
    np.testing.assert_allclose(mo.second_moment_diag_from_ginverse(chain), data["Md2"], atol=1e-10)


def test_second_moment_routes_c1(c1):
    for G in (C1["Z"], C1["A_sharp"], C1_G_UNIFORM_BETA, gi.moore_penrose(c1).G):
        for name, v in mo.second_moment_diag_routes(c1, np.array(G)).items():
            np.testing.assert_allclose(v, C1["Md2"], atol=1e-10, err_msg=name)


def test_route_sets_follow_class(c1):
    assert set(mo.second_moment_diag_routes(c1, gi.fundamental_matrix(c1))) == {
        "general", "row_constant", "column_constant", "commuting"}
    assert set(mo.second_moment_diag_routes(c1, gi.moore_penrose(c1))) == {"general"}


def test_second_moment_matrix_c2(c2):
    # deterministic alternation: T_12 = 1, T_11 = 2
    sm = mo.second_moments(c2)
    np.testing.assert_allclose(sm.M2, [[4, 1], [1, 4]], atol=1e-12)


def test_second_moment_matrix_c1(c1):
    # T_12 is geometric(1/2): E T^2 = (2 - p)/p^2 = 6; T_21 geometric(1/4): 28
    sm = mo.second_moments(c1)
    np.testing.assert_allclose(sm.M2, [[19, 6], [28, 3.5]], atol=1e-10)
    assert mo.second_moments(c1, full=False).M2 is None


def test_tau_c1(c1):
    np.testing.assert_allclose(mo.tau_from_ginverse(c1), C1["tau"], atol=1e-12)
    for name, v in mo.tau_routes(c1, gi.moore_penrose(c1)).items():
        np.testing.assert_allclose(v, C1["tau"], atol=1e-12, err_msg=name)


def test_ginverse_from_second_moments_c1(c1):
    M, Md2 = C1["M"], C1["Md2"]
    np.testing.assert_allclose(mo.ginverse_from_second_moments(c1, 0.0, M, Md2), C1["Z"], atol=1e-12)
    np.testing.assert_allclose(mo.ginverse_from_second_moments(c1, -1.0, M, Md2), C1["A_sharp"], atol=1e-12)
    np.testing.assert_allclose(mo.group_inverse_from_second_moments(M, Md2), C1["A_sharp"], atol=1e-12)


def test_kemeny_fixtures(fixture_case):
    chain, data = fixture_case
    for route in mo.KemenyRoute:
        assert mo.kemeny_constant(chain, route).value == pytest.approx(data["K"], abs=1e-12)


def test_kemeny_trace_needs_5a(c1):
    with pytest.raises(NotIn15a):
        mo.kemeny_constant(c1, "trace_15a", gi.moore_penrose(c1))
    routes = mo.kemeny_all_routes(c1, gi.moore_penrose(c1))
    assert "trace_15a" not in routes
    assert all(v == pytest.approx(7 / 3, abs=1e-12) for v in routes.values())


def test_kemeny_general_rejects_non_inverse(c1):
    with pytest.raises(NotAGInverse):
        mo.kemeny_constant(c1, "general_g", np.eye(2))


def test_kemeny_trace_identities(c1):
    K = mo.kemeny_constant(c1).value
    assert np.trace(C1["Z"]) == pytest.approx(K, abs=1e-12)
    assert np.trace(C1["A_sharp"]) + 1 == pytest.approx(K, abs=1e-12)


# -- random instances -------------------------------------------------------

def _instance(seed, m):
    r = np.random.default_rng(seed)
    chain = random_chain(r, m)
    return chain, random_params(r, chain)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, m=st.integers(2, 8), which=st.sampled_from(["free", "5a", "5b", "5"]))
def test_second_moment_identities_random(seed, m, which):
    chain, params = _instance(seed, m)
    alpha = chain.e if which in ("5a", "5") else params.alpha
    beta = chain.pi if which in ("5b", "5") else params.beta
    g = gi.build_parametric(chain, GInverseParams(alpha, beta, params.gamma))
    M = mfpt_direct(chain).M
    ref = mo.second_moment_diag_from_M(chain, M)
    scale = max(1.0, np.abs(ref).max())
    for name, v in mo.second_moment_diag_routes(chain, g).items():
        assert np.abs(v - ref).max() <= 1e-8 * scale, name
    # m2_jj + m_jj = 2 m_jj sum_i pi_i m_ij
    tau = chain.pi @ M
    assert np.abs(ref + np.diag(M) - 2 * np.diag(M) * tau).max() <= 1e-8 * scale


@settings(max_examples=50, deadline=None)
@given(seed=seeds, m=st.integers(2, 8), which=st.sampled_from(["free", "5a", "5b", "5"]))
def test_tau_routes_random(seed, m, which):
    chain, params = _instance(seed, m)
    alpha = chain.e if which in ("5a", "5") else params.alpha
    beta = chain.pi if which in ("5b", "5") else params.beta
    g = gi.build_parametric(chain, GInverseParams(alpha, beta, params.gamma))
    tau = chain.pi @ mfpt_direct(chain).M
    for name, v in mo.tau_routes(chain, g).items():
        assert np.abs(v - tau).max() <= 1e-8 * max(1.0, np.abs(g.G).max(), tau.max()), name


@settings(max_examples=50, deadline=None)
@given(seed=seeds, m=st.integers(2, 8))
def test_second_moment_element_formula_random(seed, m):
    chain, params = _instance(seed, m)
    sm = mo.second_moments(chain)
    M = mfpt_direct(chain).M
    Z = gi.fundamental_matrix(chain).G
    A = gi.group_inverse(chain).G
    assert np.abs(mo.ginverse_from_second_moments(chain, 0.0, M, sm.Md2) - Z).max() <= 1e-8 * max(1, np.abs(Z).max())
    assert np.abs(mo.group_inverse_from_second_moments(M, sm.Md2) - A).max() <= 1e-8 * max(1, np.abs(A).max())
    G = gi.build_parametric(chain, GInverseParams(chain.e, chain.pi, params.gamma)).G
    assert np.abs(mo.ginverse_from_second_moments(chain, params.gamma, M, sm.Md2) - G).max() <= 1e-8 * max(1, np.abs(G).max())


@settings(max_examples=50, deadline=None)
@given(seed=seeds, m=st.integers(2, 8))
def test_kemeny_routes_random(seed, m):
    chain, params = _instance(seed, m)
    K = mo.kemeny_constant(chain)
    assert K.row_spread <= 1e-9 * K.value
    for G in (gi.build_parametric(chain, params), gi.build_parametric(chain, GInverseParams(chain.e, params.beta, params.gamma))):
        for name, v in mo.kemeny_all_routes(chain, G).items():
            assert v == pytest.approx(K.value, abs=1e-8 * max(1, np.abs(G.G).max())), name
    Z = gi.fundamental_matrix(chain).G
    assert np.trace(Z) == pytest.approx(K.value, abs=1e-9 * K.value)
    assert np.trace(gi.group_inverse(chain).G) + 1 == pytest.approx(K.value, abs=1e-9 * K.value)


def test_second_moment_monte_carlo():
    chain = random_chain(np.random.default_rng(7), 3)
    Md2 = mo.second_moments(chain, full=False).Md2
    M = mfpt_direct(chain).M
    est = simulate_first_passage(chain, 0, 0, SimConfig(trials=40_000, seed=11))
    assert abs(est.mean - M[0, 0]) <= 4 * est.stderr_mean
    assert abs(est.second_moment - Md2[0]) <= 4 * est.stderr_second_moment
