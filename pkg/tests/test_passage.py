import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from markov_ginv import ginverse as gi
from markov_ginv import passage as pt
from markov_ginv.errors import BadBeta, DegenerateParameters, NotAGInverse, NotIn15a, UnknownCase
from markov_ginv.ginverse import GInverseParams
from markov_ginv.moments import kemeny_constant
from markov_ginv.sampling import random_chain, random_params

from .cases import C1, C1_G_UNIFORM_BETA

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_direct_fixtures(fixture_case):
    chain, data = fixture_case
    np.testing.assert_allclose(pt.mfpt_direct(chain).M, data["M"], atol=1e-12)


def test_d_is_recurrence_times(c1):
    np.testing.assert_allclose(pt.mfpt_direct(c1).D, np.diag([3.0, 1.5]), atol=1e-12)


@pytest.mark.parametrize("route", [pt.mfpt_from_ginverse, pt.mfpt_from_deflated, pt.mfpt_simplified_15a])
@pytest.mark.parametrize("G", [C1["Z"], C1["A_sharp"], C1_G_UNIFORM_BETA])
def test_routes_on_c1(c1, route, G):
    np.testing.assert_allclose(route(c1, np.array(G)).M, C1["M"], atol=1e-12)


def test_mp_inverse_on_c1(c1):
    mp = gi.moore_penrose(c1)
    np.testing.assert_allclose(pt.mfpt_from_ginverse(c1, mp).M, C1["M"], atol=1e-12)
    np.testing.assert_allclose(pt.mfpt_elementwise_general(mp, c1.pi), C1["M"], atol=1e-12)
    with pytest.raises(NotIn15a):
        pt.mfpt_simplified_15a(c1, mp)
    assert np.abs(pt.simplified_formula(mp.G, c1.pi) - C1["M"]).max() > 1e-3


def test_route_rejects_non_inverse(c1):
    with pytest.raises(NotAGInverse):
        pt.mfpt_from_ginverse(c1, np.zeros((2, 2)))


def test_derived_vectors_c1(c1):
    M = np.array(C1["M"])
    dv = pt.derived_vectors(c1, M, c1.pi)
    np.testing.assert_allclose(dv.delta, [8 / 3, 2 / 3], atol=1e-12)
    np.testing.assert_allclose(dv.eta, [2.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(dv.tau, C1["tau"], atol=1e-12)
    with pytest.raises(BadBeta):
        pt.derived_vectors(c1, M, [0.5, 0.6])


def test_reconstruct_c1_named(c1):
    M = C1["M"]
    np.testing.assert_allclose(pt.reconstruct_special("Z", c1, M), C1["Z"], atol=1e-12)
    np.testing.assert_allclose(pt.reconstruct_special("group", c1, M), C1["A_sharp"], atol=1e-12)
    np.testing.assert_allclose(pt.reconstruct_special("1245a", c1, M), C1_G_UNIFORM_BETA, atol=1e-12)
    np.testing.assert_allclose(pt.reconstruct_special("MP", c1, M), gi.moore_penrose(c1).G, atol=1e-12)


def test_reconstruct_rejects_bad_input(c1):
    with pytest.raises(UnknownCase):
        pt.reconstruct_special("nope", c1, C1["M"])
    with pytest.raises(DegenerateParameters):
        pt.reconstruct_special("15a", c1, C1["M"], {"beta": c1.pi})  # missing gamma
    with pytest.raises(DegenerateParameters):
        pt.reconstruct_ginverse(GInverseParams(c1.e, c1.pi, 0), c1.pi, [[1, 2], [4, 1.5]])


# -- random instances -------------------------------------------------------

def _instance(seed, m):
    r = np.random.default_rng(seed)
    chain = random_chain(r, m)
    return r, chain, random_params(r, chain), pt.mfpt_direct(chain).M


def _scale(G):
    return max(1.0, np.abs(G).max())


@settings(max_examples=60, deadline=None)
@given(seed=seeds, m=st.integers(2, 8))
def test_route_equivalence(seed, m):
    _, chain, params, M = _instance(seed, m)
    g = gi.build_parametric(chain, params)
    tol = 1e-9 * max(_scale(g.G), np.abs(M).max())
    for route in (pt.mfpt_from_ginverse, pt.mfpt_from_deflated):
        assert np.abs(route(chain, g).M - M).max() <= tol
    assert np.abs(pt.mfpt_elementwise_general(g, chain.pi) - M).max() <= tol
    # alpha is generic here, so the simplified form must fail
    assert np.abs(pt.simplified_formula(g.G, chain.pi) - M).max() > 1e-6
    with pytest.raises(NotIn15a):
        pt.mfpt_simplified_15a(chain, g)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, m=st.integers(2, 8))
def test_simplified_form_for_5a(seed, m):
    _, chain, params, M = _instance(seed, m)
    g = gi.build_parametric(chain, GInverseParams(chain.e, params.beta, params.gamma))
    out = pt.mfpt_simplified_15a(chain, g).M
    assert np.abs(out - M).max() <= 1e-9 * max(_scale(g.G), np.abs(M).max())


@settings(max_examples=60, deadline=None)
@given(seed=seeds, m=st.integers(2, 8))
def test_reconstruct_matches_construction(seed, m):
    _, chain, params, M = _instance(seed, m)
    G = gi.build_parametric(chain, params).G
    R = pt.reconstruct_ginverse(params, chain.pi, M)
    assert np.abs(R - G).max() <= 1e-8 * _scale(G)
    np.testing.assert_allclose(pt.row_sums_formula(params, chain.pi, M), G.sum(axis=1), atol=1e-8 * _scale(G))


@settings(max_examples=40, deadline=None)
@given(seed=seeds, m=st.integers(2, 8), case=st.sampled_from(pt.SPECIAL_CASES))
def test_special_cases_match_construction(seed, m, case):
    _, chain, params, M = _instance(seed, m)
    extra = {"beta": params.beta, "gamma": params.gamma}
    full = pt.special_case_params(case, chain.pi, extra)
    G = gi.build_parametric(chain, full).G
    R = pt.reconstruct_special(case, chain, M, extra)
    assert np.abs(R - G).max() <= 1e-8 * _scale(G)
    # the general formula must give the same answer
    assert np.abs(pt.reconstruct_ginverse(full, chain.pi, M) - R).max() <= 1e-8 * _scale(G)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, m=st.integers(2, 8))
def test_deflated_elementwise(seed, m):
    """m_ij = (h_jj - h_ij + [i = j]) / pi_j for H = G(I - Pi), any G."""
    _, chain, params, M = _instance(seed, m)
    H = gi.deflate(gi.build_parametric(chain, params)).G
    assert np.abs(pt.simplified_formula(H, chain.pi) - M).max() <= 1e-9 * max(_scale(H), np.abs(M).max())


@settings(max_examples=40, deadline=None)
@given(seed=seeds, m=st.integers(2, 8))
def test_5a_element_formula_and_delta_sum(seed, m):
    """For alpha = e: g_ij = pi_j (delta_j + g_i. - m_ij [i != j]); sum pi_k delta_k = K - 1."""
    _, chain, params, M = _instance(seed, m)
    gamma = params.gamma
    G = gi.build_parametric(chain, GInverseParams(chain.e, params.beta, gamma)).G
    delta = pt.derived_vectors(chain, M, params.beta).delta
    expected = chain.pi[None, :] * (delta[None, :] + (1 + gamma) - (1 - np.eye(m)) * M)
    assert np.abs(expected - G).max() <= 1e-8 * _scale(G)
    K = kemeny_constant(chain).value
    assert abs(chain.pi @ delta - (K - 1)) <= 1e-9 * K


@settings(max_examples=40, deadline=None)
@given(seed=seeds, m=st.integers(2, 8))
def test_weighted_column_identities(seed, m):
    """M Pi_d alpha = alpha + g + e[e^T H_d alpha - (1+gamma)] and beta^T M Pi_d = beta^T + e^T H_d."""
    _, chain, params, M = _instance(seed, m)
    g = gi.build_parametric(chain, params)
    H = gi.deflate(g).G
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    Pid = np.diag(chain.pi)
    Hd = np.diag(np.diag(H))
    e = chain.e
    lhs = M @ Pid @ alpha
    rhs = alpha + g.G @ e + e * (e @ Hd @ alpha - (1 + gamma))
    tol = 1e-8 * max(_scale(g.G), np.abs(M).max()) * max(1, np.abs(alpha).max())
    assert np.abs(lhs - rhs).max() <= tol
    assert np.abs(beta @ M @ Pid - (beta + e @ Hd)).max() <= tol
