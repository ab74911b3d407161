import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import norm

from converse_lab.bounds import bht_achievability, bht_converse_suite
from converse_lab.errors import OutOfRange, SupportMismatch, TooLarge
from converse_lab.oracles import (
    AntipodalCode,
    PMassAtLeast,
    TrivialSideInfoCode,
    Type1AtMost,
    blowup_certification,
    dp_impossibility_experiment,
    mc_error_estimate,
    np_frontier,
)
from reference import BINARY_P, BINARY_Q, np_optimum_by_lp, np_optimum_by_vertices


def test_frontier_equal_hypotheses():
    for eps in (0.0, 0.2, 0.75):
        assert np_frontier([0.3, 0.7], [0.3, 0.7], 3, Type1AtMost(eps)).type2 == pytest.approx(1 - eps, abs=1e-14)


def test_frontier_worked_examples():
    assert np_frontier(BINARY_P, BINARY_Q, 1, Type1AtMost(0.4)).type2 == pytest.approx(0.3, abs=1e-15)
    # frozen from the LP over all randomized tests on {0,1}^2
    assert np_frontier(BINARY_P, BINARY_Q, 2, Type1AtMost(0.36)).type2 == pytest.approx(0.335, abs=1e-14)
    assert np_frontier(BINARY_P, BINARY_Q, 8, Type1AtMost(0.1)).type2 == pytest.approx(0.3452491757812589, abs=1e-12)


@given(st.integers(1, 2), st.floats(0.0, 1.0), st.integers(0, 10_000))
def test_frontier_matches_exhaustive_search_on_small_instances(n, eps, seed):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
    exact = np_frontier(p, q, n, Type1AtMost(eps)).type2
    assert exact == pytest.approx(np_optimum_by_vertices(p, q, n, eps), abs=1e-12)


def test_vertex_and_lp_oracles_agree():
    for n, eps in ((1, 0.4), (2, 0.36), (3, 0.2)):
        assert np_optimum_by_vertices(BINARY_P, BINARY_Q, n, eps) == pytest.approx(np_optimum_by_lp(BINARY_P, BINARY_Q, n, eps), abs=1e-9)


@given(st.floats(0.0, 0.95), st.floats(0.0, 0.05))
def test_frontier_monotone_in_eps(eps, step):
    a = np_frontier(BINARY_P, BINARY_Q, 12, Type1AtMost(eps)).type2
    b = np_frontier(BINARY_P, BINARY_Q, 12, Type1AtMost(eps + step)).type2
    assert b <= a + 1e-15


def test_frontier_constraints_and_errors():
    pt = np_frontier(BINARY_P, BINARY_Q, 5, PMassAtLeast(0.9))
    assert pt.type1 == pytest.approx(0.1)
    assert 0.0 <= pt.boundary_weight <= 1.0
    with pytest.raises(SupportMismatch):
        np_frontier([0.5, 0.5], [1.0, 0.0], 2, Type1AtMost(0.1))
    with pytest.raises(OutOfRange):
        np_frontier(BINARY_P, BINARY_Q, 2, Type1AtMost(1.5))


@pytest.mark.parametrize("n", [10, 50, 100, 500])
@pytest.mark.parametrize("eps", [0.05, 0.1, 0.3])
def test_frontier_sits_between_achievability_and_converses(n, eps):
    exact = -np_frontier(BINARY_P, BINARY_Q, n, Type1AtMost(eps)).log_type2
    assert exact <= bht_converse_suite(BINARY_P, BINARY_Q, n, eps)["smoothing"].total
    assert exact >= -bht_achievability(BINARY_P, BINARY_Q, n, eps).log_type2 - 1e-12


def test_blowup_certification_small():
    rep = blowup_certification(8, 60, (0.5, 1.0, 2.0), seed=3)
    assert rep.lemma_violations == 0 and rep.counting_violations == 0
    assert rep.checks == 180 and rep.counting_checks == 480
    with pytest.raises(TooLarge):
        blowup_certification(21, 1, (1.0,), seed=0)


def test_dp_impossibility_rows():
    rows = dp_impossibility_experiment(BINARY_P, BINARY_Q, 1.0, [100, 1000])
    assert [r.n for r in rows] == [100, 1000]
    assert all(r.normalized_gap > 0 for r in rows)
    assert rows[0].n_divergence == pytest.approx(100 * 0.19204199316179815)
    with pytest.raises(OutOfRange):
        dp_impossibility_experiment(BINARY_P, BINARY_Q, 0.0, [100])


def test_mc_antipodal_code():
    rep = mc_error_estimate(AntipodalCode(4, 0.4), 200_000, seed=1)
    assert rep.exact == pytest.approx(norm.sf(0.8))
    assert abs(rep.estimate - rep.exact) < 3 * rep.stderr
    assert mc_error_estimate(AntipodalCode(4, 0.4, messages=1), 1000, seed=1).estimate == 0.0


def test_mc_trivial_side_info_code():
    rep = mc_error_estimate(TrivialSideInfoCode(10, 1.2), 200_000, seed=2)
    assert abs(rep.estimate - rep.exact) < 3 * rep.stderr


def test_mc_is_seeded():
    a = mc_error_estimate(AntipodalCode(3, 0.2), 10_000, seed=9)
    b = mc_error_estimate(AntipodalCode(3, 0.2), 10_000, seed=9)
    assert a == b
