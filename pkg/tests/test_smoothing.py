import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import norm

from converse_lab.errors import OutOfRange, TimeTooSmall
from converse_lab.measures import TestFunction
from converse_lab.smoothing import (
    SemigroupSpec,
    blowup_set,
    ou_apply_mc,
    ou_log_average_mc,
    rhc_check,
    rhc_check_batch,
    rhc_time_threshold,
    semigroup_apply,
)
from reference import all_sequences, hamming_dilation_bruteforce, semigroup_matrix


def test_semigroup_example_half_cube():
    f = TestFunction.from_tensor(np.array([[1.0, 1.0], [0.0, 0.0]]))  # indicator of y_1 = 0
    out = semigroup_apply(SemigroupSpec.simple([[0.5, 0.5]], np.log(2)), f).tensor
    assert np.allclose(out, [[0.75, 0.75], [0.25, 0.25]])


@given(st.integers(1, 4), st.floats(0.0, 3.0), st.integers(0, 10_000))
def test_semigroup_matches_kronecker_matrix(n, t, seed):
    rng = np.random.default_rng(seed)
    laws = rng.dirichlet(np.ones(3), size=n)
    f = TestFunction(rng.uniform(size=3**n), n, 3)
    out = semigroup_apply(SemigroupSpec.simple(laws, t), f).values
    assert np.allclose(out, semigroup_matrix(laws, t) @ f.values, atol=1e-13)


@given(st.integers(1, 5), st.floats(0.0, 2.0), st.floats(0.0, 2.0), st.integers(0, 10_000))
def test_semigroup_is_markov_and_has_semigroup_property(n, s, t, seed):
    rng = np.random.default_rng(seed)
    laws = rng.dirichlet(np.ones(2), size=n)
    ones = TestFunction(np.ones(2**n), n, 2)
    assert np.allclose(semigroup_apply(SemigroupSpec.simple(laws, t), ones).values, 1.0)
    f = TestFunction(rng.uniform(size=2**n), n, 2)
    two_step = semigroup_apply(SemigroupSpec.simple(laws, s), semigroup_apply(SemigroupSpec.simple(laws, t), f))
    one_step = semigroup_apply(SemigroupSpec.simple(laws, s + t), f)
    assert np.allclose(two_step.values, one_step.values, atol=1e-13)


@given(st.integers(1, 5), st.floats(1.0, 4.0), st.floats(0.0, 2.0))
def test_dominating_semigroup_mass(n, alpha, t):
    nu = np.array([0.3, 0.7])
    ones = TestFunction(np.ones(2**n), n, 2)
    out = semigroup_apply(SemigroupSpec.dominating(alpha, nu, t), ones).values
    assert np.allclose(out, (np.exp(-t) + alpha * (1 - np.exp(-t))) ** n)


def test_dominating_semigroup_dominates_simple():
    rng = np.random.default_rng(3)
    nu = np.array([0.5, 0.5])
    laws = [np.array([0.8, 0.2]), np.array([0.3, 0.7])]  # both <= 1.6 nu
    f = TestFunction(rng.uniform(size=4), 2, 2)
    simple = semigroup_apply(SemigroupSpec.simple(laws, 0.4), f).values
    dom = semigroup_apply(SemigroupSpec.dominating(1.6, nu, 0.4), f).values
    assert np.all(dom >= simple - 1e-15)


def test_blowup_set_against_pairwise_distances():
    rng = np.random.default_rng(0)
    n = 12
    idx = rng.choice(2**n, size=100, replace=False)
    pts = all_sequences(2, n)[idx]
    indicator = np.zeros(2**n, dtype=bool)
    indicator[idx] = True
    for r in (0, 1, 2, 3):
        fast = blowup_set(indicator.reshape((2,) * n), r).reshape(-1)
        assert np.array_equal(fast, hamming_dilation_bruteforce(pts, n, r))


def test_blowup_set_monotone_and_saturates():
    a = np.zeros((3,) * 4, dtype=bool)
    a[0, 1, 2, 0] = True
    grown = [blowup_set(a, r) for r in range(5)]
    for small, big in zip(grown, grown[1:]):
        assert np.all(big >= small)
    assert grown[4].all() and not grown[3].all()


def test_rhc_time_threshold_and_error():
    assert rhc_time_threshold(0.5, 0.0) == pytest.approx(np.log(2))
    assert rhc_time_threshold(0.6, 0.2) == pytest.approx(np.log(0.8 / 0.4))
    f = TestFunction(np.array([1.0, 0.0, 0.0, 0.0]), 2, 2)
    with pytest.raises(TimeTooSmall):
        rhc_check(f, [[0.5, 0.5]] * 2, 0.6, 0.2, 0.5)
    with pytest.raises(OutOfRange):
        rhc_time_threshold(0.3, 0.5)


def test_rhc_holds_for_indicator_of_a_point():
    f = TestFunction(np.eye(16)[5], 4, 2)
    res = rhc_check(f, [[0.3, 0.7]] * 4, 0.5, 0.0, np.log(2))
    assert res.holds and res.lhs > res.rhs


@given(st.floats(0.05, 0.95), st.floats(0.0, 0.9), st.floats(0.0, 1.0), st.integers(0, 10_000))
def test_rhc_property(p, q_frac, extra, seed):
    q = q_frac * p
    rng = np.random.default_rng(seed)
    laws = [np.array([b, 1 - b]) for b in rng.uniform(0.05, 0.95, size=4)]
    f = rng.uniform(size=(50, 2, 2, 2, 2)) ** 4
    lhs, rhs, holds = rhc_check_batch(f, laws, p, q, rhc_time_threshold(p, q) + extra)
    assert holds.all()


def test_rhc_small_q_log_space_matches_direct_formula():
    rng = np.random.default_rng(1)
    laws = [np.array([0.4, 0.6])] * 3
    f = rng.uniform(size=(1, 2, 2, 2))
    lhs, _, _ = rhc_check_batch(f, laws, 0.5, 1e-9, 1.0)
    lhs0, _, _ = rhc_check_batch(f, laws, 0.5, 0.0, 1.0)
    assert lhs[0] == pytest.approx(lhs0[0], rel=1e-7)


def test_ou_mc_matches_half_space_closed_form():
    # f = 1{v . y >= b}: the semigroup value is a normal tail probability
    v, b, t = np.array([1.0, -0.5, 0.25]), 0.3, 0.7
    x, y = np.array([0.2, 0.0, -1.0]), np.array([1.0, 0.5, 0.0])
    f = lambda pts: (pts @ v >= b).astype(float)
    mean, se = ou_apply_mc(x, f, t, 200_000, 7, y)
    center = np.exp(-t) * y + (1 - np.exp(-t)) * x
    exact = norm.sf((b - v @ center) / (np.linalg.norm(v) * np.sqrt(1 - np.exp(-2 * t))))
    assert abs(mean - exact) < 4 * se


def test_ou_change_of_variables():
    v, b, t = np.array([1.0, 1.0]), 0.5, 0.6
    x = np.array([0.8, -0.3])
    f = lambda pts: (pts @ v >= b).astype(float)
    lhs, se1 = ou_log_average_mc(x, np.zeros(2), f, t, 2000, 4000, seed=3)
    rhs, se2 = ou_log_average_mc(np.exp(-t) * x, np.exp(-t) * x, f, t, 2000, 4000, seed=3)
    assert abs(lhs - rhs) < 4 * np.hypot(se1, se2)
