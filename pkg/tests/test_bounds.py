import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from converse_lab.bounds import (
    FanoVariant,
    ImageSizeVariant,
    blowup_bht,
    blowup_bht_at,
    blowup_lemma_numbers,
    bht_achievability,
    bht_converse_suite,
    fano_bound,
    image_size_bound,
    smoothing_bht,
    smoothing_bht_at,
    soundness_check_image_size,
)
from converse_lab.errors import AlphaInfinite, OutOfRange, PreconditionViolated
from converse_lab.measures import FiniteChannel
from converse_lab.smoothing import blowup_set
from reference import BINARY_P, BINARY_Q, np_optimum_by_lp

D = 0.19204199316179815
L01 = -np.log(0.9)


def test_equal_hypotheses():
    suite = bht_converse_suite([0.5, 0.5], [0.5, 0.5], 10, 0.5)
    assert suite["weak"].total == pytest.approx(2 * np.log(2))
    assert suite["smoothing"].total == pytest.approx(np.log(2))
    assert suite["smoothing"].params["t_star"] == np.inf


def test_smoothing_example_decomposition():
    rep = bht_converse_suite(BINARY_P, BINARY_Q, 100, 0.1)["smoothing"]
    # frozen from 100 D, 2 sqrt(L) sqrt(100 (alpha - 1)) and L with alpha = 2
    assert rep.first_order == pytest.approx(19.204199316179815, abs=1e-12)
    assert rep.second_order == pytest.approx(20 * np.sqrt(L01), abs=1e-12)
    assert rep.second_order == pytest.approx(6.491856919490027, abs=1e-12)
    assert rep.constant == pytest.approx(0.10536051565782635, abs=1e-15)
    assert rep.total == pytest.approx(25.801416751327665, abs=1e-12)
    # the recorded optimal time reproduces the total
    assert smoothing_bht_at(100, D, 2.0, 0.1, rep.params["t_star"]) == pytest.approx(rep.total, abs=1e-9)


@given(st.integers(1, 10_000), st.floats(0.01, 0.99), st.floats(1.0, 10.0))
def test_reports_are_consistent(n, eps, alpha):
    rep = smoothing_bht(n, D, alpha, eps)
    assert rep.total == pytest.approx(rep.first_order + rep.second_order + rep.constant, abs=1e-9)
    assert rep.second_order >= 0
    if alpha > 1:
        t = rep.params["t_star"]
        assert smoothing_bht_at(n, D, alpha, eps, t) == pytest.approx(rep.total, rel=1e-12)
        # t* is a minimizer
        assert smoothing_bht_at(n, D, alpha, eps, 1.1 * t) >= rep.total - 1e-9
        assert smoothing_bht_at(n, D, alpha, eps, 0.9 * t) >= rep.total - 1e-9
    blow = blowup_bht(n, D, eps, 2 / 0.3)
    assert blowup_bht_at(n, D, eps, 2 / 0.3, blow.params["r_star"]) == pytest.approx(blow.total, rel=1e-12)


@given(st.integers(1, 5000), st.floats(0.01, 0.9), st.floats(1.0, 5.0))
def test_smoothing_monotone(n, eps, alpha):
    base = smoothing_bht(n, D, alpha, eps).total
    assert smoothing_bht(n + 1, D, alpha, eps).total >= base
    assert smoothing_bht(n, D, alpha, min(eps + 0.05, 0.99)).total >= base
    assert smoothing_bht(n, D, alpha + 0.5, eps).total >= base


def test_second_order_coefficient_is_constant():
    for eps in (0.05, 0.1, 0.3):
        coef = 2 * np.sqrt((2 - 1) * -np.log1p(-eps))
        for n in (10, 100, 10_000):
            rep = smoothing_bht(n, D, 2.0, eps)
            assert (rep.total - n * D) / np.sqrt(n) - rep.constant / np.sqrt(n) == pytest.approx(coef, abs=1e-9)


def test_converse_bounds_dominate_exact_np_at_small_n():
    for n in (1, 2, 5, 8):
        for eps in (0.1, 0.36, 0.6):
            exact = -np.log(np_optimum_by_lp(BINARY_P, BINARY_Q, n, eps))
            suite = bht_converse_suite(BINARY_P, BINARY_Q, n, eps)
            for key in ("weak", "blowup", "smoothing"):
                assert exact <= suite[key].total + 1e-9
            assert suite["strassen_ref"].is_bound is False


def test_unavailable_entries():
    suite = bht_converse_suite([0.5, 0.5], [1.0, 0.0], 5, 0.1)
    assert not suite["smoothing"].preconditions_ok and suite["smoothing"].total == np.inf
    assert not suite["blowup"].preconditions_ok
    with pytest.raises(AlphaInfinite):
        smoothing_bht(5, 1.0, np.inf, 0.1)
    for eps in (0.0, 1.0, 1 - 1e-13):
        with pytest.raises(OutOfRange):
            smoothing_bht(5, D, 2.0, eps)


def test_achievability_examples():
    rep = bht_achievability(BINARY_P, BINARY_Q, 1, 0.4)
    assert rep.type1 == pytest.approx(0.4)
    assert rep.type2 == pytest.approx(0.3)
    assert rep.type2 <= rep.chernoff_type2
    same = bht_achievability([0.3, 0.7], [0.3, 0.7], 4, 0.2)
    assert same.threshold == pytest.approx(0.0) and same.type2 == pytest.approx(1.0)


@given(st.integers(1, 60), st.floats(0.01, 0.99))
def test_achievability_sound(n, eps):
    rep = bht_achievability(BINARY_P, BINARY_Q, n, eps)
    assert rep.type1 <= eps + 1e-12
    assert rep.type2 <= rep.chernoff_type2 * (1 + 1e-12)


def test_achievability_not_better_than_lp_optimum():
    for n in (1, 3, 6):
        for eps in (0.1, 0.3):
            rep = bht_achievability(BINARY_P, BINARY_Q, n, eps)
            assert rep.type2 >= np_optimum_by_lp(BINARY_P, BINARY_Q, n, eps) - 1e-12


def test_blowup_lemma_worked_number():
    rep = blowup_lemma_numbers(c=10.0, n=5e9, log_inv_p_a=100.0)
    assert rep.radius == 1e6
    assert rep.radius / 5e9 == pytest.approx(0.0002)
    assert blowup_lemma_numbers(p_a=np.exp(-2.0), c=1e-12, n=8).radius == pytest.approx(np.sqrt(4) * np.sqrt(2.0))


def test_counting_sandwich_exhaustive_n10():
    rng = np.random.default_rng(0)
    n, r = 10, 2
    for _ in range(20):
        a = rng.uniform(size=(2,) * n) < 0.01
        a.reshape(-1)[rng.integers(2**n)] = True
        p_a = a.mean()
        p_ar = blowup_set(a, r).mean()
        rep = blowup_lemma_numbers(p_a=p_a, c=1.0, n=n, k_ratio=2 / 0.5)
        lower = r * np.log(r / (n * np.e * 4))
        assert lower <= np.log(p_a / p_ar) <= 0.0
        assert rep.counting_lower == pytest.approx(rep.radius * np.log(rep.radius / (n * np.e * 4)))


def test_fano_bounds():
    rep = fano_bound(34.66, 100, 0.1, FanoVariant.GAUSSIAN)
    assert rep.second_order == pytest.approx(np.sqrt(2 * L01) * 10, abs=1e-12)
    assert rep.second_order == pytest.approx(4.5904, abs=1e-4)
    assert rep.total == pytest.approx(34.66 + 4.5904 + 0.1054, abs=1e-3)
    assert fano_bound(3.0, 10, 0.2, FanoVariant.DISCRETE_SMOOTHING, alpha=1.0).total == pytest.approx(3.0 - np.log(0.8))
    assert fano_bound(3.0, 10, 1e-10, FanoVariant.DISCRETE_SMOOTHING, alpha=2.0).total == pytest.approx(3.0, abs=1e-3)
    assert fano_bound(3.0, 10, 0.5, FanoVariant.WEAK).total == pytest.approx(6 + 2 * np.log(2))
    with pytest.raises(AlphaInfinite):
        fano_bound(3.0, 10, 0.5, FanoVariant.DISCRETE_SMOOTHING)


def test_image_size_formula_limits():
    assert image_size_bound(ImageSizeVariant.DISCRETE, n=5, c=2.0, eta=1.0, d=0.7, alpha=3.0).total == pytest.approx(0.7)
    assert image_size_bound(ImageSizeVariant.DISCRETE, n=5, c=2.0, eta=0.5, d=0.7, alpha=1.0).total == pytest.approx(0.7 + 2 * np.log(2))
    g = image_size_bound(ImageSizeVariant.GAUSSIAN, n=9, c=1.5, eta=0.5, d=1.0)
    assert g.total == pytest.approx(1.0 + 1.5 * np.sqrt(18 * np.log(2)) + 1.5 * np.log(2))
    gt = image_size_bound(ImageSizeVariant.GAUSSIAN_TYPICAL, n=100, c=1.0, eta=0.5, dstar=0.2, delta=0.1)
    assert gt.total == pytest.approx(20 + np.sqrt(600 * np.log(20)) + np.sqrt(200 * np.log(2)) + np.log(2))
    with pytest.raises(PreconditionViolated):
        image_size_bound(ImageSizeVariant.GAUSSIAN_TYPICAL, n=10, c=1.0, eta=0.5, dstar=0.2, delta=0.1)


def test_image_size_typical_example():
    # identity channel, uniform binary Q_X, nu = Q_Y, c = 2, delta = 0.1, eta = 0.5, n = 200
    beta, alpha, c = 2.0, 2.0, 2.0
    a_coef = np.log(alpha**c * beta ** (c + 1)) * np.sqrt(3 * beta * np.log(20)) + 2 * c * np.sqrt((alpha - 1) * np.log(2))
    rep = image_size_bound(
        ImageSizeVariant.DISCRETE_TYPICAL, n=200, c=c, eta=0.5, dstar=np.log(2), alpha=alpha, beta=beta, x_size=2, delta=0.1
    )
    assert rep.total == pytest.approx(200 * np.log(2) + a_coef * np.sqrt(200) + 2 * np.log(2), abs=1e-9)
    assert rep.params["A"] == pytest.approx(a_coef)
    timed = image_size_bound(
        ImageSizeVariant.DISCRETE_TYPICAL_TIME, n=200, c=c, dstar=np.log(2), alpha=alpha, beta=beta, x_size=2, delta=0.1, t=0.05
    )
    assert timed.total == pytest.approx(200 * np.log(2) + c * 200 * 0.05 + np.log(32) * np.sqrt(1200 * np.log(20)))
    with pytest.raises(PreconditionViolated):
        image_size_bound(ImageSizeVariant.DISCRETE_TYPICAL, n=10, c=c, eta=0.5, dstar=0.1, alpha=2, beta=2, x_size=2, delta=0.1)


def test_image_size_soundness_small():
    w = FiniteChannel([[0.7, 0.3], [0.2, 0.8]])
    for n in (1, 2):
        rep = soundness_check_image_size(w, [0.5, 0.5], 1.5, n, trials=150, seed=n)
        assert rep.violations == 0 and rep.informative > 0


def test_image_size_constant_function_is_tight_at_eta_one():
    # f = 1 and mu = Q_X give LHS = 0 and d(Q_X, W, Q_Y, c) >= 0
    q = np.array([0.4, 0.6])
    w = FiniteChannel([[0.7, 0.3], [0.2, 0.8]])
    from converse_lab.bldiv import bl_divergence_dual

    d = bl_divergence_dual(q, w, w.output(q).probs, 2.0).value
    assert d >= -1e-12
