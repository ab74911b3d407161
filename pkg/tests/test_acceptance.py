"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the summary
lines next to pytest's own report.
"""

import shutil
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import binom

from converse_lab.applications import side_info_converse_gaussian
from converse_lab.bldiv import (
    ThetaOfR,
    bl_divergence_dual,
    bl_divergence_primal_oracle,
    chernoff_bernoulli,
    chi_square_deviation,
    dstar_envelope,
)
from converse_lab.bounds import bht_converse_suite, blowup_lemma_numbers, soundness_check_image_size
from converse_lab.experiments import load_config, run_experiment
from converse_lab.infocalc import divergence_stats, gaussian_q_inverse
from converse_lab.measures import FiniteChannel, GaussianPair
from converse_lab.oracles import Type1AtMost, blowup_certification, dp_impossibility_experiment, np_frontier
from converse_lab.rng import make_generator
from converse_lab.smoothing import rhc_check_batch, rhc_time_threshold

P, Q = np.array([0.6, 0.4]), np.array([0.3, 0.7])
EPS = (0.05, 0.1, 0.3)
NS = (10, 50, 100, 500, 2000, 10_000)
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def report(capsys):
    def emit(criterion: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")

    return emit


def test_criterion_01_smoothing_bht_soundness(report):
    start = time.perf_counter()
    violations, worst = 0, np.inf
    for eps in EPS:
        for n in NS:
            exact = -np_frontier(P, Q, n, Type1AtMost(eps)).log_type2
            bound = bht_converse_suite(P, Q, n, eps)["smoothing"].total
            worst = min(worst, bound - exact)
            violations += exact > bound
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 10.0
    report("criterion 1 (smoothing BHT soundness)", ok, f"{violations} violations, min slack {worst:.4g}, {elapsed:.2f}s")
    assert ok


def test_criterion_02_second_order_scaling(report):
    d, v, alpha = divergence_stats(P, Q)
    coef_err = 0.0
    for eps in EPS:
        target = 2 * np.sqrt((alpha - 1) * -np.log1p(-eps))
        for n in NS:
            rep = bht_converse_suite(P, Q, n, eps)["smoothing"]
            coef_err = max(coef_err, abs(rep.second_order / np.sqrt(n) - target))
    coef_ok = coef_err <= 1e-9

    n = 10_000
    ratios = {}
    for eps in EPS:
        exact = -np_frontier(P, Q, n, Type1AtMost(eps)).log_type2
        ratios[eps] = ((exact - n * d) / np.sqrt(n)) / (gaussian_q_inverse(1 - eps) * np.sqrt(v))
    strassen_ok = all(abs(r - 1) <= 0.15 for r in ratios.values())

    scaled = []
    for n in (10**2, 10**3, 10**4, 10**5, 10**6):
        rep = bht_converse_suite(P, Q, n, 0.1)["blowup"]
        scaled.append((rep.total - n * d) / (np.sqrt(n) * np.log(n) ** 1.5))
    bracket_ok = all(0.1 <= s <= 10 for s in scaled)

    detail = (
        f"smoothing sqrt(n) coefficient max error {coef_err:.2e}; "
        f"exact/Strassen second-order ratios at n=1e4 "
        + ", ".join(f"eps={e}: {r:.3f}" for e, r in ratios.items())
        + f"; blowup scaled {', '.join(f'{s:.3f}' for s in scaled)}"
    )
    ok = coef_ok and strassen_ok and bracket_ok
    report("criterion 2 (second-order scaling)", ok, detail)
    assert coef_ok, detail
    assert bracket_ok, detail
    assert strassen_ok, detail


def test_criterion_03_blowup_and_counting_lemmas(report):
    start = time.perf_counter()
    cert = blowup_certification(12, 1000, (0.5, 1.0, 2.0), seed=2024)
    elapsed = time.perf_counter() - start
    radius = blowup_lemma_numbers(c=10.0, n=5e9, log_inv_p_a=100.0).radius
    ok = cert.lemma_violations == 0 and cert.counting_violations == 0 and elapsed < 60.0 and radius == 1e6
    report(
        "criterion 3 (blowing-up and counting lemmas)",
        ok,
        f"{cert.lemma_violations}/{cert.checks} lemma and {cert.counting_violations}/{cert.counting_checks} counting violations, "
        f"{elapsed:.1f}s; worked radius {radius:.0f}",
    )
    assert ok


def test_criterion_04_reverse_hypercontractivity(report):
    start = time.perf_counter()
    grid = [(p, q, off) for p in (0.2, 0.5, 0.8, 0.95) for q in (0.0, 0.05, 0.1, 0.15) if q < p for off in (0.0, 0.1, 1.0)]
    rng = make_generator(77)
    groups, per_group, n = 100, 100, 6
    violations = checks = 0
    worst = np.inf
    for _ in range(groups):
        laws = [np.array([b, 1 - b]) for b in rng.uniform(0.02, 0.98, size=n)]
        f = rng.uniform(size=(per_group,) + (2,) * n) ** rng.uniform(0.2, 10.0, size=(per_group,) + (1,) * n)
        f *= rng.uniform(size=f.shape) < rng.uniform(0.3, 1.0)  # sparse supports
        for p, q, off in grid:
            lhs, rhs, holds = rhc_check_batch(f, laws, p, q, rhc_time_threshold(p, q) + off)
            violations += int((~holds).sum())
            checks += holds.size
            pos = rhs > 0
            worst = min(worst, float(np.min(lhs[pos] / rhs[pos])) if pos.any() else np.inf)
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 30.0
    report("criterion 4 (reverse hypercontractivity)", ok, f"{violations}/{checks} violations over {groups * per_group} functions, min ratio {worst:.6f}, {elapsed:.1f}s")
    assert ok


def test_criterion_05_bl_duality_and_tensorization(report):
    rng = make_generator(5)
    worst_gap = worst_tens = 0.0
    dstar_bad = 0
    for c in (0.5, 1.5, 3.0):
        for _ in range(50):
            w = FiniteChannel(rng.dirichlet(np.ones(2), size=2))
            mu, nu = rng.dirichlet(np.ones(2)), rng.dirichlet(np.ones(2))
            dual = bl_divergence_dual(mu, w, nu, c).value
            worst_gap = max(worst_gap, abs(dual - bl_divergence_primal_oracle(mu, w, nu, c).value))
            q_x = 0.05 + 0.9 * mu
            dstar_bad += dstar_envelope(q_x, w, nu, c).value > bl_divergence_dual(q_x, w, nu, c).value + 1e-9
        for _ in range(5):
            w = FiniteChannel(rng.dirichlet(np.ones(2), size=2))
            mu, nu = rng.dirichlet(np.ones(2)), rng.dirichlet(np.ones(2))
            single = bl_divergence_dual(mu, w, nu, c).value
            double = bl_divergence_dual(np.kron(mu, mu), w.power(2), np.kron(nu, nu), c, restarts=32).value
            worst_tens = max(worst_tens, abs(double - 2 * single))

    closed = 0.0
    for qx in ([0.3, 0.7], [0.5, 0.5], [0.1, 0.9]):
        qx = np.array(qx)
        h = float(-(qx * np.log(qx)).sum())
        for c in (1.5, 2.0, 3.0):
            closed = max(closed, abs(dstar_envelope(qx, FiniteChannel.identity(2), qx, c).value - (c - 1) * h))
        for rate in (0.0, 0.1, 0.4, 1.0):
            theta = dstar_envelope(qx, FiniteChannel.identity(2), None, 0.0, ThetaOfR(rate)).value
            closed = max(closed, abs(theta - min(rate, h)))
    ok = worst_gap <= 1e-4 and worst_tens <= 1e-5 and dstar_bad == 0 and closed <= 1e-6
    report(
        "criterion 5 (BL duality, tensorization, closed forms)",
        ok,
        f"dual vs grid {worst_gap:.2e}, tensorization {worst_tens:.2e}, d*>d on {dstar_bad}, closed forms {closed:.2e}",
    )
    assert ok


def test_criterion_06_image_size_soundness(report):
    start = time.perf_counter()
    w = FiniteChannel([[0.8, 0.2], [0.3, 0.7]])
    reps = [soundness_check_image_size(w, [0.5, 0.5], c, n, trials=1000, seed=10 * n + int(c)) for n in (1, 2) for c in (1.5,)]
    elapsed = time.perf_counter() - start
    bad = sum(r.violations for r in reps)
    ok = bad == 0 and elapsed < 60.0
    report(
        "criterion 6 (image-size soundness)",
        ok,
        f"{bad} violations; informative trials {[r.informative for r in reps]}; max excess {max(r.max_excess for r in reps):.3g}; {elapsed:.1f}s",
    )
    assert ok


def test_criterion_07_gaussian_side_info(report):
    n, eps = 100, 0.1
    worst = 0.0
    for rho in np.linspace(0.05, 0.95, 10):
        for dist in np.linspace(0.05, 0.95, 10):
            for ln_m1 in np.linspace(1.0, 300.0, 10):
                rep = side_info_converse_gaussian(GaussianPair(rho), dist, ln_m1, n, eps)
                worst = max(worst, abs(rep.first_order - rep.params["dual_first_order"]))
    zero = side_info_converse_gaussian(GaussianPair(0.0), 0.3, 40.0, n, eps).first_order
    inf = side_info_converse_gaussian(GaussianPair(0.6), 0.3, np.inf, n, eps).first_order
    limits_ok = zero == n / 2 * np.log(1 / 0.3) and inf == n / 2 * np.log((1 - 0.36) / 0.3)
    ok = worst <= 1e-9 and limits_ok
    report("criterion 7 (Gaussian side-info first order)", ok, f"closed form vs dual max gap {worst:.2e} on 1000 points; limits exact: {limits_ok}")
    assert ok


def test_criterion_08_dp_impossibility(report):
    start = time.perf_counter()
    _, v, _ = divergence_stats(P, Q)
    rows = dp_impossibility_experiment(P, Q, 1.0, [100, 1000, 10_000])
    elapsed = time.perf_counter() - start
    ref = np.sqrt(v / 4)
    gaps = [r.normalized_gap for r in rows]
    ok = all(g > 0 for g in gaps) and gaps[-1] >= 0.9 * ref and elapsed < 30.0
    report("criterion 8 (data-processing impossibility)", ok, f"gaps {', '.join(f'{g:.4f}' for g in gaps)}; 0.9 sqrt(V/4) = {0.9 * ref:.4f}; {elapsed:.2f}s")
    assert ok


def test_criterion_09_tail_bounds(report):
    bad = 0
    for n in range(1, 31):
        for p in (0.05, 0.2, 0.5, 0.7, 0.95):
            for eps in (0.05, 0.25, 0.5, 1.0, 2.0):
                k = int(np.ceil((1 + eps) * n * p - 1e-12))
                bad += binom.sf(k - 1, n, p) > chernoff_bernoulli(p, eps, n) + 1e-15
    rng = make_generator(9)
    chi_bad = 0
    for n in (1, 5, 20, 100):
        samples = rng.chisquare(n, size=1_000_000)
        for t in (0.5, 1.0, np.log(20), 5.0):
            thr, bound = chi_square_deviation(n, t)
            tail = np.mean(np.abs(samples - n) >= thr)
            se = np.sqrt(max(tail * (1 - tail), 1e-12) / samples.size)
            chi_bad += tail - 3 * se > bound
    ok = bad == 0 and chi_bad == 0
    report("criterion 9 (tail bounds)", ok, f"Chernoff exceeded on {bad} exact grid points; chi-square exceeded on {chi_bad} Monte Carlo points")
    assert ok


def test_criterion_10_determinism(report, tmp_path):
    mismatched = []
    configs = sorted(CONFIGS.glob("*.conf"))
    for cfg in configs:
        config = load_config(cfg)
        first = run_experiment(config, base_dir=tmp_path / "a")[0].read_bytes()
        second = run_experiment(config, base_dir=tmp_path / "b")[0].read_bytes()
        if first != second:
            mismatched.append(cfg.name)
    shutil.rmtree(tmp_path, ignore_errors=True)
    ok = not mismatched and len(configs) == 9
    report("criterion 10 (determinism)", ok, f"{len(configs) - len(mismatched)}/{len(configs)} shipped configs byte-identical on re-run")
    assert ok
