"""Acceptance suite: one test per release criterion, each at its stated
tolerance, printing a PASS line on success (run with -s or -v to see them).
"""

import math
import time

import numpy as np
import pytest

from hybridqkd import (
    EstimateSet,
    constrained_min_rate,
    eta_from_loss_db,
    feasible_region,
    gaussian_rate,
    gaussian_sector_matrices,
    gaussian_stats,
    invariant_state,
    lambda_coeffs,
    optimize_tau,
    passive_rate,
    pure_loss_asymptote,
    pure_loss_rate,
    qi_rate,
    rel_entropy_closed,
    rel_entropy_numeric,
    schwinger_total,
    sector_c,
)
from hybridqkd.invariant import sector_c_affine
from hybridqkd.rates import sector_rel_entropy

from test_invariant import fixture_matrix


def _report(name):
    print(f"\n[ACCEPTANCE] PASS {name}")


def test_optimal_thresholds_pure_loss():
    targets = [(1.0, 0.8012), (0.8, 0.9458), (0.6, 1.0779), (0.4, 1.2159), (0.2, 1.3768)]
    start = time.perf_counter()
    for eta, ref in targets:
        tau_opt, _ = optimize_tau(
            lambda t: pure_loss_rate(eta, lambda_coeffs(t, 1)).rate, 0.1, 4.0
        )
        assert tau_opt == pytest.approx(ref, abs=0.01), f"eta={eta}"
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"threshold optimisation took {elapsed:.2f}s"
    _report(f"optimal thresholds (5 transmissivities, {elapsed * 1e3:.0f} ms)")


def test_long_distance_scaling():
    coeffs = lambda_coeffs(1.59, 4)
    eta = 1e-3
    ratio = pure_loss_rate(eta, coeffs).rate / eta**2
    asym = pure_loss_asymptote(coeffs)
    assert ratio == pytest.approx(asym, rel=0.01)
    tau_star, _ = optimize_tau(
        lambda t: pure_loss_asymptote(lambda_coeffs(t, 1)), 0.1, 5.0
    )
    assert tau_star == pytest.approx(1.59, abs=0.02)
    _report(f"long-distance scaling (r/eta^2 -> {asym:.4f}, argmax tau {tau_star:.3f})")


def test_oracle_equivalence_closed_vs_numeric():
    start = time.perf_counter()
    worst = 0.0
    count = 0
    for tau in (0.5, 0.8, 1.0, 1.5, 2.0):
        coeffs = lambda_coeffs(tau, 8)
        for j in range(4):
            for f in (0.0, 0.25, 0.5, 0.75, 1.0):
                closed = rel_entropy_closed(j, f, coeffs)
                numeric = rel_entropy_numeric(invariant_state(j, f), coeffs)
                worst = max(worst, abs(closed - numeric))
                count += 1
    elapsed = time.perf_counter() - start
    assert count == 100
    assert worst < 1e-9
    assert elapsed < 1.0, f"equivalence grid took {elapsed:.2f}s"
    _report(
        f"closed-form vs eigensolver entropy ({count} points, max dev {worst:.1e}, "
        f"{elapsed * 1e3:.0f} ms)"
    )


def test_invariant_fixtures_and_commutators():
    rng = np.random.default_rng(1234)
    worst_fix = 0.0
    for j in (1, 2, 3):
        for f in rng.uniform(0.0, 1.0, 20):
            built = invariant_state(j, float(f)).rho
            worst_fix = max(worst_fix, float(np.max(np.abs(built - fixture_matrix(j, f)))))
    assert worst_fix < 1e-12
    worst_comm = 0.0
    for j in range(0, 9):
        gens = (schwinger_total(j, "z"), schwinger_total(j, "plus"))
        for f in rng.uniform(0.0, 1.0, 3):
            rho = invariant_state(j, float(f)).rho
            for g in gens:
                worst_comm = max(worst_comm, float(np.linalg.norm(g @ rho - rho @ g)))
    assert worst_comm < 1e-12
    _report(
        f"invariant-state fixtures (max dev {worst_fix:.1e}) and generator "
        f"commutators to j=8 (max {worst_comm:.1e})"
    )


def _zero_loss_threshold(rate_at_db, lo_db=0.0, hi_db=40.0):
    """Largest loss with positive rate, by bisection on the dB axis."""
    if rate_at_db(hi_db) > 0:
        return hi_db
    for _ in range(40):
        mid = (lo_db + hi_db) / 2.0
        if rate_at_db(mid) > 0:
            lo_db = mid
        else:
            hi_db = mid
    return (lo_db + hi_db) / 2.0


def test_qi_consistency_and_dominance():
    coeffs = lambda_coeffs(1.0, 2)
    for eta in np.linspace(0.1, 1.0, 10):
        ours = passive_rate(eta, 1.0, coeffs).rate_signed
        qi = qi_rate(eta, 0.0, coeffs).rate_signed
        assert abs(ours - qi) < 1e-9

    thresholds = {}
    for ed in (0.01, 0.05):
        f1 = 1.0 - 1.5 * ed

        def ours_at(db):
            eta = eta_from_loss_db(db)
            return optimize_tau(
                lambda t: passive_rate(eta, f1, lambda_coeffs(t, 2)).rate_signed,
                0.2, 2.0,
            )[1]

        def qi_at(db):
            eta = eta_from_loss_db(db)
            return optimize_tau(
                lambda t: qi_rate(eta, ed, lambda_coeffs(t, 2)).rate_signed,
                0.2, 2.0,
            )[1]

        for db in np.arange(0.0, 16.0, 1.0):
            r_ours, r_qi = ours_at(db), qi_at(db)
            if r_ours > 0 or r_qi > 0:
                assert r_ours >= r_qi - 1e-12, f"Ed={ed}, loss={db} dB"
        t_ours = _zero_loss_threshold(ours_at)
        t_qi = _zero_loss_threshold(qi_at)
        assert t_ours > t_qi + 0.1, f"Ed={ed}: {t_ours} vs {t_qi}"
        thresholds[ed] = (t_ours, t_qi)
    _report(
        "virtual-detector comparison (equal at Ed=0; loss thresholds "
        + ", ".join(
            f"Ed={ed}: {a:.1f} dB vs {b:.1f} dB" for ed, (a, b) in thresholds.items()
        )
    )


def test_gaussian_noise_tolerance():
    def optimised_rate(db, n_var):
        eta = eta_from_loss_db(db)
        return optimize_tau(
            lambda t: gaussian_rate(eta, n_var, lambda_coeffs(t, 24)).rate_signed,
            0.2, 2.0,
        )[1]

    crossing = _zero_loss_threshold(lambda db: optimised_rate(db, 1e-4), 10.0, 25.0)
    assert 16.0 <= crossing <= 18.0, f"zero crossing at {crossing:.2f} dB"

    for db in (0.0, 2.5, 5.0, 7.5, 10.0):
        eta = eta_from_loss_db(db)
        tau_opt, r_pure = optimize_tau(
            lambda t: pure_loss_rate(eta, lambda_coeffs(t, 1)).rate, 0.2, 2.0
        )
        r_gauss = gaussian_rate(eta, 1e-6, lambda_coeffs(tau_opt, 24)).rate
        assert abs(r_gauss - r_pure) / r_pure < 1e-3, f"loss={db} dB"
    _report(f"gaussian noise tolerance (N=1e-4 crossing at {crossing:.2f} dB)")


def test_gaussian_statistics_oracle():
    worst = 0.0
    for eta in np.linspace(0.05, 1.0, 10):
        for n_var in np.logspace(-6, -0.5, 10):
            stats = gaussian_stats(eta, float(n_var))
            for j in range(4):
                mat, trace = gaussian_sector_matrices(eta, float(n_var), j)
                worst = max(worst, abs(trace - stats.P[j]))
                if j >= 1:
                    ref = invariant_state(j, float(stats.f[j - 1])).rho
                    worst = max(worst, float(np.max(np.abs(mat / trace - ref))))
    assert worst < 1e-10
    _report(f"gaussian statistics vs sector matrices (10x10 grid, max dev {worst:.1e})")


def test_constrained_minimizer():
    coeffs = lambda_coeffs(1.0, 24)
    region = feasible_region(coeffs)
    for eta, f1_true in ((0.3, 0.85), (0.7, 0.5), (0.9, 1.0)):
        q = region.Q_of_eta(eta)
        c = region.c_of(eta, f1_true)
        est = EstimateSet(Q_hat=q, P=(1 - eta, eta), c_hat=c)
        br = constrained_min_rate(est, coeffs)
        assert br.f_opt[0] == pytest.approx(f1_true, abs=1e-4)
        ref = passive_rate(eta, f1_true, coeffs)
        assert br.rate_signed == pytest.approx(ref.rate_signed, abs=1e-6)

    # minimality certificate on a three-sector instance
    rng = np.random.default_rng(77)
    p = (0.3, 0.4, 0.2, 0.1)
    c_hat = p[0] * sector_c(coeffs, 0, 0.0) + sum(
        p[j] * sector_c(coeffs, j, 0.6) for j in (1, 2, 3)
    )
    est = EstimateSet(Q_hat=0.5, P=p, c_hat=c_hat)
    br = constrained_min_rate(est, coeffs)
    best = sum(br.D_terms[1:])
    affine = {j: sector_c_affine(coeffs, j) for j in (1, 2, 3)}
    residual = c_hat - p[0] * sector_c(coeffs, 0, 0.0)
    checked = 0
    while checked < 100:
        f1, f2 = rng.uniform(0.0, 1.0, 2)
        rem = residual - p[1] * (affine[1][0] + affine[1][1] * f1)
        rem -= p[2] * (affine[2][0] + affine[2][1] * f2)
        f3 = (rem / p[3] - affine[3][0]) / affine[3][1]
        if not (0.0 <= f3 <= 1.0):
            continue
        checked += 1
        obj = sum(
            p[j] * sector_rel_entropy(coeffs, j, f)
            for j, f in zip((1, 2, 3), (f1, f2, f3))
        )
        assert best <= obj + 1e-6
    _report("constrained minimiser (k=1 closed form match; 100-point certificate)")


def test_feasible_region_containment():
    coeffs = lambda_coeffs(1.0, 2)
    region = feasible_region(coeffs)
    etas = np.linspace(0.0, 1.0, 200)
    f1s = np.linspace(0.0, 1.0, 200)
    gap_lo = gap_hi = math.inf
    for eta in etas:
        q = region.Q_of_eta(eta)
        assert region.Q_min - 1e-12 <= q <= region.Q_max + 1e-12
        lo, hi = region.c_min(eta), region.c_max(eta)
        cs = np.array([region.c_of(eta, f) for f in f1s])
        assert np.all(cs >= lo - 1e-12) and np.all(cs <= hi + 1e-12)
        gap_lo = min(gap_lo, float(np.min(cs - lo)))
        gap_hi = min(gap_hi, float(np.min(hi - cs)))
    assert gap_lo < 1e-6 and gap_hi < 1e-6
    _report("feasible-region containment (200x200 scan, boundaries attained)")
