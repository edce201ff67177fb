import numpy as np
import pytest

from hybridqkd import (
    BoundInvalidError,
    EstimateSet,
    FeasibilityError,
    constrained_min_rate,
    feasible_region,
    gaussian_rate,
    gaussian_stats,
    lambda_coeffs,
    optimize_tau,
    passive_rate,
    pure_loss_rate,
    sector_c,
    sector_yield,
    tail_bounds,
)
from hybridqkd.invariant import sector_c_affine
from hybridqkd.rates import sector_rel_entropy


class TestTailBounds:
    def test_valid_at_tau_one(self, tau1):
        p = [0.2, 0.5, 0.2, 0.05]
        q3, c_tail = tail_bounds(p, tau1, 3)
        direct = sum(p[j] * sector_yield(tau1, j) for j in range(4))
        assert q3 == pytest.approx(direct + 0.05 * sector_yield(tau1, 4), abs=1e-14)
        assert c_tail == pytest.approx(0.05 * (1 - tau1.lam[0]) / 2, abs=1e-14)
        assert q3 >= direct

    def test_no_tail_mass(self, tau1):
        p = [0.3, 0.7, 0.0, 0.0]
        q3, c_tail = tail_bounds(p, tau1, 3)
        assert q3 == pytest.approx(
            0.3 * sector_yield(tau1, 0) + 0.7 * sector_yield(tau1, 1), abs=1e-14
        )
        assert c_tail == 0.0

    def test_valid_at_tau_two_k3(self):
        coeffs = lambda_coeffs(2.0, 24)
        q3, _ = tail_bounds([0.25, 0.25, 0.25, 0.15], coeffs, 3)
        assert q3 > 0

    def test_invalid_at_tau_two_k1(self):
        # Y_j still rises past j = 2 at tau = 2, so the k = 1 bound is out
        coeffs = lambda_coeffs(2.0, 24)
        with pytest.raises(BoundInvalidError, match="j=3"):
            tail_bounds([0.5, 0.4], coeffs, 1)

    def test_invalid_at_large_tau_k3(self):
        coeffs = lambda_coeffs(2.5, 24)
        with pytest.raises(BoundInvalidError):
            tail_bounds([0.25, 0.25, 0.25, 0.15], coeffs, 3)


class TestConstrainedMin:
    def test_passive_line_k1(self, tau1):
        # on the one-photon manifold the constraint pins f1 uniquely
        region = feasible_region(tau1)
        for eta in (0.25, 0.6, 0.9):
            for f1_true in (0.3, 0.72, 1.0):
                q = region.Q_of_eta(eta)
                c = region.c_of(eta, f1_true)
                est = EstimateSet(Q_hat=q, P=(1 - eta, eta), c_hat=c)
                br = constrained_min_rate(est, tau1)
                assert br.f_opt[0] == pytest.approx(f1_true, abs=1e-4)
                ref = passive_rate(eta, f1_true, tau1)
                assert br.rate_signed == pytest.approx(ref.rate_signed, abs=1e-6)

    def test_minimality_certificate_k3(self, tau1):
        rng = np.random.default_rng(42)
        p = (0.35, 0.35, 0.2, 0.1)
        c_hat = p[0] * sector_c(tau1, 0, 0.0) + sum(
            p[j] * sector_c(tau1, j, 0.55) for j in (1, 2, 3)
        )
        est = EstimateSet(Q_hat=0.5, P=p, c_hat=c_hat)
        br = constrained_min_rate(est, tau1)
        best_objective = sum(br.D_terms[1:])
        affine = {j: sector_c_affine(tau1, j) for j in (1, 2, 3)}
        residual = c_hat - p[0] * sector_c(tau1, 0, 0.0)
        found = 0
        while found < 100:
            f1, f2 = rng.uniform(0.0, 1.0, 2)
            rem = residual - p[1] * (affine[1][0] + affine[1][1] * f1)
            rem -= p[2] * (affine[2][0] + affine[2][1] * f2)
            f3 = (rem / p[3] - affine[3][0]) / affine[3][1]
            if not (0.0 <= f3 <= 1.0):
                continue
            found += 1
            obj = sum(
                p[j] * sector_rel_entropy(tau1, j, f)
                for j, f in zip((1, 2, 3), (f1, f2, f3))
            )
            assert best_objective <= obj + 1e-6

    def test_monotone_in_c_hat(self, tau1):
        # The inequality form is nonincreasing in the error budget by set
        # inclusion.  The equality shortcut coincides with it while D still
        # falls with growing c (sector QBERs below 1/2); past that valley
        # the equality overconstrains, which is why the flag exists.
        p = (0.4, 0.4, 0.15, 0.05)
        lo = p[0] * sector_c(tau1, 0, 0.0) + sum(
            p[j] * sector_c(tau1, j, 1.0) for j in (1, 2, 3)
        )
        hi = p[0] * sector_c(tau1, 0, 0.0) + sum(
            p[j] * sector_c(tau1, j, 0.0) for j in (1, 2, 3)
        )
        targets = np.linspace(lo + 1e-9, hi - 1e-9, 8)
        ineq, eq = [], []
        for c_hat in targets:
            est = EstimateSet(Q_hat=0.5, P=p, c_hat=float(c_hat))
            eq.append(sum(constrained_min_rate(est, tau1).D_terms))
            ineq.append(
                sum(constrained_min_rate(est, tau1, use_inequality=True).D_terms)
            )
        assert np.all(np.diff(ineq) < 1e-6)
        # below the valley floor the two forms agree and both decrease
        floor = int(np.argmin(eq))
        assert floor >= 2
        np.testing.assert_allclose(eq[: floor + 1], ineq[: floor + 1], atol=2e-4)
        assert np.all(np.diff(eq[: floor + 1]) < 1e-9)

    def test_infeasible_reports_interval(self, tau1):
        est = EstimateSet(Q_hat=0.5, P=(0.5, 0.5), c_hat=1e-6)
        with pytest.raises(FeasibilityError) as err:
            constrained_min_rate(est, tau1)
        assert err.value.c_lo is not None and err.value.c_hi is not None
        assert err.value.c_lo > 1e-6

    def test_gaussian_plug_in_dominates_minimum(self, tau1):
        # the channel's own mixing parameters are feasible, so the
        # constrained minimum cannot exceed the plug-in bound
        eta, n_var = 0.4, 1e-3
        stats = gaussian_stats(eta, n_var)
        plug = gaussian_rate(eta, n_var, tau1)
        q3, c_tail = tail_bounds(stats.P, tau1, 3)
        est = EstimateSet(Q_hat=q3, P=tuple(stats.P), c_hat=plug.c)
        br = constrained_min_rate(est, tau1)
        assert br.rate_signed <= plug.rate_signed + 1e-6

    def test_qber_form_constraint(self, tau1):
        eta = 0.6
        region = feasible_region(tau1)
        q = region.Q_of_eta(eta)
        c = region.c_of(eta, 0.8)
        q1, _ = tail_bounds((1 - eta, eta), tau1, 1)
        est = EstimateSet(Q_hat=q, P=(1 - eta, eta), E_hat=2 * c / q1)
        br = constrained_min_rate(est, tau1)
        assert br.f_opt[0] == pytest.approx(0.8, abs=1e-4)
        assert br.E == pytest.approx(2 * c / q1, abs=1e-12)

    def test_inequality_flag_never_higher(self, tau1):
        p = (0.4, 0.4, 0.15, 0.05)
        c_hat = p[0] * sector_c(tau1, 0, 0.0) + sum(
            p[j] * sector_c(tau1, j, 0.5) for j in (1, 2, 3)
        )
        est = EstimateSet(Q_hat=0.5, P=p, c_hat=c_hat)
        eq = constrained_min_rate(est, tau1)
        ineq = constrained_min_rate(est, tau1, use_inequality=True)
        # the inequality search keeps one more free axis, so compare at
        # grid resolution
        assert sum(ineq.D_terms) <= sum(eq.D_terms) + 1e-5

    def test_exactly_one_error_estimate(self):
        with pytest.raises(ValueError):
            EstimateSet(Q_hat=0.5, P=(0.5, 0.5), c_hat=0.1, E_hat=0.1)
        with pytest.raises(ValueError):
            EstimateSet(Q_hat=0.5, P=(0.5, 0.5))


class TestOptimizeTau:
    @pytest.mark.parametrize(
        "eta,ref",
        [(1.0, 0.8012), (0.8, 0.9458), (0.6, 1.0779), (0.4, 1.2159), (0.2, 1.3768)],
    )
    def test_pure_loss_thresholds(self, eta, ref):
        tau_opt, rate_opt = optimize_tau(
            lambda t: pure_loss_rate(eta, lambda_coeffs(t, 1)).rate, 0.1, 4.0
        )
        assert tau_opt == pytest.approx(ref, abs=0.01)
        assert rate_opt > 0

    def test_rescaling_invariance(self):
        fn = lambda t: pure_loss_rate(0.5, lambda_coeffs(t, 1)).rate
        t1, _ = optimize_tau(fn, 0.1, 4.0)
        t2, _ = optimize_tau(lambda t: 7.3 * fn(t), 0.1, 4.0)
        assert t1 == pytest.approx(t2, abs=2e-4)

    def test_non_unimodal_fallback(self):
        # two bumps; the global one sits on the right
        def bumpy(t):
            return np.exp(-((t - 0.5) ** 2) / 0.005) + 1.4 * np.exp(
                -((t - 3.1) ** 2) / 0.005
            )

        tau_opt, _ = optimize_tau(bumpy, 0.1, 4.0)
        assert tau_opt == pytest.approx(3.1, abs=1e-3)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            optimize_tau(lambda t: float("nan"), 0.1, 1.0)

    def test_bad_bracket(self):
        with pytest.raises(ValueError):
            optimize_tau(lambda t: t, 1.0, 0.5)
