"""Self-contained oracle suites behind the `verify` CLI subcommand.

Each suite cross-checks one analytic layer against an independent route:
closed forms against the eigensolver, printed fixture matrices against
the general constructor, inversion formulas against round trips.  The
suites return (name, ok, detail) so the CLI can print one line each and
exit nonzero on any failure.

`perturb_lambda` feeds a deliberately corrupted lambda table to the
closed-form side only; it exists so the sensitivity of the equivalence
suites can be demonstrated (a 1e-6 perturbation must break them).
"""

from __future__ import annotations

import math

import numpy as np

from . import channels, invariant, keymap
from .fock import op_M, op_R, schwinger_total, partial_trace_alice, partial_trace_bob
from .numerics import ThresholdCoeffs, lambda_coeffs

__all__ = ["run_suites", "SUITE_NAMES"]

_FIXTURE_F = np.linspace(0.0, 1.0, 20)


def _perturbed(coeffs: ThresholdCoeffs, eps: float) -> ThresholdCoeffs:
    if eps == 0.0:
        return coeffs
    lam = coeffs.lam.copy()
    lam[1] += eps
    return ThresholdCoeffs(tau=coeffs.tau, lam=lam)


def _suite_operator_completeness(_eps):
    worst = 0.0
    for tau in (0.5, 1.0, 2.0):
        coeffs = lambda_coeffs(tau, 8)
        for j in range(6):
            for mode in ("H", "V"):
                s = op_R(coeffs, j, "R0", mode).diag + op_R(coeffs, j, "R1", mode).diag
                worst = max(worst, float(np.max(np.abs(s - 1.0))))
            mh = op_M(coeffs, j, "MH").diag
            mv = op_M(coeffs, j, "MV").diag
            if np.any(mh < 0) or np.any(mv < 0) or np.any(mh + mv > 1.0):
                return False, "POVM element out of [0, 1]"
            worst = max(worst, float(np.max(np.abs(mh - mv[::-1]))))
    return worst < 1e-15, f"max deviation {worst:.2e}"


def _suite_cg_orthonormality(_eps):
    worst = 0.0
    for j in range(1, 9):
        big, small = invariant.cg_basis(j)
        allv = np.vstack([big, small])
        gram = allv @ allv.T
        worst = max(worst, float(np.max(np.abs(gram - np.eye(2 * (j + 1))))))
    return worst < 1e-12, f"max |Gram - I| = {worst:.2e}"


def _suite_commutators(_eps):
    rng = np.random.default_rng(20240917)
    worst = 0.0
    for j in range(0, 9):
        gen_z = schwinger_total(j, "z")
        gen_p = schwinger_total(j, "plus")
        for f in rng.uniform(0.0, 1.0, 3):
            rho = invariant.invariant_state(j, float(f)).rho
            for gen in (gen_z, gen_p):
                comm = gen @ rho - rho @ gen
                worst = max(worst, float(np.linalg.norm(comm)))
            worst = max(worst, abs(float(np.trace(rho)) - 1.0))
            worst = max(
                worst,
                float(np.max(np.abs(partial_trace_bob(rho) - np.eye(2) / 2.0))),
            )
            marg = partial_trace_alice(rho)
            worst = max(
                worst, float(np.max(np.abs(marg - np.eye(j + 1) / (j + 1))))
            )
    return worst < 1e-12, f"max commutator/marginal deviation {worst:.2e}"


def _fixture_matrix(j: int, f: float) -> np.ndarray:
    if j == 1:
        return np.array(
            [
                [2 * f + 1, 0, 0, 4 * f - 1],
                [0, 2 * (1 - f), 0, 0],
                [0, 0, 2 * (1 - f), 0],
                [4 * f - 1, 0, 0, 2 * f + 1],
            ]
        ) / 6.0
    if j == 2:
        s2 = math.sqrt(2.0)
        off = s2 * (3 * f - 1)
        return np.array(
            [
                [3 * f + 1, 0, 0, 0, off, 0],
                [0, 2, 0, 0, 0, off],
                [0, 0, 3 * (1 - f), 0, 0, 0],
                [0, 0, 0, 3 * (1 - f), 0, 0],
                [off, 0, 0, 0, 2, 0],
                [0, off, 0, 0, 0, 3 * f + 1],
            ]
        ) / 12.0
    s3 = math.sqrt(3.0)
    a, b = 12 * f + 3, s3 * (8 * f - 3)
    c, d = 4 * f + 6, 16 * f - 6
    e, g = 9 - 4 * f, 12 * (1 - f)
    m = np.zeros((8, 8))
    m[[0, 1, 2, 3, 4, 5, 6, 7], [0, 1, 2, 3, 4, 5, 6, 7]] = [a, c, e, g, g, e, c, a]
    m[0, 5] = m[5, 0] = b
    m[1, 6] = m[6, 1] = d
    m[2, 7] = m[7, 2] = b
    return m / 60.0


def _suite_fixture_matrices(_eps):
    rng = np.random.default_rng(7)
    worst = 0.0
    for j in (1, 2, 3):
        for f in rng.uniform(0.0, 1.0, 20):
            built = invariant.invariant_state(j, float(f)).rho
            worst = max(worst, float(np.max(np.abs(built - _fixture_matrix(j, f)))))
    return worst < 1e-12, f"max |built - printed| = {worst:.2e}"


def _suite_entropy_closed_vs_numeric(eps):
    worst = 0.0
    for tau in (0.5, 0.8, 1.0, 1.5, 2.0):
        coeffs = lambda_coeffs(tau, 8)
        bad = _perturbed(coeffs, eps)
        for j in range(4):
            for f in (0.0, 0.25, 0.5, 0.75, 1.0):
                closed = keymap.rel_entropy_closed(j, f, bad)
                numeric = keymap.rel_entropy_numeric(
                    invariant.invariant_state(j, f), coeffs
                )
                worst = max(worst, abs(closed - numeric))
    return worst < 1e-9, f"max |closed - numeric| = {worst:.2e} over 100 points"


def _suite_yield_c_paths(eps):
    worst = 0.0
    for tau in (0.5, 1.0, 2.0):
        coeffs = lambda_coeffs(tau, 8)
        bad = _perturbed(coeffs, eps)
        for j in range(4):
            for f in (0.0, 0.5, 1.0):
                state = invariant.invariant_state(j, f)
                q_num, c_num = keymap.gain_and_c_numeric(state, coeffs)
                worst = max(worst, abs(q_num - invariant.sector_yield(bad, j)))
                worst = max(worst, abs(c_num - invariant.sector_c(bad, j, f)))
    return worst < 1e-12, f"max |numeric - closed| = {worst:.2e}"


def _suite_passive_round_trip(_eps):
    coeffs = lambda_coeffs(1.0, 4)
    region = channels.feasible_region(coeffs)
    worst = 0.0
    for eta in np.linspace(0.05, 1.0, 12):
        for f1 in np.linspace(0.0, 1.0, 12):
            q = region.Q_of_eta(eta)
            c = region.c_of(eta, f1)
            eta_back, f1_back = channels.passive_attack_params(q, c, coeffs)
            worst = max(worst, abs(eta_back - eta), abs(f1_back - f1))
    return worst < 1e-12, f"max round-trip error {worst:.2e}"


def _suite_gaussian_stats_vs_matrices(_eps):
    worst = 0.0
    for eta in np.linspace(0.05, 1.0, 10):
        for n_var in np.logspace(-6, -0.5, 10):
            stats = channels.gaussian_stats(eta, n_var)
            for j in range(4):
                mat, trace = channels.gaussian_sector_matrices(eta, n_var, j)
                worst = max(worst, abs(trace - stats.P[j]))
                if j >= 1:
                    rho = mat / trace
                    ref = invariant.invariant_state(j, float(stats.f[j - 1])).rho
                    worst = max(worst, float(np.max(np.abs(rho - ref))))
    return worst < 1e-10, f"max |stats - matrices| = {worst:.2e}"


def _suite_region_containment(_eps):
    coeffs = lambda_coeffs(1.0, 4)
    region = channels.feasible_region(coeffs)
    etas = np.linspace(0.0, 1.0, 100)
    f1s = np.linspace(0.0, 1.0, 100)
    for eta in etas:
        q = region.Q_of_eta(eta)
        if not (region.Q_min - 1e-12 <= q <= region.Q_max + 1e-12):
            return False, f"Q(eta={eta}) escapes [Q_min, Q_max]"
        lo, hi = region.c_min(eta), region.c_max(eta)
        cs = np.array([region.c_of(eta, f1) for f1 in f1s])
        if np.any(cs < lo - 1e-12) or np.any(cs > hi + 1e-12):
            return False, f"c escapes bounds at eta={eta}"
    return True, "100x100 scan contained"


SUITES = [
    ("operator-completeness", _suite_operator_completeness),
    ("cg-orthonormality", _suite_cg_orthonormality),
    ("invariance-commutators", _suite_commutators),
    ("fixture-matrices", _suite_fixture_matrices),
    ("entropy-closed-vs-numeric", _suite_entropy_closed_vs_numeric),
    ("yield-c-closed-vs-numeric", _suite_yield_c_paths),
    ("passive-round-trip", _suite_passive_round_trip),
    ("gaussian-stats-vs-matrices", _suite_gaussian_stats_vs_matrices),
    ("feasible-region-containment", _suite_region_containment),
]

SUITE_NAMES = [name for name, _ in SUITES]


def run_suites(perturb_lambda: float = 0.0):
    """Run every suite; returns a list of (name, ok, detail)."""
    results = []
    for name, fn in SUITES:
        try:
            ok, detail = fn(perturb_lambda)
        except Exception as exc:  # a crashed suite is a failed suite
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results
