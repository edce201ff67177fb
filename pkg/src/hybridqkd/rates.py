"""Rate assembly, the constrained minimisation over sector mixing
parameters, tail bounds for the truncated photon-number expansion, and
scalar optimisation over the detector threshold.

Given experimental estimates (gain Q, error parameter c or QBER E, and
the photon-number distribution P_0..P_k), the extractable-bits term is
lower-bounded by minimising the truncated sum of per-sector relative
entropies subject to the error constraint.  Each sector's error
parameter c_j is affine in its mixing parameter f_j, which lets one
coordinate be eliminated exactly; the remaining box is searched by a
coarse grid with two refinement passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .invariant import invariant_state, sector_c_affine, sector_yield
from .keymap import rel_entropy_closed, rel_entropy_numeric
from .numerics import ThresholdCoeffs, binary_entropy

__all__ = [
    "FeasibilityError",
    "BoundInvalidError",
    "RateBreakdown",
    "EstimateSet",
    "sector_rel_entropy",
    "tail_bounds",
    "constrained_min_rate",
    "optimize_tau",
]

GRID_POINTS = 33
REFINE_PASSES = 2
TAIL_HORIZON = 20


class FeasibilityError(ValueError):
    """The requested estimates cannot be met by any invariant state."""

    def __init__(self, message: str, c_lo: float | None = None, c_hi: float | None = None):
        super().__init__(message)
        self.c_lo = c_lo
        self.c_hi = c_hi


class BoundInvalidError(ValueError):
    """A tail bound's monotonicity precondition fails at this threshold."""


@dataclass(frozen=True)
class RateBreakdown:
    """Everything that enters one key-rate evaluation.

    rate_signed = sum(D_terms) - leak exactly; rate clamps it at zero.
    e_clamped flags a QBER above 1/2, in which case the leak term uses
    h2(1/2) = 1 (the worst case) instead of h2(E).
    """

    Q: float
    c: float
    E: float
    D_terms: tuple[float, ...]
    leak: float
    rate_signed: float
    rate: float
    tau: float
    e_clamped: bool = False
    f_opt: tuple[float, ...] = field(default=())


def assemble_breakdown(
    Q: float,
    c: float,
    D_terms: tuple[float, ...],
    tau: float,
    f_opt: tuple[float, ...] = (),
) -> RateBreakdown:
    """Build a RateBreakdown from gain, error parameter and entropy terms."""
    E = 2.0 * c / Q
    clamped = E > 0.5
    leak = Q * (1.0 if clamped else binary_entropy(E))
    signed = sum(D_terms) - leak
    return RateBreakdown(
        Q=Q,
        c=c,
        E=E,
        D_terms=tuple(D_terms),
        leak=leak,
        rate_signed=signed,
        rate=max(signed, 0.0),
        tau=tau,
        e_clamped=clamped,
        f_opt=tuple(f_opt),
    )


@dataclass(frozen=True)
class EstimateSet:
    """Experimental estimates constraining the minimisation.

    Exactly one of c_hat / E_hat must be provided.  P holds the photon
    number distribution P_0..P_k.
    """

    Q_hat: float
    P: tuple[float, ...]
    c_hat: float | None = None
    E_hat: float | None = None

    def __post_init__(self):
        if (self.c_hat is None) == (self.E_hat is None):
            raise ValueError("provide exactly one of c_hat / E_hat")
        if self.Q_hat <= 0.0:
            raise ValueError(f"gain estimate must be positive, got {self.Q_hat}")
        if any(p < -1e-15 for p in self.P) or sum(self.P) > 1.0 + 1e-12:
            raise ValueError(f"P must be a subnormalised distribution, got {self.P}")
        if self.E_hat is not None and not (0.0 <= self.E_hat <= 1.0):
            raise ValueError(f"QBER estimate must lie in [0, 1], got {self.E_hat}")

    @property
    def k(self) -> int:
        return len(self.P) - 1


def sector_rel_entropy(coeffs: ThresholdCoeffs, j: int, f: float) -> float:
    """D_j(f): closed form through the 3-photon sector, numeric above."""
    if j <= 3:
        return rel_entropy_closed(j, f, coeffs)
    return rel_entropy_numeric(invariant_state(j, f), coeffs)


def tail_bounds(
    P, coeffs: ThresholdCoeffs, k: int
) -> tuple[float, float]:
    """Upper bounds absorbing the unobserved photon-number tail.

    Returns (Q_k, c_tail): Q_k = sum_{j<=k} P_j Y_j + (1 - sum P_j) Y_{k+1}
    and c_tail = (1 - sum P_j)(1 - lambda_0)/2, the additive worst-case
    tail contribution to the error parameter.  Valid only where Y_j is
    nonincreasing beyond j = k+1, which is checked numerically up to
    j = TAIL_HORIZON.
    """
    P = np.asarray(P, dtype=float)
    if len(P) != k + 1:
        raise ValueError(f"P must have k+1 = {k + 1} entries, got {len(P)}")
    horizon = min(TAIL_HORIZON, coeffs.nmax - 1)
    if horizon < k + 1:
        raise ValueError(
            f"lambda table too short to validate the tail bound (nmax={coeffs.nmax})"
        )
    yields = [sector_yield(coeffs, j) for j in range(horizon + 2)]
    for j in range(k + 1, horizon + 1):
        if yields[j + 1] > yields[j] + 1e-15:
            raise BoundInvalidError(
                f"Y_{j + 1} > Y_{j} at tau={coeffs.tau}; the k={k} tail bound "
                "is invalid (first violation at j="
                f"{j + 1})"
            )
    mass = float(np.sum(P))
    tail = max(1.0 - mass, 0.0)
    q_k = float(np.sum(P * np.array(yields[: k + 1]))) + tail * yields[k + 1]
    c_tail = tail * (1.0 - coeffs.lam[0]) / 2.0
    return q_k, c_tail


def _grid_minimise(objective, constraint_solver, free_axes, passes=REFINE_PASSES):
    """Coarse grid plus refinement over the free coordinates.

    ``constraint_solver`` maps a free-coordinate tuple to the pivot value
    (or None when the equality constraint cannot be met inside [0, 1]).
    """
    lo = np.zeros(len(free_axes))
    hi = np.ones(len(free_axes))
    best_val, best_free, best_pivot = math.inf, None, None
    for _ in range(passes + 1):
        grids = [np.linspace(lo[i], hi[i], GRID_POINTS) for i in range(len(free_axes))]
        mesh = (
            [()]
            if not free_axes
            else [tuple(pt) for pt in np.stack(np.meshgrid(*grids), -1).reshape(-1, len(grids))]
        )
        for pt in mesh:
            pivot = constraint_solver(pt)
            if pivot is None:
                continue
            val = objective(pt, pivot)
            if val < best_val:
                best_val, best_free, best_pivot = val, pt, pivot
        if best_free is None or not free_axes:
            break
        # shrink the box to one grid cell around the incumbent
        step = (hi - lo) / (GRID_POINTS - 1)
        centre = np.array(best_free)
        lo = np.clip(centre - step, 0.0, 1.0)
        hi = np.clip(centre + step, 0.0, 1.0)
    return best_val, best_free, best_pivot


def constrained_min_rate(
    est: EstimateSet,
    coeffs: ThresholdCoeffs,
    use_inequality: bool = False,
) -> RateBreakdown:
    """Worst-case key rate compatible with the estimates.

    Minimises P_0 D_0 + sum_j P_j D_j(f_j) over f in [0,1]^k subject to
    the error-parameter constraint, then subtracts the leak term
    Q_hat h2(E).  The constraint is used in equality form by default
    (the minimum decreases with increasing error budget); pass
    use_inequality=True to keep the looser <= form.
    """
    k = est.k
    P = np.asarray(est.P, dtype=float)
    lam0 = coeffs.lam[0]
    c0 = lam0 * (1.0 - lam0) / 2.0
    d0 = 2.0 * lam0 * (1.0 - lam0)

    if est.c_hat is not None:
        c_target = est.c_hat
        e_used = 2.0 * est.c_hat / est.Q_hat
    else:
        q_k, _ = tail_bounds(P, coeffs, k)
        c_target = est.E_hat * q_k / 2.0
        e_used = est.E_hat

    affine = {j: sector_c_affine(coeffs, j) for j in range(1, k + 1)}
    active = [j for j in range(1, k + 1) if P[j] > 0.0]

    # attainable range of P0 c0 + sum_j P_j c_j(f_j); slopes are negative
    c_lo = P[0] * c0 + sum(P[j] * (affine[j][0] + affine[j][1]) for j in active)
    c_hi = P[0] * c0 + sum(P[j] * affine[j][0] for j in active)
    tol = 1e-12 * max(1.0, abs(c_target))
    if c_target < c_lo - tol or (not use_inequality and c_target > c_hi + tol):
        raise FeasibilityError(
            f"error target c={c_target:.6g} outside the attainable interval "
            f"[{c_lo:.6g}, {c_hi:.6g}]",
            c_lo=c_lo,
            c_hi=c_hi,
        )

    @lru_cache(maxsize=None)
    def _d_cached(j: int, f: float) -> float:
        return sector_rel_entropy(coeffs, j, f)

    # grid axes revisit the same f values thousands of times per mesh
    d_funcs = {j: (lambda f, jj=j: _d_cached(jj, f)) for j in active}

    if not active:
        f_opt: tuple[float, ...] = tuple(1.0 for _ in range(k))
        d_terms = [P[0] * d0] + [0.0] * k
        return assemble_breakdown(
            est.Q_hat, c_target, tuple(d_terms), coeffs.tau, f_opt
        )

    if use_inequality:
        # no elimination: all active coordinates free, constraint c <= target
        free = active

        def solver_ineq(pt):
            c_val = P[0] * c0 + sum(
                P[j] * (affine[j][0] + affine[j][1] * f) for j, f in zip(free, pt)
            )
            return 0.0 if c_val <= c_target + tol else None

        def objective_ineq(pt, _pivot):
            return sum(P[j] * d_funcs[j](f) for j, f in zip(free, pt))

        best_val, best_free, _ = _grid_minimise(objective_ineq, solver_ineq, free)
        assignment = dict(zip(free, best_free))
    else:
        # eliminate the best-conditioned coordinate through the equality
        pivot = max(active, key=lambda j: P[j] * abs(affine[j][1]))
        free = [j for j in active if j != pivot]
        residual = c_target - P[0] * c0
        p_c0, p_slope = affine[pivot]

        def solver_eq(pt):
            rem = residual - sum(
                P[j] * (affine[j][0] + affine[j][1] * f) for j, f in zip(free, pt)
            )
            f_pivot = (rem / P[pivot] - p_c0) / p_slope
            if -1e-12 <= f_pivot <= 1.0 + 1e-12:
                return min(max(f_pivot, 0.0), 1.0)
            return None

        def objective_eq(pt, f_pivot):
            val = P[pivot] * d_funcs[pivot](f_pivot)
            val += sum(P[j] * d_funcs[j](f) for j, f in zip(free, pt))
            return val

        best_val, best_free, best_pivot = _grid_minimise(objective_eq, solver_eq, free)
        if best_free is None and best_pivot is None:
            raise FeasibilityError(
                f"no feasible mixing parameters reach c={c_target:.6g}",
                c_lo=c_lo,
                c_hi=c_hi,
            )
        assignment = dict(zip(free, best_free or ()))
        assignment[pivot] = best_pivot

    f_opt = tuple(assignment.get(j, 1.0) for j in range(1, k + 1))
    d_terms = [P[0] * d0] + [
        P[j] * d_funcs[j](assignment[j]) if j in assignment else 0.0
        for j in range(1, k + 1)
    ]
    breakdown = assemble_breakdown(
        est.Q_hat, est.Q_hat * e_used / 2.0, tuple(d_terms), coeffs.tau, f_opt
    )
    return breakdown


def optimize_tau(rate_fn, lo: float, hi: float, tol: float = 1e-4):
    """Maximise rate_fn over the detector threshold on [lo, hi].

    A 17-point probe locates the bracket and screens for unimodality
    (the expected single-peak shape); if the profile is not unimodal the
    search falls back to a 256-point scan before the local golden-section
    refinement.  Returns (tau_opt, rate_opt) with tau resolved to tol.
    """
    if not (0.0 < lo < hi):
        raise ValueError(f"need 0 < lo < hi, got [{lo}, {hi}]")

    def probe(n):
        xs = np.linspace(lo, hi, n)
        ys = np.array([rate_fn(x) for x in xs])
        if not np.all(np.isfinite(ys)):
            bad = xs[~np.isfinite(ys)][0]
            raise ValueError(f"rate function not finite at tau={bad}")
        return xs, ys

    xs, ys = probe(17)
    span = max(np.max(np.abs(ys)), 1.0)
    diffs = np.diff(ys)
    signs = [1 if d > 1e-13 * span else (-1 if d < -1e-13 * span else 0) for d in diffs]
    compact = [s for s in signs if s != 0]
    unimodal = all(
        not (a == -1 and b == 1) for a, b in zip(compact, compact[1:])
    )
    if not unimodal:
        xs, ys = probe(256)
    i = int(np.argmax(ys))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, len(xs) - 1)]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = rate_fn(c), rate_fn(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = rate_fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = rate_fn(d)
    tau_opt = (a + b) / 2.0
    return tau_opt, rate_fn(tau_opt)
