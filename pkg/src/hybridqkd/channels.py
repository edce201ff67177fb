"""Channel models and the key rates they induce.

Covers the pure-loss channel (closed-form rate and its long-distance
asymptote), general passive attacks parameterised by the measured gain
and error parameter, the virtual-detector comparison model, Gaussian
electronic noise truncated at three photons, and the PLOB / reverse
coherent information benchmark bounds.  Losses are quoted to users in
dB via loss_db = -10 log10(eta); internally everything runs on eta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .invariant import sector_c
from .numerics import DomainError, ThresholdCoeffs, binary_entropy, gaussian_g
from .rates import (
    RateBreakdown,
    FeasibilityError,
    assemble_breakdown,
    sector_rel_entropy,
    tail_bounds,
)

__all__ = [
    "ChannelSpec",
    "PhotonStats",
    "FeasibleRegion",
    "pure_loss_rate",
    "pure_loss_asymptote",
    "passive_attack_params",
    "passive_rate",
    "feasible_region",
    "qi_rate",
    "gaussian_stats",
    "gaussian_sector_matrices",
    "gaussian_rate",
    "plob_bound",
    "cv_upper_bound",
    "eta_from_loss_db",
    "loss_db_from_eta",
]

# The Gaussian noise model carries no mixing beyond one photon once the
# variance drops below this; the analytic N -> 0 limits are used instead.
N_ZERO = 1e-12


def eta_from_loss_db(loss_db: float) -> float:
    return 10.0 ** (-loss_db / 10.0)


def loss_db_from_eta(eta: float) -> float:
    if eta <= 0.0:
        return math.inf
    return -10.0 * math.log10(eta)


@dataclass(frozen=True)
class ChannelSpec:
    """Transmissivity, excess-noise variance and misalignment probability."""

    eta: float
    N: float = 0.0
    Ed: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.eta <= 1.0):
            raise DomainError(f"transmissivity must lie in [0, 1], got {self.eta}")
        if self.N < 0.0:
            raise DomainError(f"noise variance must be >= 0, got {self.N}")
        if not (0.0 <= self.Ed <= 1.0):
            raise DomainError(f"misalignment must lie in [0, 1], got {self.Ed}")


@dataclass(frozen=True)
class PhotonStats:
    """Bob-side photon number distribution P_0..P_k and mixing parameters."""

    P: np.ndarray
    f: np.ndarray

    @property
    def k(self) -> int:
        return len(self.P) - 1


def _check_eta(eta: float) -> None:
    if not (0.0 <= eta <= 1.0):
        raise DomainError(f"transmissivity must lie in [0, 1], got {eta}")


def pure_loss_rate(eta: float, coeffs: ThresholdCoeffs) -> RateBreakdown:
    """Key rate of the lossless-detector, pure-loss channel.

    Every photon that arrives is secure, so the extractable-bits term
    equals the gain and r = Q (1 - h2(E)).
    """
    _check_eta(eta)
    l0, l1 = coeffs.lam[0], coeffs.lam[1]
    q0 = 2.0 * (1.0 - eta) * l0 * (1.0 - l0)
    q1 = eta * (l0 + l1 - 2.0 * l0 * l1)
    c = l0 / 2.0 * (1.0 - (1.0 - eta) * l0 - eta * l1)
    return assemble_breakdown(q0 + q1, c, (q0, q1), coeffs.tau, f_opt=(1.0,))


def pure_loss_asymptote(coeffs: ThresholdCoeffs) -> float:
    """Long-distance limit of r/eta^2: tau^2 / ((e^tau - 1) ln 16)."""
    tau = coeffs.tau
    return tau * tau / ((math.exp(tau) - 1.0) * math.log(16.0))


def feasible_region(coeffs: ThresholdCoeffs) -> "FeasibleRegion":
    return FeasibleRegion(coeffs=coeffs)


@dataclass(frozen=True)
class FeasibleRegion:
    """Attainable (Q, c) pairs for states with at most one photon at Bob."""

    coeffs: ThresholdCoeffs

    @property
    def Q_min(self) -> float:
        l0, l1 = self.coeffs.lam[0], self.coeffs.lam[1]
        return min(2.0 * l0 * (1.0 - l0), l0 + l1 - 2.0 * l0 * l1)

    @property
    def Q_max(self) -> float:
        l0, l1 = self.coeffs.lam[0], self.coeffs.lam[1]
        return max(2.0 * l0 * (1.0 - l0), l0 + l1 - 2.0 * l0 * l1)

    def Q_of_eta(self, eta: float) -> float:
        l0, l1 = self.coeffs.lam[0], self.coeffs.lam[1]
        return 2.0 * (1.0 - eta) * l0 * (1.0 - l0) + eta * (l0 + l1 - 2.0 * l0 * l1)

    def eta_of_Q(self, q: float) -> float:
        l0, l1 = self.coeffs.lam[0], self.coeffs.lam[1]
        return (q - 2.0 * l0 * (1.0 - l0)) / ((1.0 - 2.0 * l0) * (l1 - l0))

    def c_of(self, eta: float, f1: float) -> float:
        l0 = self.coeffs.lam[0]
        return (1.0 - eta) * 0.5 * l0 * (1.0 - l0) + eta * sector_c(
            self.coeffs, 1, f1
        )

    def c_min(self, eta: float) -> float:
        # f1 = 1 is the minimum-error state; this is also the passive line
        return self.c_of(eta, 1.0)

    def c_max(self, eta: float) -> float:
        return self.c_of(eta, 0.0)


def passive_attack_params(
    Q: float, c: float, coeffs: ThresholdCoeffs
) -> tuple[float, float]:
    """Invert measured (Q, c) into (eta, f1) on the one-photon model.

    Raises FeasibilityError naming the violated bound when the pair lies
    outside the attainable region.
    """
    region = feasible_region(coeffs)
    tol = 1e-12
    if Q < region.Q_min - tol:
        raise FeasibilityError(f"gain Q={Q:.6g} below Q_min={region.Q_min:.6g}")
    if Q > region.Q_max + tol:
        raise FeasibilityError(f"gain Q={Q:.6g} above Q_max={region.Q_max:.6g}")
    eta = min(max(region.eta_of_Q(Q), 0.0), 1.0)
    lo, hi = region.c_min(eta), region.c_max(eta)
    if c < lo - tol:
        raise FeasibilityError(
            f"error parameter c={c:.6g} below c_min(eta)={lo:.6g}", c_lo=lo, c_hi=hi
        )
    if c > hi + tol:
        raise FeasibilityError(
            f"error parameter c={c:.6g} above c_max(eta)={hi:.6g}", c_lo=lo, c_hi=hi
        )
    if eta < 1e-12:
        # vacuum only: c carries no information on f1
        return eta, 1.0
    c1_target = (c - (1.0 - eta) * region.c_of(0.0, 1.0)) / eta
    c1_at_0 = sector_c(coeffs, 1, 0.0)
    c1_at_1 = sector_c(coeffs, 1, 1.0)
    f1 = (c1_target - c1_at_0) / (c1_at_1 - c1_at_0)
    return eta, min(max(f1, 0.0), 1.0)


def passive_rate(eta: float, f1: float, coeffs: ThresholdCoeffs) -> RateBreakdown:
    """Rate for a passive attack: vacuum plus a one-photon invariant state."""
    _check_eta(eta)
    region = feasible_region(coeffs)
    q = region.Q_of_eta(eta)
    c = region.c_of(eta, f1)
    l0 = coeffs.lam[0]
    d_terms = (
        (1.0 - eta) * 2.0 * l0 * (1.0 - l0),
        eta * sector_rel_entropy(coeffs, 1, f1),
    )
    return assemble_breakdown(q, c, d_terms, coeffs.tau, f_opt=(f1,))


def qi_rate(eta: float, Ed: float, coeffs: ThresholdCoeffs) -> RateBreakdown:
    """Virtual-detector comparison rate r = Q0 + Q1 (1 - h2(Ed)) - Q h2(E)."""
    _check_eta(eta)
    if not (0.0 <= Ed <= 1.0):
        raise DomainError(f"misalignment must lie in [0, 1], got {Ed}")
    tau = coeffs.tau
    l0, l1 = coeffs.lam[0], coeffs.lam[1]
    q0 = 2.0 * (1.0 - eta) * l0 * (1.0 - l0)
    q1 = eta * (l0 + l1 - 2.0 * l0 * l1)
    q = q0 + q1
    e1 = ((Ed * tau + 1.0) * math.exp(-tau) - (tau + 1.0) * math.exp(-2.0 * tau)) / (
        (tau + 2.0) * math.exp(-tau) - 2.0 * (tau + 1.0) * math.exp(-2.0 * tau)
    )
    e = (q0 / 2.0 + q1 * e1) / q
    d_terms = (q0, q1 * (1.0 - binary_entropy(Ed)))
    return assemble_breakdown(q, q * e / 2.0, d_terms, tau)


def _p_coeff(n_var: float, m: int) -> float:
    """Photon-retention weights of the displacement average (H-branch)."""
    if n_var < N_ZERO:
        return 1.0 if m == 1 else 0.0
    w = n_var / (n_var + 1.0)
    if m == 0:
        return n_var / (n_var + 1.0) ** 2
    return (1.0 / (n_var + 1.0)) * w**m * (m + n_var * n_var) / (n_var * (n_var + 1.0))


def _t_coeff(n_var: float, m: int) -> float:
    """Coherence weights t_m of the displacement average."""
    if n_var < N_ZERO:
        return 1.0 if m == 0 else 0.0
    w = n_var / (n_var + 1.0)
    return (1.0 / (n_var + 1.0)) * w**m * math.sqrt(m + 1.0) / (n_var + 1.0)


def gaussian_stats(eta: float, N: float) -> PhotonStats:
    """Photon-number distribution and mixing parameters after loss + noise.

    P_0..P_3 and f_1..f_3 of the channel that first applies loss eta and
    then adds mode-wise Gaussian noise of variance N.  The N -> 0 limits
    give P = (1-eta, eta, 0, 0) and f_j = 1.
    """
    _check_eta(eta)
    if N < 0.0:
        raise DomainError(f"noise variance must be >= 0, got {N}")
    if N < N_ZERO:
        return PhotonStats(
            P=np.array([1.0 - eta, eta, 0.0, 0.0]), f=np.ones(3)
        )
    w = N / (N + 1.0)
    p = np.empty(4)
    for j in range(4):
        s = sum(_p_coeff(N, m) * w ** (j - m) for m in range(j + 1))
        p[j] = eta / (N + 1.0) * s + (j + 1) * (1.0 - eta) / (N + 1.0) ** 2 * w**j
    denom1 = 2.0 * (eta + 2.0 * N * N - 2.0 * eta * N + 2.0 * N)
    denom2 = 3.0 * (eta + N * N - eta * N + N)
    denom3 = 4.0 * (3.0 * eta + 2.0 * N * N - 2.0 * eta * N + 2.0 * N)
    f = np.array(
        [
            (2.0 * eta + N * N - eta * N + N) / denom1 if denom1 > 0 else 1.0,
            (3.0 * eta + N * N - eta * N + N) / denom2 if denom2 > 0 else 1.0,
            3.0 * (4.0 * eta + N * N - eta * N + N) / denom3 if denom3 > 0 else 1.0,
        ]
    )
    return PhotonStats(P=p, f=f)


def gaussian_sector_matrices(
    eta: float, N: float, j: int
) -> tuple[np.ndarray, float]:
    """Unnormalised invariant sector matrix of the noisy channel, plus trace.

    Assembled directly from the averaged-channel output: diagonal
    photon-retention weights, the t_m t_m' coherences between the H and V
    Alice branches, and the flat thermal background.  The trace equals
    P_j and the normalised matrix is the invariant state at the closed
    form f_j; both facts are what the verification suite checks.
    """
    _check_eta(eta)
    if N < 0.0:
        raise DomainError(f"noise variance must be >= 0, got {N}")
    if not 0 <= j <= 3:
        raise DomainError(f"sector matrices are printed for j <= 3, got {j}")
    w = N / (N + 1.0) if N >= N_ZERO else 0.0
    dim_b = j + 1
    m = np.zeros((2 * dim_b, 2 * dim_b))
    therm = 1.0 / (N + 1.0)
    for b in range(dim_b):
        n_h, n_v = j - b, b
        m[b, b] += (eta / 2.0) * _p_coeff(N, n_h) * therm * w**n_v
        m[dim_b + b, dim_b + b] += (eta / 2.0) * _p_coeff(N, n_v) * therm * w**n_h
    for b in range(dim_b):
        n_h, n_v = j - b, b
        if n_h >= 1 and n_v + 1 <= j:
            # |H><V| branch couples (n_h, n_v) to (n_h - 1, n_v + 1)
            bp = j - (n_h - 1)
            amp = (eta / 2.0) * _t_coeff(N, n_h - 1) * _t_coeff(N, n_v)
            m[b, dim_b + bp] += amp
            m[dim_b + bp, b] += amp
    background = (1.0 - eta) / 2.0 * therm**2 * w**j
    m[np.diag_indices_from(m)] += background
    return m, float(np.trace(m))


def gaussian_rate(eta: float, N: float, coeffs: ThresholdCoeffs) -> RateBreakdown:
    """Lower bound on the key rate under loss plus Gaussian noise.

    Sums the observed sectors' entropy terms and charges the leak with
    the tail-inclusive upper bounds Q_(3), c_(3).  A QBER bound above 1/2
    is clamped to h2(1/2) = 1 and flagged on the breakdown.
    """
    stats = gaussian_stats(eta, N)
    p = stats.P
    d_terms = [p[0] * sector_rel_entropy(coeffs, 0, 0.0)]
    for j in (1, 2, 3):
        d_terms.append(
            p[j] * sector_rel_entropy(coeffs, j, stats.f[j - 1]) if p[j] > 0 else 0.0
        )
    q3, c_tail = tail_bounds(p, coeffs, 3)
    c3 = p[0] * sector_c(coeffs, 0, 0.0)
    for j in (1, 2, 3):
        if p[j] > 0:
            c3 += p[j] * sector_c(coeffs, j, stats.f[j - 1])
    c3 += c_tail
    return assemble_breakdown(q3, c3, tuple(d_terms), coeffs.tau, f_opt=tuple(stats.f))


def plob_bound(eta: float) -> float:
    """Repeaterless bound -log2(1 - eta); infinite at eta = 1."""
    _check_eta(eta)
    if eta == 1.0:
        return math.inf
    return -math.log2(1.0 - eta)


def cv_upper_bound(eta: float, N: float) -> float:
    """Reverse coherent information bound log2(1/(1-eta)) - g(N)."""
    _check_eta(eta)
    if eta == 1.0:
        return math.inf
    return -math.log2(1.0 - eta) - gaussian_g(N)
