"""Symmetry-invariant sector states and their yield/error parameters.

The states with one photon on Alice's side and j on Bob's that commute
with the joint symmetry action form a one-parameter family: the product
space splits into two irreducible invariant subspaces of dimensions j+2
and j, and the state is a convex mixture of the normalised projectors
onto them, weighted (1-f) and f.  The Clebsch-Gordan construction below
is the single source of truth for every j; the printed 1-, 2- and
3-photon matrices serve as fixtures in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import _check_sector, op_M
from .numerics import DomainError, ThresholdCoeffs

__all__ = [
    "SectorState",
    "SectorSummary",
    "cg_basis",
    "invariant_state",
    "recover_f",
    "sector_yield",
    "sector_c",
    "sector_c_closed",
    "sector_c_numeric",
    "sector_c_affine",
    "sector_summary",
]


@dataclass(frozen=True)
class SectorState:
    """Invariant state of the 1:j sector; f weighs the smaller subspace."""

    j: int
    f: float
    rho: np.ndarray


@dataclass(frozen=True)
class SectorSummary:
    """Yield Y_j and the affine error coefficient c_j(f) = c0_term + slope*f."""

    j: int
    Y: float
    c0_term: float
    slope: float

    def c_of_f(self, f: float) -> float:
        return self.c0_term + self.slope * f


def cg_basis(j: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases of the two irreducible invariant subspaces.

    Returns (big, small): ``big`` holds the j+2 spanning vectors of the
    larger subspace as rows, ``small`` the j vectors of the smaller one,
    both expressed in the ordered product basis.  The coefficient pattern
    is +-sqrt(a/(j+1)); rows are unit norm and mutually orthogonal.
    """
    if j < 1:
        raise DomainError("j must be >= 1; the vacuum sector has a unique state")
    dim = 2 * (j + 1)

    def idx(alice: int, b: int) -> int:
        return alice * (j + 1) + b

    big = np.zeros((j + 2, dim))
    big[0, idx(1, 0)] = 1.0
    for i in range(1, j + 1):
        big[i, idx(1, i)] = math.sqrt((j + 1 - i) / (j + 1))
        big[i, idx(0, i - 1)] = -math.sqrt(i / (j + 1))
    big[j + 1, idx(0, j)] = -1.0

    small = np.zeros((j, dim))
    for i in range(1, j + 1):
        small[i - 1, idx(1, i)] = math.sqrt(i / (j + 1))
        small[i - 1, idx(0, i - 1)] = math.sqrt((j + 1 - i) / (j + 1))
    return big, small


def invariant_state(j: int, f: float = 0.0) -> SectorState:
    """Invariant state (1-f)/(j+2) P_big + f/j P_small of the 1:j sector.

    For j = 0 the unique invariant state I/2 (x) |vac><vac| is returned and
    f is ignored.
    """
    if j < 0:
        raise DomainError(f"photon number must be >= 0, got {j}")
    if j == 0:
        return SectorState(j=0, f=0.0, rho=np.diag([0.5, 0.5]))
    if not (0.0 <= f <= 1.0):
        raise DomainError(f"mixing parameter f must lie in [0, 1], got {f}")
    big, small = cg_basis(j)
    rho = (1.0 - f) / (j + 2) * (big.T @ big) + f / j * (small.T @ small)
    rho = (rho + rho.T) / 2.0  # exact symmetry regardless of BLAS order
    return SectorState(j=j, f=float(f), rho=rho)


def recover_f(state: SectorState) -> float:
    """Weight of the smaller invariant subspace, Tr(P_small rho)."""
    if state.j == 0:
        return 0.0
    _, small = cg_basis(state.j)
    return float(np.trace(small @ state.rho @ small.T))


def sector_yield(coeffs: ThresholdCoeffs, j: int) -> float:
    """Yield Y_j: conclusive-outcome probability given j photons at Bob.

    Y_j = (1/(j+1)) sum_a [lambda_a + lambda_{j-a} - 2 lambda_a lambda_{j-a}];
    it does not depend on the mixing parameter f.
    """
    _check_sector(coeffs, j)
    lam = coeffs.lam
    total = 0.0
    for a in range(j + 1):
        total += lam[a] + lam[j - a] - 2.0 * lam[a] * lam[j - a]
    return total / (j + 1)


def sector_c_closed(coeffs: ThresholdCoeffs, j: int, f: float) -> float:
    """Closed-form error parameter c_j(f) for sectors 0..3."""
    _check_sector(coeffs, j)
    lam = coeffs.lam
    if j > 0 and not (0.0 <= f <= 1.0):
        raise DomainError(f"mixing parameter f must lie in [0, 1], got {f}")
    if j == 0:
        return lam[0] * (1.0 - lam[0]) / 2.0
    if j == 1:
        return (2 * f + 1) / 6 * (1 - lam[1]) * lam[0] + (1 - f) / 3 * (
            1 - lam[0]
        ) * lam[1]
    if j == 2:
        a2 = (3 * f + 1) / 12
        d2 = (1 - f) / 4
        return (
            a2 * lam[0] * (1 - lam[2])
            + (1 / 6) * lam[1] * (1 - lam[1])
            + d2 * (1 - lam[0]) * lam[2]
        )
    if j == 3:
        a3 = (12 * f + 3) / 60
        c3 = (4 * f + 6) / 60
        e3 = (9 - 4 * f) / 60
        f3 = 12 * (1 - f) / 60
        return (
            a3 * lam[0] * (1 - lam[3])
            + c3 * lam[1] * (1 - lam[2])
            + e3 * (1 - lam[1]) * lam[2]
            + f3 * (1 - lam[0]) * lam[3]
        )
    raise DomainError(f"no closed form for sector j={j}; use the numeric path")


def sector_c_numeric(coeffs: ThresholdCoeffs, j: int, f: float) -> float:
    """c_j(f) = Tr[(|H><H| (x) R0_H R1_V) rho], valid for any sector."""
    state = invariant_state(j, f)
    mv = op_M(coeffs, j, "MV").diag  # (1-lambda_a) lambda_{j-a}, diagonal
    d = j + 1
    return float(np.sum(mv * np.diag(state.rho)[:d]))


def sector_c(coeffs: ThresholdCoeffs, j: int, f: float) -> float:
    """Error parameter c_j(f); closed form for j <= 3, numeric trace above."""
    if j <= 3:
        return sector_c_closed(coeffs, j, f)
    return sector_c_numeric(coeffs, j, f)


def sector_c_affine(coeffs: ThresholdCoeffs, j: int) -> tuple[float, float]:
    """Coefficients (c0_term, slope) of the affine map f -> c_j(f)."""
    c_at_0 = sector_c(coeffs, j, 0.0)
    c_at_1 = sector_c(coeffs, j, 1.0)
    return c_at_0, c_at_1 - c_at_0


def sector_summary(coeffs: ThresholdCoeffs, j: int) -> SectorSummary:
    c0_term, slope = sector_c_affine(coeffs, j)
    return SectorSummary(
        j=j, Y=sector_yield(coeffs, j), c0_term=c0_term, slope=slope
    )
