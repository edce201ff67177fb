"""Two-mode Fock sectors and the threshold-detection operators on them.

A sector collects the states with exactly j photons split between the H
and V polarisation modes on Bob's side.  The basis is ordered by
decreasing horizontal occupation, (j,0), (j-1,1), ..., (0,j); combined
with Alice's photon the product basis is H-block first, then V-block,
each ordered the same way.  All threshold POVM operators are diagonal in
this basis, so they are stored as their diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import ThresholdCoeffs

__all__ = [
    "InsufficientCoefficientsError",
    "SectorOperator",
    "sector_basis",
    "op_R",
    "op_M",
    "schwinger_total",
    "partial_trace_alice",
    "partial_trace_bob",
]


class InsufficientCoefficientsError(ValueError):
    """The lambda table does not extend to the requested photon number."""


def sector_basis(j: int) -> list[tuple[int, int]]:
    """Occupation pairs (n_H, n_V) of the j-photon sector, n_H descending."""
    return [(a, j - a) for a in range(j, -1, -1)]


@dataclass(frozen=True)
class SectorOperator:
    """Diagonal operator on one j-photon sector."""

    j: int
    diag: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diag)


def _check_sector(coeffs: ThresholdCoeffs, j: int) -> None:
    if j < 0:
        raise ValueError(f"photon number must be >= 0, got {j}")
    if j > coeffs.nmax:
        raise InsufficientCoefficientsError(
            f"sector j={j} needs lambda up to n={j}, table stops at {coeffs.nmax}"
        )


def op_R(coeffs: ThresholdCoeffs, j: int, which: str, mode: str) -> SectorOperator:
    """Above/below-threshold operator R1/R0 of one mode, on the j sector.

    For the basis state (a, j-a) the H-mode operator reads lambda_a (R1)
    or 1 - lambda_a (R0); the V mode uses lambda_{j-a} in place of
    lambda_a.
    """
    _check_sector(coeffs, j)
    if which not in ("R0", "R1"):
        raise ValueError(f"which must be 'R0' or 'R1', got {which!r}")
    if mode not in ("H", "V"):
        raise ValueError(f"mode must be 'H' or 'V', got {mode!r}")
    occ = np.arange(j, -1, -1)
    n = occ if mode == "H" else j - occ
    lam = coeffs.lam[n]
    diag = lam if which == "R1" else 1.0 - lam
    return SectorOperator(j=j, diag=diag)


def op_M(coeffs: ThresholdCoeffs, j: int, which: str) -> SectorOperator:
    """Threshold-detection POVM element M_H = R1_H R0_V or M_V = R0_H R1_V."""
    _check_sector(coeffs, j)
    if which not in ("MH", "MV"):
        raise ValueError(f"which must be 'MH' or 'MV', got {which!r}")
    occ = np.arange(j, -1, -1)
    lh = coeffs.lam[occ]
    lv = coeffs.lam[j - occ]
    diag = lh * (1.0 - lv) if which == "MH" else (1.0 - lh) * lv
    return SectorOperator(j=j, diag=diag)


def schwinger_total(j: int, component: str) -> np.ndarray:
    """Generator of the joint symmetry action on the 1:j sector.

    component 'z' returns Jz_A x I - I x Jz_B (diagonal); 'plus' returns
    J+_A x I - I x J-_B (real, strictly off-diagonal).  Together the two
    generate the full connected symmetry group, so vanishing commutators
    with both certify invariance; using J+_A paired with -J-_B keeps all
    arithmetic real.  Here J+ = aH^dag aV and Jz = (N_H - N_V)/2 on each
    party's pair of modes; Alice always carries one photon.
    """
    if j < 0:
        raise ValueError(f"photon number must be >= 0, got {j}")
    dim_b = j + 1
    eye_a = np.eye(2)
    eye_b = np.eye(dim_b)
    if component == "z":
        jz_a = np.diag([0.5, -0.5])
        # Bob basis index b holds (j-b, b); m_B = (n_H - n_V)/2 = (j - 2b)/2
        jz_b = np.diag([(j - 2 * b) / 2.0 for b in range(dim_b)])
        return np.kron(jz_a, eye_b) - np.kron(eye_a, jz_b)
    if component == "plus":
        jp_a = np.zeros((2, 2))
        jp_a[0, 1] = 1.0  # |H><V|
        # J-_B = aV^dag aH maps (nH, nV) -> (nH-1, nV+1), i.e. b -> b+1,
        # with amplitude sqrt(nH (nV+1)).
        jm_b = np.zeros((dim_b, dim_b))
        for b in range(dim_b):
            n_h, n_v = j - b, b
            if n_h >= 1:
                jm_b[b + 1, b] = np.sqrt(n_h * (n_v + 1))
        return np.kron(jp_a, eye_b) - np.kron(eye_a, jm_b)
    raise ValueError(f"component must be 'z' or 'plus', got {component!r}")


def partial_trace_alice(rho: np.ndarray) -> np.ndarray:
    """Trace out Alice's qubit from a (2d x 2d) sector matrix."""
    d = rho.shape[0] // 2
    return rho[:d, :d] + rho[d:, d:]


def partial_trace_bob(rho: np.ndarray) -> np.ndarray:
    """Trace out Bob's modes, leaving Alice's 2x2 polarisation state."""
    d = rho.shape[0] // 2
    return np.array(
        [
            [np.trace(rho[:d, :d]), np.trace(rho[:d, d:])],
            [np.trace(rho[d:, :d]), np.trace(rho[d:, d:])],
        ]
    )
