"""Key map, pinching, and the per-sector relative entropy.

The key map embeds Bob's threshold decoding coherently: K attaches an
auxiliary qubit recording the inferred polarisation, weighted by the
square roots of the POVM elements.  Pinching that qubit dephases the two
branches.  The number of extractable secret bits per sector is the
relative entropy between the mapped state and its pinched version, which
reduces to an entropy difference S[Z(G rho)] - S[G rho]; both entropies
are taken of the *unnormalised* matrices.

Two independent evaluation routes are provided.  The numeric route
builds the mapped matrix explicitly and diagonalises it; the closed
route evaluates the printed formulas for sectors 0..3.  They must agree
to 1e-9 and the verification suite checks exactly that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import op_M
from .invariant import SectorState
from .numerics import DomainError, ThresholdCoeffs, vn_entropy, xlog2x

__all__ = [
    "UnsupportedSectorError",
    "KeyMapOutput",
    "gmap",
    "zmap",
    "rel_entropy_numeric",
    "rel_entropy_closed",
    "gain_and_c_numeric",
]


class UnsupportedSectorError(ValueError):
    """Closed-form relative entropy requested beyond the printed sectors."""


@dataclass(frozen=True)
class KeyMapOutput:
    """Unnormalised mapped state on (aux qubit) x (Alice) x (Bob sector).

    G_rho is stored with the auxiliary qubit as the outermost factor, so
    the H/V branches are the two diagonal half-blocks and the pinching
    map only has to zero the off-diagonal half-blocks.  trace_Q equals
    Tr[(M_H + M_V) rho_B], the sector's contribution to the gain.
    """

    j: int
    G_rho: np.ndarray
    trace_Q: float


def gmap(state: SectorState, coeffs: ThresholdCoeffs) -> KeyMapOutput:
    """Apply K = |H> (x) sqrt(M_H) + |V> (x) sqrt(M_V) to the Bob factor.

    M_H and M_V are diagonal on the sector, so their square roots are
    taken entrywise.  The output is unnormalised.
    """
    j = state.j
    sqrt_mh = np.sqrt(op_M(coeffs, j, "MH").diag)
    sqrt_mv = np.sqrt(op_M(coeffs, j, "MV").diag)
    eye_a = np.eye(2)
    s_h = np.kron(eye_a, np.diag(sqrt_mh))
    s_v = np.kron(eye_a, np.diag(sqrt_mv))
    rho = state.rho
    g = np.block(
        [
            [s_h @ rho @ s_h, s_h @ rho @ s_v],
            [s_v @ rho @ s_h, s_v @ rho @ s_v],
        ]
    )
    g = (g + g.T) / 2.0
    return KeyMapOutput(j=j, G_rho=g, trace_Q=float(np.trace(g)))


def zmap(out: KeyMapOutput) -> np.ndarray:
    """Pinch the auxiliary qubit: zero the blocks coupling its H/V branches."""
    z = out.G_rho.copy()
    half = z.shape[0] // 2
    z[:half, half:] = 0.0
    z[half:, :half] = 0.0
    return z


def rel_entropy_numeric(state: SectorState, coeffs: ThresholdCoeffs) -> float:
    """D = S[Z(G rho)] - S[G rho] via eigendecomposition of both matrices."""
    out = gmap(state, coeffs)
    return vn_entropy(zmap(out)) - vn_entropy(out.G_rho)


def _log2_pos(x: float) -> float:
    # log2 of a product of lambda factors; strictly positive for finite tau
    return math.log2(x)


def rel_entropy_closed(j: int, f: float, coeffs: ThresholdCoeffs) -> float:
    """Closed-form sector relative entropy D_j(f) for j in {0, 1, 2, 3}.

    Transcribes the printed expressions, built from the auxiliary matrix
    entries A_j, B_j, ... of the invariant state and the +-branches of the
    2x2 eigenvalue pairs.  Coefficients that vanish at parameter zeros
    (e.g. the f = 1 endpoint of sector 1) follow the same x*log x -> 0
    convention as the numeric path.
    """
    if j < 0:
        raise DomainError(f"photon number must be >= 0, got {j}")
    if j > 3:
        raise UnsupportedSectorError(
            f"no closed form for sector j={j}; use rel_entropy_numeric"
        )
    lam = coeffs.lam
    if j > coeffs.nmax:
        raise DomainError(f"sector j={j} exceeds the lambda table ({coeffs.nmax})")
    if j > 0 and not (0.0 <= f <= 1.0):
        raise DomainError(f"mixing parameter f must lie in [0, 1], got {f}")

    if j == 0:
        return 2.0 * lam[0] * (1.0 - lam[0])

    if j == 1:
        l0, l1 = lam[0], lam[1]
        a1 = (2 * f + 1) / 6
        b1 = (4 * f - 1) / 6
        c1 = (1 - f) / 3
        y = l0 + l1 - 2 * l0 * l1
        root = math.sqrt(
            a1 * a1 * (l0 - l1) ** 2 + 4 * b1 * b1 * l0 * l1 * (1 - l0) * (1 - l1)
        )
        d = -xlog2x(a1 * y + root) - xlog2x(a1 * y - root)
        if c1 > 0.0:
            d -= 2 * c1 * l0 * (1 - l1) * _log2_pos(l0 * (1 - l1))
            d -= 2 * c1 * l1 * (1 - l0) * _log2_pos(l1 * (1 - l0))
        d += (xlog2x(a1 - b1) + xlog2x(a1 + b1)) * y
        d += 2 * a1 * y + 2 * (a1 + c1) * y * _log2_pos(y)
        return d

    if j == 2:
        l0, l1, l2 = lam[0], lam[1], lam[2]
        a2 = (3 * f + 1) / 12
        b2 = math.sqrt(2.0) * (3 * f - 1) / 12
        c2 = 1 / 6
        d2 = (1 - f) / 4
        y02 = l0 + l2 - 2 * l0 * l2
        q1 = l1 * (1 - l1)
        g_mid = a2 * y02 + 2 * c2 * q1
        g_root = math.sqrt((a2 * y02 - 2 * c2 * q1) ** 2 + 8 * b2 * b2 * q1 * y02)
        h_mid = a2 * (1 - l0) * l2 + c2 * q1
        h_root = math.sqrt(
            (a2 * (1 - l0) * l2 - c2 * q1) ** 2 + 4 * b2 * b2 * (1 - l0) * q1 * l2
        )
        i_mid = a2 * (1 - l2) * l0 + c2 * q1
        i_root = math.sqrt(
            (a2 * (1 - l2) * l0 - c2 * q1) ** 2 + 4 * b2 * b2 * (1 - l2) * q1 * l0
        )
        d = 0.0
        if d2 > 0.0:
            d += 2 * d2 * (
                y02 * _log2_pos(y02)
                - l0 * (1 - l2) * _log2_pos(l0 * (1 - l2))
                - l2 * (1 - l0) * _log2_pos(l2 * (1 - l0))
            )
        d += xlog2x(g_mid + g_root) + xlog2x(g_mid - g_root)
        d -= xlog2x(h_mid + h_root) + xlog2x(h_mid - h_root)
        d -= xlog2x(i_mid + i_root) + xlog2x(i_mid - i_root)
        return d

    l0, l1, l2, l3 = lam[0], lam[1], lam[2], lam[3]
    a3 = (12 * f + 3) / 60
    b3 = math.sqrt(3.0) * (8 * f - 3) / 60
    c3 = (4 * f + 6) / 60
    d3 = (16 * f - 6) / 60
    e3 = (9 - 4 * f) / 60
    f3 = 12 * (1 - f) / 60
    y03 = l0 + l3 - 2 * l0 * l3
    y12 = l1 + l2 - 2 * l1 * l2
    d = y12 * (xlog2x(c3 - d3) + xlog2x(c3 + d3) + 2 * c3 * (1 + _log2_pos(y12)))
    if f3 > 0.0:
        d += 2 * f3 * (
            y03 * _log2_pos(y03)
            - l0 * (1 - l3) * _log2_pos(l0 * (1 - l3))
            - l3 * (1 - l0) * _log2_pos(l3 * (1 - l0))
        )
    p_mid = a3 * y03 + e3 * y12
    p_root = math.sqrt(
        (a3 * y03 - e3 * y12) ** 2
        + 4 * b3 * b3 * (l3 + l0 * (1 - 2 * l3)) * (l2 + l1 * (1 - 2 * l2))
    )
    q_mid = c3 * y12
    q_root = math.sqrt(
        c3 * c3 * (l1 - l2) ** 2 + 4 * d3 * d3 * l1 * l2 * (1 - l1) * (1 - l2)
    )
    r_mid = a3 * l0 * (1 - l3) + e3 * l1 * (1 - l2)
    r_root = math.sqrt(
        (a3 * l0 * (1 - l3) - e3 * l1 * (1 - l2)) ** 2
        + 4 * b3 * b3 * l0 * l1 * (1 - l2) * (1 - l3)
    )
    s_mid = a3 * (1 - l0) * l3 + e3 * (1 - l1) * l2
    s_root = math.sqrt(
        (a3 * (1 - l0) * l3 - e3 * (1 - l1) * l2) ** 2
        + 4 * b3 * b3 * (1 - l0) * (1 - l1) * l2 * l3
    )
    d += xlog2x(p_mid + p_root) + xlog2x(p_mid - p_root)
    d -= xlog2x(q_mid + q_root) + xlog2x(q_mid - q_root)
    d -= xlog2x(r_mid + r_root) + xlog2x(r_mid - r_root)
    d -= xlog2x(s_mid + s_root) + xlog2x(s_mid - s_root)
    return d


def gain_and_c_numeric(
    state: SectorState, coeffs: ThresholdCoeffs
) -> tuple[float, float]:
    """Sector gain Tr[(M_H+M_V) rho_B] and error Tr[(|H><H| (x) M_V) rho]."""
    j = state.j
    mh = op_M(coeffs, j, "MH").diag
    mv = op_M(coeffs, j, "MV").diag
    d = j + 1
    diag = np.diag(state.rho)
    rho_b_diag = diag[:d] + diag[d:]
    q_sector = float(np.sum((mh + mv) * rho_b_diag))
    c_sector = float(np.sum(mv * diag[:d]))
    return q_sector, c_sector
