"""Special functions and small dense symmetric eigenproblems.

Everything here is elementary: the Poisson-tail coefficients of the
heterodyne threshold POVM, binary entropy, a cyclic Jacobi eigensolver,
and the von Neumann entropy built on top of it.  All logarithms in
entropic quantities are base 2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "NotPSDError",
    "ThresholdCoeffs",
    "SymMatrix",
    "lambda_coeffs",
    "binary_entropy",
    "xlog2x",
    "sym_eigvals",
    "vn_entropy",
    "gaussian_g",
]

# x*log2(x) terms below this are treated as exactly zero, both in the
# eigenvalue path and in the closed-form entropies (keymap module).
XLOG_CUTOFF = 1e-14


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the function."""


class NotPSDError(ValueError):
    """A matrix expected to be positive semidefinite is not (beyond tolerance)."""


@dataclass(frozen=True)
class ThresholdCoeffs:
    """Threshold tau and the click probabilities lambda_n, n = 0..nmax.

    lambda_n is the probability that mode-wise heterodyne on the Fock
    state |n> yields an intensity above the threshold tau.  The table is
    strictly increasing in n and each entry lies in (0, 1).
    """

    tau: float
    lam: np.ndarray

    @property
    def nmax(self) -> int:
        return len(self.lam) - 1


class SymMatrix:
    """Dense real symmetric matrix, symmetric by construction.

    Only the lower triangle of ``entries`` is read; the upper triangle is
    mirrored from it, so ``entry(i, j) == entry(j, i)`` holds exactly.
    """

    __slots__ = ("mat",)

    def __init__(self, entries):
        a = np.asarray(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError(f"expected a square matrix, got shape {a.shape}")
        lower = np.tril(a)
        self.mat = lower + lower.T - np.diag(np.diag(a))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def entry(self, i: int, j: int) -> float:
        return float(self.mat[i, j])


def lambda_coeffs(tau: float, nmax: int) -> ThresholdCoeffs:
    """Eigenvalues lambda_n of the above-threshold heterodyne operator.

    lambda_n = Gamma(1+n, tau)/n!, evaluated through the exact Poisson-tail
    identity lambda_n = exp(-tau) * sum_{k=0}^{n} tau^k / k!, which is exact
    for integer order and needs no special-function library.
    """
    if not (tau > 0.0) or not math.isfinite(tau):
        raise DomainError(f"threshold tau must be positive and finite, got {tau}")
    if nmax < 0:
        raise DomainError(f"nmax must be >= 0, got {nmax}")
    lam = np.empty(nmax + 1)
    partial, term = 0.0, 1.0
    for k in range(nmax + 1):
        partial += term
        lam[k] = partial
        term *= tau / (k + 1)
    lam *= math.exp(-tau)
    return ThresholdCoeffs(tau=float(tau), lam=lam)


def binary_entropy(x: float) -> float:
    """Binary Shannon entropy h2(x) in bits, with 0*log(0) := 0."""
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"binary_entropy argument must lie in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def xlog2x(x: float) -> float:
    """x*log2(x) with values below XLOG_CUTOFF treated as exactly 0."""
    if x < XLOG_CUTOFF:
        return 0.0
    return x * math.log2(x)


def _as_sym_array(m) -> np.ndarray:
    if isinstance(m, SymMatrix):
        return m.mat
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale and np.max(np.abs(a - a.T)) > 1e-12 * scale:
        raise DomainError("matrix is not symmetric")
    return a


def sym_eigvals(m, tol: float = 1e-15, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix, ascending, via cyclic Jacobi.

    Rotations below tol * max|entry| are skipped; the sweep loop stops once
    a full sweep performs no rotation.  Accuracy is ~1e-15 of the spectral
    norm, ample for the <= 16x16 matrices produced by the key map.
    """
    a = _as_sym_array(m).copy()
    n = a.shape[0]
    if n == 1:
        return a.ravel().copy()
    scale = np.max(np.abs(a))
    if scale == 0.0:
        return np.zeros(n)
    thresh = tol * scale
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                rotated = True
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, theta) / (
                        abs(theta) + math.sqrt(theta * theta + 1.0)
                    )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = a[q, p] = 0.0
        if not rotated:
            break
    return np.sort(np.diag(a))


def vn_entropy(m) -> float:
    """Von Neumann entropy -sum mu_i log2 mu_i of a PSD matrix, in bits.

    The input need not have unit trace.  Eigenvalues in [-1e-9, 0) are
    clipped to zero; anything more negative raises NotPSDError.  Clipping
    beyond 1e-12 of the spectral norm is reported via a warning, never
    silently.
    """
    mu = sym_eigvals(m)
    scale = max(float(np.max(np.abs(mu))), 1.0) if mu.size else 1.0
    lowest = float(mu[0]) if mu.size else 0.0
    if lowest < -1e-9 * scale:
        raise NotPSDError(f"matrix has eigenvalue {lowest}, not PSD")
    if lowest < -1e-12 * scale:
        warnings.warn(
            f"clipping eigenvalue {lowest} (beyond 1e-12 PSD tolerance)",
            stacklevel=2,
        )
    return -sum(xlog2x(v) for v in mu if v > XLOG_CUTOFF)


def gaussian_g(n_mean: float) -> float:
    """Entropy g(N) = (N+1)log2(N+1) - N log2 N of a thermal state, g(0) = 0."""
    if n_mean < 0.0:
        raise DomainError(f"mean photon number must be >= 0, got {n_mean}")
    if n_mean == 0.0:
        return 0.0
    return (n_mean + 1.0) * math.log2(n_mean + 1.0) - n_mean * math.log2(n_mean)
