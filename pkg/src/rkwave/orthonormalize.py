"""Gram-Schmidt orthonormalization as a triangular Gram factorization.

Orthonormalizing the representers Psi_i only needs the coefficients
beta_ik of the combinations Psihat_i = sum_{k<=i} beta_ik Psi_k.  With the
Gram matrix A = L L^T (Cholesky), beta = L^{-1} produces the same
orthonormal system as sequential Gram-Schmidt, up to rounding, and
satisfies beta A beta^T = I.

The Cholesky is hand-rolled rather than delegated so that a failing pivot
reports *which* leading minor broke: for collocation Gram matrices that
index points at the first degenerate collocation point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite

# A pivot below this fraction of the largest diagonal entry aborts rather
# than silently regularizing: degenerate bases indicate bad collocation
# input and a patched factor would corrupt every downstream diagnostic.
PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class BetaFactor:
    """Lower-triangular orthonormalization coefficients with a conditioning tag."""

    beta: np.ndarray
    condition_estimate: float

    def __post_init__(self):
        b = np.array(self.beta, dtype=float)
        b.setflags(write=False)
        object.__setattr__(self, "beta", b)


def _check_symmetric(gram: np.ndarray) -> np.ndarray:
    a = np.asarray(gram, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError("gram matrix must be square with n >= 1")
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - a.T))) > 1e-10 * scale:
        raise ValueError("gram matrix must be symmetric")
    return a


def _cholesky(a: np.ndarray) -> np.ndarray:
    # Extended precision: collocation Gram matrices reach cond ~1e12 at desk
    # scale, and beta A beta^T - I must stay below 1e-8.  The factorization
    # is plain arithmetic, so running it in longdouble costs little and
    # keeps the double-rounded result at ~eps * sqrt(cond).
    a = a.astype(np.longdouble)
    n = a.shape[0]
    thresh = PIVOT_RTOL * max(float(np.max(np.diag(a))), 0.0)
    low = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - low[j, :j] @ low[j, :j]
        if pivot <= thresh:
            raise NotPositiveDefinite(j)
        low[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            low[j + 1:, j] = (a[j + 1:, j] - low[j + 1:, :j] @ low[j, :j]) / low[j, j]
    return low


def _invert_lower(low: np.ndarray) -> np.ndarray:
    n = low.shape[0]
    inv = np.zeros_like(low)
    for i in range(n):
        row = np.zeros(n, dtype=low.dtype)
        row[i] = 1.0
        row -= low[i, :i] @ inv[:i]
        inv[i] = row / low[i, i]
    return inv


def _power_lambda_max(matvec, n: int, iters: int = 200, rtol: float = 1e-12) -> float:
    v = np.full(n, 1.0 / np.sqrt(n))
    lam = 0.0
    for _ in range(iters):
        w = matvec(v)
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        v = w / new
        if abs(new - lam) <= rtol * new:
            return new
        lam = new
    return lam


def factor(gram) -> BetaFactor:
    """Triangular orthonormalization coefficients of a symmetric PD Gram matrix.

    Computes A = L L^T and returns beta = L^{-1} together with a power-
    iteration estimate of cond(A).  Raises NotPositiveDefinite(k) when the
    k-th pivot fails, and ValueError for non-symmetric input.
    """
    a = _check_symmetric(gram)
    low = _cholesky(a)
    beta = _invert_lower(low).astype(float)
    cond = _condition_from_factor(a, beta)
    return BetaFactor(beta, cond)


def _condition_from_factor(a: np.ndarray, beta: np.ndarray) -> float:
    n = a.shape[0]
    lam_max = _power_lambda_max(lambda v: a @ v, n)
    inv_lam_max = _power_lambda_max(lambda v: beta.T @ (beta @ v), n)
    if inv_lam_max == 0.0:
        return float("inf")
    return lam_max * inv_lam_max


def condition_estimate(gram) -> float:
    """Estimate cond_2 of a symmetric matrix; infinity when not factorizable."""
    a = _check_symmetric(gram)
    try:
        low = _cholesky(a)
    except NotPositiveDefinite:
        return float("inf")
    return _condition_from_factor(a, _invert_lower(low).astype(float))
