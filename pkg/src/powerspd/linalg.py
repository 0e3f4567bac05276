"""Dense SPD kernels: validation, Cholesky, eigendecomposition, relative
eigenvalues, fractional powers and the weighted geometric mean.

Matrices are plain ``numpy`` arrays. Anything that touches ``A^{-1} B`` goes
through the symmetric matrix ``L^{-1} B L^{-T}`` (``A = L L^T``) so that only
symmetric eigenproblems are ever solved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    InvalidInput,
    NotPositiveDefinite,
    NotSymmetric,
)

SYMMETRY_RTOL = 1e-12


def _as_square(S, name):
    S = np.array(S, dtype=float)
    if S.ndim == 0:
        S = S.reshape(1, 1)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] == 0:
        raise InvalidInput(f"{name} must be a non-empty square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise InvalidInput(f"{name} has non-finite entries")
    return S


def as_symmetric(S, name="S"):
    """Validate symmetry and return the exactly symmetrized copy.

    Scalars are promoted to 1x1 matrices.
    """
    S = _as_square(S, name)
    scale = 1.0 + np.max(np.abs(S))
    if np.max(np.abs(S - S.T)) > SYMMETRY_RTOL * scale:
        raise NotSymmetric(f"{name} is not symmetric")
    return 0.5 * (S + S.T)


def as_spd(A, name="A"):
    """Validate that ``A`` is symmetric positive definite.

    Returns the symmetrized copy; raises ``NotSymmetric`` or
    ``NotPositiveDefinite``.
    """
    A = as_symmetric(A, name)
    cholesky(A, name=name)
    return A


def check_same_dim(*mats):
    n = mats[0].shape[0]
    for M in mats[1:]:
        if M.shape[0] != n:
            raise DimensionMismatch(f"dimension mismatch: {n} vs {M.shape[0]}")
    return n


def cholesky(A, name="A"):
    """Lower Cholesky factor with positive diagonal."""
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"{name} is not positive definite") from None
    if not np.all(np.diag(L) > 0):
        raise NotPositiveDefinite(f"{name} is not positive definite")
    return L


def sym_eig(S):
    """Eigenvalues (ascending) and orthonormal eigenvectors of symmetric ``S``."""
    S = np.asarray(S, dtype=float)
    try:
        w, V = np.linalg.eigh(0.5 * (S + S.T))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from None
    return w, V


def logdet(A):
    """``log det A`` from the Cholesky diagonal."""
    L = cholesky(np.asarray(A, dtype=float))
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def spd_power(A, p):
    """Primary power ``A**p`` of an SPD matrix."""
    w, V = sym_eig(A)
    if w[0] <= 0:
        raise NotPositiveDefinite("matrix is not positive definite")
    return (V * w**p) @ V.T


def spd_log(A):
    w, V = sym_eig(A)
    if w[0] <= 0:
        raise NotPositiveDefinite("matrix is not positive definite")
    return (V * np.log(w)) @ V.T


def spd_exp(S):
    w, V = sym_eig(S)
    return (V * np.exp(w)) @ V.T


@dataclass(frozen=True)
class RelativeEig:
    """Cached factorization of the pencil ``(A, B)``.

    ``A = L L^T`` and ``L^{-1} B L^{-T} = Q diag(lam) Q^T``. Every function of
    ``A^{-1} B`` is then a diagonal scaling between two fixed factors, which
    makes repeated evaluation O(n^2) after the O(n^3) setup.
    """

    L: np.ndarray
    lam: np.ndarray
    Q: np.ndarray

    @classmethod
    def of(cls, A, B):
        check_same_dim(A, B)
        L = cholesky(A)
        Y = solve_triangular(L, B, lower=True)
        C = solve_triangular(L, Y.T, lower=True)
        lam, Q = sym_eig(C)
        if lam[0] <= 0:
            raise NotPositiveDefinite("B is not positive definite")
        return cls(L, lam, Q)

    @property
    def LQ(self):
        return self.L @ self.Q

    def power(self, s):
        """``(A^{-1} B)^s = L^{-T} Q diag(lam^s) Q^T L^T``."""
        left = solve_triangular(self.L.T, self.Q, lower=False)
        return (left * self.lam**s) @ self.LQ.T

    def sharp(self, s):
        """``A #_s B = L Q diag(lam^s) Q^T L^T``; any real ``s`` is accepted."""
        LQ = self.LQ
        out = (LQ * self.lam**s) @ LQ.T
        return 0.5 * (out + out.T)


def rel_eigvals(A, B):
    """Eigenvalues of ``A^{-1} B`` in ascending order."""
    A = as_spd(A, "A")
    B = as_spd(B, "B")
    return RelativeEig.of(A, B).lam.copy()


def matrix_power_rel(A, B, s):
    """Primary matrix power ``(A^{-1} B)^s``."""
    A = as_spd(A, "A")
    B = as_spd(B, "B")
    return RelativeEig.of(A, B).power(float(s))


def geometric_mean(A, B, t):
    """Weighted geometric mean ``A #_t B = A (A^{-1} B)^t`` for ``t`` in [0, 1]."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise InvalidInput(f"weight t={t} outside [0, 1]")
    A = as_spd(A, "A")
    B = as_spd(B, "B")
    if t == 0.0:
        return A
    if t == 1.0:
        return B
    return RelativeEig.of(A, B).sharp(t)
