"""The beta-power potential ``(1 - det(X)^beta) / beta`` and its Hessian metric."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .errors import BetaOutOfRange, NotPositiveDefinite
from .linalg import as_spd, as_symmetric, check_same_dim, cholesky


@dataclass(frozen=True)
class BetaParam:
    """A beta validated against a dimension: ``beta != 0`` and ``beta < 1/n``.

    The metric is positive definite exactly on this range. ``beta = 0`` (the
    classical affine-invariant case) is deliberately rejected here.
    """

    beta: float
    n: int

    def __post_init__(self):
        beta = float(self.beta)
        if not np.isfinite(beta) or beta == 0.0 or beta >= 1.0 / self.n:
            raise BetaOutOfRange(
                f"beta={beta} outside (-inf, 0) U (0, 1/n) for n={self.n}"
            )
        object.__setattr__(self, "beta", beta)

    def __float__(self):
        return self.beta


def as_beta(beta, n):
    """Return a ``BetaParam`` for dimension ``n`` from a float or ``BetaParam``."""
    if isinstance(beta, BetaParam):
        if beta.n != n:
            return BetaParam(beta.beta, n)
        return beta
    return BetaParam(beta, n)


def potential(X, beta):
    """``Phi_beta(X) = (1 - det(X)^beta) / beta``."""
    X = as_spd(X, "X")
    b = as_beta(beta, X.shape[0]).beta
    L = cholesky(X)
    ld = 2.0 * np.sum(np.log(np.diag(L)))
    # (1 - exp(b*ld)) / b without cancellation for small b
    return float(-np.expm1(b * ld) / b)


def metric_eval(X, A, B, beta):
    """Metric tensor at ``X`` applied to tangent vectors ``A`` and ``B``.

    .. math::
        g_X(A, B) = \\det(X)^\\beta \\left(\\mathrm{tr}(X^{-1}AX^{-1}B)
                    - \\beta\\,\\mathrm{tr}(X^{-1}A)\\,\\mathrm{tr}(X^{-1}B)\\right)
    """
    X = as_spd(X, "X")
    A = as_symmetric(A, "A")
    B = as_symmetric(B, "B")
    n = check_same_dim(X, A, B)
    b = as_beta(beta, n).beta
    L = cholesky(X)
    XiA = cho_solve((L, True), A)
    XiB = cho_solve((L, True), B)
    ld = 2.0 * np.sum(np.log(np.diag(L)))
    # tr(X^-1 A X^-1 B) as an elementwise sum avoids the extra product
    quad = np.sum(XiA * XiB.T)
    return float(np.exp(b * ld) * (quad - b * np.trace(XiA) * np.trace(XiB)))


def hessian_fd_check(X, A, beta, h=1e-4):
    """Second central difference of the potential along ``A``.

    Compare against ``metric_eval(X, A, A, beta)``.
    """
    X = as_spd(X, "X")
    A = as_symmetric(A, "A")
    n = check_same_dim(X, A)
    beta = as_beta(beta, n)
    try:
        plus = potential(X + h * A, beta)
        minus = potential(X - h * A, beta)
    except NotPositiveDefinite:
        raise NotPositiveDefinite("finite-difference probe left the SPD cone") from None
    return (plus - 2.0 * potential(X, beta) + minus) / h**2
