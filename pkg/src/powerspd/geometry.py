"""Scale-invariant quantities of a pair of SPD matrices.

``delta`` is the classical affine-invariant distance, ``zeta_data`` describes
the unit-determinant rescalings of the pair, and ``gamma_beta`` is the angle
that decides which closed-form geodesic applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import LinearlyDependentPair
from .linalg import RelativeEig, as_spd, check_same_dim, logdet
from .metric import as_beta

LINDEP_RTOL = 1e-10


def lindep_threshold(n):
    """``||zeta||`` at or below which a pair counts as linearly dependent."""
    return LINDEP_RTOL * n


def delta(A, B):
    """Affine-invariant distance ``sqrt(sum(log(eig(A^{-1} B))**2))``."""
    A = as_spd(A, "A")
    B = as_spd(B, "B")
    check_same_dim(A, B)
    lam = RelativeEig.of(A, B).lam
    return float(np.sqrt(np.sum(np.log(lam) ** 2)))


def normalize_det(A):
    """``det(A)^{-1/n} A``, computed through the log-determinant."""
    A = np.asarray(A, dtype=float)
    return math.exp(-logdet(A) / A.shape[0]) * A


@dataclass(frozen=True)
class ZetaData:
    zeta: np.ndarray
    norm: float
    mu_tilde: np.ndarray


def zeta_data(A, B):
    """Log-eigenvalues of the determinant-normalized pencil.

    ``zeta_i = log(mu_tilde_i)`` where ``mu_tilde`` are the eigenvalues of
    ``At^{-1} Bt`` with ``At``, ``Bt`` scaled to unit determinant. ``zeta``
    sums to zero and ``norm == delta(At, Bt)``.
    """
    A = as_spd(A, "A")
    B = as_spd(B, "B")
    check_same_dim(A, B)
    mu = RelativeEig.of(normalize_det(A), normalize_det(B)).lam
    zeta = np.log(mu)
    return ZetaData(zeta=zeta, norm=float(np.linalg.norm(zeta)), mu_tilde=mu)


def gamma_from_norm(norm, beta, n):
    return abs(beta) * norm / (2.0 * math.sqrt(1.0 / n - beta))


def gamma_beta(A, B, beta):
    """``|beta| ||zeta|| / (2 sqrt(1/n - beta))``; zero iff ``B`` is a multiple of ``A``."""
    zd = zeta_data(A, B)
    n = zd.zeta.size
    b = as_beta(beta, n).beta
    return gamma_from_norm(zd.norm, b, n)


def beta_window(d, n, gamma_max):
    """Interval of beta on which ``gamma < gamma_max`` for ``||zeta|| = d``.

    Roots of ``d^2 beta^2 = 4 g^2 (1/n - beta)``; the positive root is written
    in cancellation-free form so it stays accurate as ``d -> 0``.
    """
    g = float(gamma_max)
    root = math.sqrt(g * g + d * d / n)
    upper = 2.0 * g / (n * (root + g))
    lower = -2.0 * g * (root + g) / (d * d)
    return lower, upper


@dataclass(frozen=True)
class BetaBounds:
    beta_hat_1: float
    beta_hat_2: float
    beta_1: float
    beta_2: float
    d: float


def beta_bounds(A, B):
    """Validity windows for beta.

    ``(beta_hat_1, beta_hat_2)`` keeps ``gamma < pi`` and ``(beta_1, beta_2)``
    keeps ``gamma < pi/2`` (zero excluded in both).
    """
    zd = zeta_data(A, B)
    n = zd.zeta.size
    d = zd.norm
    if d <= lindep_threshold(n):
        raise LinearlyDependentPair(
            "bounds degenerate for linearly dependent pair: (-inf, 1/n)"
        )
    bh1, bh2 = beta_window(d, n, math.pi)
    b1, b2 = beta_window(d, n, math.pi / 2)
    return BetaBounds(beta_hat_1=bh1, beta_hat_2=bh2, beta_1=b1, beta_2=b2, d=d)
