"""Closed-form geodesics of the beta-power metric.

Three branches:

* ``LinearlyDependent``: ``B`` is a multiple of ``A``; the geodesic is the
  power-Euclidean curve ``((1-t) A^p + t B^p)^(1/p)`` with ``p = n beta / 2``.
* ``General`` (``0 < gamma < pi/2``): ``eta(t) * (A #_alpha(t) B)``.
* ``GeneralExtended`` (``pi/2 <= gamma < pi``): per-eigenvalue formula with a
  four-quadrant arctangent, evaluated on the congruent pair ``(I, D)`` and
  mapped back. Existence of this curve is checked numerically by the oracle;
  uniqueness is not claimed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BranchMismatch, GammaOutOfRange, InvalidInput
from .geometry import ZetaData, gamma_from_norm, lindep_threshold, zeta_data
from .linalg import RelativeEig, as_spd, check_same_dim, logdet, sym_eig
from .metric import BetaParam, as_beta

GAMMA_GUARD = 1e-12


class Branch(str, Enum):
    LINEARLY_DEPENDENT = "LinearlyDependent"
    GENERAL = "General"
    GENERAL_EXTENDED = "GeneralExtended"


@dataclass(frozen=True)
class GeodesicDescriptor:
    """Everything needed to evaluate one geodesic at many ``t``.

    Built once in O(n^3) by :func:`build_geodesic`; each evaluation afterwards
    is a diagonal rescaling between cached factors.
    """

    branch: Branch
    beta: BetaParam
    sigma: float
    log_sigma: float
    gamma: float
    zeta: ZetaData
    A: np.ndarray
    B: np.ndarray
    logdet_a: float
    logdet_b: float
    rel: RelativeEig
    # congruence M = A^{-1/2} U with M^T A M = I and M^T B M = diag(mu)
    sqrt_a: np.ndarray
    inv_sqrt_a: np.ndarray
    U: np.ndarray
    mu: np.ndarray

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def extended(self):
        return self.branch is Branch.GENERAL_EXTENDED

    @property
    def congruence(self):
        """``(M, M^{-1})`` mapping ``A -> I`` and ``B -> diag(mu)``."""
        return self.inv_sqrt_a @ self.U, self.U.T @ self.sqrt_a


def build_geodesic(A, B, beta):
    """Precompute the geodesic from ``A`` to ``B`` and pick its branch.

    Raises
    ------
    GammaOutOfRange
        If ``gamma >= pi``: no geodesic of this family exists.
    BetaOutOfRange
        If ``beta`` is zero or ``beta >= 1/n``.
    """
    A = as_spd(A, "A")
    B = as_spd(B, "B")
    n = check_same_dim(A, B)
    beta = as_beta(beta, n)
    b = beta.beta

    zd = zeta_data(A, B)
    gamma = gamma_from_norm(zd.norm, b, n)
    ld_a, ld_b = logdet(A), logdet(B)
    log_sigma = 0.5 * b * (ld_b - ld_a)
    sigma = math.exp(log_sigma)

    wa, Va = sym_eig(A)
    sqrt_a = (Va * np.sqrt(wa)) @ Va.T
    inv_sqrt_a = (Va / np.sqrt(wa)) @ Va.T
    mu, U = sym_eig(inv_sqrt_a @ B @ inv_sqrt_a)

    if zd.norm <= lindep_threshold(n):
        branch = Branch.LINEARLY_DEPENDENT
    elif gamma < math.pi / 2 - GAMMA_GUARD:
        branch = Branch.GENERAL
    elif gamma < math.pi - GAMMA_GUARD:
        branch = Branch.GENERAL_EXTENDED
    else:
        raise GammaOutOfRange(f"gamma={gamma:.6g} >= pi: no closed-form geodesic")

    return GeodesicDescriptor(
        branch=branch,
        beta=beta,
        sigma=sigma,
        log_sigma=log_sigma,
        gamma=gamma,
        zeta=zd,
        A=A,
        B=B,
        logdet_a=ld_a,
        logdet_b=ld_b,
        rel=RelativeEig.of(A, B),
        sqrt_a=sqrt_a,
        inv_sqrt_a=inv_sqrt_a,
        U=U,
        mu=mu,
    )


# Scalar profiles. These take the four-quadrant angle so they stay valid up
# to gamma < pi and slightly outside [0, 1] (finite-difference stencils);
# gamma == 0 uses the limit sin(gamma)/gamma -> 1.


def _angle(sigma, gamma, t):
    return math.atan2(t * sigma * math.sin(gamma), 1.0 - t + t * sigma * math.cos(gamma))


def _alpha(sigma, gamma, t):
    if t == 0.0:
        return 0.0
    if t == 1.0:
        return 1.0
    if gamma == 0.0:
        return t * sigma / (1.0 - t + t * sigma)
    return _angle(sigma, gamma, t) / gamma


def _log_ell2(log_sigma, gamma, t):
    """``log(ell(t)^2)`` without cancellation when ``sigma ~ 1`` and ``gamma ~ 0``.

    Uses ``ell^2 - 1 = 2t(1-t)(sigma cos(gamma) - 1) + t^2 (sigma^2 - 1)``.
    """
    sc1 = math.expm1(log_sigma) * math.cos(gamma) - 2.0 * math.sin(0.5 * gamma) ** 2
    return math.log1p(2.0 * t * (1.0 - t) * sc1 + t * t * math.expm1(2.0 * log_sigma))


def _eta(log_sigma, gamma, t, nbeta):
    if t == 0.0 or t == 1.0:
        return 1.0
    alpha = _alpha(math.exp(log_sigma), gamma, t)
    return math.exp((_log_ell2(log_sigma, gamma, t) - 2.0 * alpha * log_sigma) / nbeta)


def _check_t(t):
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise InvalidInput(f"t={t} outside [0, 1]")
    return t


def _require_general(desc):
    if desc.branch is not Branch.GENERAL:
        raise BranchMismatch(f"operation requires the General branch, got {desc.branch.value}")


def alpha_t(desc, t):
    """Weight of the geometric-mean factor,
    ``arctan(t sigma sin(gamma) / (1 - t + t sigma cos(gamma))) / gamma``."""
    _require_general(desc)
    t = _check_t(t)
    if t == 0.0:
        return 0.0
    if t == 1.0:
        return 1.0
    s, g = desc.sigma, desc.gamma
    return math.atan(t * s * math.sin(g) / (1.0 - t + t * s * math.cos(g))) / g


def eta_t(desc, t):
    """Scalar factor ``(ell(t)^2 / sigma^(2 alpha(t)))^(1/(n beta))``."""
    _require_general(desc)
    t = _check_t(t)
    return _eta(desc.log_sigma, desc.gamma, t, desc.n * desc.beta.beta)


def _lindep_point(desc, t):
    """``((1-t) A^p + t B^p)^(1/p)``, ``p = n beta / 2``, for ``B = c A``.

    In the frame where ``A = I`` and ``B = diag(mu)`` this is the scalar power
    mean of 1 and ``mu_i``; ``log1p``/``expm1`` keep it accurate as ``p -> 0``.
    """
    p = 0.5 * desc.n * desc.beta.beta
    k = np.exp(np.log1p(t * np.expm1(p * np.log(desc.mu))) / p)
    W = desc.sqrt_a @ desc.U
    out = (W * k) @ W.T
    return 0.5 * (out + out.T)


def _general_point(desc, t):
    nbeta = desc.n * desc.beta.beta
    alpha = _alpha(desc.sigma, desc.gamma, t)
    return _eta(desc.log_sigma, desc.gamma, t, nbeta) * desc.rel.sharp(alpha)


def _diagonal_profile(desc, t):
    """Eigenvalue curves ``lambda_i(t)`` joining ``I`` and ``diag(mu)``.

    Four-quadrant form valid for ``0 < gamma < pi``::

        lambda_i^(n beta) = (1-t)(1-t+t sigma cos g) exp( n beta th1 zeta_i / g)
                          + mu_i^(n beta) t (t+(1-t) cos g / sigma) exp(-n beta th2 zeta_i / g)

    with ``th1 = atan2(t sigma sin g, 1-t+t sigma cos g)`` and
    ``th2 = atan2((1-t) sin g, (1-t) cos g + t sigma)``.
    """
    n = desc.n
    nbeta = n * desc.beta.beta
    s, g = desc.sigma, desc.gamma
    sg, cg = math.sin(g), math.cos(g)
    logmu = np.log(desc.mu)
    zeta = logmu - logmu.mean()
    th1 = math.atan2(t * s * sg, 1.0 - t + t * s * cg)
    th2 = math.atan2((1.0 - t) * sg, (1.0 - t) * cg + t * s)
    first = (1.0 - t) * (1.0 - t + t * s * cg) * np.exp(nbeta * th1 * zeta / g)
    second = t * (t + (1.0 - t) * cg / s) * np.exp(nbeta * (logmu - th2 * zeta / g))
    return (first + second) ** (1.0 / nbeta)


def _extended_point(desc, t):
    lam = _diagonal_profile(desc, t)
    W = desc.sqrt_a @ desc.U
    out = (W * lam) @ W.T
    return 0.5 * (out + out.T)


def _point(desc, t):
    """Evaluate the geodesic formula without range checks on ``t``."""
    if desc.branch is Branch.LINEARLY_DEPENDENT:
        return _lindep_point(desc, t)
    if desc.branch is Branch.GENERAL:
        return _general_point(desc, t)
    return _extended_point(desc, t)


def geodesic_point(desc, t):
    """Point ``G_beta(A, B, t)`` of the geodesic, ``t`` in [0, 1]; exact at the ends."""
    t = _check_t(t)
    if t == 0.0:
        return desc.A.copy()
    if t == 1.0:
        return desc.B.copy()
    return _point(desc, t)


def geodesic_point_extended_consistency(desc, t):
    """Relative Frobenius gap between the four-quadrant eigenvalue formula
    and ``eta(t) A #_alpha(t) B`` at ``t``; both apply when ``gamma < pi/2``."""
    _require_general(desc)
    t = _check_t(t)
    G = _general_point(desc, t)
    return float(np.linalg.norm(_extended_point(desc, t) - G) / np.linalg.norm(G))


def geodesic(A, B, beta, t):
    """Convenience wrapper: build the descriptor and evaluate at ``t``."""
    return geodesic_point(build_geodesic(A, B, beta), t)
