"""Weighted means of two SPD matrices and the algebraic identities of ``G_beta``.

Four methods share the same Cholesky/eigen kernels:

* ``GBeta(beta)``: the geodesic mean of the beta-power metric.
* ``PowerEuclidean(p)``: ``((1-t) A^p + t B^p)^(1/p)``.
* ``LimPalfia(p)``: ``A #_{1/p} ((1-t) A + t (A #_p B))``.
* ``Geometric()``: ``A #_t B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GammaOutOfRange, InvalidInput, ZeroPower
from .geodesic import (
    Branch,
    GeodesicDescriptor,
    _alpha,
    _eta,
    build_geodesic,
    geodesic_point,
)
from .geometry import normalize_det
from .linalg import RelativeEig, as_spd, check_same_dim, geometric_mean, spd_power
from .metric import as_beta


@dataclass(frozen=True)
class GBeta:
    beta: float


@dataclass(frozen=True)
class PowerEuclidean:
    p: float


@dataclass(frozen=True)
class LimPalfia:
    p: float


@dataclass(frozen=True)
class Geometric:
    pass


@dataclass(frozen=True)
class MeanRequest:
    A: np.ndarray
    B: np.ndarray
    t: float
    method: GBeta | PowerEuclidean | LimPalfia | Geometric

    def __post_init__(self):
        t = float(self.t)
        if not 0.0 <= t <= 1.0:
            raise InvalidInput(f"weight t={t} outside [0, 1]")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "A", as_spd(self.A, "A"))
        object.__setattr__(self, "B", as_spd(self.B, "B"))
        check_same_dim(self.A, self.B)
        if isinstance(self.method, (PowerEuclidean, LimPalfia)) and self.method.p == 0:
            raise ZeroPower("power mean parameter p must be nonzero")
        if isinstance(self.method, GBeta):
            as_beta(self.method.beta, self.A.shape[0])


def power_euclidean(A, B, t, p):
    if p == 0:
        raise ZeroPower("power mean parameter p must be nonzero")
    if t == 0.0:
        return A
    if t == 1.0:
        return B
    return spd_power((1.0 - t) * spd_power(A, p) + t * spd_power(B, p), 1.0 / p)


def lim_palfia(A, B, t, p):
    if p == 0:
        raise ZeroPower("power mean parameter p must be nonzero")
    if t == 0.0:
        return A
    inner = (1.0 - t) * A + t * RelativeEig.of(A, B).sharp(p)
    inner = 0.5 * (inner + inner.T)
    return RelativeEig.of(A, inner).sharp(1.0 / p)


def g_beta(A, B, t, beta):
    """``G_beta(A, B, t)``; only defined while ``gamma_beta(A, B) < pi``."""
    return geodesic_point(build_geodesic(A, B, beta), t)


def mean(req):
    """Evaluate a :class:`MeanRequest`."""
    A, B, t, m = req.A, req.B, req.t, req.method
    if isinstance(m, GBeta):
        return g_beta(A, B, t, m.beta)
    if isinstance(m, PowerEuclidean):
        return power_euclidean(A, B, t, float(m.p))
    if isinstance(m, LimPalfia):
        return lim_palfia(A, B, t, float(m.p))
    if isinstance(m, Geometric):
        return geometric_mean(A, B, t)
    raise InvalidInput(f"unknown mean method {m!r}")


# ---------------------------------------------------------------------------
# identities


def _rel(X, Y):
    return float(np.linalg.norm(X - Y) / np.linalg.norm(Y))


def _alpha_of(desc: GeodesicDescriptor, t):
    return _alpha(desc.sigma, desc.gamma, t)


def _eta_of(desc: GeodesicDescriptor, t):
    return _eta(desc.log_sigma, desc.gamma, t, desc.n * desc.beta.beta)


def solve_t_sharp(desc, target, iterations=80):
    """Bisection for ``s`` in [0, 1] with ``alpha(A, B, s) == target``.

    ``alpha`` is strictly increasing from 0 to 1, so this always brackets.
    """
    lo, hi = 0.0, 1.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if _alpha_of(desc, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class PropertyReport:
    """Relative errors of the six identities of ``G_beta``.

    1. congruence ``G(M^T A M, M^T B M, t) = M^T G(A, B, t) M``
    2. reversal ``G(A, B, t) = G(B, A, 1-t)``
    3. inversion ``G(A^-1, B^-1, t) = A^-1 G(A, B, 1-t) B^-1 = B^-1 G(A, B, 1-t) A^-1``
    4. ``G(A^-1, B^-1, t) / eta(A^-1, B^-1, t) = (G(A, B, s) / eta(A, B, s))^-1``
       where ``alpha(A, B, s) = 1 - alpha(A, B, 1-t)``
    5. scaling ``G(aA, bB, t) = ((1-t) a^q + t b^q)^(1/q) G(A, B, t~)``, ``q = n beta/2``
    6. midpoint ``G(A, B, 1/(1+sigma)) = (2 sqrt(sigma) cos(gamma/2)/(1+sigma))^(2/(n beta)) A #_1/2 B``
    """

    congruence: float
    reversal: float
    inversion: float
    inversion_sharp: float
    scaling: float
    midpoint: float
    t_sharp: float

    def as_dict(self):
        return {
            "1_congruence": self.congruence,
            "2_reversal": self.reversal,
            "3_inversion": self.inversion,
            "4_inversion_sharp": self.inversion_sharp,
            "5_scaling": self.scaling,
            "6_midpoint": self.midpoint,
        }


def check_properties(A, B, beta, t, M, a, b):
    """Evaluate both sides of each identity independently; see :class:`PropertyReport`."""
    A = as_spd(A, "A")
    B = as_spd(B, "B")
    n = check_same_dim(A, B)
    beta = as_beta(beta, n)
    t = float(t)
    M = np.asarray(M, dtype=float).reshape(n, n)

    d = build_geodesic(A, B, beta)
    if d.branch is Branch.GENERAL_EXTENDED:
        raise GammaOutOfRange("properties hold for gamma < pi/2 only")
    G = geodesic_point(d, t)
    nb = n * beta.beta

    # 1
    Gm = g_beta(M.T @ A @ M, M.T @ B @ M, t, beta)
    e1 = _rel(Gm, M.T @ G @ M)
    # 2
    e2 = _rel(g_beta(B, A, 1.0 - t, beta), G)
    # 3
    Ai, Bi = np.linalg.inv(A), np.linalg.inv(B)
    Ai, Bi = 0.5 * (Ai + Ai.T), 0.5 * (Bi + Bi.T)
    d_inv = build_geodesic(Ai, Bi, beta)
    G_inv = geodesic_point(d_inv, t)
    G_rev = geodesic_point(d, 1.0 - t)
    e3 = max(
        _rel(np.linalg.solve(A, np.linalg.solve(B.T, G_rev.T).T), G_inv),
        _rel(np.linalg.solve(B, np.linalg.solve(A.T, G_rev.T).T), G_inv),
    )
    # 4
    target = 1.0 - _alpha_of(d, 1.0 - t)
    ts = solve_t_sharp(d, target)
    lhs = G_inv / _eta_of(d_inv, t)
    rhs = np.linalg.inv(geodesic_point(d, ts) / _eta_of(d, ts))
    e4 = _rel(lhs, rhs)
    # 5
    q = 0.5 * nb
    wa, wb = (1.0 - t) * a**q, t * b**q
    t_tilde = wb / (wa + wb)
    lhs5 = g_beta(a * A, b * B, t, beta)
    rhs5 = (wa + wb) ** (1.0 / q) * geodesic_point(d, t_tilde)
    e5 = _rel(lhs5, rhs5)
    # 6
    s, g = d.sigma, d.gamma
    factor = (2.0 * math.sqrt(s) * math.cos(g / 2.0) / (1.0 + s)) ** (2.0 / nb)
    e6 = _rel(geodesic_point(d, 1.0 / (1.0 + s)), factor * geometric_mean(A, B, 0.5))

    return PropertyReport(e1, e2, e3, e4, e5, e6, ts)


def beta_limit_scan(A, B, t, betas, normalize=True):
    """Relative gap between ``G_beta(A, B, t)`` and ``A #_t B`` for each beta.

    With ``normalize`` (default) both inputs are first scaled to unit
    determinant so the scan isolates the dependence on ``gamma``.
    """
    A = as_spd(A, "A")
    B = as_spd(B, "B")
    check_same_dim(A, B)
    if normalize:
        A, B = normalize_det(A), normalize_det(B)
    ref = geometric_mean(A, B, t)
    out = []
    for beta in betas:
        d = build_geodesic(A, B, beta)
        if d.branch is Branch.GENERAL_EXTENDED:
            raise GammaOutOfRange(f"gamma >= pi/2 at beta={beta}")
        out.append((float(beta), _rel(geodesic_point(d, t), ref)))
    return out
