"""Riemannian distance, geodesic speed, curve length and the determinant law."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GammaOutOfRange
from .geodesic import Branch, _check_t, _log_ell2, _point, build_geodesic
from .geometry import delta
from .linalg import as_spd, check_same_dim, logdet
from .metric import as_beta, metric_eval

FD_STEP = 1e-5
QUAD_NODES = 64


@dataclass(frozen=True)
class DistanceReport:
    d_beta: float
    delta: float
    gamma: float
    logdet_a: float
    logdet_b: float
    branch: Branch


def _distance_from(logdet_a, logdet_b, gamma, beta, n):
    """``(2 sqrt(1/n - beta)/|beta|) sqrt((da - db)^2 + 4 da db sin^2(gamma/2))``
    with ``da = det(A)^(beta/2)``; the difference uses ``expm1`` so the
    ``beta -> 0`` limit does not cancel."""
    ha, hb = 0.5 * beta * logdet_a, 0.5 * beta * logdet_b
    diff = math.exp(ha) * math.expm1(hb - ha)
    cross = 4.0 * math.exp(ha + hb) * math.sin(0.5 * gamma) ** 2
    return 2.0 * math.sqrt(1.0 / n - beta) / abs(beta) * math.sqrt(diff * diff + cross)


def distance_beta(A, B, beta):
    """Closed-form distance ``d_beta(A, B)``, valid while ``gamma < pi/2``."""
    A = as_spd(A, "A")
    B = as_spd(B, "B")
    n = check_same_dim(A, B)
    b = as_beta(beta, n).beta
    desc = build_geodesic(A, B, b)
    if desc.branch is Branch.GENERAL_EXTENDED:
        raise GammaOutOfRange(
            f"gamma={desc.gamma:.6g} >= pi/2: closed-form distance not established"
        )
    d = _distance_from(desc.logdet_a, desc.logdet_b, desc.gamma, b, n)
    return DistanceReport(
        d_beta=d,
        delta=delta(A, B),
        gamma=desc.gamma,
        logdet_a=desc.logdet_a,
        logdet_b=desc.logdet_b,
        branch=desc.branch,
    )


def geodesic_length(desc):
    """Length of the closed-form curve from its constant speed.

    Coincides with ``d_beta`` on the ``gamma < pi/2`` branches and is also
    defined on the extended branch.
    """
    return _distance_from(desc.logdet_a, desc.logdet_b, desc.gamma, desc.beta.beta, desc.n)


def _derivative(curve, t, h):
    """Central difference, second-order one-sided near the ends of [0, 1]."""
    if t - h >= 0.0 and t + h <= 1.0:
        return (curve(t + h) - curve(t - h)) / (2.0 * h)
    if t - h < 0.0:
        return (-3.0 * curve(t) + 4.0 * curve(t + h) - curve(t + 2 * h)) / (2.0 * h)
    return (3.0 * curve(t) - 4.0 * curve(t - h) + curve(t - 2 * h)) / (2.0 * h)


def geodesic_speed(desc, t, h=FD_STEP):
    """Squared speed ``g_P(P', P')`` of the closed-form geodesic at ``t``."""
    t = _check_t(t)
    P = _point(desc, t)
    dP = _derivative(lambda s: _point(desc, s), t, h)
    dP = 0.5 * (dP + dP.T)
    return metric_eval(P, dP, dP, desc.beta.beta)


def curve_length(curve, beta, nodes=QUAD_NODES, h=FD_STEP):
    """Gauss-Legendre length of ``curve: [0, 1] -> SPD`` under the beta metric."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    ts = 0.5 * (x + 1.0)
    n = np.atleast_2d(curve(0.0)).shape[0]
    b = as_beta(beta, n).beta
    total = 0.0
    for t, wi in zip(ts, w):
        P = np.atleast_2d(curve(float(t)))
        dP = np.atleast_2d(_derivative(curve, float(t), h))
        dP = 0.5 * (dP + dP.T)
        total += wi * math.sqrt(max(metric_eval(P, dP, dP, b), 0.0))
    return 0.5 * total


def det_along_geodesic(desc, t):
    """``det P(t)`` from ``det(P(t))^beta = det(A)^beta ell(t)^2``, where
    ``ell(t)^2 = (1-t)^2 + 2t(1-t) sigma cos(gamma) + t^2 sigma^2``."""
    return math.exp(logdet_along_geodesic(desc, t))


def logdet_along_geodesic(desc, t):
    t = _check_t(t)
    return desc.logdet_a + _log_ell2(desc.log_sigma, desc.gamma, t) / desc.beta.beta


def det_law_error(desc, t):
    """Relative gap between the closed-form determinant and ``det(geodesic(t))``."""
    closed = logdet_along_geodesic(desc, t)
    actual = logdet(_point(desc, _check_t(t)))
    return abs(math.expm1(actual - closed))
