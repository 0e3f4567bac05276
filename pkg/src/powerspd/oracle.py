"""Independent numerical checks of the closed-form geodesics.

None of the routines here evaluate the closed-form curve to produce their
answer. ``residual_check`` differentiates the closed form numerically and
plugs it into the geodesic ODE. ``integrate_ivp`` and
``solve_bvp_shooting`` integrate that ODE directly. ``appendix_constants``
rebuilds the diagonal solution from its integration constants.

The geodesic ODE, with ``G = P^{-1} P'``::

    P' = P G
    G' = beta / (2 (1 - n beta)) (tr(G^2) - beta tr(G)^2) I - beta tr(G) G
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import GammaOutOfRange, InvalidInput, LeftCone, NoConvergence
from .geodesic import _point
from .geometry import gamma_from_norm
from .linalg import RelativeEig, as_spd, check_same_dim
from .metric import as_beta

RK4_STEPS = 1000


def ode_rhs(G, beta, n=None):
    """Right-hand side of the ``G`` equation; broadcasts over leading axes."""
    G = np.asarray(G, dtype=float)
    n = G.shape[-1] if n is None else n
    eye = np.eye(n)
    tr = np.trace(G, axis1=-2, axis2=-1)[..., None, None]
    tr2 = np.einsum("...ij,...ji->...", G, G)[..., None, None]
    coef = beta / (2.0 * (1.0 - n * beta)) * (tr2 - beta * tr**2)
    return coef * eye - beta * tr * G


@dataclass(frozen=True)
class OdeState:
    P: np.ndarray
    G: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    """Samples of an integrated geodesic; ``P[k]`` and ``G[k]`` sit at ``t[k]``."""

    t: np.ndarray
    P: np.ndarray
    G: np.ndarray

    def state(self, k):
        return OdeState(self.P[k], self.G[k])

    @property
    def end(self):
        return self.P[-1]


def _rk4(P0, G0, beta, steps, keep=False, check_every=1):
    n = P0.shape[-1]
    h = 1.0 / steps
    P, G = P0, G0
    Ps, Gs = [P], [G]

    def f(P, G):
        return P @ G, ode_rhs(G, beta, n)

    # overflow is detected below and reported as LeftCone
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            k1p, k1g = f(P, G)
            k2p, k2g = f(P + 0.5 * h * k1p, G + 0.5 * h * k1g)
            k3p, k3g = f(P + 0.5 * h * k2p, G + 0.5 * h * k2g)
            k4p, k4g = f(P + h * k3p, G + h * k3g)
            P = P + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            G = G + (h / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
            if not np.all(np.isfinite(P)):
                raise LeftCone(f"integration diverged at t={(k + 1) * h:.4g}")
            if (k + 1) % check_every == 0 or k + 1 == steps:
                try:
                    np.linalg.cholesky(0.5 * (P + np.swapaxes(P, -1, -2)))
                except np.linalg.LinAlgError:
                    raise LeftCone(f"P lost definiteness at t={(k + 1) * h:.4g}") from None
            if keep:
                Ps.append(P)
                Gs.append(G)
    if keep:
        return np.stack(Ps), np.stack(Gs)
    return P, G


def integrate_ivp(P0, G0, beta, steps=RK4_STEPS):
    """Classical RK4 on [0, 1] from ``P(0) = P0``, ``G(0) = G0``.

    ``P0 G0`` must be symmetric (``G0`` is ``P0^{-1}`` times a tangent vector).

    Raises
    ------
    LeftCone
        If ``P`` stops being positive definite; usually beta is too large for
        the step count or the initial velocity.
    """
    P0 = as_spd(P0, "P0")
    G0 = np.asarray(G0, dtype=float)
    n = check_same_dim(P0, G0)
    b = as_beta(beta, n).beta
    S = P0 @ G0
    if np.max(np.abs(S - S.T)) > 1e-10 * (1.0 + np.max(np.abs(S))):
        raise InvalidInput("P0 @ G0 must be symmetric")
    P, G = _rk4(P0, G0, b, int(steps), keep=True)
    return Trajectory(np.linspace(0.0, 1.0, int(steps) + 1), P, G)


def _sym_basis(n):
    iu = np.triu_indices(n)
    E = np.zeros((iu[0].size, n, n))
    k = np.arange(iu[0].size)
    E[k, iu[0], iu[1]] = 1.0
    E[k, iu[1], iu[0]] = 1.0
    return iu, E


def solve_bvp_shooting(
    A,
    B,
    beta,
    steps=RK4_STEPS,
    max_newton=30,
    tol=1e-10,
    callback: Callable[[int, float], None] | None = None,
):
    """Shoot for the initial velocity of the geodesic from ``A`` to ``B``.

    Unknown: ``G0 = A^{-1} S`` with ``S`` symmetric. Newton with a
    forward-difference Jacobian and step halving; the first guess is the
    velocity of the affine-invariant geodesic, ``log(A^{-1} B)``, halved
    while its trajectory leaves the cone.

    ``callback(iteration, relative_residual)`` is called once per Newton
    iteration; raising from it aborts the solve.

    Returns
    -------
    G0 : ndarray
    trajectory : Trajectory
    """
    A = as_spd(A, "A")
    B = as_spd(B, "B")
    n = check_same_dim(A, B)
    b = as_beta(beta, n).beta
    steps = int(steps)
    iu, E = _sym_basis(n)
    bnorm = np.linalg.norm(B)

    rel = RelativeEig.of(A, B)
    LQ = rel.LQ
    S = (LQ * np.log(rel.lam)) @ LQ.T
    S = 0.5 * (S + S.T)

    def endpoints(S_stack):
        G0 = np.linalg.solve(A, S_stack)
        P0 = np.broadcast_to(A, G0.shape).copy()
        P1, _ = _rk4(P0, G0, b, steps, check_every=max(1, steps // 20))
        return P1

    def residual(S):
        return endpoints(S[None])[0] - B

    # damp the first guess until its trajectory stays in the cone
    for _ in range(31):
        try:
            R = residual(S)
            break
        except LeftCone:
            S = 0.5 * S
    else:
        raise NoConvergence("no initial velocity keeps the trajectory in the cone")
    err = np.linalg.norm(R) / bnorm
    for it in range(max_newton + 1):
        if callback is not None:
            callback(it, err)
        if err <= tol:
            G0 = np.linalg.solve(A, S)
            return G0, integrate_ivp(A, G0, b, steps)
        if it == max_newton:
            break
        h = 1e-6 * max(1.0, np.max(np.abs(S)))
        P1 = endpoints(S[None] + h * E)
        J = ((P1 - (R + B)[None])[:, iu[0], iu[1]] / h).T
        step, *_ = np.linalg.lstsq(J, -R[iu], rcond=None)
        dS = np.zeros((n, n))
        dS[iu] = step
        dS = dS + np.triu(dS, 1).T
        lam = 1.0
        for _ in range(31):
            try:
                R_new = residual(S + lam * dS)
                err_new = np.linalg.norm(R_new) / bnorm
            except LeftCone:
                err_new = np.inf
            if err_new < err:
                break
            lam *= 0.5
        else:
            raise NoConvergence(f"line search failed at Newton iteration {it}, residual {err:.3e}")
        S, R, err = S + lam * dS, R_new, err_new
    raise NoConvergence(f"no convergence after {max_newton} Newton iterations, residual {err:.3e}")


def residual_check(desc, grid=11, h=1e-4):
    """Max normalized residual of the geodesic ODE along the closed form.

    ``P'`` and ``P''`` come from fourth-order central differences of the
    closed-form curve (the stencil may step ``2h`` outside [0, 1], where the
    formulas continue analytically). Returns
    ``max_t ||G' - rhs(G)||_F / (1 + ||rhs(G)||_F)``.
    """
    ts = np.linspace(0.0, 1.0, grid) if np.isscalar(grid) else np.asarray(grid, dtype=float)
    b = desc.beta.beta
    worst = 0.0
    for t in ts:
        Pm2, Pm, P0, Pp, Pp2 = (_point(desc, float(t) + s * h) for s in (-2.0, -1.0, 0.0, 1.0, 2.0))
        d1 = (8.0 * (Pp - Pm) - (Pp2 - Pm2)) / (12.0 * h)
        d2 = (16.0 * (Pp + Pm) - 30.0 * P0 - (Pp2 + Pm2)) / (12.0 * h**2)
        G = np.linalg.solve(P0, d1)
        dG = np.linalg.solve(P0, d2) - G @ G
        rhs = ode_rhs(G, b)
        worst = max(worst, np.linalg.norm(dG - rhs) / (1.0 + np.linalg.norm(rhs)))
    return float(worst)


@dataclass(frozen=True)
class AppendixConstants:
    """Integration constants of the diagonal geodesic.

    ``lambda_i(t)^(n beta) = lambda_i(0)^(n beta) (1 + h(t)^2)/(1 + phi^2)
    exp(b_i (arctan h(t) - arctan phi))`` with ``h(t) = (1-t) phi + t psi``.
    """

    phi: float
    psi: float
    b: np.ndarray
    a_hat: float
    beta: float
    gamma: float
    lam0: np.ndarray

    def h(self, t):
        return (1.0 - t) * self.phi + t * self.psi

    def eigenvalues(self, t):
        n = self.lam0.size
        ht = self.h(t)
        log_ratio = math.log1p(ht * ht) - math.log1p(self.phi**2)
        expo = log_ratio + self.b * (math.atan(ht) - math.atan(self.phi))
        return self.lam0 * np.exp(expo / (n * self.beta))


def _diagonal_entries(D, name):
    D = np.asarray(D, dtype=float)
    if D.ndim == 2:
        if np.any(D - np.diag(np.diag(D))):
            raise InvalidInput(f"{name} must be diagonal")
        D = np.diag(D)
    if D.ndim != 1 or np.any(D <= 0) or not np.all(np.isfinite(D)):
        raise InvalidInput(f"{name} must have positive finite diagonal")
    return D.copy()


def appendix_constants(A_diag, B_diag, beta, flip=False):
    """Constants ``(phi, psi, b_i)`` for the geodesic between diagonal matrices.

    ``phi = (1/sigma - cos g)/sin g`` and ``psi = (cos g - sigma)/sin g``;
    ``flip`` selects the equivalent pair ``(-phi, -psi)``. The ``b_i`` follow
    from ``b_i (arctan psi - arctan phi) = n beta zeta_i``.
    """
    a = _diagonal_entries(A_diag, "A_diag")
    bd = _diagonal_entries(B_diag, "B_diag")
    if a.size != bd.size:
        raise InvalidInput("dimension mismatch")
    n = a.size
    beta = as_beta(beta, n).beta
    logs = np.log(bd) - np.log(a)
    zeta = logs - logs.mean()
    norm = float(np.linalg.norm(zeta))
    gamma = gamma_from_norm(norm, beta, n)
    if not 0.0 < gamma < math.pi:
        raise GammaOutOfRange(f"gamma={gamma:.6g} outside (0, pi)")
    sigma = math.exp(0.5 * beta * logs.sum())
    sg, cg = math.sin(gamma), math.cos(gamma)
    phi = (1.0 / sigma - cg) / sg
    psi = (cg - sigma) / sg
    if flip:
        phi, psi = -phi, -psi
    bvec = n * beta * zeta / (math.atan(psi) - math.atan(phi))
    ell = int(np.argmax(zeta))
    a_i = zeta / zeta[ell]
    a_hat = float(np.sum(a_i**2) / (2.0 * n * (1.0 - n * beta)))
    return AppendixConstants(phi, psi, bvec, a_hat, beta, gamma, a)


def ode_state_drift(P, G):
    """``||P G - (P G)^T||_F`` relative to ``||P G||_F``: zero for a tangent velocity."""
    S = P @ G
    return float(np.linalg.norm(S - S.T) / max(np.linalg.norm(S), 1e-300))

