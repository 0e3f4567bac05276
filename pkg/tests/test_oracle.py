import dataclasses
import math

import numpy as np
import pytest

from _gen import random_spd, random_symmetric, window_beta
from powerspd.distance import det_along_geodesic
from powerspd.errors import GammaOutOfRange, InvalidInput, LeftCone, NoConvergence
from powerspd.geodesic import _point, build_geodesic, geodesic_point
from powerspd.geometry import beta_bounds
from powerspd.metric import BetaParam
from powerspd.oracle import (
    _rk4,
    appendix_constants,
    integrate_ivp,
    ode_rhs,
    ode_state_drift,
    residual_check,
    solve_bvp_shooting,
)

GRID = np.linspace(0.0, 1.0, 11)


def _ray_g0(r0, r1, beta, n):
    return (2.0 / (n * beta)) * ((r1 / r0) ** (0.5 * n * beta) - 1.0)


def _rel(X, Y):
    return float(np.linalg.norm(X - Y) / np.linalg.norm(Y))


class TestOdeRhs:
    def test_zero(self):
        assert np.array_equal(ode_rhs(np.zeros((3, 3)), -1.0), np.zeros((3, 3)))

    def test_identity(self):
        # (-1/6)(2 + 4) I + 2 I
        np.testing.assert_allclose(ode_rhs(np.eye(2), -1.0), np.eye(2), rtol=1e-15)

    def test_trace_identity(self, rng):
        for n, beta in ((2, -1.0), (3, 0.2), (5, -4.0)):
            G = rng.standard_normal((n, n))
            t1, t2 = np.trace(G @ G), np.trace(G) ** 2
            nb = n * beta
            expected = nb / (2 * (1 - nb)) * (t1 - beta * t2) - beta * t2
            assert np.trace(ode_rhs(G, beta)) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_batched(self, rng):
        Gs = rng.standard_normal((4, 3, 3))
        out = ode_rhs(Gs, -0.5)
        for G, R in zip(Gs, out):
            np.testing.assert_allclose(R, ode_rhs(G, -0.5), rtol=1e-15)


class TestIvp:
    def test_zero_velocity(self, rng):
        A = random_spd(rng, 3)
        traj = integrate_ivp(A, np.zeros((3, 3)), -1.0, steps=50)
        np.testing.assert_allclose(traj.end, A, rtol=1e-15)

    def test_ray(self):
        g0 = _ray_g0(1.0, 4.0, -1.0, 2)
        traj = integrate_ivp(np.eye(2), g0 * np.eye(2), -1.0, steps=1000)
        assert _rel(traj.end, 4.0 * np.eye(2)) <= 1e-8

    def test_example_from_closed_form_velocity(self, example_pair):
        desc = build_geodesic(*example_pair, -1.0)
        h = 1e-5
        dP = (_point(desc, h) - _point(desc, -h)) / (2 * h)
        traj = integrate_ivp(example_pair[0], dP, -1.0, steps=2000)
        assert _rel(traj.end, example_pair[1]) <= 1e-6

    def test_rk4_order(self):
        g0 = _ray_g0(1.0, 4.0, -1.0, 2)
        errs = []
        for steps in (20, 40, 80):
            P1, _ = _rk4(np.eye(2), g0 * np.eye(2), -1.0, steps)
            errs.append(_rel(P1, 4.0 * np.eye(2)))
        assert 8.0 <= errs[0] / errs[1] <= 32.0
        assert 8.0 <= errs[1] / errs[2] <= 32.0

    def test_velocity_stays_self_adjoint(self, rng):
        A = random_spd(rng, 3)
        S = random_symmetric(rng, 3)
        traj = integrate_ivp(A, np.linalg.solve(A, S), -0.5, steps=400)
        assert max(ode_state_drift(P, G) for P, G in zip(traj.P, traj.G)) <= 1e-8

    def test_rejects_non_tangent(self):
        with pytest.raises(InvalidInput):
            integrate_ivp(np.diag([1.0, 2.0]), np.array([[0.0, 1.0], [0.0, 0.0]]), -1.0)

    def test_blow_up_reported(self):
        with pytest.raises(LeftCone):
            # scalar velocity obeys g' = |beta| g^2, which blows up at t = 0.2
            integrate_ivp(np.eye(2), 5.0 * np.eye(2), -1.0, steps=1000)


@pytest.mark.slow
class TestShooting:
    def test_identical(self, rng):
        A = random_spd(rng, 2)
        G0, _ = solve_bvp_shooting(A, A, -1.0, steps=200)
        assert np.linalg.norm(G0) <= 1e-14

    def test_example(self, example_pair):
        desc = build_geodesic(*example_pair, -1.0)
        _, traj = solve_bvp_shooting(*example_pair, -1.0)
        for k in range(0, 1001, 100):
            assert _rel(traj.P[k], geodesic_point(desc, traj.t[k])) <= 1e-6

    def test_lindep_recovers_ray(self):
        G0, _ = solve_bvp_shooting(np.eye(2), 4.0 * np.eye(2), -1.0)
        np.testing.assert_allclose(G0, _ray_g0(1.0, 4.0, -1.0, 2) * np.eye(2), atol=1e-8)

    def test_callback_and_abort(self, example_pair):
        seen = []
        solve_bvp_shooting(*example_pair, -1.0, steps=200, callback=lambda i, r: seen.append(r))
        assert seen[-1] <= 1e-10 and len(seen) >= 2

        class Stop(Exception):
            pass

        def stop(i, r):
            raise Stop

        with pytest.raises(Stop):
            solve_bvp_shooting(*example_pair, -1.0, steps=50, callback=stop)

    def test_no_convergence(self, example_pair):
        with pytest.raises(NoConvergence):
            solve_bvp_shooting(*example_pair, -1.0, steps=50, max_newton=0)


class TestResidual:
    def test_example(self, example_pair):
        assert residual_check(build_geodesic(*example_pair, -1.0), grid=11, h=1e-4) <= 1e-6

    def test_lindep(self):
        assert residual_check(build_geodesic(np.eye(2), 4.0 * np.eye(2), -1.0)) <= 1e-6

    def test_random_n3(self, rng):
        while True:
            A, B = random_spd(rng, 3), random_spd(rng, 3)
            desc = build_geodesic(A, B, -0.3)
            if desc.gamma < math.pi / 2:
                break
        assert residual_check(desc) <= 1e-6

    @pytest.mark.parametrize("frac", [0.3, 0.6, 0.9])
    def test_extended_diagonal(self, frac):
        A, B = np.eye(3), np.diag([2.0, 0.8, 0.625])
        bb = beta_bounds(A, B)
        beta = bb.beta_1 + frac * (bb.beta_hat_1 - bb.beta_1)
        desc = build_geodesic(A, B, beta)
        assert desc.extended
        assert residual_check(desc) <= 1e-6

    def test_extended_general_pair(self):
        A = np.array([[2.0, 0.3], [0.3, 1.0]])
        D = np.diag([1.6, 0.7])
        # det B = det A keeps sigma = 1, away from boundary layers
        B = A @ D @ A / np.sqrt(np.linalg.det(A) * np.linalg.det(D))
        bb = beta_bounds(A, B)
        desc = build_geodesic(A, B, 0.5 * (bb.beta_1 + bb.beta_hat_1))
        assert desc.extended
        assert residual_check(desc) <= 1e-6

    def test_detects_wrong_curve(self, example_pair):
        desc = build_geodesic(*example_pair, -1.0)
        wrong = dataclasses.replace(desc, beta=BetaParam(-3.0, 2))
        assert residual_check(wrong) > 1e-3


class TestAppendix:
    def test_example_constants(self):
        c = appendix_constants([1.0, 1.0], [1.0, 2.0], -1.0)
        assert c.phi == pytest.approx(2.184361, rel=1e-5)
        assert c.psi == pytest.approx(1.373214, rel=1e-5)
        assert (math.atan(c.psi) - math.atan(c.phi)) ** 2 == pytest.approx(c.gamma**2, abs=1e-10)

    def test_invariants(self, rng):
        for n in (2, 3, 5):
            a, b = np.exp(rng.uniform(-1, 1, n)), np.exp(rng.uniform(-1, 1, n))
            beta = window_beta(rng, np.diag(a), np.diag(b))
            c = appendix_constants(a, b, beta)
            assert abs(c.b.sum()) <= 1e-10
            assert np.sum(c.b**2) == pytest.approx(4 * n * (1 - n * beta), rel=1e-9)
            assert (math.atan(c.psi) - math.atan(c.phi)) ** 2 == pytest.approx(c.gamma**2, abs=1e-10)

    def test_n2_sum_exact(self):
        c = appendix_constants([1.0, 1.0], [1.0, 2.0], -1.0)
        assert c.b[0] + c.b[1] == 0.0

    @pytest.mark.parametrize("beta", [-1.0, 0.3, -50.0])
    def test_reconstruction(self, beta):
        a, b = np.array([1.0, 1.5, 0.7]), np.array([2.0, 1.1, 0.9])
        desc = build_geodesic(np.diag(a), np.diag(b), beta)
        c = appendix_constants(a, b, beta)
        for t in GRID:
            lam = np.diag(geodesic_point(desc, t))
            np.testing.assert_allclose(c.eigenvalues(t), lam, rtol=1e-10)

    def test_sign_choices_agree(self):
        a, b = [1.0, 1.0], [1.0, 2.0]
        c, cf = appendix_constants(a, b, -1.0), appendix_constants(a, b, -1.0, flip=True)
        for t in GRID:
            np.testing.assert_allclose(c.eigenvalues(t), cf.eigenvalues(t), rtol=1e-12)

    def test_det_reconstruction(self):
        a, b = [1.0, 1.0], [1.0, 2.0]
        c = appendix_constants(a, b, -1.0)
        desc = build_geodesic(np.diag(a), np.diag(b), -1.0)
        for t in GRID:
            ht = c.h(t)
            det_beta = 1.0 * (1 + ht * ht) / (1 + c.phi**2)
            assert det_beta ** (1 / c.beta) == pytest.approx(det_along_geodesic(desc, t), rel=1e-10)

    def test_out_of_range(self):
        with pytest.raises(GammaOutOfRange):
            appendix_constants([1.0, 1.0], [2.0, 2.0], -1.0)
        with pytest.raises(GammaOutOfRange):
            appendix_constants([1.0, 1.0], [1.0, 2.0], -500.0)

    def test_non_diagonal_rejected(self):
        with pytest.raises(InvalidInput):
            appendix_constants(np.array([[1.0, 0.1], [0.1, 1.0]]), [1.0, 2.0], -1.0)
