import mpmath as mp
import numpy as np
import pytest
from numpy.testing import assert_allclose

from laxfactor import elliptic as ell
from laxfactor.errors import NearSingular, NonConvergent, ThetaOverflow

TAUS = [1j, 0.3 + 0.8j, 2j]
mp.mp.dps = 30


def mp_theta_char(a, b, z, tau, terms=60):
    """Defining series summed in extended precision."""
    z, tau = mp.mpc(z), mp.mpc(tau)
    return complex(mp.fsum(mp.exp(mp.pi * 1j * (j + a) ** 2 * tau + 2 * mp.pi * 1j * (j + a) * (z + b))
                           for j in range(-terms, terms + 1)))


def mp_theta1(z, tau, n=0):
    """theta[1/2;1/2](z) = -theta_1(pi z, q) with q = exp(i pi tau)."""
    q = mp.exp(1j * mp.pi * mp.mpc(tau))
    return complex(-(mp.pi ** n) * mp.jtheta(1, mp.pi * mp.mpc(z), q, derivative=n))


def mp_wp(z, tau):
    """Weierstrass p of the lattice Z + tau Z through jtheta derivatives."""
    q = mp.exp(1j * mp.pi * mp.mpc(tau))
    x = mp.pi * mp.mpc(z)
    t0, t1, t2 = (mp.jtheta(1, x, q, derivative=k) for k in range(3))
    c = mp.jtheta(1, 0, q, derivative=3) / mp.jtheta(1, 0, q, derivative=1)
    return complex(mp.pi ** 2 * ((t1 / t0) ** 2 - t2 / t0) + mp.pi ** 2 * c / 3)


def random_points(rng, n, scale=0.4):
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


class TestThetaSeries:
    @pytest.mark.parametrize("tau", TAUS)
    @pytest.mark.parametrize("chr_", [(0.5, 0.5), (0, 0), (0.5, 0), (0, 0.5), (1 / 3, 0.25)])
    def test_matches_extended_precision_series(self, tau, chr_, rng):
        for z in random_points(rng, 5):
            assert_allclose(ell.theta_char(chr_, z, tau), mp_theta_char(*chr_, z, tau),
                            rtol=1e-12, atol=1e-13)

    @pytest.mark.parametrize("tau", TAUS)
    def test_theta1_and_derivatives_match_jtheta(self, tau, rng):
        for z in random_points(rng, 4):
            for n in range(4):
                assert_allclose(ell.theta1(z, tau, n), mp_theta1(z, tau, n), rtol=1e-11, atol=1e-12)

    def test_vectorized_shape(self):
        z = np.linspace(0.1, 0.4, 6).reshape(2, 3) + 0.1j
        out = ell.theta1(z, 1j)
        assert out.shape == (2, 3)
        assert_allclose(out[1, 2], ell.theta1(z[1, 2], 1j))

    def test_odd_and_vanishing_at_zero(self):
        assert abs(ell.theta1(0.0, 0.3 + 0.8j)) < 1e-15
        assert_allclose(ell.theta1(-0.2 + 0.1j, 1j), -ell.theta1(0.2 - 0.1j, 1j), rtol=1e-14)

    def test_eta_cubed_identity(self):
        # theta'(0) = -2 pi eta(tau)^3
        for tau in TAUS:
            assert_allclose(ell.theta1(0.0, tau, 1), -2 * np.pi * ell.dedekind_eta(tau) ** 3, rtol=1e-12)

    def test_rejects_lower_half_plane(self):
        with pytest.raises(NonConvergent):
            ell.theta1(0.1, -1j)

    def test_overflow_reported(self):
        with pytest.raises(ThetaOverflow):
            ell.theta1(60j, 0.01j + 1)

    def test_thin_torus_needs_too_many_terms(self):
        with pytest.raises(NonConvergent):
            ell.theta1(0.1, 1e-5j)

    def test_characteristic_representable(self):
        c = ell.ThetaChar(0.5, 1 / 3)
        assert c.representable(6)
        assert not c.representable(4)


class TestFunctionClasses:
    @pytest.mark.parametrize("tau", TAUS)
    def test_wp_against_jtheta(self, tau, rng):
        cls = ell.Elliptic(tau)
        for z in random_points(rng, 5):
            assert_allclose(cls.wp(z), mp_wp(z, tau), rtol=1e-10)
            assert_allclose(ell.wp_theta_quotient(z, tau), mp_wp(z, tau), rtol=1e-10)

    def test_e2_is_minus_derivative_of_e1(self, rng):
        cls = ell.Elliptic(0.3 + 0.8j)
        h = 1e-4
        for z in random_points(rng, 4):
            fd = (cls.E1(z + h) - cls.E1(z - h)) / (2 * h)
            assert_allclose(cls.E2(z), -fd, rtol=1e-7)

    def test_phi_residue_and_f(self, rng):
        cls = ell.Elliptic(1j)
        u = 0.31 + 0.12j
        # phi(z, u) ~ 1/z near z = 0
        assert_allclose(1e-6 * cls.phi(1e-6, u), 1.0, rtol=1e-5)
        h = 1e-5
        for z in random_points(rng, 3):
            fd = (cls.phi(z, u + h) - cls.phi(z, u - h)) / (2 * h)
            assert_allclose(cls.f(z, u), fd, rtol=1e-8)

    def test_trig_closed_forms(self):
        z, u = 0.3 + 0.2j, -0.7 + 0.1j
        assert_allclose(ell.TRIG.E1(z), 1 / np.tanh(z))
        assert_allclose(ell.TRIG.E2(z), 1 / np.sinh(z) ** 2)
        assert_allclose(ell.TRIG.phi(z, u), 1 / np.tanh(z) + 1 / np.tanh(u))
        assert_allclose(ell.TRIG.f(z, u), -1 / np.sinh(u) ** 2)

    def test_rational_closed_forms(self):
        assert ell.RATIONAL.phi(1.0, 1.0) == 2.0
        assert_allclose(ell.RATIONAL.E2(0.5j), -4.0)
        assert ell.RATIONAL.theta3_ratio() == 0.0

    def test_trig_limit_of_elliptic(self):
        # phi_ell(z, u) -> i pi phi_trig(i pi z, i pi u) for large Im tau
        cls = ell.Elliptic(8j)
        z, u = 0.13 + 0.02j, 0.21 - 0.05j
        assert_allclose(cls.phi(z, u), 1j * np.pi * ell.TRIG.phi(1j * np.pi * z, 1j * np.pi * u),
                        rtol=1e-9)

    def test_make_class(self):
        assert ell.make_class("trig") is ell.TRIG
        assert ell.make_class("rational") is ell.RATIONAL
        assert ell.make_class("elliptic", 1j) == ell.Elliptic(1j)
        with pytest.raises(ValueError):
            ell.make_class("elliptic")
        with pytest.raises(ValueError):
            ell.make_class("hyperbolic")

    def test_pole_guard(self):
        cls = ell.Elliptic(1j)
        with pytest.raises(NearSingular):
            cls.E1(1.0 + 1j)
        with pytest.raises(NearSingular):
            ell.RATIONAL.phi(0.0, 1.0)
        # the radius is adjustable
        with ell.pole_radius(1e-2):
            with pytest.raises(NearSingular):
                cls.E1(5e-3)
        assert np.isfinite(cls.E1(5e-3))


class TestIdentities:
    @pytest.mark.parametrize("tau", TAUS)
    def test_fay_and_degenerations(self, tau, rng):
        cls = ell.Elliptic(tau)
        for _ in range(20):
            h, e, z, w = random_points(rng, 4)
            assert ell.fay_residual(h, e, z, w, cls) < 1e-10
            r1, r2 = ell.fay_degenerate_residuals(e, z, w, cls)
            assert max(r1, r2) < 1e-10

    @pytest.mark.parametrize("cls", [ell.TRIG, ell.RATIONAL])
    def test_fay_degenerate_classes(self, cls, rng):
        for _ in range(20):
            h, e, z, w = random_points(rng, 4)
            assert ell.fay_residual(h, e, z, w, cls) < 1e-10
            assert ell.squared_e1_residual(z, w, cls) < 1e-10

    @pytest.mark.parametrize("tau", TAUS)
    def test_heat_equations(self, tau, rng):
        for z in random_points(rng, 10):
            assert ell.heat_residual(z, tau) < 1e-10
            assert ell.log_theta_heat_residual(z, tau) < 1e-10
            assert ell.phi_heat_residual(z, 0.2 + 0.1j, tau) < 1e-10

    @pytest.mark.parametrize("tau", TAUS)
    def test_quasi_periodicity(self, tau, rng):
        for z in random_points(rng, 10, 0.3):
            assert max(ell.quasi_periodicity_residuals(z, 0.17 - 0.08j, tau)) < 1e-10

    @pytest.mark.parametrize("tau", TAUS)
    def test_e2_wp_and_squared_e1(self, tau, rng):
        cls = ell.Elliptic(tau)
        for x, y in random_points(rng, 20).reshape(10, 2):
            assert ell.e2_wp_residual(x, tau) < 1e-10
            assert ell.squared_e1_residual(x, y, cls) < 1e-10
            assert ell.phi_f_residual(x, y, 0.23 + 0.1j, cls) < 1e-10

    def test_tau_derivatives_by_finite_difference(self):
        cls = ell.Elliptic(0.3 + 0.8j)
        z, u, h = 0.21 + 0.1j, -0.17 + 0.05j, 1e-5
        up, dn = ell.Elliptic(cls.tau + h), ell.Elliptic(cls.tau - h)
        assert_allclose(cls.dtau_E1(z), (up.E1(z) - dn.E1(z)) / (2 * h), rtol=1e-7)
        assert_allclose(cls.dtau_phi(z, u), (up.phi(z, u) - dn.phi(z, u)) / (2 * h), rtol=1e-7)
