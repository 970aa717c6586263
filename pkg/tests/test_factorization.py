import numpy as np
import pytest
from numpy.testing import assert_allclose

from laxfactor import elliptic as ell
from laxfactor.errors import DegenerateConfiguration
from laxfactor.factorization import (FORMS, build_intertwiner, c0_matrix, d_factors, det_xi_closed_form,
                                     det_xi_stated, factorized_lax_cm, factorized_lax_rs,
                                     gauge_equivalence_residual, laurent_data, pole_cancellation_residual,
                                     psi_from_residue, psi_from_velocities, shift_matrix_c,
                                     spin_from_phase, xi_column_identity_residual)
from laxfactor.linalg import singular_ratio
from laxfactor.models import ModelSpec, PhasePoint, lax_matrix

TAU = 0.3 + 0.9j
HBAR, C, NU = 0.17 + 0.02j, 1.3, 0.7


def sample(kind, N, rng):
    if kind == "elliptic":
        q = 0.12 * np.arange(N) + 0.03 * rng.standard_normal(N) + 0.04j * rng.standard_normal(N)
    else:
        q = 0.8 * np.arange(N) + 0.1 * rng.standard_normal(N) + 0.1j * rng.standard_normal(N)
    return q - q.mean(), 0.3 * rng.standard_normal(N) + 0.1j * rng.standard_normal(N)


def vandermonde(x, N):
    return np.array([x ** k for k in range(N)])


class TestFactorizedLax:
    @pytest.mark.parametrize("N", [2, 3, 4])
    @pytest.mark.parametrize("kind", ["elliptic", "trig", "rational"])
    @pytest.mark.parametrize("model", ["RS", "RSprime", "CM"])
    def test_main_form_equals_direct(self, N, kind, model, rng):
        cls = ell.make_class(kind, TAU if kind == "elliptic" else None)
        for sp in ((True,) if kind == "elliptic" else (True, False)):
            spec = ModelSpec(model, cls, sp, hbar=HBAR, nu=NU, c=C, N=N)
            for _ in range(3):
                q, p = sample(kind, N, rng)
                z = 0.21 + 0.13j
                L = lax_matrix(spec, PhasePoint(q, p), z)
                if model == "CM":
                    F = factorized_lax_cm(cls, sp, q, p, z, NU)
                else:
                    F = factorized_lax_rs(cls, sp, q, p, z, HBAR, C, prime=model == "RSprime")
                assert_allclose(F, L, atol=1e-9 * (1 + np.abs(L).max()))

    @pytest.mark.parametrize("kind", ["trig", "rational"])
    def test_alternative_forms(self, kind, rng):
        cls = ell.make_class(kind)
        q, p = sample(kind, 3, rng)
        ph = PhasePoint(q, p)
        L = lax_matrix(ModelSpec("RS", cls, False, hbar=HBAR, c=C, N=3), ph)
        assert_allclose(factorized_lax_rs(cls, False, q, p, None, HBAR, C, variant="alt"), L, atol=1e-10)
        L = lax_matrix(ModelSpec("CM", cls, False, nu=NU, N=3), ph)
        assert_allclose(factorized_lax_cm(cls, False, q, p, None, NU, variant="alt"), L, atol=1e-10)

    def test_elliptic_explicit_cm(self, rng):
        cls = ell.Elliptic(TAU)
        q, p = sample("elliptic", 3, rng)
        z = 0.1 - 0.2j
        assert_allclose(factorized_lax_cm(cls, True, q, p, z, NU, variant="explicit"),
                        factorized_lax_cm(cls, True, q, p, z, NU), atol=1e-10)

    def test_no_alt_for_spectral(self, rng):
        q, p = sample("rational", 2, rng)
        with pytest.raises(ValueError):
            factorized_lax_cm(ell.RATIONAL, True, q, p, 0.3, NU, variant="alt")

    def test_coincident_coordinates(self):
        with pytest.raises(DegenerateConfiguration):
            factorized_lax_cm(ell.RATIONAL, True, [0.1, 0.1], [0, 0], 0.3, NU)


class TestIntertwiner:
    def test_forms_build(self):
        for form in FORMS:
            it = build_intertwiner(ell.Elliptic(TAU) if form == "elliptic" else ell.RATIONAL,
                                   True, 3, form=form)
            assert it.N == 3
        with pytest.raises(ValueError):
            build_intertwiner(ell.RATIONAL, True, 3, form="bogus")

    @pytest.mark.parametrize("form", ["elliptic", "trig-xi", "trig-v", "rational-xi", "rational-v"])
    def test_derivatives_by_finite_difference(self, form, rng):
        cls = ell.Elliptic(TAU) if form == "elliptic" else ell.RATIONAL
        it = build_intertwiner(cls, True, 3, form=form)
        q, _ = sample("elliptic", 3, rng)
        z, h = 0.17 + 0.05j, 1e-6
        assert_allclose(it.g(z, q, 1), (it.g(z + h, q) - it.g(z - h, q)) / (2 * h), rtol=1e-6, atol=1e-6)
        qdot = rng.standard_normal(3)
        fd = (it.g(z, q + h * qdot) - it.g(z, q - h * qdot)) / (2 * h)
        assert_allclose(it.g_dot(z, q, qdot), fd, rtol=1e-6, atol=1e-6)
        dq = it.dg_dq(z, q)
        assert_allclose(sum(d * v for d, v in zip(dq, qdot)), fd, rtol=1e-6, atol=1e-6)

    def test_tau_derivative(self, rng):
        q, _ = sample("elliptic", 2, rng)
        z, h = 0.17 + 0.05j, 1e-6
        g = lambda t: build_intertwiner(ell.Elliptic(t), True, 2).g(z, q)
        it = build_intertwiner(ell.Elliptic(TAU), True, 2)
        assert_allclose(it.g_dtau(z, q), (g(TAU + h) - g(TAU - h)) / (2 * h), rtol=1e-6, atol=1e-6)
        with pytest.raises(ValueError):
            build_intertwiner(ell.RATIONAL, True, 2).g_dtau(z, q)

    @pytest.mark.parametrize("N", [2, 3, 4, 5])
    def test_det_xi(self, N, rng):
        it = build_intertwiner(ell.Elliptic(TAU), True, N)
        q, _ = sample("elliptic", N, rng)
        z = 0.13 + 0.07j
        d = np.linalg.det(it.xi(z, q))
        assert_allclose(d, det_xi_closed_form(z, q, TAU), rtol=1e-9)
        # the stated product ordering differs by (-1)^{N(N-1)/2}
        assert_allclose(d, (-1) ** (N * (N - 1) // 2) * det_xi_stated(z, q, TAU), rtol=1e-9)

    def test_xi_vanishes_at_zero(self, rng):
        q, _ = sample("elliptic", 3, rng)
        it = build_intertwiner(ell.Elliptic(TAU), True, 3)
        assert abs(np.linalg.det(it.xi(0.0, q))) < 1e-12

    def test_column_identity(self, rng):
        q, _ = sample("elliptic", 3, rng)
        assert xi_column_identity_residual(0.2 + 0.1j, q, HBAR, TAU) < 1e-10

    def test_d_factors(self):
        q = np.array([0.3, -0.2, 0.5])
        assert_allclose(d_factors(q, 0.1, ell.RATIONAL)[0], (0.5 + 0.1) * (-0.2 + 0.1))


class TestConstantMatrices:
    def test_shift_matrix_translates_vandermonde(self):
        x, lam, N = 0.7 - 0.2j, 0.3, 4
        assert_allclose(shift_matrix_c(lam, N) @ vandermonde(x, N), vandermonde(x + lam, N))

    def test_c0_generates_shift(self):
        N = 4
        h = 1e-6
        assert_allclose(c0_matrix(N), (shift_matrix_c(h, N) - shift_matrix_c(-h, N)) / (2 * h),
                        atol=1e-8)


class TestRankOne:
    @pytest.mark.parametrize("N", [2, 3])
    def test_residue_is_rank_one(self, N, rng):
        cls = ell.Elliptic(TAU)
        q, p = sample("elliptic", N, rng)
        ld = laurent_data(build_intertwiner(cls, True, N), q)
        assert ld.rank_ratio < 1e-10
        # g^{-1}(z) ~ gbreve0 / z + A
        it = build_intertwiner(cls, True, N)
        z = 1e-4
        assert_allclose(np.linalg.inv(it.g(z, q)), ld.gbreve0 / z + ld.A,
                        atol=1e-5 * np.abs(ld.A).max())

    @pytest.mark.parametrize("N", [2, 3])
    def test_spin_and_gauge(self, N, rng):
        cls = ell.Elliptic(TAU)
        q, p = sample("elliptic", N, rng)
        S = spin_from_phase(q, p, HBAR, C, cls)
        assert singular_ratio(S) < 1e-10
        Snr = spin_from_phase(q, p, tau=cls, relativistic=False, nu=NU)
        assert singular_ratio(Snr) < 1e-10
        ld = laurent_data(build_intertwiner(cls, True, N), q)
        assert singular_ratio(np.vstack([psi_from_residue(ld),
                                         psi_from_velocities(q, p, HBAR, C, cls)])) < 1e-9
        assert gauge_equivalence_residual(q, p, 0.21 + 0.13j, HBAR, C, cls) < 1e-9
        assert pole_cancellation_residual(q, p, HBAR, C, cls) < 1e-9
