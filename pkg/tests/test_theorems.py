"""M-matrices from the intertwiner, and the zero-curvature and coupling-shift checks."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from laxfactor import elliptic as ell
from laxfactor import schlesinger as sch
from laxfactor.linalg import trace_free
from laxfactor.models import ModelSpec, PhasePoint, m_cm, m_rs
from laxfactor.rmatrix import m_rs_example, m_rs_theorem1, sklyanin_factorized_residual, theorem1_g_f

TAU = 0.3 + 0.9j
HBAR, C, NU = 0.17 + 0.02j, 1.3, 0.7
Z = 0.21 + 0.13j


def sample(kind, N, rng):
    if kind == "elliptic":
        q = 0.12 * np.arange(N) + 0.03 * rng.standard_normal(N) + 0.04j * rng.standard_normal(N)
    else:
        q = 0.8 * np.arange(N) + 0.1 * rng.standard_normal(N) + 0.1j * rng.standard_normal(N)
    return q - q.mean(), 0.3 * rng.standard_normal(N) + 0.1j * rng.standard_normal(N)


class TestTheorem1:
    @pytest.mark.parametrize("N", [2, 3])
    def test_elliptic_m_matrix(self, N, rng):
        cls = ell.Elliptic(TAU)
        q, p = sample("elliptic", N, rng)
        M = m_rs(ModelSpec("RS", cls, True, hbar=HBAR, c=C, N=N), PhasePoint(q, p), Z)
        assert_allclose(m_rs_theorem1(q, p, Z, HBAR, C, cls), trace_free(M), atol=1e-8)

    @pytest.mark.parametrize("N", [2, 3])
    def test_g_is_scalar(self, N, rng):
        cls = ell.Elliptic(TAU)
        q, p = sample("elliptic", N, rng)
        from laxfactor.models import velocity_map
        qd = velocity_map(ModelSpec("RS", cls, True, hbar=HBAR, c=C, N=N), PhasePoint(q, p))
        G, _ = theorem1_g_f(q, p, HBAR, C, cls)
        assert_allclose(G, qd.sum() * np.eye(N), atol=1e-10)

    @pytest.mark.parametrize("N", [2, 3, 4])
    @pytest.mark.parametrize("kind", ["trig", "rational"])
    @pytest.mark.parametrize("spectral", [True, False])
    def test_examples(self, N, kind, spectral, rng):
        cls = ell.make_class(kind)
        q, p = sample(kind, N, rng)
        z = Z if spectral else None
        M = m_rs(ModelSpec("RS", cls, spectral, hbar=HBAR, c=C, N=N), PhasePoint(q, p), z)
        assert_allclose(m_rs_example(cls, spectral, q, p, z, HBAR, C), trace_free(M), atol=1e-8)

    def test_example_rejects_elliptic(self, rng):
        q, p = sample("elliptic", 2, rng)
        with pytest.raises(ValueError):
            m_rs_example(ell.Elliptic(TAU), True, q, p, Z, HBAR, C)

    def test_sklyanin_form(self, rng):
        q, p = sample("elliptic", 3, rng)
        assert sklyanin_factorized_residual(q, p, Z, HBAR, C, TAU) < 1e-9


class TestTheorem2:
    @pytest.mark.parametrize("N", [2, 3, 4])
    @pytest.mark.parametrize("kind,spectral", [("elliptic", True), ("trig", True), ("trig", False),
                                               ("rational", True), ("rational", False)])
    def test_m_matrix(self, N, kind, spectral, rng):
        cls = ell.make_class(kind, TAU if kind == "elliptic" else None)
        q, p = sample(kind, N, rng)
        z = Z if spectral else None
        M = m_cm(ModelSpec("CM", cls, spectral, nu=NU, N=N), PhasePoint(q, p), z)
        assert_allclose(sch.m_cm_theorem2(q, p, z, NU, cls, spectral), trace_free(M), atol=1e-8)

    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_proof_identities(self, N, rng):
        q, p = sample("elliptic", N, rng)
        assert sch.l_diagonal_residual(q, Z, TAU) < 1e-9
        assert sch.g2_recursion_residual(q, Z, TAU) < 1e-9
        assert sch.delta_identity_residual(q, TAU) < 1e-9
        assert sch.offdiag_closed_form_residual(q, Z, TAU) < 1e-9
        assert sch.diagonal_closed_form_residual(q, p, Z, TAU) < 1e-9

    def test_time_pair(self, rng):
        cls = ell.Elliptic(TAU)
        q, p = sample("elliptic", 3, rng)
        tp = sch.time_pair(q, p, cls)
        assert_allclose(tp.dq_t - tp.dq_tau, tp.d / 3)
        # sum of E1 over all ordered pairs is zero by oddness
        assert abs(tp.d.sum()) < 1e-12


class TestSchlesinger:
    @pytest.mark.parametrize("kind", ["elliptic", "rational"])
    @pytest.mark.parametrize("N", [2, 3])
    def test_coupling_shift(self, kind, N, rng):
        cls = ell.make_class(kind, TAU if kind == "elliptic" else None)
        q, p = sample(kind, N, rng)
        assert sch.schlesinger_shift_residual(q, p, Z, NU, cls) < 1e-10

    def test_units(self):
        assert sch.schlesinger_unit(ell.Elliptic(TAU), 4) == 0.25
        assert sch.schlesinger_unit(ell.RATIONAL, 4) == 1.0

    def test_scalar_toy(self):
        assert sch.scalar_toy_residual(0.21 + 0.13j, 0.37, TAU) < 1e-10


class TestZeroCurvature:
    @pytest.mark.parametrize("N", [2, 3])
    def test_shifted_passes(self, N, rng):
        q, p = sample("elliptic", N, rng)
        assert sch.zero_curvature_residual(q, p, Z, NU, TAU) < 1e-6

    def test_unshifted_defect_is_scalar(self, rng):
        cls = ell.Elliptic(TAU)
        q, p = sample("elliptic", 2, rng)
        R = sch.zero_curvature_residual(q, p, Z, NU, TAU, shift=False, return_matrix=True)
        assert np.abs(R).max() > 1e-3
        # the defect is exactly nu 2 pi i d_tau E1(z) times the identity
        assert_allclose(R, NU * 2j * np.pi * cls.dtau_E1(Z) * np.eye(2), atol=1e-6)
