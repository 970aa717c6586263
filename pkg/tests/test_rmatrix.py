import numpy as np
import pytest
from numpy.testing import assert_allclose

from laxfactor import elliptic as ell
from laxfactor.errors import MissingDynamical
from laxfactor.linalg import permutation_operator
from laxfactor.rmatrix import (IRF_VARIANTS, RMatrixSpec, acf_residue_residual, baxter_belavin,
                               bb_residue_residual, classical_r, irf_hbar_inverse_residual,
                               irf_vertex_residual, lax_from_r_matrix, r_matrix,
                               yang_baxter_residual)

TAU = 0.3 + 0.9j
HBAR = 0.17 + 0.03j


def dyn_q(N, rng):
    q = 0.13 * np.arange(N) + 0.02 * rng.standard_normal(N)
    return tuple(q - q.mean())


class TestBaxterBelavin:
    @pytest.mark.parametrize("N", [2, 3])
    def test_unitarity(self, N):
        cls = ell.Elliptic(TAU)
        P = permutation_operator(N)
        z = 0.23 + 0.1j
        prod = baxter_belavin(z, HBAR, TAU, N) @ P @ baxter_belavin(-z, HBAR, TAU, N) @ P
        const = N ** 2 * (cls.wp(N * HBAR) - cls.wp(z))
        assert_allclose(prod, const * np.eye(N * N), atol=1e-10 * abs(const))

    @pytest.mark.parametrize("N", [2, 3])
    def test_classical_limit(self, N):
        z = 0.23 + 0.1j
        err = []
        for h in (1e-3, 5e-4):
            R = baxter_belavin(z, h, TAU, N)
            err.append(np.abs(R - np.eye(N * N) / h - classical_r(z, TAU, N)).max())
        # R = 1/hbar + r(z) + O(hbar)
        assert 1.8 < err[0] / err[1] < 2.2

    @pytest.mark.parametrize("N", [2, 3])
    def test_residue(self, N):
        assert bb_residue_residual(HBAR, TAU, N) < 1e-10

    def test_lax_from_identity_spin(self):
        # S = 1 keeps only the alpha = 0 term
        cls = ell.Elliptic(TAU)
        z = 0.23 + 0.1j
        assert_allclose(lax_from_r_matrix(np.eye(2), z, HBAR, TAU), cls.phi(z, HBAR) * np.eye(2),
                        rtol=1e-12)

    def test_normalized(self):
        spec = RMatrixSpec("BaxterBelavin", 2, HBAR, ell.Elliptic(TAU))
        assert_allclose(r_matrix(spec, 0.3, 0.1, normalized=True),
                        baxter_belavin(0.2, HBAR / 2, TAU, 2) / 2)


class TestSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            RMatrixSpec("Sklyanin", 2, HBAR, TAU)
        with pytest.raises(MissingDynamical):
            RMatrixSpec("Felder", 2, HBAR, TAU)
        with pytest.raises(ValueError):
            RMatrixSpec("BaxterBelavin", 2, HBAR, TAU, (0.1, 0.2))
        with pytest.raises(ValueError):
            RMatrixSpec("ACF", 3, HBAR, TAU, (0.1, 0.2))


class TestYangBaxter:
    @pytest.mark.parametrize("N", [2, 3])
    @pytest.mark.parametrize("kind", ["BaxterBelavin", "Felder", "ACF"])
    def test_residual(self, kind, N, rng):
        q = None if kind == "BaxterBelavin" else dyn_q(N, rng)
        spec = RMatrixSpec(kind, N, HBAR, ell.Elliptic(TAU), q)
        assert yang_baxter_residual(spec, 0.31 + 0.05j, -0.12 + 0.11j, 0.07 - 0.2j) < 1e-9

    def test_detects_wrong_matrix(self, rng):
        # the Felder matrix fails the non-dynamical equation
        from laxfactor.linalg import embed
        N = 2
        q = dyn_q(N, rng)
        spec = RMatrixSpec("Felder", N, HBAR, ell.Elliptic(TAU), q)
        z1, z2, z3 = 0.31 + 0.05j, -0.12 + 0.11j, 0.07 - 0.2j
        R = lambda z: r_matrix(spec, z)
        lhs = embed(R(z1 - z2), (0, 1), N) @ embed(R(z1 - z3), (0, 2), N) @ embed(R(z2 - z3), (1, 2), N)
        rhs = embed(R(z2 - z3), (1, 2), N) @ embed(R(z1 - z3), (0, 2), N) @ embed(R(z1 - z2), (0, 1), N)
        assert np.abs(lhs - rhs).max() > 1e-3


class TestIRFVertex:
    @pytest.mark.parametrize("N", [2, 3])
    @pytest.mark.parametrize("variant", IRF_VARIANTS)
    def test_relations(self, variant, N, rng):
        q = np.array(dyn_q(N, rng))
        assert irf_vertex_residual(variant, N, HBAR, TAU, q, 0.21 + 0.1j, -0.13 + 0.04j) < 1e-8

    @pytest.mark.parametrize("N", [2, 3])
    def test_acf_residue(self, N, rng):
        assert acf_residue_residual(0.21 + 0.1j, HBAR, dyn_q(N, rng), TAU) < 1e-8

    def test_hbar_inverse(self, rng):
        assert irf_hbar_inverse_residual(np.array(dyn_q(3, rng)), 0.21 + 0.1j, TAU) < 1e-10
