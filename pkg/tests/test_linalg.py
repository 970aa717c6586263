import numpy as np
import pytest
from numpy.testing import assert_allclose

from laxfactor import linalg as la
from laxfactor.errors import NonConverged, PoleOrderTooHigh, RankDeficiencyViolation


def rand_c(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestHeisenberg:
    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_commutation_relation(self, N):
        Q, L = la.clock_matrix(N), la.shift_matrix(N)
        w = np.exp(2j * np.pi / N)
        # Q Lambda = w Lambda Q up to the orientation of the shift
        lhs = Q @ L
        assert np.allclose(lhs, w * L @ Q) or np.allclose(lhs, L @ Q / w)
        assert_allclose(np.linalg.matrix_power(Q, N), np.eye(N), atol=1e-12)
        assert_allclose(np.linalg.matrix_power(L, N), np.eye(N), atol=1e-12)

    @pytest.mark.parametrize("N", [2, 3])
    def test_basis_is_orthogonal(self, N):
        idx = la.heisenberg_indices(N)
        G = np.array([[np.trace(la.heisenberg_basis(*a, N) @ la.heisenberg_basis(-b[0], -b[1], N))
                       for b in idx] for a in idx])
        assert_allclose(G, N * np.eye(N * N), atol=1e-12)

    def test_product_rule(self):
        N = 3
        a, b = (1, 2), (2, 1)
        lhs = la.heisenberg_basis(*a, N) @ la.heisenberg_basis(*b, N)
        rhs = la.heisenberg_kappa(a, b, N) * la.heisenberg_basis(a[0] + b[0], a[1] + b[1], N)
        assert_allclose(lhs, rhs, atol=1e-12)

    def test_coefficients_reconstruct(self, rng):
        S = rand_c(rng, 3, 3)
        coef = la.heisenberg_coefficients(S)
        back = sum(la.heisenberg_basis(*a, 3) * c for a, c in coef.items())
        assert_allclose(back, S, atol=1e-12)

    def test_zero_index_excluded(self):
        assert (0, 0) not in la.heisenberg_indices(3, include_zero=False)
        assert len(la.heisenberg_indices(3)) == 9


class TestTensor:
    def test_permutation_swaps(self, rng):
        N = 3
        a, b = rand_c(rng, N), rand_c(rng, N)
        P = la.permutation_operator(N)
        assert_allclose(P @ np.kron(a, b), np.kron(b, a))

    def test_embed_matches_kron(self, rng):
        n = 2
        A = rand_c(rng, n, n)
        X = rand_c(rng, n * n, n * n)
        I = np.eye(n)
        assert_allclose(la.embed(A, (1,), n), np.kron(np.kron(I, A), I))
        assert_allclose(la.embed(X, (0, 1), n), np.kron(X, I))
        # site pair (0, 2): conjugate by P_23
        P23 = np.kron(I, la.permutation_operator(n))
        assert_allclose(la.embed(X, (0, 2), n), P23 @ np.kron(X, I) @ P23, atol=1e-12)
        with pytest.raises(ValueError):
            la.embed(X, (2, 0), n)

    def test_partial_trace(self, rng):
        A, B, W = rand_c(rng, 2, 2), rand_c(rng, 2, 2), rand_c(rng, 2, 2)
        assert_allclose(la.trace_over_site(np.kron(A, B), 2, W), A * np.trace(B @ W))
        assert_allclose(la.trace_over_site(np.kron(A, B), 1, W), B * np.trace(A @ W))
        with pytest.raises(ValueError):
            la.trace_over_site(np.kron(A, B), 3, W)

    def test_site_dimension(self):
        assert la.site_dimension(np.eye(9)) == 3
        with pytest.raises(ValueError):
            la.site_dimension(np.eye(5))

    def test_o12_action(self):
        N = 3
        O = la.o12(N)
        e = np.eye(N)
        # O (e_k (x) e_l) = delta_kl e_k (x) sum_j e_j
        assert_allclose(O @ np.kron(e[1], e[1]), np.kron(e[1], np.ones(N)))
        assert_allclose(O @ np.kron(e[0], e[2]), 0)


class TestResidues:
    def test_simple_pole(self):
        res = la.residue_at(lambda z: 3.0 / z + np.sin(z), 0.0)
        assert_allclose(res, 3.0, atol=1e-12)

    def test_matrix_valued(self):
        M = np.array([[1.0, 2.0], [0.5j, -1.0]])
        assert_allclose(la.residue_at(lambda z: M / (z - 0.2) + z * M, 0.2), M, atol=1e-12)

    def test_double_pole_rejected(self):
        with pytest.raises(PoleOrderTooHigh):
            la.residue_at(lambda z: 1.0 / z ** 2 + 1.0 / z, 0.0)

    def test_nonconvergent(self):
        # a nearby singularity inside the quadrature annulus spoils node doubling
        with pytest.raises((NonConverged, PoleOrderTooHigh)):
            la.residue_at(lambda z: 1.0 / (z * (z - 0.0105)), 0.0, nodes=8)

    def test_laurent_coefficients(self):
        c = la.laurent_coefficients(lambda z: np.exp(z) / z, 0.0, orders=(-1, 0, 1))
        assert_allclose(c, [1.0, 1.0, 0.5], atol=1e-12)


class TestDense:
    def test_inverse_and_condition(self, rng):
        A = rand_c(rng, 4, 4)
        inv, cond = la.inverse(A, with_condition=True)
        assert_allclose(inv @ A, np.eye(4), atol=1e-12)
        assert cond >= 1.0

    def test_complex_matrix_validation(self):
        with pytest.raises(ValueError):
            la.complex_matrix([[1.0, np.nan]])
        with pytest.raises(ValueError):
            la.complex_matrix(np.zeros((2, 2, 2)))
        with pytest.raises(ValueError):
            la.complex_matrix(np.eye(2), rows=3)
        assert la.complex_matrix(2.0).shape == (1, 1)

    def test_rank_one(self, rng):
        u, v = rand_c(rng, 3), rand_c(rng, 3)
        a, b = la.rank_one_factors(np.outer(u, v))
        assert_allclose(np.outer(a, b), np.outer(u, v), atol=1e-12)
        assert la.singular_ratio(np.outer(u, v)) < 1e-15
        with pytest.raises(RankDeficiencyViolation):
            la.rank_one_factors(np.eye(3))

    def test_eigenvalues_sorted(self):
        ev = la.eigenvalues(np.diag([2.0, -1.0, 1j]))
        assert_allclose(ev, [-1.0, 1j, 2.0])

    def test_trace_free_and_commutator(self, rng):
        A, B = rand_c(rng, 3, 3), rand_c(rng, 3, 3)
        assert abs(np.trace(la.trace_free(A))) < 1e-13
        assert abs(np.trace(la.commutator(A, B))) < 1e-12
        assert la.max_abs(np.array([[1, -3j]])) == 3.0
