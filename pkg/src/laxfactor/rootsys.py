"""Rational BC_N Calogero-Moser model and its B/C/D factorizations.

The Lax matrix has size (2N+1) x (2N+1) with block structure

    ( A    B    C )
    ( -B  -A   -C )
    ( -C^T C^T  0 )

and obeys the Lax equation only when m1 (m1^2 - 2 m2^2 + sqrt2 m2 m4) = 0.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfiguration, NearSingular
from .elliptic import get_pole_radius
from .factorization import c0_matrix
from .models import PhasePoint

__all__ = [
    "ROOT_SYSTEMS",
    "BCNSpec",
    "constraint_value",
    "check_bcn_configuration",
    "lax_bcn",
    "c_tilde",
    "dc_matrices",
    "b_matrices",
    "factorized_lax_dc",
    "factorized_lax_b",
    "b_g_matrix",
    "j_matrix",
    "j_block_residual",
    "even_gamma_residual",
    "b_corner_residual",
    "b_sign_residual",
    "b_diagonal_residual",
    "gauge_gradient",
    "bcn_hamiltonian",
    "bcn_rhs",
]

SQRT2 = np.sqrt(2.0)
ROOT_SYSTEMS = ("BCn", "Bn", "Cn", "Dn")


@dataclass(frozen=True)
class BCNSpec:
    """Couplings (m1, m2, m4) of the BC_N model.

    Use the ``B``, ``C`` and ``D`` constructors for the root-system presets;
    the raw constructor allows any couplings and carries the constraint flag.
    """

    N: int
    m1: complex = 0.0
    m2: complex = 1.0
    m4: complex = 0.0
    root_system: str = "BCn"

    def __post_init__(self):
        if self.root_system not in ROOT_SYSTEMS:
            raise ValueError(f"unknown root system {self.root_system!r}")
        if self.N < 1:
            raise ValueError("N must be positive")

    @classmethod
    def D(cls, N, m2):
        return cls(N, 0.0, m2, 0.0, "Dn")

    @classmethod
    def C(cls, N, m2, m4):
        return cls(N, 0.0, m2, m4, "Cn")

    @classmethod
    def B(cls, N, m2):
        # m4 = 0 and m1 = sqrt2 m2, fixed by matching the factorized form
        return cls(N, SQRT2 * m2, m2, 0.0, "Bn")

    @property
    def constraint(self):
        return constraint_value(self)

    @property
    def lax_valid(self):
        return abs(self.constraint) < 1e-12 * max(1.0, abs(self.m2) ** 3)

    @property
    def effective_size(self):
        return 2 * self.N if self.m1 == 0 else 2 * self.N + 1


def constraint_value(spec):
    """m1 (m1^2 - 2 m2^2 + sqrt2 m2 m4)."""
    m1, m2, m4 = spec.m1, spec.m2, spec.m4
    return m1 * (m1 ** 2 - 2 * m2 ** 2 + SQRT2 * m2 * m4)


def check_bcn_configuration(q):
    q = np.asarray(q, dtype=complex)
    r = get_pole_radius()
    N = len(q)
    for i in range(N):
        if abs(q[i]) < r:
            raise NearSingular(f"q_{i} vanishes", point=q[i], pair=(i, i))
        for k in range(i + 1, N):
            if abs(q[i] - q[k]) < r or abs(q[i] + q[k]) < r:
                raise NearSingular(f"q_{i} = +-q_{k}", point=q[i], pair=(i, k))


def lax_bcn(spec, phase, truncate=None):
    """The (2N+1)-sized Lax matrix; for m1 = 0 the 2N truncation by default."""
    q, p = phase.q, phase.p
    N = len(q)
    check_bcn_configuration(q)
    m1, m2, m4 = spec.m1, spec.m2, spec.m4
    A = np.zeros((N, N), dtype=complex)
    B = np.zeros((N, N), dtype=complex)
    for i in range(N):
        for j in range(N):
            if i == j:
                s = sum(1 / (q[i] - q[k]) + 1 / (q[i] + q[k]) for k in range(N) if k != i)
                A[i, i] = p[i] - SQRT2 * m4 / (2 * q[i]) - SQRT2 * m1 / q[i] - m2 * s
                B[i, i] = SQRT2 * m4 / (2 * q[i])
            else:
                A[i, j] = m2 / (q[i] - q[j])
                B[i, j] = m2 / (q[i] + q[j])
    C = (m1 / q).reshape(N, 1)
    L = np.block([[A, B, C], [-B, -A, -C], [-C.T, C.T, np.zeros((1, 1))]])
    if truncate is None:
        truncate = spec.m1 == 0
    if truncate:
        edge = max(np.max(np.abs(L[-1])), np.max(np.abs(L[:, -1])))
        if edge >= 1e-12:
            raise ValueError("last row/column is not zero; cannot truncate")
        return L[:-1, :-1]
    return L


# ---------------------------------------------------------------------------
# Factorization matrices


def c_tilde(n):
    """(C~)_ij = 1 for i = j + 1 with i even (1-based)."""
    M = np.zeros((n, n), dtype=complex)
    for i in range(2, n + 1, 2):
        M[i - 1, i - 2] = 1.0
    return M


def _pair_product(q, i):
    N = len(q)
    return np.prod([(q[i] - q[k]) * (q[i] + q[k]) for k in range(N) if k != i])


def dc_matrices(q):
    """(D0, V) of the C/D factorization, both 2N x 2N."""
    q = np.asarray(q, dtype=complex)
    N = len(q)
    pr = [_pair_product(q, i) for i in range(N)]
    D = np.array([2 * q[i] * pr[i] for i in range(N)] + [-2 * q[i] * pr[i] for i in range(N)])
    xs = np.concatenate([q, -q])
    V = np.array([xs ** (i - 1) for i in range(1, 2 * N + 1)])
    return D, V


def b_matrices(q):
    """(D0, V) of the B factorization, both (2N+1) x (2N+1)."""
    q = np.asarray(q, dtype=complex)
    N = len(q)
    pr = [_pair_product(q, i) for i in range(N)]
    D = np.array([SQRT2 * q[i] ** 2 * pr[i] for i in range(N)] * 2 + [np.prod(-q ** 2)])
    V = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
    xs = np.concatenate([q, -q])
    for i in range(1, 2 * N + 2):
        V[i - 1, :2 * N] = xs ** (i - 1)
    V[0, 2 * N] = 1.0
    return D, V


def _conj(D, V, C):
    """D0 V^{-1} C V D0^{-1}."""
    return D[:, None] * np.linalg.solve(V, C @ V) / D[None, :]


def factorized_lax_dc(spec, phase):
    """P - D0 V^{-1} (m2 C0 - (m2 - sqrt2 m4) C~) V D0^{-1}, P = diag(p, -p)."""
    if spec.m1 != 0:
        raise ValueError("the C/D factorization needs m1 = 0")
    q, p = phase.q, phase.p
    N = len(q)
    check_bcn_configuration(q)
    D, V = dc_matrices(q)
    if np.linalg.cond(V) > 1e14:
        raise DegenerateConfiguration("Vandermonde matrix is singular")
    n = 2 * N
    core = spec.m2 * c0_matrix(n) - (spec.m2 - SQRT2 * spec.m4) * c_tilde(n)
    return np.diag(np.concatenate([p, -p])) - _conj(D, V, core)


def b_g_matrix(q):
    """G = D0 V^{-1} (C0 + C~) V D0^{-1} of the B factorization."""
    D, V = b_matrices(q)
    n = 2 * len(q) + 1
    return _conj(D, V, c0_matrix(n) + c_tilde(n))


def factorized_lax_b(spec, phase):
    """P - m2 G with P = diag(p, -p, 0)."""
    q, p = phase.q, phase.p
    check_bcn_configuration(q)
    P = np.diag(np.concatenate([p, -p, [0.0]]))
    return P - spec.m2 * b_g_matrix(q)


# ---------------------------------------------------------------------------
# Block identities of the factorization


def j_matrix(q):
    D, V = dc_matrices(q)
    return _conj(D, V, c_tilde(2 * len(q)))


def j_block_residual(q):
    """|J - ((Jd, -Jd), (Jd, -Jd))|_max with Jd = diag(1/(2 q_i))."""
    q = np.asarray(q, dtype=complex)
    Jd = np.diag(1 / (2 * q))
    return float(np.max(np.abs(j_matrix(q) - np.block([[Jd, -Jd], [Jd, -Jd]]))))


def even_gamma_residual(q):
    """|sum_{gamma even} V^{-1}_{i gamma} V_{gamma j} - delta_ij / 2|_max, 1 <= i, j <= N.

    Outside this block the sum is -1/2 on the i = j +- N diagonals.
    """
    _, V = dc_matrices(q)
    N = len(q)
    Vi = np.linalg.inv(V)
    S = Vi[:N, 1::2] @ V[1::2, :N]
    return float(np.max(np.abs(S - np.eye(N) / 2)))


def b_corner_residual(q):
    """Corner entries: G_{2N+1,2N+1} = 0, G_{i,2N+1} = -sqrt2/q_i, G_{2N+1,j} = sqrt2/q_j."""
    q = np.asarray(q, dtype=complex)
    N = len(q)
    G = b_g_matrix(q)
    errs = [abs(G[2 * N, 2 * N])]
    errs += list(np.abs(G[:N, 2 * N] + SQRT2 / q))
    errs += list(np.abs(G[2 * N, :N] - SQRT2 / q))
    return float(max(errs))


def b_sign_residual(q):
    """|G_{i+N, j+N} + G_{ij}|_max over the 2N x 2N part."""
    N = len(q)
    G = b_g_matrix(q)
    return float(np.max(np.abs(G[N:2 * N, N:2 * N] + G[:N, :N])))


def b_diagonal_residual(q, p, m2):
    """A_ij = A^D_ij - m2 2 delta_ij / q_i for the B preset against the D preset."""
    q = np.asarray(q, dtype=complex)
    N = len(q)
    ph = PhasePoint(q, p)
    A = lax_bcn(BCNSpec.B(N, m2), ph)[:N, :N]
    AD = lax_bcn(BCNSpec.D(N, m2), ph)[:N, :N]
    return float(np.max(np.abs(A - (AD - np.diag(2 * m2 / q)))))


# ---------------------------------------------------------------------------
# Hamiltonian dynamics


def gauge_gradient(spec, q):
    """w_i = m2 sum_k (1/(q_i - q_k) + 1/(q_i + q_k)) + (sqrt2 m4/2 + sqrt2 m1)/q_i.

    The Lax diagonal is p - w, so the Hamiltonian is evaluated at p - w.
    """
    q = np.asarray(q, dtype=complex)
    N = len(q)
    a = SQRT2 * spec.m4 / 2 + SQRT2 * spec.m1
    return np.array([spec.m2 * sum(1 / (q[i] - q[k]) + 1 / (q[i] + q[k])
                                   for k in range(N) if k != i) + a / q[i] for i in range(N)])


def _potential(spec, q):
    N = len(q)
    m2 = spec.m2
    msq = spec.m4 ** 2 + 4 * spec.m1 ** 2
    s = sum(m2 ** 2 / (q[i] - q[j]) ** 2 + m2 ** 2 / (q[i] + q[j]) ** 2
            for i in range(N) for j in range(i))
    return s + np.sum(msq / (2 * q) ** 2)


def bcn_hamiltonian(spec, phase, shifted=True):
    """(1/2) sum y^2 - U(q) with y = p - w(q) (or y = p when ``shifted`` is off)."""
    q, p = phase.q, phase.p
    check_bcn_configuration(q)
    y = p - gauge_gradient(spec, q) if shifted else p
    return 0.5 * np.sum(y ** 2) - _potential(spec, q)


def bcn_rhs(spec, phase):
    """Hamilton's equations of the shifted Hamiltonian, analytic gradients."""
    q, p = phase.q, phase.p
    check_bcn_configuration(q)
    N = len(q)
    m2 = spec.m2
    a = SQRT2 * spec.m4 / 2 + SQRT2 * spec.m1
    msq = spec.m4 ** 2 + 4 * spec.m1 ** 2
    y = p - gauge_gradient(spec, q)
    # dw_j / dq_i
    dw = np.zeros((N, N), dtype=complex)
    for i in range(N):
        for j in range(N):
            if i == j:
                dw[i, i] = -m2 * sum(1 / (q[i] - q[k]) ** 2 + 1 / (q[i] + q[k]) ** 2
                                     for k in range(N) if k != i) - a / q[i] ** 2
            else:
                dw[i, j] = m2 * (1 / (q[j] - q[i]) ** 2 - 1 / (q[j] + q[i]) ** 2)
    dU = np.array([sum(-2 * m2 ** 2 / (q[i] - q[k]) ** 3 - 2 * m2 ** 2 / (q[i] + q[k]) ** 3
                       for k in range(N) if k != i) - msq / (2 * q[i] ** 3) for i in range(N)])
    return y, dw @ y + dU
