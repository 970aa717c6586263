"""The CM M-matrix from the modification g (Schlesinger route) and the
Painleve-Calogero zero-curvature equation.

Conventions
-----------
``d_i = sum_{k != i} E1(q_ik)``.  The tau-flow and t-flow of the
coordinates differ by ``dq/dtau - dq/dt = -d / N``.  Derivatives in tau
appear in the combination ``2 pi i d/dtau`` throughout, matching the heat
equation ``2 pi i d_tau log theta = (E1^2 - E2) / 2``.
"""

from dataclasses import dataclass

import numpy as np

from .elliptic import Elliptic
from .factorization import build_intertwiner, d0_log_derivative, elliptic_ginv_dg
from .linalg import commutator, trace_free

__all__ = [
    "TimePair",
    "time_pair",
    "d_vector",
    "m_cm_theorem2",
    "l_diagonal_residual",
    "g2_recursion_residual",
    "offdiag_closed_form_residual",
    "delta_sum",
    "delta_identity_residual",
    "diagonal_closed_form_residual",
    "schlesinger_unit",
    "schlesinger_shift_residual",
    "scalar_toy_residual",
    "zero_curvature_residual",
]

TWO_PI_I = 2j * np.pi


def _cls(tau):
    return tau if isinstance(tau, Elliptic) else Elliptic(tau)


def d_vector(q, cls):
    q = np.asarray(q, dtype=complex)
    N = len(q)
    return np.array([sum(cls.E1(q[i] - q[k]) for k in range(N) if k != i) for i in range(N)])


@dataclass(frozen=True)
class TimePair:
    """d, dq/dt (= p) and dq/dtau (= p - d/N)."""

    d: np.ndarray
    dq_t: np.ndarray
    dq_tau: np.ndarray


def time_pair(q, p, cls):
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    d = d_vector(q, cls)
    return TimePair(d, p, p - d / len(q))


# ---------------------------------------------------------------------------
# CM M-matrix from the intertwiner


def _example_d(form, q, cls):
    """Formal velocities substituted in the trig/rational examples."""
    d = d_vector(q, cls)
    if form == "trig-xi":
        # the exponential row basis adds a constant shift
        d = d - (len(q) - 2)
    return d


def m_cm_theorem2(q, p, z, nu, cls, spectral=True, form=None, trace_part=False):
    """CM M-matrix built from the intertwiner.

    Elliptic: M = N nu (g^{-1} 2 pi i dg/dtau - g^{-1} dg/dt), full
    derivatives with dq/dtau - dq/dt = -d/N.  The p-dependent pieces
    cancel, leaving N nu g^{-1} (2 pi i d_tau g - sum_k d_k g / N).

    Trig/rational: M = nu (g^{-1} g''/2 + g^{-1} g' diag(d) + D0^{-1} dD0|_{qdot=d}).
    """
    q = np.asarray(q, dtype=complex)
    N = len(q)
    if cls.kind == "elliptic":
        it = build_intertwiner(cls, True, N)
        tp = time_pair(q, p, cls)
        g = it.g(z, q)
        dtau = TWO_PI_I * it.g_dtau(z, q) + it.g_dot(z, q, tp.dq_tau)
        dt = it.g_dot(z, q, tp.dq_t)
        M = N * nu * np.linalg.solve(g, dtau - dt)
    else:
        it = build_intertwiner(cls, spectral, N, form=form)
        d = _example_d(it.form, q, cls)
        X = it.xi(z, q)
        D = it.d0(q)
        conj = lambda A: D[:, None] * np.linalg.solve(X, A) / D[None, :]
        M = nu * (conj(it.xi(z, q, 2)) / 2 + conj(it.xi(z, q, 1)) @ np.diag(d)
                  + np.diag(d0_log_derivative(it.form, q, d, cls)))
    return M if trace_part else trace_free(M)


# ---------------------------------------------------------------------------
# Proof identities (elliptic)


def _l_closed(q, z, cls):
    return len(q) * elliptic_ginv_dg(cls, q, z)


def l_diagonal_residual(q, z, tau):
    """|diag(N g^{-1} g') - (E1(z) - d)|_max with g^{-1} g' from the matrices."""
    cls = _cls(tau)
    q = np.asarray(q, dtype=complex)
    N = len(q)
    it = build_intertwiner(cls, True, N)
    l = N * np.linalg.solve(it.g(z, q), it.g(z, q, 1))
    return float(np.max(np.abs(np.diag(l) - (cls.E1(z) - d_vector(q, cls)))))


def _dl_closed(q, z, cls):
    q = np.asarray(q, dtype=complex)
    N = len(q)
    out = np.zeros((N, N), dtype=complex)
    for i in range(N):
        for j in range(N):
            out[i, j] = -cls.E2(z) if i == j else cls.dphi_dz(z, q[i] - q[j])
    return out


def g2_recursion_residual(q, z, tau):
    """|N g^{-1} g'' - (dl/dz + l^2 / N)|_max, l and dl/dz in closed form."""
    cls = _cls(tau)
    q = np.asarray(q, dtype=complex)
    N = len(q)
    it = build_intertwiner(cls, True, N)
    lhs = N * np.linalg.solve(it.g(z, q), it.g(z, q, 2))
    l = _l_closed(q, z, cls)
    return float(np.max(np.abs(lhs - (_dl_closed(q, z, cls) + l @ l / N))))


def offdiag_closed_form_residual(q, z, tau):
    """|((N/2) g^{-1} g'')_ij - (f(z, q_ij) - l_ij d_j) / N|_max over i != j."""
    cls = _cls(tau)
    q = np.asarray(q, dtype=complex)
    N = len(q)
    it = build_intertwiner(cls, True, N)
    lhs = N / 2 * np.linalg.solve(it.g(z, q), it.g(z, q, 2))
    l = _l_closed(q, z, cls)
    d = d_vector(q, cls)
    err = 0.0
    for i in range(N):
        for j in range(N):
            if i != j:
                rhs = (cls.f(z, q[i] - q[j]) - l[i, j] * d[j]) / N
                err = max(err, abs(lhs[i, j] - rhs))
    return float(err)


def delta_sum(q, i, cls):
    """Delta_i = sum'' (E1(q_ik) + E1(q_kl) + E1(q_li))^2 over k, l != i, k != l."""
    q = np.asarray(q, dtype=complex)
    N = len(q)
    s = 0.0
    for k in range(N):
        for l in range(N):
            if k != i and l != i and k != l:
                s += (cls.E1(q[i] - q[k]) + cls.E1(q[k] - q[l]) + cls.E1(q[l] - q[i])) ** 2
    return s


def _delta_closed(q, i, cls):
    q = np.asarray(q, dtype=complex)
    N = len(q)
    e2i = sum(cls.E2(q[i] - q[k]) for k in range(N) if k != i)
    e2all = sum(cls.E2(q[k] - q[l]) for k in range(N) for l in range(N) if k != l)
    return (N - 1) * (N - 2) * cls.theta3_ratio() + 2 * (N - 3) * e2i + e2all


def delta_identity_residual(q, tau):
    """Max over i of |Delta_i - closed form|.

    Closed form: (N-1)(N-2) theta'''(0)/theta'(0) + 2(N-3) sum_k E2(q_ik)
    + sum_{k != l} E2(q_kl), the last sum over all ordered pairs.
    """
    cls = _cls(tau)
    q = np.asarray(q, dtype=complex)
    return float(max(abs(delta_sum(q, i, cls) - _delta_closed(q, i, cls)) for i in range(len(q))))


def diagonal_closed_form_residual(q, p, z, tau):
    """Diagonal of the intertwiner CM M at nu = 1/N (trace kept) against

    M_ii = (1/N) 2 pi i d_tau log theta(z) - (N-1)(N-2)/(4N) theta'''(0)/theta'(0)
           + (1/4N) sum_{k != l} (E1^2(q_kl) - E2(q_kl)) + (1/N) sum_k E2(q_ik).
    """
    cls = _cls(tau)
    q = np.asarray(q, dtype=complex)
    N = len(q)
    M = np.diag(m_cm_theorem2(q, p, z, 1.0 / N, cls, trace_part=True))
    pairs = [(k, l) for k in range(N) for l in range(N) if k != l]
    e1sq = sum(cls.E1(q[k] - q[l]) ** 2 for k, l in pairs)
    e2sum = sum(cls.E2(q[k] - q[l]) for k, l in pairs)
    e2 = np.array([sum(cls.E2(q[i] - q[k]) for k in range(N) if k != i) for i in range(N)])
    closed = (TWO_PI_I * cls.dtau_log_theta(z) / N
              - (N - 1) * (N - 2) / (4 * N) * cls.theta3_ratio()
              + (e1sq - e2sum) / (4 * N) + e2 / N)
    return float(np.max(np.abs(M - closed)))


# ---------------------------------------------------------------------------
# Schlesinger shift of the coupling


def schlesinger_unit(cls, N):
    """Coupling increment produced by adding g^{-1} g' (1/N elliptic, 1 rational)."""
    return 1.0 / N if cls.kind == "elliptic" else 1.0


def schlesinger_shift_residual(q, p, z, nu0, cls):
    """|(L(nu0) + g^{-1} g') - L(nu0 + unit)|_max.

    L(nu) = P + nu * (unit^{-1}) g^{-1} g' is the factorized CM Lax matrix
    with spectral parameter; the modification adds one unit of coupling.
    """
    from .models import ModelSpec, PhasePoint, lax_cm

    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    N = len(q)
    unit = schlesinger_unit(cls, N)
    it = build_intertwiner(cls, True, N)
    glg = np.linalg.solve(it.g(z, q), it.g(z, q, 1))
    # direct matrices are written in q-dot; hold the canonical p fixed
    L0 = lax_cm(ModelSpec("CM", cls, True, nu=nu0, N=N), PhasePoint(q, p), z)
    L1 = lax_cm(ModelSpec("CM", cls, True, nu=nu0 + unit, N=N), PhasePoint(q, p), z)
    if cls.kind != "elliptic":
        D = it.d0(q)
        glg = D[:, None] * np.linalg.solve(it.xi(z, q), it.xi(z, q, 1)) / D[None, :]
    return float(np.max(np.abs(L0 + glg - L1)))


def scalar_toy_residual(z, nu0, tau):
    """N = 1 toy: h (d_z + nu0 E1) h^{-1} with h = theta(z) gives nu0 - 1.

    The gauge transform of the connection d_z + A is A - h'/h.
    """
    cls = _cls(tau)
    A_new = nu0 * cls.E1(z) - cls.theta(z, 1) / cls.theta(z)
    return float(abs(A_new - (nu0 - 1) * cls.E1(z)))


# ---------------------------------------------------------------------------
# Zero curvature


def _lax_cm_velocity(q, qd, z, nu, cls):
    """CM Lax matrix as a function of (q, qdot) at modulus ``cls``."""
    from .models import ModelSpec, PhasePoint, lax_cm

    q = np.asarray(q, dtype=complex)
    p = qd + nu * d_vector(q, cls)
    return lax_cm(ModelSpec("CM", cls, True, nu=nu, N=len(q)), PhasePoint(q, p), z)


def _five_point(f, h):
    """Fourth-order central difference f'(0)."""
    return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)


def zero_curvature_residual(q, p, z, nu, tau, shift=True, hold="velocity", step=1e-4, flow_step=1e-4,
                            return_matrix=False):
    """|2 pi i dL/dtau - dM/dz - [L, M']|_max for elliptic CM.

    dL/dtau = (explicit d_tau at fixed coordinates) + (1/2 pi i) (derivative
    along the CM flow).  ``hold`` picks the coordinates kept fixed in the
    explicit part: ``velocity`` (q, qdot) or ``momentum`` (q, p).
    M' = M + shift * nu 2 pi i d_tau log theta(z) 1.
    """
    from .models import ModelSpec, PhasePoint, eom_rhs, lax_cm, m_cm

    cls = _cls(tau)
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    N = len(q)
    spec = ModelSpec("CM", cls, True, nu=nu, N=N)
    ph = PhasePoint(q, p)
    qd = p - nu * d_vector(q, cls)

    def L_at(t):
        c2 = Elliptic(cls.tau + t)
        if hold == "velocity":
            return _lax_cm_velocity(q, qd, z, nu, c2)
        return lax_cm(ModelSpec("CM", c2, True, nu=nu, N=N), ph, z)

    dtau = _five_point(L_at, step)
    # flow derivative along Hamilton's equations
    dq, dp = eom_rhs(spec, ph)
    flow = _five_point(lambda e: lax_cm(spec, PhasePoint(q + e * dq, p + e * dp), z), flow_step)
    L = lax_cm(spec, ph, z)
    M = m_cm(spec, ph, z)
    if shift:
        M = M + nu * TWO_PI_I * cls.dtau_log_theta(z) * np.eye(N)
    dM = np.zeros((N, N), dtype=complex)
    for i in range(N):
        for j in range(N):
            if i != j:
                dM[i, j] = nu * cls.df_dz(z, q[i] - q[j])
    if shift:
        # the scalar shift drops out of [L, M] and enters through dM/dz only
        dM += nu * TWO_PI_I * cls.dtau_E1(z) * np.eye(N)
    R = TWO_PI_I * dtau + flow - dM - commutator(L, M)
    if return_matrix:
        return R
    return float(np.max(np.abs(R)))
