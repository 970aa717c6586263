"""Direct Lax pairs of the RS and CM many-body systems and of the elliptic tops.

All matrices are built from the explicit entrywise formulas.  Every M-matrix
and every equation of motion goes through :func:`velocity_map`, so the
choice between the RS and RS' velocity conventions is a single switch.
"""

from dataclasses import dataclass, field

import numpy as np

from .elliptic import Elliptic, FunctionClass, get_pole_radius, omega, phi_alpha
from .errors import NearSingular
from .linalg import commutator, heisenberg_basis, heisenberg_coefficients, heisenberg_indices

__all__ = [
    "MODELS",
    "PhasePoint",
    "ModelSpec",
    "check_configuration",
    "velocity_map",
    "lax_rs",
    "m_rs",
    "lax_cm",
    "m_cm",
    "lax_matrix",
    "m_matrix",
    "rs_diagonal_scalar",
    "hamiltonian",
    "eom_rhs",
    "rs_prime_momenta",
    "nonrelativistic_lax_residual",
    "lax_top",
    "top_inertia",
    "top_rhs",
    "top_hamiltonian",
]

MODELS = ("RS", "RSprime", "CM", "EllipticTop", "RelativisticTop")


@dataclass(frozen=True)
class PhasePoint:
    """Canonical coordinates (q, p); complex values allowed."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=complex))
        p = np.atleast_1d(np.asarray(self.p, dtype=complex))
        if q.shape != p.shape or q.ndim != 1:
            raise ValueError(f"q and p must be vectors of equal length, got {q.shape}, {p.shape}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def N(self):
        return len(self.q)

    def as_vector(self):
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=complex)
        n = len(v) // 2
        return cls(v[:n], v[n:])


@dataclass(frozen=True)
class ModelSpec:
    """Model, function class, spectral mode and couplings."""

    model: str
    cls: FunctionClass
    spectral: bool = True
    hbar: complex = None
    nu: complex = None
    c: complex = 1.0
    N: int = 2
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.model in ("RS", "RSprime") and (self.hbar is None or self.c is None):
            raise ValueError("RS models require hbar and c")
        if self.model == "CM" and self.nu is None:
            raise ValueError("CM requires nu")
        if self.model.endswith("Top") and self.cls.kind != "elliptic":
            raise ValueError("tops require the elliptic class")
        if self.cls.kind == "elliptic" and not self.spectral:
            raise ValueError("the elliptic class always carries a spectral parameter")
        if self.N < 1:
            raise ValueError("N must be positive")

    @property
    def is_rs(self):
        return self.model in ("RS", "RSprime")

    @property
    def eta(self):
        """Shift in the velocity products: -hbar for RS, +hbar for RS'."""
        return self.hbar if self.model == "RSprime" else -self.hbar


def check_configuration(q, shifts=(0.0,), cls=None):
    """Raise NearSingular if some q_i - q_j + s is within the exclusion radius."""
    q = np.asarray(q, dtype=complex)
    r = get_pole_radius()
    N = len(q)
    for i in range(N):
        for j in range(N):
            if i == j:
                continue
            for s in shifts:
                x = q[i] - q[j] + s
                d = cls.pole_distance(x) if cls is not None else abs(x)
                if d < r:
                    raise NearSingular(f"q_{i} - q_{j} + {s} is singular", point=x, pair=(i, j))


def _diffs(q):
    q = np.asarray(q, dtype=complex)
    return q[:, None] - q[None, :]


def _offdiag_map(fn, x):
    """Apply ``fn`` entrywise off the diagonal; the diagonal is left 0."""
    N = x.shape[0]
    out = np.zeros_like(x)
    for i in range(N):
        for j in range(N):
            if i != j:
                out[i, j] = fn(x[i, j])
    return out


def _d_prod(cls, q, eta):
    x = _diffs(q) + eta
    t = np.asarray(cls.theta(x), dtype=complex)
    np.fill_diagonal(t, 1.0)
    return np.prod(t, axis=1)


def velocity_map(spec, phase):
    """Velocities qdot as functions of (q, p).

    RS:  qdot_j = D_j^{-hbar} / D_j^0 exp(p_j / c)  (D^{+hbar} for RS')
    CM:  qdot_i = p_i - nu sum_{k != i} E1(q_ik)
    """
    q, p = phase.q, phase.p
    cls = spec.cls
    if spec.is_rs:
        check_configuration(q, (0.0, spec.eta), cls)
        return _d_prod(cls, q, spec.eta) / _d_prod(cls, q, 0.0) * np.exp(p / spec.c)
    if spec.model == "CM":
        check_configuration(q, (0.0,), cls)
        e = _offdiag_map(cls.E1, _diffs(q))
        return p - spec.nu * e.sum(axis=1)
    raise ValueError(f"{spec.model} has no velocity map")


# ---------------------------------------------------------------------------
# Ruijsenaars-Schneider


def _rs_kernels(spec, z):
    """(kernel of L, kernel of off-diagonal M, diagonal scalar of M)."""
    cls, h, N = spec.cls, spec.hbar, spec.N
    kind = cls.kind
    if kind == "elliptic":
        return (lambda x: cls.phi(z, x),
                lambda x: cls.phi(z, x),
                cls.E1(z) + cls.E1(h))
    if kind == "trigonometric":
        if spec.spectral:
            cz = 1.0 / np.tanh(N * z)
            pref = np.exp(h * (N - 2)) * np.sinh(h)
            return (lambda x: pref * (1.0 / np.tanh(x) + cz),
                    lambda x: 1.0 / np.tanh(x) + cz,
                    cz + 1.0 / np.tanh(h))
        return (lambda x: np.sinh(h) / np.sinh(x),
                lambda x: 1.0 / np.sinh(x),
                1.0 / np.tanh(h))
    if spec.spectral:
        iz = 1.0 / (N * z)
        return (lambda x: h * (1.0 / x + iz), lambda x: 1.0 / x + iz, iz + 1.0 / h)
    return (lambda x: h / x, lambda x: 1.0 / x, 1.0 / h)


def _check_z(spec, z):
    if spec.cls.kind == "elliptic":
        spec.cls.check(z, "spectral argument")
    elif spec.spectral:
        spec.cls.check(spec.N * z if spec.cls.kind != "rational" else z, "spectral argument")


def rs_diagonal_scalar(spec, z):
    """Scalar s(z) with L^RS_ii = s(z) qdot_i, so H = c tr L / s(z)."""
    K, _, _ = _rs_kernels(spec, z)
    return K(spec.hbar)


def lax_rs(spec, phase, z=None):
    """L_ij = K(z, q_ij + hbar) qdot_j with the class kernel K.

    Elliptic K = phi; the trig/rational kernels carry the standard
    prefactors (e.g. hbar (1/x + 1/(Nz)) for rational with spectral
    parameter).
    """
    if not spec.is_rs:
        raise ValueError("lax_rs needs an RS spec")
    _check_z(spec, z)
    qd = velocity_map(spec, phase)
    check_configuration(phase.q, (spec.hbar,), spec.cls)
    K, _, _ = _rs_kernels(spec, z)
    x = _diffs(phase.q) + spec.hbar
    kern = np.array([[K(x[i, j]) for j in range(spec.N)] for i in range(spec.N)], dtype=complex)
    return kern * qd[None, :]


def _m_rs_plain(spec, q, qd, z):
    cls = spec.cls
    _, Km, k0 = _rs_kernels(spec, z)
    N = len(q)
    x = _diffs(q)
    M = -_offdiag_map(Km, x) * qd[None, :]
    for i in range(N):
        s = sum(qd[k] * (cls.E1(x[i, k] + spec.hbar) - cls.E1(x[i, k])) for k in range(N) if k != i)
        M[i, i] = -(qd[i] * k0 + s)
    return M


def _dlog_velocity(spec, phase, qd):
    """d/dt log qdot_j along the flow generated by H = c sum qdot."""
    dq, dp = eom_rhs(spec, phase)
    cls, eta = spec.cls, spec.eta
    q = phase.q
    N = len(q)
    out = dp / spec.c
    for j in range(N):
        for k in range(N):
            if k != j:
                out[j] += (cls.E1(q[j] - q[k] + eta) - cls.E1(q[j] - q[k])) * (dq[j] - dq[k])
    return out


def m_rs(spec, phase, z=None):
    """Direct RS M-matrix (q-dots from velocity_map).

    For RS' the M-matrix is transported through L' = W^{-1} L(-q)^T W,
    W = diag(qdot'): M' = W^{-1} M(-q)^T W + W^{-1} dW/dt.
    """
    _check_z(spec, z)
    qd = velocity_map(spec, phase)
    if spec.model == "RS":
        return _m_rs_plain(spec, phase.q, qd, z)
    M = _m_rs_plain(spec, -phase.q, qd, z)
    return M.T / qd[:, None] * qd[None, :] + np.diag(_dlog_velocity(spec, phase, qd))


def rs_prime_momenta(spec, phase):
    """Canonical map taking RS momenta to RS' momenta with equal velocities.

    p'_j = p_j + c log(D_j^{-hbar} / D_j^{+hbar}).
    """
    cls, h = spec.cls, spec.hbar
    ratio = _d_prod(cls, phase.q, -h) / _d_prod(cls, phase.q, h)
    return PhasePoint(phase.q, phase.p + spec.c * np.log(ratio))


# ---------------------------------------------------------------------------
# Calogero-Moser


def _cm_kernels(spec, z):
    cls, N = spec.cls, spec.N
    kind = cls.kind
    if kind == "elliptic":
        return cls.E1(z), (lambda x: cls.phi(z, x)), (lambda x: cls.f(z, x))
    if kind == "trigonometric":
        if spec.spectral:
            cz = 1.0 / np.tanh(N * z)
            return ((N - 2) + cz, lambda x: 1.0 / np.tanh(x) + cz,
                    lambda x: -1.0 / np.sinh(x) ** 2)
        return 0.0, (lambda x: 1.0 / np.sinh(x)), (lambda x: -np.cosh(x) / np.sinh(x) ** 2)
    if spec.spectral:
        iz = 1.0 / (N * z)
        return iz, (lambda x: 1.0 / x + iz), (lambda x: -1.0 / x ** 2)
    return 0.0, (lambda x: 1.0 / x), (lambda x: -1.0 / x ** 2)


def lax_cm(spec, phase, z=None):
    """L_ij = (qdot_i + nu K0(z)) delta_ij + nu (1 - delta_ij) K(z, q_ij)."""
    if spec.model != "CM":
        raise ValueError("lax_cm needs a CM spec")
    _check_z(spec, z)
    qd = velocity_map(spec, phase)
    k0, K, _ = _cm_kernels(spec, z)
    L = spec.nu * _offdiag_map(K, _diffs(phase.q))
    return L + np.diag(qd + spec.nu * k0)


def m_cm(spec, phase, z=None):
    """M_ij = nu d_i delta_ij + nu (1 - delta_ij) f(z, q_ij), d_i = sum E2(q_ik)."""
    _check_z(spec, z)
    check_configuration(phase.q, (0.0,), spec.cls)
    _, _, F = _cm_kernels(spec, z)
    x = _diffs(phase.q)
    d = _offdiag_map(spec.cls.E2, x).sum(axis=1)
    return spec.nu * (_offdiag_map(F, x) + np.diag(d))


def lax_matrix(spec, phase, z=None):
    return lax_cm(spec, phase, z) if spec.model == "CM" else lax_rs(spec, phase, z)


def m_matrix(spec, phase, z=None):
    return m_cm(spec, phase, z) if spec.model == "CM" else m_rs(spec, phase, z)


# ---------------------------------------------------------------------------
# Hamiltonians and Hamilton's equations


def hamiltonian(spec, phase, z=None):
    """H^RS = c sum qdot (= c tr L / s(z) when z is given), H^CM = sum qdot^2/2 - nu^2 sum wp."""
    qd = velocity_map(spec, phase)
    if spec.is_rs:
        if z is not None:
            return spec.c * np.trace(lax_rs(spec, phase, z)) / rs_diagonal_scalar(spec, z)
        return spec.c * qd.sum()
    x = _diffs(phase.q)
    wp = _offdiag_map(spec.cls.wp, x)
    return 0.5 * np.sum(qd ** 2) - spec.nu ** 2 * wp.sum() / 2


def eom_rhs(spec, phase):
    """Hamilton's equations (dq/dt, dp/dt) from analytic gradients."""
    cls = spec.cls
    q = phase.q
    N = len(q)
    qd = velocity_map(spec, phase)
    dp = np.zeros(N, dtype=complex)
    if spec.is_rs:
        eta = spec.eta
        for i in range(N):
            acc = 0.0
            for k in range(N):
                if k == i:
                    continue
                acc += qd[i] * (cls.E1(q[i] - q[k] + eta) - cls.E1(q[i] - q[k]))
                acc += qd[k] * (cls.E1(q[k] - q[i]) - cls.E1(q[k] - q[i] + eta))
            dp[i] = -spec.c * acc
        return qd, dp
    nu = spec.nu
    for i in range(N):
        for k in range(N):
            if k != i:
                x = q[i] - q[k]
                dp[i] += -nu * (qd[i] - qd[k]) * cls.E2(x) + nu ** 2 * cls.wp_prime(x)
    return qd, dp


def nonrelativistic_lax_residual(cls, spectral, q, p, z, nu, c):
    """|c (k L^RS - 1) - L^CM|_max at hbar = nu/c, same (q, p).

    k = hbar for the elliptic kernel phi(z, x) ~ 1/x; the trig and rational
    kernels already carry the hbar prefactor, so k = 1 there.  The residual
    is O(1/c).
    """
    N = len(q)
    phase = PhasePoint(q, p)
    hbar = nu / c
    zz = z if spectral or cls.kind == "elliptic" else None
    Lr = lax_rs(ModelSpec("RS", cls, spectral, hbar=hbar, c=c, N=N), phase, zz)
    Lc = lax_cm(ModelSpec("CM", cls, spectral, nu=nu, N=N), phase, zz)
    k = hbar if cls.kind == "elliptic" else 1.0
    return float(np.max(np.abs(c * (k * Lr - np.eye(N)) - Lc)))


# ---------------------------------------------------------------------------
# Elliptic tops


def _tau_class(tau):
    return tau if isinstance(tau, Elliptic) else Elliptic(tau)


def lax_top(S, z, tau, relativistic=False, eta=None):
    """Lax pair (L, M) of the elliptic top or the relativistic top.

    Non-relativistic: L = sum_{a != 0} T_a S_a phi_a(z, w_a),
                      M = sum_{a != 0} T_a S_a f_a(z, w_a).
    Relativistic:     L = sum_a T_a S_a phi_a(z, w_a + eta),
                      M = -sum_{a != 0} T_a S_a phi_a(z, w_a).
    """
    cls = _tau_class(tau)
    S = np.asarray(S, dtype=complex)
    N = S.shape[0]
    coef = heisenberg_coefficients(S)
    L = np.zeros((N, N), dtype=complex)
    M = np.zeros((N, N), dtype=complex)
    if relativistic and eta is None:
        raise ValueError("the relativistic top needs eta")
    for a in heisenberg_indices(N):
        T = heisenberg_basis(a[0], a[1], N)
        w = omega(a, cls.tau, N)
        ex = np.exp(2j * np.pi * a[1] * z / N)
        if relativistic:
            L += T * coef[a] * phi_alpha(a, z, w + eta, cls, N)
            if a != (0, 0):
                M -= T * coef[a] * phi_alpha(a, z, w, cls, N)
        elif a != (0, 0):
            L += T * coef[a] * phi_alpha(a, z, w, cls, N)
            M += T * coef[a] * ex * cls.f(z, w)
    return L, M


def top_inertia(N, tau, relativistic=False, eta=None):
    """J_a: -E2(w_a) (top) or E1(eta + w_a) - E1(w_a) (relativistic); J_0 = 0."""
    cls = _tau_class(tau)
    out = {}
    for a in heisenberg_indices(N):
        if a == (0, 0):
            out[a] = 0.0
            continue
        w = omega(a, cls.tau, N)
        out[a] = cls.E1(eta + w) - cls.E1(w) if relativistic else -cls.E2(w)
    return out


def top_rhs(S, tau, relativistic=False, eta=None):
    """dS/dt = [S, J(S)] with J(S) = sum_a T_a S_a J_a."""
    S = np.asarray(S, dtype=complex)
    N = S.shape[0]
    coef = heisenberg_coefficients(S)
    J = top_inertia(N, tau, relativistic, eta)
    JS = sum(heisenberg_basis(a[0], a[1], N) * coef[a] * J[a] for a in heisenberg_indices(N))
    return commutator(S, JS)


def top_hamiltonian(S, tau, relativistic=False, eta=None):
    """Relativistic: S_0 = tr S / N.  Top: (1/2) tr(S J(S))."""
    S = np.asarray(S, dtype=complex)
    N = S.shape[0]
    coef = heisenberg_coefficients(S)
    if relativistic:
        return coef[(0, 0)]
    J = top_inertia(N, tau)
    JS = sum(heisenberg_basis(a[0], a[1], N) * coef[a] * J[a] for a in heisenberg_indices(N))
    return 0.5 * np.trace(S @ JS)
