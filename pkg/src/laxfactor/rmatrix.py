"""Quantum R-matrices, IRF-Vertex relations and the RS M-matrix built from g.

Two-site operators follow the ``np.kron`` convention of :mod:`linalg`.
Dynamical shifts ``q + s hbar^{(a)}`` are realized literally: the operator
is expanded over the basis label k of site ``a`` and evaluated at
``q + s hbar e_k`` in that block.
"""

from dataclasses import dataclass

import numpy as np

from .elliptic import Elliptic, omega, phi_alpha
from .errors import MissingDynamical
from .factorization import Intertwiner, build_intertwiner, d0_log_derivative, laurent_data
from .linalg import (
    embed,
    heisenberg_basis,
    heisenberg_indices,
    o12,
    permutation_operator,
    residue_at,
    standard_unit,
    trace_free,
    trace_over_site,
)

__all__ = [
    "R_KINDS",
    "RMatrixSpec",
    "baxter_belavin",
    "felder",
    "acf",
    "r_matrix",
    "classical_r",
    "yang_baxter_residual",
    "irf_vertex_residual",
    "acf_residue_residual",
    "bb_residue_residual",
    "irf_hbar_inverse_residual",
    "lax_from_r_matrix",
    "sklyanin_factorized_residual",
    "theorem1_g_f",
    "m_rs_theorem1",
    "m_rs_example",
    "IRF_VARIANTS",
]

R_KINDS = ("BaxterBelavin", "Felder", "ACF")
IRF_VARIANTS = ("Felder_BB", "ACF_Felder", "ACF_BB", "Residue")


def _cls(tau):
    return tau if isinstance(tau, Elliptic) else Elliptic(tau)


@dataclass(frozen=True)
class RMatrixSpec:
    kind: str
    N: int
    hbar: complex
    tau: object
    dynamical_q: tuple = None

    def __post_init__(self):
        if self.kind not in R_KINDS:
            raise ValueError(f"unknown R-matrix kind {self.kind!r}")
        if self.kind == "BaxterBelavin" and self.dynamical_q is not None:
            raise ValueError("the Baxter-Belavin R-matrix is not dynamical")
        if self.kind != "BaxterBelavin":
            if self.dynamical_q is None:
                raise MissingDynamical(f"{self.kind} R-matrix needs dynamical coordinates")
            if len(self.dynamical_q) != self.N:
                raise ValueError("dynamical_q must have N entries")


def baxter_belavin(z, hbar, tau, N):
    """R^hbar(z) = sum_a T_a (x) T_-a phi_a(z, w_a + hbar)."""
    cls = _cls(tau)
    R = np.zeros((N * N, N * N), dtype=complex)
    for a in heisenberg_indices(N):
        w = omega(a, cls.tau, N)
        R += np.kron(heisenberg_basis(a[0], a[1], N), heisenberg_basis(-a[0], -a[1], N)) \
            * phi_alpha(a, z, w + hbar, cls, N)
    return R


def _e(i, j, N):
    return standard_unit(i, j, N)


def felder(z, hbar, q, tau):
    """Felder's dynamical R-matrix at spectral difference z."""
    cls = _cls(tau)
    q = np.asarray(q, dtype=complex)
    N = len(q)
    R = np.zeros((N * N, N * N), dtype=complex)
    for i in range(N):
        R += np.kron(_e(i, i, N), _e(i, i, N)) * cls.phi(hbar, z)
        for j in range(N):
            if i != j:
                qij = q[i] - q[j]
                R += np.kron(_e(i, i, N), _e(j, j, N)) * cls.phi(hbar, -qij)
                R += np.kron(_e(i, j, N), _e(j, i, N)) * cls.phi(z, qij)
    return R


def acf(z1, z2, hbar, q, tau):
    """Semi-dynamical (ACF) R-matrix R^{hbar}_{12}(z1, z2 | q)."""
    cls = _cls(tau)
    q = np.asarray(q, dtype=complex)
    N = len(q)
    R = np.zeros((N * N, N * N), dtype=complex)
    for i in range(N):
        for j in range(N):
            if i == j:
                continue
            qij = q[i] - q[j]
            R += np.kron(_e(i, i, N), _e(j, j, N)) * cls.phi(hbar, qij)
            R += np.kron(_e(i, j, N), _e(j, i, N)) * cls.phi(z1 - z2, qij)
            R -= np.kron(_e(i, j, N), _e(j, j, N)) * cls.phi(z1 + hbar, qij)
            R += np.kron(_e(j, j, N), _e(i, j, N)) * cls.phi(z2, qij)
    diag = cls.E1(hbar) + cls.E1(z1 - z2) + cls.E1(z2) - cls.E1(z1 + hbar)
    R += diag * sum(np.kron(_e(i, i, N), _e(i, i, N)) for i in range(N))
    return R


def r_matrix(spec, z1, z2=0.0, normalized=False):
    """The R-matrix named by ``spec`` at spectral parameters (z1, z2).

    BB and Felder depend on z1 - z2 only.  ``normalized`` returns
    R^B = (1/N) R^{hbar/N}(z1 - z2) for the Baxter-Belavin kind.
    """
    if spec.kind == "BaxterBelavin":
        if normalized:
            return baxter_belavin(z1 - z2, spec.hbar / spec.N, spec.tau, spec.N) / spec.N
        return baxter_belavin(z1 - z2, spec.hbar, spec.tau, spec.N)
    if spec.kind == "Felder":
        return felder(z1 - z2, spec.hbar, spec.dynamical_q, spec.tau)
    return acf(z1, z2, spec.hbar, spec.dynamical_q, spec.tau)


def classical_r(z, tau, N):
    """r(z) = 1 (x) 1 E1(z) + sum_{a != 0} T_a (x) T_-a phi_a(z, w_a)."""
    cls = _cls(tau)
    r = np.eye(N * N, dtype=complex) * cls.E1(z)
    for a in heisenberg_indices(N, include_zero=False):
        w = omega(a, cls.tau, N)
        r += np.kron(heisenberg_basis(a[0], a[1], N), heisenberg_basis(-a[0], -a[1], N)) \
            * phi_alpha(a, z, w, cls, N)
    return r


# ---------------------------------------------------------------------------
# Dynamical shifts on the three-site space


def _shift_on(builder, site, q, s, N, nsites=3):
    """sum_k builder(q + s e_k) (projector E_kk on ``site``)."""
    out = 0
    for k in range(N):
        qk = np.array(q, dtype=complex)
        qk[k] += s
        P = embed(_e(k, k, N), (site,), N, nsites)
        out = out + builder(qk) @ P
    return out


def yang_baxter_residual(spec, z1, z2, z3):
    """Max-entry residual of the YBE appropriate to ``spec.kind`` (N^3 x N^3)."""
    N, h = spec.N, spec.hbar
    if spec.kind == "BaxterBelavin":
        R = lambda z, s: embed(baxter_belavin(z, h, spec.tau, N), s, N)
        lhs = R(z1 - z2, (0, 1)) @ R(z1 - z3, (0, 2)) @ R(z2 - z3, (1, 2))
        rhs = R(z2 - z3, (1, 2)) @ R(z1 - z3, (0, 2)) @ R(z1 - z2, (0, 1))
    elif spec.kind == "Felder":
        q = np.asarray(spec.dynamical_q, dtype=complex)
        F = lambda z, s, qq: embed(felder(z, h, qq, spec.tau), s, N)
        lhs = F(z1 - z2, (0, 1), q) \
            @ _shift_on(lambda qq: F(z1 - z3, (0, 2), qq), 1, q, -h, N) \
            @ F(z2 - z3, (1, 2), q)
        rhs = _shift_on(lambda qq: F(z2 - z3, (1, 2), qq), 0, q, -h, N) \
            @ F(z1 - z3, (0, 2), q) \
            @ _shift_on(lambda qq: F(z1 - z2, (0, 1), qq), 2, q, -h, N)
    else:
        q = spec.dynamical_q
        A = lambda s, u, v: embed(acf(u, v, h, q, spec.tau), s, N)
        lhs = A((0, 1), z1, z2) @ A((0, 2), z1 - h, z3 - h) @ A((1, 2), z2, z3)
        rhs = A((1, 2), z2 - h, z3 - h) @ A((0, 2), z1, z3) @ A((0, 1), z1 - h, z2 - h)
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# IRF-Vertex relations


def _g_site(it, z, q, site, N):
    g = it.g(z, q)
    return np.kron(g, np.eye(N)) if site == 1 else np.kron(np.eye(N), g)


def _g_shifted(it, z, q, site, shift_site, s, N):
    """g on ``site`` evaluated at q + s hbar^{(shift_site)} (two-site space)."""
    I = np.eye(N)
    out = 0
    for k in range(N):
        qk = np.array(q, dtype=complex)
        qk[k] += s
        g = it.g(z, qk)
        P = np.diag(I[k])
        out = out + (np.kron(g, P) if site == 1 else np.kron(P, g))
    return out


def irf_vertex_residual(variant, N, hbar, tau, q, z1, z2):
    """Residual of one IRF-Vertex relation, relative to the largest entry.

    Felder_BB:  g2(z2) g1(z1, q + hbar^(2)) R^F = R^B g1(z1) g2(z2, q + hbar^(1))
    ACF_Felder: R^F = g1^{-1}(z1, q + hbar^(2)) g1(z1 + hbar) R^ACF g2^{-1}(z2 + hbar) g2(z2, q + hbar^(1))
    ACF_BB:     R^B = g1(z1 + hbar) g2(z2) R^ACF g2^{-1}(z2 + hbar) g1^{-1}(z1)
    Residue:    (1/N) gbreve2(0) R^hbar(z1) = g1(z1 + N hbar) O12 g2^{-1}(N hbar) g1^{-1}(z1)
    """
    cls = _cls(tau)
    q = np.asarray(q, dtype=complex)
    it = build_intertwiner(cls, True, N)
    inv = np.linalg.inv
    if variant == "Residue":
        ld = laurent_data(it, q)
        lhs = np.kron(np.eye(N), ld.gbreve0) @ baxter_belavin(z1, hbar, cls, N) / N
        rhs = _g_site(it, z1 + N * hbar, q, 1, N) @ o12(N) \
            @ inv(_g_site(it, N * hbar, q, 2, N)) @ inv(_g_site(it, z1, q, 1, N))
        return float(np.max(np.abs(lhs - rhs)))
    RB = baxter_belavin(z1 - z2, hbar / N, cls, N) / N
    RF = felder(z1 - z2, hbar, q, cls)
    if variant == "Felder_BB":
        lhs = _g_site(it, z2, q, 2, N) @ _g_shifted(it, z1, q, 1, 2, hbar, N) @ RF
        rhs = RB @ _g_site(it, z1, q, 1, N) @ _g_shifted(it, z2, q, 2, 1, hbar, N)
    elif variant == "ACF_Felder":
        RA = acf(z1, z2, hbar, q, cls)
        lhs = RF
        rhs = inv(_g_shifted(it, z1, q, 1, 2, hbar, N)) @ _g_site(it, z1 + hbar, q, 1, N) @ RA \
            @ inv(_g_site(it, z2 + hbar, q, 2, N)) @ _g_shifted(it, z2, q, 2, 1, hbar, N)
    elif variant == "ACF_BB":
        RA = acf(z1, z2, hbar, q, cls)
        lhs = RB
        rhs = _g_site(it, z1 + hbar, q, 1, N) @ _g_site(it, z2, q, 2, N) @ RA \
            @ inv(_g_site(it, z2 + hbar, q, 2, N)) @ inv(_g_site(it, z1, q, 1, N))
    else:
        raise ValueError(f"unknown IRF-Vertex variant {variant!r}")
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))


def acf_residue_residual(z1, hbar, q, tau, radius=1e-2):
    """|Res_{z2=0} R^ACF(z1, z2) - O12|_max."""
    N = len(q)
    res = residue_at(lambda z2: acf(z1, z2, hbar, q, tau), 0.0, radius)
    return float(np.max(np.abs(res - o12(N))))


def bb_residue_residual(hbar, tau, N, radius=1e-2):
    """|Res_{z=0} R^hbar(z) - N P12|_max."""
    res = residue_at(lambda z: baxter_belavin(z, hbar, tau, N), 0.0, radius)
    return float(np.max(np.abs(res - N * permutation_operator(N))))


def irf_hbar_inverse_residual(q, z, tau):
    """|gbreve2(0) - g1(z) O12 g1^{-1}(z) gbreve2(0)|_max."""
    cls = _cls(tau)
    N = len(q)
    it = build_intertwiner(cls, True, N)
    ld = laurent_data(it, q)
    g2b = np.kron(np.eye(N), ld.gbreve0)
    g1 = _g_site(it, z, q, 1, N)
    return float(np.max(np.abs(g2b - g1 @ o12(N) @ np.linalg.inv(g1) @ g2b)))


def lax_from_r_matrix(S, z, hbar, tau):
    """L^hbar(S, z) = (1/N) tr_2(R^hbar_12(z) S_2)."""
    S = np.asarray(S, dtype=complex)
    N = S.shape[0]
    return trace_over_site(baxter_belavin(z, hbar, tau, N), 2, S) / N


def sklyanin_factorized_residual(q, p, z, hbar, c, tau):
    """|L^hbar(S(p,q), z) - (theta'(0)/theta(hbar)) g(z + N hbar) e^{P/c} g^{-1}(z)|_max."""
    from .factorization import spin_from_phase

    cls = _cls(tau)
    q = np.asarray(q, dtype=complex)
    N = len(q)
    it = build_intertwiner(cls, True, N)
    S = spin_from_phase(q, p, hbar, c, cls)
    lhs = lax_from_r_matrix(S, z, hbar, cls)
    ep = np.diag(np.exp(np.asarray(p, dtype=complex) / c))
    rhs = cls.theta_prime0() / cls.theta(hbar) * it.g(z + N * hbar, q) @ ep @ np.linalg.inv(it.g(z, q))
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# RS M-matrix from the intertwiner


def theorem1_g_f(q, p, hbar, c, tau, ld=None):
    """G = tr2(O12 T2) and F = tr2(O12 T2') with
    T = (theta'(0)/theta(hbar)) gbreve(0) g(N hbar) e^{P/c} and T' the same with A.
    """
    cls = _cls(tau)
    q = np.asarray(q, dtype=complex)
    N = len(q)
    it = build_intertwiner(cls, True, N)
    if ld is None:
        ld = laurent_data(it, q)
    pref = cls.theta_prime0() / cls.theta(hbar)
    right = it.g(N * hbar, q) @ np.diag(np.exp(np.asarray(p, dtype=complex) / c))
    O = o12(N)
    G = trace_over_site(O, 2, pref * ld.gbreve0 @ right)
    F = trace_over_site(O, 2, pref * ld.A @ right)
    return G, F


def m_rs_theorem1(q, p, z, hbar, c, tau, trace_part=False):
    """M = -g^{-1} g' G - F + g^{-1} dg/dt for the elliptic RS model.

    Returns the trace-free part unless ``trace_part`` is set.
    """
    from .models import ModelSpec, PhasePoint, velocity_map

    cls = _cls(tau)
    q = np.asarray(q, dtype=complex)
    N = len(q)
    it = build_intertwiner(cls, True, N)
    qd = velocity_map(ModelSpec("RS", cls, True, hbar=hbar, c=c, N=N), PhasePoint(q, p))
    G, F = theorem1_g_f(q, p, hbar, c, cls)
    g = it.g(z, q)
    M = -np.linalg.solve(g, it.g(z, q, 1) @ G) - F + np.linalg.solve(g, it.g_dot(z, q, qd))
    return M if trace_part else trace_free(M)


def m_rs_example(cls, spectral, q, p, z, hbar, c, trace_part=False):
    """Trig/rational closed form M = -g^{-1} g' diag(qdot) - F - dD0/dt D0^{-1}.

    F_ij = delta_ij sum_k K(q_i - q_k + hbar) qdot_k with K = 1/x or coth x.
    """
    from .models import ModelSpec, PhasePoint, velocity_map

    if cls.kind == "elliptic":
        raise ValueError("use m_rs_theorem1 for the elliptic class")
    q = np.asarray(q, dtype=complex)
    N = len(q)
    it = build_intertwiner(cls, spectral, N)
    qd = velocity_map(ModelSpec("RS", cls, spectral, hbar=hbar, c=c, N=N), PhasePoint(q, p))
    K = cls.E1
    Fd = np.array([sum(K(q[i] - q[k] + hbar) * qd[k] for k in range(N)) for i in range(N)])
    D = it.d0(q)
    glg = D[:, None] * np.linalg.solve(it.xi(z, q), it.xi(z, q, 1)) / D[None, :]
    M = -glg @ np.diag(qd) - np.diag(Fd) - np.diag(d0_log_derivative(it.form, q, qd, cls))
    return M if trace_part else trace_free(M)
