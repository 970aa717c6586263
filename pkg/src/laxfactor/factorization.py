"""Intertwining matrices g(z, q) and the factorized Lax matrices.

Every intertwiner here has the shape ``g = Xi(z, q) D0(q)^{-1}`` where the
column ``j`` of ``Xi`` depends on ``z`` and ``q`` only through

    u_j = a z - b q_j + c sum_k q_k

for form-specific constants ``(a, b, c)``, and ``D0`` is diagonal.  This
makes the z-, q- and tau-derivatives of ``g`` available analytically.

Forms
-----
``elliptic``      theta-function matrix, u_j = z - N q_j + sum q
``trig-xi``       x_j^(i-1) rows, last row x^(N-1) + (-1)^N / x, x = exp(2u)
``trig-v``        exp((2i-1-N)(z - q_j))
``rational-xi``   (z - q_j + qbar)^rho(i), rho = 0..N-2, N
``rational-v``    Vandermonde (z - q_j + qbar)^(i-1)
``rational-vq``   Vandermonde (-q_j)^(i-1), independent of z
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .elliptic import (
    RATIONAL,
    TRIG,
    Elliptic,
    ThetaChar,
    dedekind_eta,
    get_pole_radius,
    theta_char,
)
from .errors import DegenerateConfiguration, NearSingular, RankDeficiencyViolation
from .linalg import laurent_coefficients, residue_at, singular_ratio

__all__ = [
    "FORMS",
    "Intertwiner",
    "LaurentData",
    "build_intertwiner",
    "default_form",
    "d_factors",
    "d0_log_derivative",
    "det_xi_closed_form",
    "det_xi_stated",
    "xi_column_identity_residual",
    "laurent_data",
    "shift_matrix_c",
    "c0_matrix",
    "y_matrix",
    "factorized_lax_rs",
    "factorized_lax_cm",
    "spin_from_phase",
    "psi_from_residue",
    "psi_from_velocities",
    "gauge_equivalence_residual",
    "pole_cancellation_residual",
]

FORMS = ("elliptic", "trig-xi", "trig-v", "rational-xi", "rational-v", "rational-vq")


def default_form(cls, spectral):
    """Intertwiner form used by the default factorization of a (class, mode) cell."""
    if cls.kind == "elliptic":
        if not spectral:
            raise ValueError("the elliptic class always carries a spectral parameter")
        return "elliptic"
    if cls.kind == "trigonometric":
        return "trig-xi" if spectral else "trig-v"
    return "rational-xi" if spectral else "rational-v"


def _check_distinct(q, what="coordinates"):
    r = get_pole_radius()
    N = len(q)
    for i in range(N):
        for j in range(i + 1, N):
            if abs(q[i] - q[j]) < r:
                raise DegenerateConfiguration(
                    f"{what} {i} and {j} coincide", pair=(i, j))


def _class_of(form, tau=None):
    if form == "elliptic":
        return tau if isinstance(tau, Elliptic) else Elliptic(tau)
    return TRIG if form.startswith("trig") else RATIONAL


# ---------------------------------------------------------------------------
# Diagonal factors


def d_factors(q, eta, cls):
    """D^eta_j = prod_{k != j} theta(q_j - q_k + eta) for the class building block."""
    q = np.asarray(q, dtype=complex)
    N = len(q)
    diff = q[:, None] - q[None, :] + eta
    t = np.asarray(cls.theta(diff), dtype=complex)
    np.fill_diagonal(t, 1.0)
    return np.prod(t, axis=1)


def _d0(form, q, cls):
    q = np.asarray(q, dtype=complex)
    if form == "trig-xi":
        e = np.exp(-2.0 * q)
        diff = e[:, None] - e[None, :]
        np.fill_diagonal(diff, 1.0)
        return np.prod(diff, axis=1)
    return d_factors(q, 0.0, cls)


def d0_log_derivative(form, q, qdot, cls=None):
    """Diagonal of (d/dt D0) D0^{-1} for given velocities (a formal substitution)."""
    q = np.asarray(q, dtype=complex)
    qdot = np.asarray(qdot, dtype=complex)
    N = len(q)
    out = np.zeros(N, dtype=complex)
    if cls is None:
        cls = _class_of(form)
    for i in range(N):
        for k in range(N):
            if k == i:
                continue
            if form == "trig-xi":
                ei, ek = np.exp(-2 * q[i]), np.exp(-2 * q[k])
                out[i] += (-2 * qdot[i] * ei + 2 * qdot[k] * ek) / (ei - ek)
            else:
                out[i] += (qdot[i] - qdot[k]) * cls.E1(q[i] - q[k])
    return out


def _d0_dtau_log(q, cls):
    """Diagonal of D0^{-1} d_tau D0 (explicit tau-dependence, elliptic only)."""
    q = np.asarray(q, dtype=complex)
    N = len(q)
    return np.array([sum(cls.dtau_log_theta(q[i] - q[k]) for k in range(N) if k != i)
                     for i in range(N)])


# ---------------------------------------------------------------------------
# Intertwiner


@dataclass(frozen=True)
class Intertwiner:
    """g(z, q) = Xi(z, q) D0(q)^{-1} for one of the forms in ``FORMS``.

    The evaluator is immutable; all methods are pure.
    """

    form: str
    N: int
    cls: object

    @property
    def spectral(self):
        return self.form not in ("trig-v", "rational-v", "rational-vq") or self.form == "trig-v"

    @property
    def coefficients(self):
        N = self.N
        return {
            "elliptic": (1.0, float(N), 1.0),
            "trig-xi": (1.0, 1.0, 1.0 / N),
            "trig-v": (1.0, 1.0, 0.0),
            "rational-xi": (1.0, 1.0, 1.0 / N),
            "rational-v": (1.0, 1.0, 1.0 / N),
            "rational-vq": (0.0, 1.0, 0.0),
        }[self.form]

    def _u(self, z, q):
        a, b, c = self.coefficients
        q = np.asarray(q, dtype=complex)
        # forms without a spectral parameter do not depend on z
        z = 0.0 if z is None else z
        return a * z - b * q + c * q.sum()

    def _rows(self, u, order):
        """Matrix F_i(u_j) differentiated ``order`` times in u."""
        N = self.N
        i = np.arange(1, N + 1)[:, None]
        u = np.asarray(u, dtype=complex)[None, :]
        form = self.form
        if form == "elliptic":
            T = N * self.cls.tau
            return np.array([
                theta_char(ThetaChar(Fraction(1, 2) - Fraction(k, N), Fraction(N, 2)),
                           u[0], T, deriv=order)
                for k in range(1, N + 1)])
        if form == "trig-xi":
            k = (i - 1).astype(float) * np.ones_like(u)
            M = (2 * k) ** order * np.exp(2 * k * u)
            last = (2.0 * (N - 1)) ** order * np.exp(2.0 * (N - 1) * u[0]) \
                + (-1.0) ** N * (-2.0) ** order * np.exp(-2.0 * u[0])
            M[N - 1] = last
            return M
        if form == "trig-v":
            k = (2 * i - 1 - N).astype(float)
            return k ** order * np.exp(k * u)
        if form in ("rational-xi", "rational-v", "rational-vq"):
            powers = np.arange(N)
            if form == "rational-xi":
                powers = np.array(list(range(N - 1)) + [N])
            out = np.zeros((N, u.shape[1]), dtype=complex)
            for r, n in enumerate(powers):
                if n >= order:
                    out[r] = factorial(n) / factorial(n - order) * u[0] ** (n - order)
            return out
        raise ValueError(f"unknown form {form!r}")

    # the Xi part and its derivatives

    def xi(self, z, q, order=0):
        """d^order/dz^order Xi(z, q)."""
        a = self.coefficients[0]
        return a ** order * self._rows(self._u(z, q), order)

    def xi_du(self, z, q, order=1):
        """Derivative in the column argument u (independent of the z-scaling)."""
        return self._rows(self._u(z, q), order)

    def d0(self, q):
        return _d0(self.form, q, self.cls)

    def g(self, z, q, order=0):
        """d^order/dz^order g(z, q)."""
        _check_distinct(q)
        return self.xi(z, q, order) / self.d0(q)[None, :]

    def g_inv(self, z, q):
        return np.linalg.inv(self.g(z, q))

    def dg_dq(self, z, q):
        """List of partial derivatives dg/dq_k, k = 0..N-1."""
        a, b, c = self.coefficients
        N = self.N
        q = np.asarray(q, dtype=complex)
        d0 = self.d0(q)
        xu = self.xi_du(z, q, 1)
        g = self.g(z, q)
        out = []
        for k in range(N):
            w = np.full(N, c, dtype=complex)
            w[k] -= b
            dxi = xu * w[None, :]
            # d log D0_j / d q_k
            e = np.zeros(N, dtype=complex)
            e[k] = 1.0
            dlog = d0_log_derivative(self.form, q, e, self.cls)
            out.append(dxi / d0[None, :] - g * dlog[None, :])
        return out

    def g_dot(self, z, q, qdot):
        """Total time derivative of g along velocities ``qdot``."""
        a, b, c = self.coefficients
        q = np.asarray(q, dtype=complex)
        qdot = np.asarray(qdot, dtype=complex)
        w = -b * qdot + c * qdot.sum()
        xu = self.xi_du(z, q, 1)
        dlog = d0_log_derivative(self.form, q, qdot, self.cls)
        return (xu * w[None, :]) / self.d0(q)[None, :] - self.g(z, q) * dlog[None, :]

    def g_dtau(self, z, q):
        """Explicit d/dtau of g at fixed (z, q) (elliptic form only)."""
        if self.form != "elliptic":
            raise ValueError("tau-derivative exists only for the elliptic form")
        N = self.N
        u = self._u(z, q)
        T = N * self.cls.tau
        dxi = np.array([
            N * theta_char(ThetaChar(Fraction(1, 2) - Fraction(k, N), Fraction(N, 2)),
                           u, T, dtau=1)
            for k in range(1, N + 1)])
        dlog = _d0_dtau_log(q, self.cls)
        return dxi / self.d0(q)[None, :] - self.g(z, q) * dlog[None, :]


def build_intertwiner(cls, spectral=True, N=2, tau=None, form=None):
    """Construct the intertwiner for a function class and spectral mode.

    ``form`` overrides the default choice (e.g. ``rational-vq``).
    """
    if isinstance(cls, str):
        from .elliptic import make_class
        cls = make_class(cls, tau)
    if form is None:
        form = default_form(cls, spectral)
    if form not in FORMS:
        raise ValueError(f"unknown intertwiner form {form!r}")
    return Intertwiner(form, int(N), _class_of(form, cls if cls.kind == "elliptic" else tau))


# ---------------------------------------------------------------------------
# Determinant of the elliptic Xi


def det_xi_stated(z, q, tau):
    """Stated closed form C_N(tau) theta(z) prod_{i<j} theta(q_i - q_j).

    C_N = (-1)^(N-1) / (i eta(tau))^((N-1)(N-2)/2).
    """
    cls = Elliptic(tau)
    q = np.asarray(q, dtype=complex)
    N = len(q)
    CN = (-1) ** (N - 1) / (1j * dedekind_eta(cls.tau)) ** ((N - 1) * (N - 2) // 2)
    prod = np.prod([cls.theta(q[i] - q[j]) for i in range(N) for j in range(i + 1, N)])
    return CN * cls.theta(z) * prod


def det_xi_closed_form(z, q, tau):
    """Closed form of det Xi with the ordering sign fixed numerically.

    Equal to the stated expression times (-1)^(N(N-1)/2), i.e. with the
    product taken over theta(q_j - q_i), i < j.
    """
    N = len(q)
    return (-1) ** (N * (N - 1) // 2) * det_xi_stated(z, q, tau)


def xi_column_identity_residual(z, q, hbar, tau):
    """Residual of the column identity of the elliptic intertwiner.

    (theta(hbar)/theta'(0)) sum_k g_ik(z) phi(z, q_kj + hbar)
        = g_ij(z + N hbar) prod_{m != j} theta(q_mj) / theta(q_mj + hbar)
    """
    cls = Elliptic(tau)
    q = np.asarray(q, dtype=complex)
    N = len(q)
    it = build_intertwiner(cls, True, N)
    g0 = it.g(z, q)
    Phi = np.array([[cls.phi(z, q[k] - q[j] + hbar) for j in range(N)] for k in range(N)])
    lhs = cls.theta(hbar) / cls.theta_prime0() * g0 @ Phi
    ratio = np.array([np.prod([cls.theta(q[m] - q[j]) / cls.theta(q[m] - q[j] + hbar)
                               for m in range(N) if m != j]) for j in range(N)])
    rhs = it.g(z + N * hbar, q) * ratio[None, :]
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# Laurent data of g^{-1} at z = 0


@dataclass
class LaurentData:
    """g^{-1}(z) = gbreve0 / z + A + O(z)."""

    gbreve0: np.ndarray
    A: np.ndarray

    @property
    def psi(self):
        N = self.gbreve0.shape[0]
        return np.ones(N) @ self.gbreve0 / N

    @property
    def rank_ratio(self):
        return singular_ratio(self.gbreve0)


def laurent_data(g, q, radius=None, nodes=64):
    """Residue and constant term of g^{-1} at z = 0.

    ``g`` is an Intertwiner or any callable z -> matrix.  Both coefficients
    come from the same trapezoidal contour, which is spectrally accurate.
    """
    if isinstance(g, Intertwiner):
        it = g
        f = lambda z: np.linalg.inv(it.g(z, q))
        if radius is None:
            # stay inside the nearest other zero of det g
            radius = 1e-2 if it.form == "elliptic" else 1e-2
    else:
        f = g
        radius = 1e-2 if radius is None else radius
    res = residue_at(f, 0.0, radius, nodes)
    (A,) = laurent_coefficients(f, 0.0, radius, 2 * nodes, orders=(0,))
    return LaurentData(res, A)


# ---------------------------------------------------------------------------
# Constant matrices of the rational and trigonometric factorizations


def shift_matrix_c(lam, N):
    """(C_lambda)_ij = (i-1)! lambda^(i-j) / ((j-1)! (i-j)!) for j <= i."""
    C = np.zeros((N, N), dtype=complex)
    for i in range(1, N + 1):
        for j in range(1, i + 1):
            C[i - 1, j - 1] = comb(i - 1, j - 1) * lam ** (i - j)
    return C


def c0_matrix(N):
    """(C_0)_ij = i - 1 for i = j + 1; the generator of V' = C_0 V."""
    return np.diag(np.arange(1, N, dtype=complex), -1)


def y_matrix(lam, N):
    """Y(lambda)_ij = delta_ij exp(-(N + 1 - 2i) lambda)."""
    i = np.arange(1, N + 1)
    return np.diag(np.exp(-(N + 1 - 2 * i) * lam))


# ---------------------------------------------------------------------------
# Factorized Lax matrices


def _exp_p(p, c):
    return np.exp(np.asarray(p, dtype=complex) / c)


def _factorized_rs_plain(cls, spectral, q, p, z, hbar, c, variant):
    q = np.asarray(q, dtype=complex)
    N = len(q)
    _check_distinct(q)
    ep = np.diag(_exp_p(p, c))
    if cls.kind == "elliptic":
        it = build_intertwiner(cls, True, N)
        pref = cls.theta_prime0() / cls.theta(hbar)
        return pref * np.linalg.solve(it.g(z, q), it.g(z + N * hbar, q)) @ ep
    form = default_form(cls, spectral)
    if variant == "alt" and form == "rational-v":
        form = "rational-vq"
    it = build_intertwiner(cls, spectral, N, form=form)
    D = it.d0(q)
    if variant == "alt":
        if form == "trig-v":
            X = it.xi(z, q)
            core = np.linalg.solve(X, y_matrix(hbar, N) @ X)
        elif form == "rational-vq":
            X = it.xi(z, q)
            core = np.linalg.solve(X, shift_matrix_c(hbar, N) @ X)
        else:
            raise ValueError(f"no alternative form for {cls.kind} spectral={spectral}")
    else:
        core = np.linalg.solve(it.xi(z, q), it.xi(z + hbar, q))
    return (D[:, None] * core / D[None, :]) @ ep


def factorized_lax_rs(cls, spectral, q, p, z, hbar, c, prime=False, variant="main"):
    """Factorized Ruijsenaars-Schneider Lax matrix.

    Parameters
    ----------
    cls : FunctionClass
    spectral : bool
        Trig/rational only; the elliptic class is always spectral.
    prime : bool
        Return the variant with D^{+hbar} in place of D^{-hbar}.
    variant : {"main", "alt"}
        ``alt`` selects the Y(hbar) form (trig, no spectral parameter) or the
        V(q) C_hbar V(q) form (rational, no spectral parameter).
    """
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    N = len(q)
    if not prime:
        return _factorized_rs_plain(cls, spectral, q, p, z, hbar, c, variant)
    if cls.kind == "elliptic":
        it = build_intertwiner(cls, True, N)
        Dh = d_factors(q, hbar, cls)
        pref = cls.theta_prime0() / cls.theta(hbar)
        A = it.xi(z + N * hbar, -q).T
        B = it.xi(z, -q).T
        core = A @ np.linalg.inv(B)
        return pref * (core / Dh[:, None] * Dh[None, :]) @ np.diag(_exp_p(p, c))
    # transposition and q -> -q applied to the unprimed factorization
    Lm = _factorized_rs_plain(cls, spectral, -q, p, z, hbar, c, variant)
    w = d_factors(q, hbar, cls) / d_factors(q, 0.0, cls) * _exp_p(p, c)
    return Lm.T / w[:, None] * w[None, :]


def factorized_lax_cm(cls, spectral, q, p, z, nu, variant="main"):
    """Factorized Calogero-Moser Lax matrix.

    ``variant``: ``main`` (g^{-1} g' form), ``explicit`` (elliptic closed-form
    entries of g^{-1} g'), ``alt`` (log Y form for trig without spectral
    parameter, C_0 form for rational without spectral parameter).
    """
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    N = len(q)
    _check_distinct(q)
    P = np.diag(p)
    if cls.kind == "elliptic":
        if variant == "explicit":
            return P + N * nu * elliptic_ginv_dg(cls, q, z)
        it = build_intertwiner(cls, True, N)
        return P + N * nu * np.linalg.solve(it.g(z, q), it.g(z, q, 1))
    form = default_form(cls, spectral)
    if variant == "alt":
        if form == "trig-v":
            it = build_intertwiner(cls, False, N, form="trig-v")
            X = it.xi(z, q)
            i = np.arange(1, N + 1)
            logY = np.diag(nu * (2 * i - 1 - N).astype(complex))
            D = it.d0(q)
            return P + D[:, None] * np.linalg.solve(X, logY @ X) / D[None, :]
        if form == "rational-v":
            it = build_intertwiner(cls, False, N, form="rational-vq")
            X = it.xi(z, q)
            D = it.d0(q)
            return P + nu * D[:, None] * np.linalg.solve(X, c0_matrix(N) @ X) / D[None, :]
        raise ValueError(f"no alternative form for {cls.kind} spectral={spectral}")
    it = build_intertwiner(cls, spectral, N, form=form)
    D = it.d0(q)
    core = np.linalg.solve(it.xi(z, q), it.xi(z, q, 1))
    return P + nu * D[:, None] * core / D[None, :]


def elliptic_ginv_dg(cls, q, z):
    """Closed-form entries of g^{-1}(z) g'(z) for the elliptic intertwiner."""
    q = np.asarray(q, dtype=complex)
    N = len(q)
    out = np.zeros((N, N), dtype=complex)
    for i in range(N):
        for j in range(N):
            if i == j:
                out[i, i] = (cls.E1(z) - sum(cls.E1(q[i] - q[k]) for k in range(N) if k != i)) / N
            else:
                out[i, j] = cls.phi(z, q[i] - q[j]) / N
    return out


# ---------------------------------------------------------------------------
# Rank-one spin matrices and the gauge equivalence with the relativistic top


def psi_from_residue(ld):
    """psi = (1/N) rho^T gbreve(0)."""
    return ld.psi


def psi_from_velocities(q, p, hbar, c, tau):
    """psi = (theta'(0)/theta(hbar)) rho^T D^{-hbar} (D^0)^{-1} g^{-1}(N hbar)."""
    cls = Elliptic(tau) if not isinstance(tau, Elliptic) else tau
    q = np.asarray(q, dtype=complex)
    N = len(q)
    it = build_intertwiner(cls, True, N)
    w = d_factors(q, -hbar, cls) / d_factors(q, 0.0, cls)
    return cls.theta_prime0() / cls.theta(hbar) * (w @ np.linalg.inv(it.g(N * hbar, q)))


def spin_from_phase(q, p, hbar=None, c=None, tau=None, relativistic=True, nu=None,
                    check=True, ld=None):
    """Rank-one spin matrix S(p, q) of the top gauge equivalent to RS or CM.

    Relativistic: S = (theta'(0)/theta(hbar)) g(N hbar) e^{P/c} gbreve(0).
    Non-relativistic: S = g(0) P gbreve(0) + N nu g'(0) gbreve(0).
    """
    cls = Elliptic(tau) if not isinstance(tau, Elliptic) else tau
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    N = len(q)
    it = build_intertwiner(cls, True, N)
    if ld is None:
        ld = laurent_data(it, q)
    if relativistic:
        S = cls.theta_prime0() / cls.theta(hbar) * it.g(N * hbar, q) @ np.diag(_exp_p(p, c)) @ ld.gbreve0
    else:
        S = it.g(0.0 + 0j, q) @ np.diag(p) @ ld.gbreve0 + N * nu * it.g(0.0 + 0j, q, 1) @ ld.gbreve0
    if check:
        r = singular_ratio(S)
        if r >= 1e-8:
            raise RankDeficiencyViolation(f"S has sigma2/sigma1 = {r:.3e}")
    return S


def gauge_equivalence_residual(q, p, z, hbar, c, tau):
    """Max-entry residual of L^RS(z) = g^{-1}(z) L^hbar(S(p, q), z) g(z).

    L^hbar(S, z) = (1/N) tr_2(R^hbar_12(z) S_2) is built from the
    Baxter-Belavin R-matrix and the rank-one S of ``spin_from_phase``.
    """
    from .linalg import trace_over_site
    from .models import ModelSpec, PhasePoint, lax_rs
    from .rmatrix import baxter_belavin

    cls = Elliptic(tau) if not isinstance(tau, Elliptic) else tau
    q = np.asarray(q, dtype=complex)
    N = len(q)
    it = build_intertwiner(cls, True, N)
    S = spin_from_phase(q, p, hbar, c, cls)
    R = baxter_belavin(z, hbar, cls, N)
    Lh = trace_over_site(R, 2, S) / N
    g = it.g(z, q)
    lhs = np.linalg.solve(g, Lh @ g)
    spec = ModelSpec("RS", cls, True, hbar=hbar, c=c, N=N)
    L = lax_rs(spec, PhasePoint(q, p), z)
    return float(np.max(np.abs(lhs - L)))


def pole_cancellation_residual(q, p, hbar, c, tau):
    """|g(0) Res_{z=0} L^RS(z) gbreve(0)|_max (second-order pole condition)."""
    from .models import ModelSpec, PhasePoint, velocity_map

    cls = Elliptic(tau) if not isinstance(tau, Elliptic) else tau
    q = np.asarray(q, dtype=complex)
    N = len(q)
    it = build_intertwiner(cls, True, N)
    ld = laurent_data(it, q)
    qd = velocity_map(ModelSpec("RS", cls, True, hbar=hbar, c=c, N=N), PhasePoint(q, p))
    res = np.ones((N, 1)) @ qd[None, :]
    return float(np.max(np.abs(it.g(0.0 + 0j, q) @ res @ ld.gbreve0)))
