"""Theta functions, Eisenstein and Kronecker functions, and their degenerations.

Conventions
-----------
The odd theta function is ``theta1(z) = theta[1/2; 1/2](z | tau)`` with

    theta[a; b](z | tau) = sum_j exp(pi i (j+a)^2 tau + 2 pi i (j+a)(z+b)).

It vanishes at ``z = 0`` and has ``theta1'(0) != 0``. From it

    E1(z) = theta1'(z) / theta1(z)               (first Eisenstein function)
    E2(z) = -E1'(z) = wp(z) - theta1'''(0) / (3 theta1'(0))
    phi(z, u) = theta1'(0) theta1(z+u) / (theta1(z) theta1(u))   (Kronecker)
    f(z, u) = d/du phi(z, u)

The trigonometric and rational classes are obtained by replacing ``theta1`` by
``sinh`` and by the identity map: ``E1 -> coth z, 1/z``, ``phi -> coth z +
coth u, 1/z + 1/u``. These are exposed exactly in that form; no rescaling of
arguments is applied when comparing against the elliptic class. For
``Im tau -> +inf`` one has ``phi_ell(z, u) ~ i pi phi_trig(i pi z, i pi u)``.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NearSingular, NonConvergent, ThetaOverflow

__all__ = [
    "SERIES_TOL",
    "MAX_INDEX",
    "pole_radius",
    "get_pole_radius",
    "ThetaChar",
    "theta_char",
    "theta1",
    "dedekind_eta",
    "FunctionClass",
    "Elliptic",
    "Trigonometric",
    "Rational",
    "TRIG",
    "RATIONAL",
    "make_class",
    "eisenstein",
    "kronecker_phi",
    "phi_f_derivative",
    "omega",
    "phi_alpha",
    "fay_residual",
    "fay_degenerate_residuals",
    "heat_residual",
    "phi_heat_residual",
    "log_theta_heat_residual",
    "wp_theta_quotient",
    "e2_wp_residual",
    "squared_e1_residual",
    "phi_f_residual",
    "quasi_periodicity_residuals",
]

SERIES_TOL = 1e-16
MAX_INDEX = 200
_LOG_MAX = 700.0

_pole_radius = contextvars.ContextVar("pole_radius", default=1e-8)


def get_pole_radius():
    return _pole_radius.get()


@contextlib.contextmanager
def pole_radius(radius):
    """Temporarily change the pole exclusion radius (context-local)."""
    token = _pole_radius.set(float(radius))
    try:
        yield
    finally:
        _pole_radius.reset(token)


@dataclass(frozen=True)
class ThetaChar:
    """Characteristics ``(a, b)`` of a theta function, stored as exact fractions."""

    a: Fraction
    b: Fraction

    def __init__(self, a, b):
        object.__setattr__(self, "a", Fraction(a).limit_denominator(10**6))
        object.__setattr__(self, "b", Fraction(b).limit_denominator(10**6))

    def representable(self, N):
        return (self.a * N).denominator == 1 and (self.b * N).denominator == 1


ODD = ThetaChar(Fraction(1, 2), Fraction(1, 2))


def _check_tau(tau):
    tau = complex(tau)
    if not tau.imag > 0:
        raise NonConvergent(f"theta series diverges: Im(tau) = {tau.imag} <= 0")
    return tau


def _theta_series(a, b, z, tau, orders=((0, 0),)):
    """Sum the theta series and its term-wise derivatives.

    ``orders`` is a sequence of ``(dz, dtau)`` pairs; for each pair the
    function returns ``d^dz/dz^dz d^dtau/dtau^dtau theta[a; b](z | tau)``.
    The index window is centred on the dominant term and its half-width is
    chosen so that every omitted term is below ``SERIES_TOL`` times the
    largest one.
    """
    tau = _check_tau(tau)
    a = float(a)
    b = float(b)
    z = np.asarray(z, dtype=complex)
    flat = z.reshape(-1)
    t = tau.imag

    peak = np.pi * flat.imag**2 / t
    if flat.size and peak.max() > _LOG_MAX:
        k = int(np.argmax(peak))
        shift = round(-flat[k].imag / t)
        raise ThetaOverflow(
            f"dominant theta term exp({peak[k]:.1f}) overflows; "
            f"reduce z by {shift}*tau using quasi-periodicity"
        )

    max_dz = max(o[0] for o in orders)
    max_dt = max(o[1] for o in orders)
    # pi t K^2 beats log(1/SERIES_TOL) plus the polynomial prefactor growth
    budget = -math.log(SERIES_TOL) + 2.0 * (max_dz + 2 * max_dt) + 4.0
    half = int(math.ceil(math.sqrt(budget / (math.pi * t)))) + 2 + max_dz + max_dt
    if half > MAX_INDEX:
        raise NonConvergent(
            f"theta series needs |j| <= {half} > {MAX_INDEX} terms (Im tau = {t:g})"
        )

    centre = np.round(-flat.imag / t - a)
    x = centre[:, None] + np.arange(-half, half + 1)[None, :] + a
    base = np.exp(1j * np.pi * x * x * tau + 2j * np.pi * x * (flat[:, None] + b))

    out = []
    for dz, dt in orders:
        terms = base
        if dz:
            terms = terms * (2j * np.pi * x) ** dz
        if dt:
            terms = terms * (1j * np.pi * x * x) ** dt
        out.append(terms.sum(axis=1).reshape(z.shape))
    return out


def theta_char(chr, z, tau, deriv=0, dtau=0):
    """Theta function with characteristics ``chr = (a, b)``.

    Parameters
    ----------
    chr : ThetaChar or tuple
        Characteristics; any rationals are accepted.
    z : complex or array_like
    tau : complex
        Modular parameter, ``Im(tau) > 0``.
    deriv, dtau : int
        Orders of the z- and tau-derivatives, computed term by term.
    """
    if not isinstance(chr, ThetaChar):
        chr = ThetaChar(*chr)
    (val,) = _theta_series(chr.a, chr.b, z, tau, ((deriv, dtau),))
    return val[()] if val.ndim == 0 else val


def theta1(z, tau, deriv=0, dtau=0):
    """Odd theta function ``theta[1/2; 1/2](z | tau)`` and its derivatives."""
    return theta_char(ODD, z, tau, deriv, dtau)


def dedekind_eta(tau, tol=1e-17):
    tau = _check_tau(tau)
    q = np.exp(2j * np.pi * tau)
    prod = 1.0 + 0j
    qk = q
    for _ in range(10000):
        prod *= 1.0 - qk
        if abs(qk) < tol:
            break
        qk *= q
    else:
        raise NonConvergent("Dedekind eta product did not converge")
    return complex(np.exp(1j * np.pi * tau / 12.0) * prod)


def _scalar(x):
    x = np.asarray(x)
    return x[()] if x.ndim == 0 else x


class FunctionClass:
    """One of the three function classes (elliptic, trigonometric, rational).

    ``theta`` is the odd building block (theta1, sinh or identity); all other
    functions are expressed through it.
    """

    kind = "abstract"
    tau = None

    # distance from z to the nearest zero of theta
    def pole_distance(self, z):
        raise NotImplementedError

    def check(self, z, what="argument"):
        r = get_pole_radius()
        if isinstance(z, (complex, float, int, np.number)) and self.pole_distance(z) >= r:
            return np.asarray(z, dtype=complex)
        z = np.asarray(z, dtype=complex)
        d = self.pole_distance(z)
        if np.any(d < r):
            bad = complex(z.reshape(-1)[int(np.argmin(np.asarray(d).reshape(-1)))])
            raise NearSingular(
                f"{what} {bad} lies within {r:g} of a pole ({self.kind})", point=bad
            )
        return z

    def theta(self, z, deriv=0):
        raise NotImplementedError

    def theta_prime0(self):
        raise NotImplementedError

    def theta3_ratio(self):
        """``theta'''(0) / theta'(0)`` for the class building block."""
        raise NotImplementedError

    def E1(self, z):
        z = self.check(z)
        return _scalar(self.theta(z, 1) / self.theta(z))

    def E2(self, z):
        z = self.check(z)
        t0, t1, t2 = (self.theta(z, k) for k in range(3))
        e1 = t1 / t0
        return _scalar(e1 * e1 - t2 / t0)

    def dE2(self, z):
        """Derivative of E2 (equal to ``-E1''``)."""
        z = self.check(z)
        t0, t1, t2, t3 = (self.theta(z, k) for k in range(4))
        e1 = t1 / t0
        de1 = t2 / t0 - e1 * e1
        d2e1 = t3 / t0 - t2 * t1 / t0**2 - 2.0 * e1 * de1
        return _scalar(-d2e1)

    def wp(self, z):
        return self.E2(z) + self.theta3_ratio() / 3.0

    def wp_prime(self, z):
        return self.dE2(z)

    def phi(self, z, u):
        z = self.check(z, "spectral argument")
        u = self.check(u, "second argument")
        return _scalar(
            self.theta_prime0() * self.theta(z + u) / (self.theta(z) * self.theta(u))
        )

    def f(self, z, u):
        """``d/du phi(z, u)``, evaluated without dividing by theta(z+u)."""
        z = self.check(z, "spectral argument")
        u = self.check(u, "second argument")
        tu, dtu = self.theta(u), self.theta(u, 1)
        return _scalar(
            self.theta_prime0()
            * (self.theta(z + u, 1) * tu - self.theta(z + u) * dtu)
            / (self.theta(z) * tu * tu)
        )

    def dphi_dz(self, z, u):
        z = self.check(z, "spectral argument")
        u = self.check(u, "second argument")
        tz, dtz = self.theta(z), self.theta(z, 1)
        return _scalar(
            self.theta_prime0()
            * (self.theta(z + u, 1) * tz - self.theta(z + u) * dtz)
            / (tz * tz * self.theta(u))
        )

    def df_dz(self, z, u):
        """Mixed derivative ``d^2 phi / dz du``."""
        phi = self.phi(z, u)
        e1zu = self.E1(z + u)
        return phi * (e1zu - self.E1(z)) * (e1zu - self.E1(u)) - phi * self.E2(z + u)

    def __repr__(self):
        return f"{type(self).__name__}()"


class Elliptic(FunctionClass):
    """Elliptic class on the torus ``C / (Z + tau Z)``."""

    kind = "elliptic"

    def __init__(self, tau):
        self.tau = _check_tau(tau)
        t0 = _theta_series(0.5, 0.5, 0.0, self.tau, ((1, 0), (3, 0)))
        self._t1 = complex(t0[0])
        self._t3 = complex(t0[1])

    def __eq__(self, other):
        return isinstance(other, Elliptic) and other.tau == self.tau

    def __hash__(self):
        return hash(("elliptic", self.tau))

    def __repr__(self):
        return f"Elliptic(tau={self.tau!r})"

    def pole_distance(self, z):
        if isinstance(z, (complex, float, int, np.number)):
            # scalar fast path, same search as below
            z = complex(z)
            t = self.tau
            n0 = round(z.imag / t.imag)
            best = math.inf
            for dn in (-1, 0, 1):
                w = z - (n0 + dn) * t
                m = round(w.real)
                for dm in (-1, 0, 1):
                    best = min(best, abs(w - (m + dm)))
            return best
        z = np.asarray(z, dtype=complex)
        t = self.tau
        n0 = np.round(z.imag / t.imag)
        best = np.full(z.shape, np.inf)
        for dn in (-1, 0, 1):
            w = z - (n0 + dn) * t
            m = np.round(w.real)
            for dm in (-1, 0, 1):
                best = np.minimum(best, np.abs(w - (m + dm)))
        return best

    def theta(self, z, deriv=0, dtau=0):
        (val,) = _theta_series(0.5, 0.5, z, self.tau, ((deriv, dtau),))
        return val

    def theta_orders(self, z, orders):
        return _theta_series(0.5, 0.5, z, self.tau, orders)

    def theta_prime0(self):
        return self._t1

    def theta3_ratio(self):
        return self._t3 / self._t1

    def E1(self, z):
        z = self.check(z)
        t0, t1 = self.theta_orders(z, ((0, 0), (1, 0)))
        return _scalar(t1 / t0)

    def E2(self, z):
        z = self.check(z)
        t0, t1, t2 = self.theta_orders(z, ((0, 0), (1, 0), (2, 0)))
        e1 = t1 / t0
        return _scalar(e1 * e1 - t2 / t0)

    def phi(self, z, u):
        z = self.check(z, "spectral argument")
        u = self.check(u, "second argument")
        if z.ndim == 0 and u.ndim == 0:
            # one series call for the three thetas
            t = self.theta(np.array([z + u, z, u]))
            return complex(self._t1 * t[0] / (t[1] * t[2]))
        return super().phi(z, u)

    # tau-derivatives from the differentiated series

    def dtau_log_theta(self, z):
        z = self.check(z)
        t0, tt = self.theta_orders(z, ((0, 0), (0, 1)))
        return _scalar(tt / t0)

    def dtau_E1(self, z):
        z = self.check(z)
        t0, t1, tt, t1t = self.theta_orders(z, ((0, 0), (1, 0), (0, 1), (1, 1)))
        return _scalar(t1t / t0 - t1 * tt / t0**2)

    def dtau_theta_prime0(self):
        (v,) = _theta_series(0.5, 0.5, 0.0, self.tau, ((1, 1),))
        return complex(v)

    def dtau_phi(self, z, u):
        phi = self.phi(z, u)
        return phi * (
            self.dtau_theta_prime0() / self._t1
            + self.dtau_log_theta(z + u)
            - self.dtau_log_theta(z)
            - self.dtau_log_theta(u)
        )


class Trigonometric(FunctionClass):
    """Trigonometric degeneration with building block ``sinh``."""

    kind = "trigonometric"

    def __eq__(self, other):
        return isinstance(other, Trigonometric)

    def __hash__(self):
        return hash("trigonometric")

    def pole_distance(self, z):
        z = np.asarray(z, dtype=complex)
        n = np.round(z.imag / np.pi)
        return np.abs(z - 1j * np.pi * n)

    def theta(self, z, deriv=0):
        z = np.asarray(z, dtype=complex)
        return np.sinh(z) if deriv % 2 == 0 else np.cosh(z)

    def theta_prime0(self):
        return 1.0

    def theta3_ratio(self):
        return 1.0

    def E1(self, z):
        z = self.check(z)
        return _scalar(1.0 / np.tanh(z))

    def E2(self, z):
        z = self.check(z)
        return _scalar(1.0 / np.sinh(z) ** 2)

    def wp(self, z):
        # trig limit: the additive constant is dropped
        return self.E2(z)

    def dE2(self, z):
        z = self.check(z)
        return _scalar(-2.0 * np.cosh(z) / np.sinh(z) ** 3)

    def phi(self, z, u):
        z = self.check(z, "spectral argument")
        u = self.check(u, "second argument")
        return _scalar(1.0 / np.tanh(z) + 1.0 / np.tanh(u))

    def f(self, z, u):
        self.check(z, "spectral argument")
        u = self.check(u, "second argument")
        return _scalar(-1.0 / np.sinh(u) ** 2 + 0.0 * np.asarray(z))


class Rational(FunctionClass):
    """Rational degeneration with building block ``z``."""

    kind = "rational"

    def __eq__(self, other):
        return isinstance(other, Rational)

    def __hash__(self):
        return hash("rational")

    def pole_distance(self, z):
        return np.abs(np.asarray(z, dtype=complex))

    def theta(self, z, deriv=0):
        z = np.asarray(z, dtype=complex)
        if deriv == 0:
            return z
        if deriv == 1:
            return np.ones_like(z)
        return np.zeros_like(z)

    def theta_prime0(self):
        return 1.0

    def theta3_ratio(self):
        return 0.0

    def E1(self, z):
        z = self.check(z)
        return _scalar(1.0 / z)

    def E2(self, z):
        z = self.check(z)
        return _scalar(1.0 / z**2)

    def dE2(self, z):
        z = self.check(z)
        return _scalar(-2.0 / z**3)

    def phi(self, z, u):
        z = self.check(z, "spectral argument")
        u = self.check(u, "second argument")
        return _scalar(1.0 / z + 1.0 / u)

    def f(self, z, u):
        self.check(z, "spectral argument")
        u = self.check(u, "second argument")
        return _scalar(-1.0 / u**2 + 0.0 * np.asarray(z))


TRIG = Trigonometric()
RATIONAL = Rational()


def make_class(kind, tau=None):
    """Build a function class from a name (``elliptic``/``trig``/``rational``)."""
    kind = kind.lower()
    if kind in ("elliptic", "ell"):
        if tau is None:
            raise ValueError("elliptic class requires tau")
        return Elliptic(tau)
    if kind in ("trig", "trigonometric"):
        return TRIG
    if kind in ("rational", "rat"):
        return RATIONAL
    raise ValueError(f"unknown function class {kind!r}")


def eisenstein(order, z, cls):
    """First (``order=1``) or second (``order=2``) Eisenstein function."""
    if order == 1:
        return cls.E1(z)
    if order == 2:
        return cls.E2(z)
    raise ValueError("order must be 1 or 2")


def kronecker_phi(eta, z, cls):
    """Kronecker function ``phi(eta, z)``; symmetric in its arguments."""
    return cls.phi(eta, z)


def phi_f_derivative(z, q, cls):
    """``f(z, q) = d/dq phi(z, q)``."""
    return cls.f(z, q)


def omega(alpha, tau, N):
    a1, a2 = alpha
    return (a1 + a2 * complex(tau)) / N


def phi_alpha(alpha, z, w, tau, N):
    """``exp(2 pi i alpha_2 z / N) phi(z, w)`` for ``alpha`` in ``Z_N x Z_N``."""
    cls = tau if isinstance(tau, Elliptic) else Elliptic(tau)
    a2 = alpha[1] % N
    return np.exp(2j * np.pi * a2 * z / N) * cls.phi(z, w)


def fay_residual(hbar, eta, z, w, cls):
    """Residual of the genus-one Fay trisecant identity.

    When ``hbar == eta`` the identity degenerates; the first degenerate form
    is checked instead.
    """
    r = get_pole_radius()
    if abs(hbar - eta) < max(r, 1e-6):
        return fay_degenerate_residuals(eta, z, w, cls)[0]
    lhs = cls.phi(hbar, z) * cls.phi(eta, w)
    rhs = cls.phi(hbar - eta, z) * cls.phi(eta, z + w) + cls.phi(
        eta - hbar, w
    ) * cls.phi(hbar, z + w)
    return float(abs(lhs - rhs))


def fay_degenerate_residuals(eta, z, w, cls):
    """Residuals of the two degenerations of the Fay identity.

    Returns ``(r1, r2)`` for

        phi(eta, z) phi(eta, w) = phi(eta, z+w)(E1(eta)+E1(z)+E1(w)-E1(z+w+eta))
        phi(eta, z) phi(eta, -z) = E2(eta) - E2(z)
    """
    lhs = cls.phi(eta, z) * cls.phi(eta, w)
    rhs = cls.phi(eta, z + w) * (
        cls.E1(eta) + cls.E1(z) + cls.E1(w) - cls.E1(z + w + eta)
    )
    r1 = abs(lhs - rhs)
    r2 = abs(cls.phi(eta, z) * cls.phi(eta, -z) - (cls.E2(eta) - cls.E2(z)))
    return float(r1), float(r2)


def heat_residual(z, tau):
    """``|4 pi i d_tau theta1 - d_z^2 theta1|`` from the differentiated series."""
    tt, t2 = _theta_series(0.5, 0.5, z, tau, ((0, 1), (2, 0)))
    return float(np.max(np.abs(4j * np.pi * tt - t2)))


def phi_heat_residual(z, q, tau):
    """``|2 pi i d_tau phi(z, q) - d_z d_q phi(z, q)|``."""
    cls = tau if isinstance(tau, Elliptic) else Elliptic(tau)
    return float(abs(2j * np.pi * cls.dtau_phi(z, q) - cls.df_dz(z, q)))


def log_theta_heat_residual(z, tau):
    """``|2 pi i d_tau log theta1(z) - (E1^2 - E2)/2|``."""
    cls = tau if isinstance(tau, Elliptic) else Elliptic(tau)
    e1 = cls.E1(z)
    return float(abs(2j * np.pi * cls.dtau_log_theta(z) - 0.5 * (e1 * e1 - cls.E2(z))))


def wp_theta_quotient(z, tau):
    """Weierstrass p from theta constants, with no z-derivatives involved.

    p(z) = (pi th2 th3 th4(z) / th1(z))^2 - (pi^2/3)(th2^4 + th3^4),
    all thetas with characteristics at periods (1, tau).
    """
    t2 = theta_char((0.5, 0), 0.0, tau)
    t3 = theta_char((0, 0), 0.0, tau)
    t4 = theta_char((0, 0.5), z, tau)
    t1 = theta_char((0.5, 0.5), z, tau)
    return (np.pi * t2 * t3 * t4 / t1) ** 2 - np.pi ** 2 / 3 * (t2 ** 4 + t3 ** 4)


def _theta3_over_theta1(cls):
    return cls.theta(0.0, 3) / cls.theta_prime0()


def e2_wp_residual(z, tau):
    """|E2(z) - p(z) + th'''(0) / (3 th'(0))| against the theta-quotient p."""
    cls = tau if isinstance(tau, Elliptic) else Elliptic(tau)
    return float(abs(cls.E2(z) - wp_theta_quotient(z, cls.tau) + _theta3_over_theta1(cls) / 3))


def squared_e1_residual(x, y, cls):
    """|(E1(x) + E1(y) + E1(-x-y))^2 - E2(x) - E2(y) - E2(x+y) - th'''(0)/th'(0)|."""
    lhs = (cls.E1(x) + cls.E1(y) + cls.E1(-x - y)) ** 2
    rhs = cls.E2(x) + cls.E2(y) + cls.E2(x + y) + _theta3_over_theta1(cls)
    return float(abs(lhs - rhs))


def phi_f_residual(a, b, z, cls):
    """phi(z, a) f(z, b) - f(z, a) phi(z, b) = phi(z, a + b)(p(a) - p(b))."""
    lhs = cls.phi(z, a) * cls.f(z, b) - cls.f(z, a) * cls.phi(z, b)
    rhs = cls.phi(z, a + b) * (cls.E2(a) - cls.E2(b))
    return float(abs(lhs - rhs))


def quasi_periodicity_residuals(z, u, tau):
    """Residuals of the monodromy laws of theta, E1 and phi around both periods.

    theta(z+1) = -theta(z), theta(z+tau) = -exp(-pi i tau - 2 pi i z) theta(z),
    E1(z+1) = E1(z), E1(z+tau) = E1(z) - 2 pi i,
    phi(z+1, u) = phi(z, u), phi(z+tau, u) = exp(-2 pi i u) phi(z, u).
    """
    cls = tau if isinstance(tau, Elliptic) else Elliptic(tau)
    t = cls.tau
    th = cls.theta(z)
    out = [
        abs(cls.theta(z + 1) + th) / max(1.0, abs(th)),
        abs(cls.theta(z + t) + np.exp(-1j * np.pi * t - 2j * np.pi * z) * th)
        / max(1.0, abs(cls.theta(z + t))),
        abs(cls.E1(z + 1) - cls.E1(z)),
        abs(cls.E1(z + t) - cls.E1(z) + 2j * np.pi),
        abs(cls.phi(z + 1, u) - cls.phi(z, u)),
        abs(cls.phi(z + t, u) - np.exp(-2j * np.pi * u) * cls.phi(z, u)),
    ]
    return [float(x) for x in out]
