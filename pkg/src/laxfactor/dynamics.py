"""Trajectory integration and the generic verification engines.

``integrate`` runs classical RK4 with step-doubling error control.  The
Lax-equation profile compares a central difference of L along the flow with
[L, M]; the conservation report tracks tr L^k and the spectrum.
"""

from dataclasses import dataclass, field

import numpy as np

from .elliptic import Elliptic, get_pole_radius
from .errors import CollisionDetected, NearSingular, StepUnderflow
from .models import (ModelSpec, PhasePoint, eom_rhs, lax_matrix, lax_top, m_matrix,
                     top_rhs)
from .rootsys import BCNSpec, bcn_rhs, lax_bcn

__all__ = [
    "TopSpec",
    "Trajectory",
    "ResidualProfile",
    "ConservationReport",
    "rk4_step",
    "integrate",
    "flow_map",
    "lax_equation_profile",
    "conservation_report",
    "fit_order",
    "sample_phase",
    "sample_spin",
]

DEFAULT_STEPS = (1e-4, 5e-5, 2.5e-5, 1.25e-5)


@dataclass(frozen=True)
class TopSpec:
    """Elliptic top (``relativistic=False``) or relativistic top with shift eta."""

    N: int
    tau: complex
    relativistic: bool = False
    eta: complex = None

    def __post_init__(self):
        if self.relativistic and self.eta is None:
            raise ValueError("the relativistic top needs eta")


# ---------------------------------------------------------------------------
# Uniform view of the three kinds of systems


class _System:
    def __init__(self, spec):
        self.spec = spec
        if isinstance(spec, TopSpec):
            self.kind = "top"
        elif isinstance(spec, BCNSpec):
            self.kind = "bcn"
        elif isinstance(spec, ModelSpec):
            if spec.model.endswith("Top"):
                raise ValueError("use TopSpec for the tops")
            self.kind = "model"
        else:
            raise TypeError(f"unsupported spec {type(spec).__name__}")

    def to_vec(self, state):
        if self.kind == "top":
            return np.asarray(state, dtype=complex).ravel().copy()
        return state.as_vector()

    def from_vec(self, v):
        if self.kind == "top":
            N = self.spec.N
            return np.asarray(v, dtype=complex).reshape(N, N)
        return PhasePoint.from_vector(v)

    def rhs(self, v):
        s = self.from_vec(v)
        if self.kind == "top":
            sp = self.spec
            return top_rhs(s, sp.tau, sp.relativistic, sp.eta).ravel()
        dq, dp = bcn_rhs(self.spec, s) if self.kind == "bcn" else eom_rhs(self.spec, s)
        return np.concatenate([dq, dp])

    def lax(self, state, z=None):
        if self.kind == "top":
            sp = self.spec
            return lax_top(state, z, sp.tau, sp.relativistic, sp.eta)[0]
        if self.kind == "bcn":
            return lax_bcn(self.spec, state)
        return lax_matrix(self.spec, state, z)

    def m(self, state, z=None):
        if self.kind == "top":
            sp = self.spec
            return lax_top(state, z, sp.tau, sp.relativistic, sp.eta)[1]
        if self.kind == "bcn":
            raise NotImplementedError("no M-matrix for the BC_N model")
        return m_matrix(self.spec, state, z)

    def closest_pair(self, v):
        """(distance, pair) of the closest collision candidate, or None."""
        if self.kind == "top":
            return None
        q = self.from_vec(v).q
        N = len(q)
        best = None
        cls = getattr(self.spec, "cls", None)
        for i in range(N):
            for j in range(i + 1, N):
                cands = [q[i] - q[j]]
                if self.kind == "bcn":
                    cands.append(q[i] + q[j])
                for x in cands:
                    d = cls.pole_distance(x) if cls is not None else abs(x)
                    if best is None or d < best[0]:
                        best = (d, (i, j))
            if self.kind == "bcn" and (best is None or abs(q[i]) < best[0]):
                best = (abs(q[i]), (i, i))
        return best


# ---------------------------------------------------------------------------
# Integration


@dataclass(frozen=True)
class Trajectory:
    """Accepted integrator states; ``states`` are PhasePoints or spin matrices."""

    times: list
    states: list
    spec: object

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if len(t) != len(self.states):
            raise ValueError("times and states differ in length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    @property
    def final(self):
        return self.states[-1]


def rk4_step(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _rhs_guarded(system, t):
    def f(v):
        try:
            return system.rhs(v)
        except NearSingular as exc:
            raise CollisionDetected(f"collision near t = {t:.6g}: {exc}", time=t,
                                    pair=getattr(exc, "pair", None)) from exc
    return f


def integrate(spec, initial, t_end, tol=1e-10, h0=None, exclusion=None, max_steps=200000):
    """Adaptive RK4 from t = 0 to ``t_end`` with step-doubling error control.

    The local error estimate is |y_2 - y_1| / 15 for one full step y_1 against
    two half steps y_2; accepted steps use the extrapolated value.  Raises
    CollisionDetected when a pair distance drops below ``exclusion`` (default
    the pole exclusion radius, at least 1e-6).
    """
    system = _System(spec)
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    excl = max(get_pole_radius(), 1e-6) if exclusion is None else exclusion
    y = system.to_vec(initial)
    system.from_vec(y)
    cp = system.closest_pair(y)
    if cp is not None and cp[0] < excl:
        raise NearSingular("initial point is singular", pair=cp[1])
    t = 0.0
    h = h0 if h0 is not None else min(0.05, t_end / 10)
    times, states = [0.0], [system.from_vec(y)]
    steps = 0
    while t < t_end * (1 - 1e-14):
        if steps >= max_steps:
            raise StepUnderflow(f"more than {max_steps} steps before t = {t_end}")
        h = min(h, t_end - t)
        if h < 1e-13 * max(1.0, abs(t)):
            raise StepUnderflow(f"step size {h:.3e} underflowed at t = {t:.6g}")
        f = _rhs_guarded(system, t)
        y1 = rk4_step(f, y, h)
        yh = rk4_step(f, y, h / 2)
        y2 = rk4_step(f, yh, h / 2)
        err = np.max(np.abs(y2 - y1)) / 15.0
        steps += 1
        if not np.all(np.isfinite(y2)):
            h /= 4
            continue
        if err <= tol:
            y = y2 + (y2 - y1) / 15.0
            t += h
            cp = system.closest_pair(y)
            if cp is not None and cp[0] < excl:
                raise CollisionDetected(f"pair {cp[1]} at distance {cp[0]:.3e}, t = {t:.6g}",
                                        time=t, pair=cp[1])
            times.append(t)
            states.append(system.from_vec(y))
        fac = 4.0 if err == 0 else min(4.0, max(0.1, 0.9 * (tol / err) ** 0.2))
        h *= fac
    return Trajectory(times, states, spec)


def flow_map(spec, state, h, substeps=4):
    """Fixed-step RK4 flow over time h (h may be negative)."""
    system = _System(spec)
    y = system.to_vec(state)
    f = _rhs_guarded(system, 0.0)
    for _ in range(substeps):
        y = rk4_step(f, y, h / substeps)
    return system.from_vec(y)


# ---------------------------------------------------------------------------
# Lax-equation profile


@dataclass(frozen=True)
class ResidualProfile:
    steps: list
    residuals: list
    estimated_order: float
    fit_residual: float = 0.0

    @property
    def min_residual(self):
        return float(min(self.residuals))

    def passed(self, order=2.0, order_tol=0.15, floor=1e-6):
        return abs(self.estimated_order - order) <= order_tol and self.min_residual < floor


def fit_order(steps, residuals):
    """Least-squares slope of log(residual) against log(h), with its rms residual."""
    x = np.log(np.asarray(steps, dtype=float))
    y = np.log(np.maximum(np.asarray(residuals, dtype=float), 1e-300))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(res ** 2)))


def _auto_steps(residual_at, target=1e-8, hmin=2e-6, hmax=1e-4):
    """Four halving steps whose smallest gives a residual near ``target``.

    The O(h^2) constant is read off a single probe at h = 1e-3.
    """
    C = residual_at(1e-3) / 1e-6
    h = hmax if C <= 0 else float(np.clip(np.sqrt(target / C), hmin, hmax))
    return [8 * h, 4 * h, 2 * h, h]


def lax_equation_profile(spec, phase, z=None, steps="auto", corrupt=False):
    """max|(L(phi_h x) - L(phi_-h x))/2h - [L, M]| for each h.

    ``steps="auto"`` places the grid from the measured O(h^2) constant;
    ``corrupt`` zeroes the diagonal of M (negative control).
    """
    system = _System(spec)
    L0 = system.lax(phase, z)
    M0 = system.m(phase, z)
    if corrupt:
        M0 = M0 - np.diag(np.diag(M0))
    rhs = L0 @ M0 - M0 @ L0

    def residual_at(h):
        Lp = system.lax(flow_map(spec, phase, h), z)
        Lm = system.lax(flow_map(spec, phase, -h), z)
        return float(np.max(np.abs((Lp - Lm) / (2 * h) - rhs)))

    if isinstance(steps, str):
        steps = DEFAULT_STEPS if corrupt else _auto_steps(residual_at)
    res = [residual_at(h) for h in steps]
    order, fr = fit_order(steps, res)
    return ResidualProfile(list(steps), res, order, fr)


# ---------------------------------------------------------------------------
# Conservation


@dataclass(frozen=True)
class ConservationReport:
    """rows: (k, absolute drift of tr L^k, relative drift); eigen_drift over the spectrum."""

    rows: list
    eigen_drift: float
    times: list = field(default_factory=list)

    def max_drift(self, kmax=None, relative=False):
        col = 2 if relative else 1
        return max(r[col] for r in self.rows if kmax is None or r[0] <= kmax)

    def as_table(self):
        lines = ["k  drift        relative"]
        lines += [f"{k:<2} {a:.3e}  {r:.3e}" for k, a, r in self.rows]
        lines.append(f"eigenvalues {self.eigen_drift:.3e}")
        return "\n".join(lines)


def _match_drift(ref, ev):
    """Greedy matching of two spectra; returns the largest matched distance."""
    left = list(ev)
    worst = 0.0
    for x in ref:
        j = int(np.argmin([abs(x - y) for y in left]))
        worst = max(worst, abs(x - left.pop(j)))
    return worst


def conservation_report(traj, z=None, kmax=None):
    system = _System(traj.spec)
    Ls = [system.lax(s, z) for s in traj.states]
    n = Ls[0].shape[0]
    kmax = n if kmax is None else kmax
    rows = []
    for k in range(1, kmax + 1):
        vals = np.array([np.trace(np.linalg.matrix_power(L, k)) for L in Ls])
        a = float(np.max(np.abs(vals - vals[0])))
        rows.append((k, a, a / max(1.0, abs(vals[0]))))
    ev0 = np.linalg.eigvals(Ls[0])
    ed = max(_match_drift(ev0, np.linalg.eigvals(L)) for L in Ls)
    return ConservationReport(rows, float(ed), list(traj.times))


# ---------------------------------------------------------------------------
# Samplers


def _lattice_clear(x, tau, margin):
    """True if x stays ``margin`` away from every lattice point m + n tau (including 0 when asked)."""
    for m in range(-2, 3):
        for n in range(-2, 3):
            if abs(x - m - n * tau) < margin:
                return False
    return True


def sample_phase(N, rng, kind="elliptic", tau=None, separation=0.3, radius=None,
                 p_scale=0.5, shifts=(), max_tries=20000):
    """Random (q, p) with q_i in an annulus, pairwise separation >= ``separation``.

    For the elliptic class every q_i - q_j (+ each shift) stays at least
    ``separation`` away from the period lattice.  Momenta are real,
    uniform in [-p_scale, p_scale].
    """
    if radius is None:
        radius = (0.1, 0.35 if N <= 4 else 0.42) if kind == "elliptic" else (0.2, 0.3 * N)
    if kind == "elliptic" and tau is None:
        raise ValueError("elliptic sampling needs tau")
    tau = tau.tau if isinstance(tau, Elliptic) else tau
    for _ in range(max_tries):
        r = rng.uniform(radius[0], radius[1], N)
        a = rng.uniform(0, 2 * np.pi, N)
        q = r * np.exp(1j * a)
        if kind == "trig":
            q = q.real + 0.3j * q.imag
        ok = True
        for i in range(N):
            for j in range(N):
                if i == j:
                    continue
                x = q[i] - q[j]
                if abs(x) < separation:
                    ok = False
                for s in shifts:
                    y = x + s
                    if kind == "elliptic":
                        ok = ok and _lattice_clear(y, tau, separation / 2)
                    else:
                        ok = ok and abs(y) >= separation / 2
                if kind == "elliptic":
                    ok = ok and all(abs(x - m - n * tau) >= separation
                                    for m in (-1, 0, 1) for n in (-1, 0, 1) if (m, n) != (0, 0))
        if ok:
            p = rng.uniform(-p_scale, p_scale, N)
            return PhasePoint(q, p)
    raise RuntimeError("could not place particles with the requested separation")


def sample_spin(N, rng, scale=0.3):
    """Random complex spin matrix with entries of size ``scale``."""
    return scale * (rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N)))
