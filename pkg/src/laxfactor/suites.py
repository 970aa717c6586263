"""Verification suites run by ``laxfactor verify``.

Each suite expands into independent cases.  A case computes one or more
residuals; every residual becomes a report record with
``passed = residual < tolerance``.  Negative controls carry
``expected = "fail"``: the run is clean when every record's outcome matches
its expectation.
"""

import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import elliptic as ell
from .errors import ConfigError
from .linalg import singular_ratio, trace_free

__all__ = [
    "SUITES",
    "CLASSES",
    "REPORT_FIELDS",
    "REPORT_SCHEMA",
    "SuiteConfig",
    "Case",
    "Record",
    "parse_complex",
    "parse_int_range",
    "build_cases",
    "run_cases",
    "thread_count",
]

SUITES = (
    "special-functions",
    "factorization",
    "irf-vertex",
    "theorem1",
    "theorem2",
    "zero-curvature",
    "root-systems",
    "dynamics",
)
CLASSES = ("elliptic", "trig", "rational")
PRESETS = ("Bn", "Cn", "Dn")
REPORT_FIELDS = ("suite", "case_id", "residual", "tolerance", "passed", "expected",
                 "wall_time_ms", "provenance", "seed")
REPORT_SCHEMA = {
    "type": "object",
    "required": list(REPORT_FIELDS),
    "properties": {
        "suite": {"type": "string", "enum": list(SUITES)},
        "case_id": {"type": "string", "minLength": 1},
        "residual": {"type": ["number", "null"], "minimum": 0},
        "tolerance": {"type": "number", "minimum": 0},
        "passed": {"type": "boolean"},
        "expected": {"enum": ["pass", "fail"]},
        "wall_time_ms": {"type": "number", "minimum": 0},
        "provenance": {"type": "string"},
        "seed": {"type": "integer"},
        "error": {"type": "string"},
    },
    "additionalProperties": False,
}

DEFAULT_N = {
    "special-functions": (),
    "factorization": (2, 3, 4, 5),
    "irf-vertex": (2, 3),
    "theorem1": (2, 3, 4),
    "theorem2": (2, 3, 4),
    "zero-curvature": (2, 3),
    "root-systems": (2, 3, 4),
    "dynamics": (2, 3, 4),
}
SPECIAL_TAUS = (1j, 0.3 + 0.8j, 2j)
TAU = 0.3 + 0.9j


# ---------------------------------------------------------------------------
# Parsing helpers


def parse_complex(text):
    """Accept "0.3+0.8j", "0.3+0.8i", "i", "2i" or a JSON pair "[re, im]"."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return complex(float(text[0]), float(text[1]))
    s = str(text).strip().replace(" ", "")
    if s.startswith("["):
        try:
            re_, im_ = json.loads(s)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"cannot parse complex pair {text!r}") from exc
        return complex(float(re_), float(im_))
    s = s.replace("i", "j")
    if s in ("j", "+j"):
        return 1j
    if s == "-j":
        return -1j
    if s.endswith("j") and (s[:-1].endswith("+") or s[:-1].endswith("-")):
        s = s[:-1] + "1j"
    try:
        return complex(s)
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex number {text!r}") from exc


def parse_int_range(text):
    """"2..4" -> (2, 3, 4); "2,5" -> (2, 5)."""
    s = str(text).strip()
    try:
        if ".." in s:
            a, b = s.split("..")
            out = tuple(range(int(a), int(b) + 1))
        else:
            out = tuple(int(x) for x in s.split(",") if x)
    except ValueError as exc:
        raise ConfigError(f"cannot parse integer range {text!r}") from exc
    if not out or min(out) < 1:
        raise ConfigError(f"empty or invalid range {text!r}")
    return out


def thread_count(requested=None):
    """Worker count: ``requested`` or LAXFACTOR_THREADS, capped by the env var."""
    env = os.environ.get("LAXFACTOR_THREADS")
    cap = None
    if env:
        try:
            cap = max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"LAXFACTOR_THREADS must be an integer, got {env!r}") from exc
    n = requested or cap or min(4, os.cpu_count() or 1)
    return min(n, cap) if cap else n


# ---------------------------------------------------------------------------
# Configuration and records


@dataclass
class SuiteConfig:
    suites: list
    N_range: tuple = None
    classes: tuple = CLASSES
    seeds: tuple = (0,)
    tolerances: dict = field(default_factory=dict)
    tau: complex = None
    output_path: str = None
    format: str = "json"
    preset: str = None
    points: int = None
    threads: int = None

    def __post_init__(self):
        if not self.suites:
            raise ConfigError("no suites selected")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ConfigError(f"unknown suite(s) {bad}; choose from {list(SUITES)}")
        badc = [c for c in self.classes if c not in CLASSES]
        if badc or not self.classes:
            raise ConfigError(f"unknown class(es) {badc}; choose from {list(CLASSES)}")
        if self.format not in ("json", "text"):
            raise ConfigError("format must be json or text")
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; choose from {list(PRESETS)}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")

    def n_values(self, suite):
        base = DEFAULT_N[suite]
        if self.N_range is None:
            return base
        return tuple(n for n in self.N_range if n >= 2)

    def tolerance(self, suite, case_id, default):
        for key in (f"{suite}/{case_id}", suite):
            if key in self.tolerances:
                return float(self.tolerances[key])
        for key, val in self.tolerances.items():
            if "/" in key and key.split("/", 1)[0] == suite and case_id.startswith(key.split("/", 1)[1]):
                return float(val)
        return default


@dataclass
class Case:
    suite: str
    case_id: str
    provenance: str
    compute: object          # () -> float or list of (sub_id, residual, tolerance[, expected])
    tolerance: float = 0.0
    expected: str = "pass"
    seed: int = 0


@dataclass
class Record:
    suite: str
    case_id: str
    residual: float
    tolerance: float
    passed: bool
    expected: str
    wall_time_ms: float
    provenance: str
    seed: int
    error: str = None

    @property
    def ok(self):
        return self.passed == (self.expected == "pass")

    def as_dict(self):
        d = {k: getattr(self, k) for k in REPORT_FIELDS}
        if self.residual is not None and not np.isfinite(self.residual):
            d["residual"] = None
        if self.error is not None:
            d["error"] = self.error
        return d

    def as_text(self):
        flag = "ok " if self.ok else "BAD"
        exp = " (expected fail)" if self.expected == "fail" else ""
        r = "error" if self.residual is None else f"{self.residual:.3e}"
        return f"{flag} {self.suite:<18} {self.case_id:<48} {r:>10} < {self.tolerance:.1e}{exp}"


def _evaluate(case, config):
    t0 = time.perf_counter()
    try:
        out = case.compute()
        err = None
    except Exception as exc:  # recorded as a failed case, never aborts the run
        out = float("nan")
        err = f"{type(exc).__name__}: {exc}"
    ms = (time.perf_counter() - t0) * 1e3
    items = out if isinstance(out, list) else [("", out, case.tolerance, case.expected)]
    records = []
    for item in items:
        sub, res, tol = item[0], item[1], item[2]
        exp = item[3] if len(item) > 3 else case.expected
        cid = case.case_id + (f"/{sub}" if sub else "")
        tol = config.tolerance(case.suite, cid, tol)
        res = None if res is None or not np.isfinite(res) else float(res)
        passed = res is not None and res < tol
        records.append(Record(case.suite, cid, res, tol, passed, exp, round(ms / len(items), 3),
                              case.provenance, case.seed, err))
    return records


def run_cases(cases, config, emit=None, threads=None):
    """Evaluate cases on a bounded pool; ``emit`` receives records in case order."""
    lock = threading.Lock()
    out = []
    n = thread_count(threads or config.threads)
    with ThreadPoolExecutor(max_workers=n) as pool:
        for recs in pool.map(lambda c: _evaluate(c, config), cases):
            with lock:
                for r in recs:
                    out.append(r)
                    if emit is not None:
                        emit(r)
    return out


def build_cases(config):
    cases = []
    for suite in config.suites:
        for seed in config.seeds:
            tag = f"@s{seed}" if len(config.seeds) > 1 else ""
            for c in _BUILDERS[suite](config, seed):
                c.case_id += tag
                c.seed = seed
                cases.append(c)
    return cases


# ---------------------------------------------------------------------------
# Sampling helpers


def _cell_point(rng, tau, size=0.4):
    return rng.uniform(-size, size) + rng.uniform(-size, size) * tau


def _clear(cls, xs, margin=0.08):
    return all(cls.pole_distance(x) >= margin for x in xs)


def _points(config, default):
    return config.points or default


def _phase(rng, N, kind, tau=None, shifts=()):
    from .dynamics import sample_phase
    return sample_phase(N, rng, kind, tau, shifts=shifts)


def _make_class(kind, tau):
    return ell.make_class(kind, tau if kind == "elliptic" else None)


# ---------------------------------------------------------------------------
# Suites


def _special(config, seed):
    cases = []
    n = _points(config, 200)
    taus = (config.tau,) if config.tau is not None else SPECIAL_TAUS

    def sample(rng, cls, k, combos):
        tau = cls.tau if cls.kind == "elliptic" else 1j
        while True:
            if cls.kind == "elliptic":
                xs = [_cell_point(rng, tau) for _ in range(k)]
            else:
                xs = list(rng.uniform(-1, 1, k) + 0.5j * rng.uniform(-1, 1, k))
            if _clear(cls, xs + [f(*xs) for f in combos]):
                return xs

    def worst(fn, cls, k, combos=()):
        def run():
            rng = np.random.default_rng(seed)
            return max(fn(*sample(rng, cls, k, combos)) for _ in range(n))
        return run

    fay_c = (lambda h, e, z, w: h - e, lambda h, e, z, w: z + w)
    deg_c = (lambda e, z, w: z + w, lambda e, z, w: z + w + e)
    for tau in taus:
        cls = ell.Elliptic(tau)
        t = f"tau={tau.real:g}{tau.imag:+g}i"
        specs = [
            ("fay", "fay-trisecant", lambda h, e, z, w, cls=cls: ell.fay_residual(h, e, z, w, cls), 4, fay_c),
            ("fay-degenerate-1", "fay-trisecant",
             lambda e, z, w, cls=cls: ell.fay_degenerate_residuals(e, z, w, cls)[0], 3, deg_c),
            ("fay-degenerate-2", "fay-trisecant",
             lambda e, z, cls=cls: ell.fay_degenerate_residuals(e, z, 0.1, cls)[1], 2, ()),
            ("heat-theta", "heat-equation", lambda z, cls=cls: ell.heat_residual(z, cls.tau), 1, ()),
            ("heat-phi", "heat-equation", lambda z, u, cls=cls: ell.phi_heat_residual(z, u, cls), 2,
             (lambda z, u: z + u,)),
            ("heat-log-theta", "heat-equation", lambda z, cls=cls: ell.log_theta_heat_residual(z, cls), 1, ()),
            ("quasi-periodicity", "quasi-periodicity",
             lambda z, u, cls=cls: max(ell.quasi_periodicity_residuals(z, u, cls)), 2, (lambda z, u: z + u,)),
            ("e2-wp", "eisenstein-e2", lambda z, cls=cls: ell.e2_wp_residual(z, cls), 1, ()),
            ("squared-e1", "squared-e1", lambda x, y, cls=cls: ell.squared_e1_residual(x, y, cls), 2,
             (lambda x, y: x + y,)),
            ("phi-f", "kronecker-identities", lambda a, b, z, cls=cls: ell.phi_f_residual(a, b, z, cls), 3,
             (lambda a, b, z: a + b,)),
        ]
        for name, prov, fn, k, combos in specs:
            cases.append(Case("special-functions", f"{name}[{t}]", prov, worst(fn, cls, k, combos), 1e-10))
    for kind in ("trig", "rational"):
        if kind not in config.classes:
            continue
        cls = _make_class(kind, None)
        cases.append(Case("special-functions", f"fay[{kind}]", "fay-trisecant",
                          worst(lambda h, e, z, w, c=cls: ell.fay_residual(h, e, z, w, c), cls, 4, fay_c), 1e-10))
        cases.append(Case("special-functions", f"squared-e1[{kind}]", "squared-e1",
                          worst(lambda x, y, c=cls: ell.squared_e1_residual(x, y, c), cls, 2,
                                (lambda x, y: x + y,)), 1e-10))
    return cases


def _factorization(config, seed):
    from .factorization import (build_intertwiner, det_xi_closed_form, det_xi_stated,
                                factorized_lax_cm, factorized_lax_rs, laurent_data,
                                psi_from_residue, psi_from_velocities, spin_from_phase,
                                gauge_equivalence_residual, pole_cancellation_residual)
    from .models import ModelSpec, lax_matrix, nonrelativistic_lax_residual

    tau = config.tau if config.tau is not None else TAU
    hbar, c, nu = 0.17 + 0.02j, 1.3, 0.7
    npts = _points(config, 20)
    cases = []
    for N in config.n_values("factorization"):
        for kind in config.classes:
            cls = _make_class(kind, tau)
            for sp in ((True,) if kind == "elliptic" else (True, False)):
                for model in ("RS", "RSprime", "CM"):
                    variants = ["main"]
                    if not sp:
                        variants.append("alt")
                    if kind == "elliptic" and model == "CM":
                        variants.append("explicit")
                    for v in variants:
                        def run(N=N, cls=cls, sp=sp, model=model, v=v, kind=kind):
                            rng = np.random.default_rng(seed)
                            spec = ModelSpec(model, cls, sp, hbar=hbar, nu=nu, c=c, N=N)
                            worst = 0.0
                            for _ in range(npts):
                                ph = _phase(rng, N, kind, tau, shifts=(hbar, -hbar))
                                z = _cell_point(rng, tau, 0.3) if kind == "elliptic" else 0.23 - 0.11j
                                L = lax_matrix(spec, ph, z)
                                if model == "CM":
                                    F = factorized_lax_cm(cls, sp, ph.q, ph.p, z, nu, variant=v)
                                else:
                                    F = factorized_lax_rs(cls, sp, ph.q, ph.p, z, hbar, c,
                                                          prime=model == "RSprime", variant=v)
                                worst = max(worst, np.max(np.abs(F - L)) / (1 + np.max(np.abs(L))))
                            return worst
                        sm = "spectral" if sp else "plain"
                        cases.append(Case("factorization", f"{kind}/{sm}/{model}/{v}/N={N}",
                                          "factorized-lax", run, 1e-9))
        if "elliptic" in config.classes:
            def det_run(N=N, stated=False):
                rng = np.random.default_rng(seed)
                it = build_intertwiner(ell.Elliptic(tau), True, N)
                worst = 0.0
                for _ in range(npts):
                    ph = _phase(rng, N, "elliptic", tau)
                    z = _cell_point(rng, tau, 0.3)
                    d = np.linalg.det(it.xi(z, ph.q))
                    ref = det_xi_stated(z, ph.q, tau) if stated else det_xi_closed_form(z, ph.q, tau)
                    worst = max(worst, abs(d / ref - 1))
                return worst
            cases.append(Case("factorization", f"det-xi/N={N}", "det-xi", det_run, 1e-9))
            sign = (-1) ** (N * (N - 1) // 2)
            cases.append(Case("factorization", f"det-xi-stated/N={N}", "det-xi",
                              lambda N=N: det_run(N, True), 1e-9,
                              expected="pass" if sign == 1 else "fail"))

            def spin_run(N=N):
                rng = np.random.default_rng(seed)
                ph = _phase(rng, N, "elliptic", tau, shifts=(hbar, -hbar))
                cls = ell.Elliptic(tau)
                ld = laurent_data(build_intertwiner(cls, True, N), ph.q)
                S = spin_from_phase(ph.q, ph.p, hbar, c, cls, check=False, ld=ld)
                Snr = spin_from_phase(ph.q, ph.p, tau=cls, relativistic=False, nu=nu, check=False, ld=ld)
                psi = np.vstack([psi_from_residue(ld), psi_from_velocities(ph.q, ph.p, hbar, c, cls)])
                z = 0.21 + 0.13j
                return [("rank-one", singular_ratio(S), 1e-10),
                        ("rank-one-nonrel", singular_ratio(Snr), 1e-10),
                        ("psi-collinear", singular_ratio(psi), 1e-9),
                        ("gauge-equivalence", gauge_equivalence_residual(ph.q, ph.p, z, hbar, c, cls), 1e-9),
                        ("pole-cancellation", pole_cancellation_residual(ph.q, ph.p, hbar, c, cls), 1e-9)]
            cases.append(Case("factorization", f"spin/N={N}", "rank-one-spin", spin_run))

            def limit_run(N=N):
                rng = np.random.default_rng(seed)
                ph = _phase(rng, N, "elliptic", tau, shifts=(0.01, -0.01))
                cls = ell.Elliptic(tau)
                cs = (1e2, 1e3, 1e4)
                ld = laurent_data(build_intertwiner(cls, True, N), ph.q)
                Snr = spin_from_phase(ph.q, ph.p, tau=cls, relativistic=False, nu=nu, check=False, ld=ld)
                es = [np.max(np.abs(nu * spin_from_phase(ph.q, ph.p, nu / cc, cc, cls, check=False, ld=ld) - Snr))
                      for cc in cs]
                el = [nonrelativistic_lax_residual(cls, True, ph.q, ph.p, 0.21 + 0.13j, nu, cc) for cc in cs]
                os_ = -np.polyfit(np.log(cs), np.log(es), 1)[0]
                ol = -np.polyfit(np.log(cs), np.log(el), 1)[0]
                # spin: order deficit below one; lax: the c (kL - 1) - L^CM error is exactly O(1/c)
                return [("spin-order", max(0.0, 1 - os_), 1e-12), ("lax-order", abs(ol - 1), 0.05)]
            cases.append(Case("factorization", f"nonrelativistic-limit/N={N}", "nonrelativistic-limit",
                              limit_run))
    return cases


def _irf(config, seed):
    from .rmatrix import (IRF_VARIANTS, R_KINDS, RMatrixSpec, acf_residue_residual,
                          bb_residue_residual, irf_vertex_residual, yang_baxter_residual)

    tau = config.tau if config.tau is not None else TAU
    hbar = 0.17 + 0.03j
    cases = []
    for N in config.n_values("irf-vertex"):
        def pts(N=N):
            rng = np.random.default_rng(seed)
            q = _phase(rng, N, "elliptic", tau, shifts=(hbar, -hbar)).q
            zs = [_cell_point(rng, tau, 0.3) for _ in range(3)]
            return q, zs
        for kind in R_KINDS:
            def ybe(N=N, kind=kind):
                q, (z1, z2, z3) = pts(N)
                sp = RMatrixSpec(kind, N, hbar, ell.Elliptic(tau),
                                 None if kind == "BaxterBelavin" else tuple(q))
                return yang_baxter_residual(sp, z1, z2, z3)
            cases.append(Case("irf-vertex", f"yang-baxter/{kind}/N={N}", "yang-baxter", ybe, 1e-9))
        for v in IRF_VARIANTS:
            def irf(N=N, v=v):
                q, (z1, z2, _) = pts(N)
                return irf_vertex_residual(v, N, hbar, tau, q, z1, z2)
            cases.append(Case("irf-vertex", f"irf/{v}/N={N}", "irf-vertex", irf, 1e-8))

        def acf_res(N=N):
            q, (z1, _, _) = pts(N)
            return acf_residue_residual(z1, hbar, q, tau)
        cases.append(Case("irf-vertex", f"acf-residue/N={N}", "r-matrix-residue", acf_res, 1e-8))
        cases.append(Case("irf-vertex", f"bb-residue/N={N}", "r-matrix-residue",
                          lambda N=N: bb_residue_residual(hbar, tau, N), 1e-10))
    return cases


def _theorem1(config, seed):
    from .models import ModelSpec, PhasePoint, m_rs, velocity_map
    from .rmatrix import (irf_hbar_inverse_residual, m_rs_example, m_rs_theorem1,
                          sklyanin_factorized_residual, theorem1_g_f)

    tau = config.tau if config.tau is not None else TAU
    hbar, c = 0.17 + 0.03j, 1.3
    cases = []
    for N in config.n_values("theorem1"):
        if "elliptic" in config.classes and N <= 3:
            def ell_run(N=N):
                rng = np.random.default_rng(seed)
                ph = _phase(rng, N, "elliptic", tau, shifts=(hbar, -hbar))
                cls = ell.Elliptic(tau)
                z = _cell_point(rng, tau, 0.3)
                spec = ModelSpec("RS", cls, True, hbar=hbar, c=c, N=N)
                M = trace_free(m_rs(spec, ph, z))
                G, _ = theorem1_g_f(ph.q, ph.p, hbar, c, cls)
                qd = velocity_map(spec, ph)
                return [("m-matrix", np.max(np.abs(m_rs_theorem1(ph.q, ph.p, z, hbar, c, cls) - M)), 1e-8),
                        ("g-identity", np.max(np.abs(G - qd.sum() * np.eye(N))), 1e-10),
                        ("irf-hbar-inverse", irf_hbar_inverse_residual(ph.q, z, cls), 1e-10),
                        ("sklyanin-factorized", sklyanin_factorized_residual(ph.q, ph.p, z, hbar, c, cls), 1e-9)]
            cases.append(Case("theorem1", f"elliptic/N={N}", "theorem-1", ell_run))
        for kind in ("trig", "rational"):
            if kind not in config.classes:
                continue
            for sp in (True, False):
                def ex_run(N=N, kind=kind, sp=sp):
                    rng = np.random.default_rng(seed)
                    cls = _make_class(kind, None)
                    ph = _phase(rng, N, kind, shifts=(hbar, -hbar))
                    z = 0.23 - 0.11j
                    spec = ModelSpec("RS", cls, sp, hbar=hbar, c=c, N=N)
                    M = trace_free(m_rs(spec, ph, z if sp else None))
                    return float(np.max(np.abs(m_rs_example(cls, sp, ph.q, ph.p, z, hbar, c) - M)))
                sm = "spectral" if sp else "plain"
                cases.append(Case("theorem1", f"example/{kind}/{sm}/N={N}", "theorem-1-examples",
                                  ex_run, 1e-8))
    return cases


def _theorem2(config, seed):
    from .models import ModelSpec, m_cm
    from . import schlesinger as sch

    tau = config.tau if config.tau is not None else TAU
    nu = 0.7
    cases = []
    for N in config.n_values("theorem2"):
        for kind in config.classes:
            for sp in ((True,) if kind == "elliptic" else (True, False)):
                def run(N=N, kind=kind, sp=sp):
                    rng = np.random.default_rng(seed)
                    cls = _make_class(kind, tau)
                    ph = _phase(rng, N, kind, tau)
                    z = _cell_point(rng, tau, 0.3) if kind == "elliptic" else 0.23 - 0.11j
                    spec = ModelSpec("CM", cls, sp, nu=nu, N=N)
                    M = trace_free(m_cm(spec, ph, z if sp else None))
                    return float(np.max(np.abs(sch.m_cm_theorem2(ph.q, ph.p, z, nu, cls, sp) - M)))
                sm = "spectral" if sp else "plain"
                cases.append(Case("theorem2", f"m-matrix/{kind}/{sm}/N={N}", "theorem-2", run, 1e-8))
        if "elliptic" in config.classes:
            def ids(N=N):
                rng = np.random.default_rng(seed)
                ph = _phase(rng, N, "elliptic", tau)
                z = _cell_point(rng, tau, 0.3)
                return [("l-diagonal", sch.l_diagonal_residual(ph.q, z, tau), 1e-9),
                        ("g2-recursion", sch.g2_recursion_residual(ph.q, z, tau), 1e-9),
                        ("delta-closed-form", sch.delta_identity_residual(ph.q, tau), 1e-9),
                        ("offdiag-closed-form", sch.offdiag_closed_form_residual(ph.q, z, tau), 1e-9),
                        ("diag-closed-form", sch.diagonal_closed_form_residual(ph.q, ph.p, z, tau), 1e-9)]
            cases.append(Case("theorem2", f"proof-identities/N={N}", "theorem-2-proof", ids))
    return cases


def _zero_curvature(config, seed):
    from . import schlesinger as sch

    tau = config.tau if config.tau is not None else TAU
    nu = 0.7
    cases = []
    for N in config.n_values("zero-curvature"):
        for kind in ("elliptic", "rational"):
            if kind not in config.classes:
                continue

            def shift_run(N=N, kind=kind):
                rng = np.random.default_rng(seed)
                cls = _make_class(kind, tau)
                ph = _phase(rng, N, kind, tau)
                z = _cell_point(rng, tau, 0.3) if kind == "elliptic" else 0.23 - 0.11j
                return max(sch.schlesinger_shift_residual(ph.q, ph.p, z, nu0, cls)
                           for nu0 in (0.0, 1.0 / N, 0.37))
            cases.append(Case("zero-curvature", f"schlesinger-shift/{kind}/N={N}", "schlesinger",
                              shift_run, 1e-10))
        if "elliptic" not in config.classes:
            continue

        def zc(N=N, shift=True):
            rng = np.random.default_rng(seed)
            ph = _phase(rng, N, "elliptic", tau)
            z = _cell_point(rng, tau, 0.3)
            R = sch.zero_curvature_residual(ph.q, ph.p, z, nu, tau, shift=shift, return_matrix=True)
            return R, z
        cases.append(Case("zero-curvature", f"painleve/shifted/N={N}", "zero-curvature",
                          lambda N=N: float(np.max(np.abs(zc(N, True)[0]))), 1e-6))
        cases.append(Case("zero-curvature", f"painleve/unshifted/N={N}", "zero-curvature",
                          lambda N=N: float(np.max(np.abs(zc(N, False)[0]))), 1e-6, expected="fail"))

        def defect(N=N):
            R, z = zc(N, False)
            pred = nu * 2j * np.pi * ell.Elliptic(tau).dtau_E1(z)
            return float(np.max(np.abs(R - pred * np.eye(N))))
        cases.append(Case("zero-curvature", f"painleve/predicted-defect/N={N}", "zero-curvature",
                          defect, 1e-6))
    cases.append(Case("zero-curvature", "scalar-toy", "schlesinger",
                      lambda: sch.scalar_toy_residual(0.21 + 0.13j, 0.37, tau), 1e-10))
    return cases


def _root_systems(config, seed):
    from .dynamics import conservation_report, integrate
    from .models import PhasePoint
    from . import rootsys as rs

    presets = (config.preset,) if config.preset else PRESETS
    cases = []

    def point(N):
        rng = np.random.default_rng(seed)
        q = np.sort(rng.uniform(0.5, 0.8, N)).cumsum() + 0.05j * rng.normal(size=N)
        p = rng.uniform(-0.3, 0.3, N)
        return PhasePoint(q, p)

    def make(preset, N, m2=0.6, m4=0.4):
        return {"Bn": lambda: rs.BCNSpec.B(N, m2), "Cn": lambda: rs.BCNSpec.C(N, m2, m4),
                "Dn": lambda: rs.BCNSpec.D(N, m2)}[preset]()

    for N in config.n_values("root-systems"):
        for preset in presets:
            def fac(N=N, preset=preset):
                sp = make(preset, N)
                ph = point(N)
                F = rs.factorized_lax_b(sp, ph) if preset == "Bn" else rs.factorized_lax_dc(sp, ph)
                return float(np.max(np.abs(F - rs.lax_bcn(sp, ph))))
            cases.append(Case("root-systems", f"factorized/{preset}/N={N}", "bcn-factorization", fac, 1e-10))

        def block_identities(N=N):
            q = point(N).q
            out = [("j-block", rs.j_block_residual(q), 1e-10),
                   ("even-gamma", rs.even_gamma_residual(q), 1e-10)]
            if config.preset in (None, "Bn"):
                out += [("corners", rs.b_corner_residual(q), 1e-10),
                        ("b-sign", rs.b_sign_residual(q), 1e-10)]
            return out
        cases.append(Case("root-systems", f"block-identities/N={N}", "bcn-block-identities", block_identities))

        if N <= 3:
            for preset in presets:
                def iso(N=N, preset=preset):
                    sp = make(preset, N, 0.6j, 0.4j)
                    tr = integrate(sp, point(N), 1.0, 1e-12)
                    return conservation_report(tr).eigen_drift
                cases.append(Case("root-systems", f"isospectral/{preset}/N={N}", "bcn-isospectral",
                                  iso, 1e-7))

            def violated(N=N):
                sp = rs.BCNSpec(N, 0.3j, 0.6j, 0.4j)
                tr = integrate(sp, point(N), 1.0, 1e-12)
                return conservation_report(tr).eigen_drift
            # negative control: drift must exceed 1e-4
            cases.append(Case("root-systems", f"isospectral/constraint-violated/N={N}", "bcn-isospectral",
                              violated, 1e-4, expected="fail"))
    return cases


def _dynamics(config, seed):
    from . import dynamics as dyn
    from .models import ModelSpec, hamiltonian

    tau = config.tau if config.tau is not None else 1j
    hbar, nu = 0.3, 0.5
    z = 0.21 + 0.13j
    cases = []

    def profile_records(pr, expected="pass"):
        return [("order", abs(pr.estimated_order - 2.0), 0.15, expected),
                ("min-residual", pr.min_residual, 1e-6, expected)]

    for N in config.n_values("dynamics"):
        for kind in config.classes:
            for sp in ((True,) if kind == "elliptic" else (True, False)):
                for model in ("RS", "RSprime", "CM"):
                    def run(N=N, kind=kind, sp=sp, model=model):
                        rng = np.random.default_rng(seed)
                        cls = _make_class(kind, tau)
                        spec = ModelSpec(model, cls, sp, hbar=hbar, nu=nu, c=1.0, N=N)
                        sh = () if model == "CM" else (hbar, -hbar)
                        ph = dyn.sample_phase(N, rng, kind, tau, shifts=sh)
                        return profile_records(dyn.lax_equation_profile(spec, ph, z if sp else None))
                    sm = "spectral" if sp else "plain"
                    cases.append(Case("dynamics", f"lax-profile/{kind}/{sm}/{model}/N={N}",
                                      "lax-equation", run))
        if N <= 3 and "elliptic" in config.classes:
            for rel in (False, True):
                def top(N=N, rel=rel):
                    rng = np.random.default_rng(seed)
                    S = dyn.sample_spin(N, rng)
                    spec = dyn.TopSpec(N, tau, rel, hbar if rel else None)
                    return profile_records(dyn.lax_equation_profile(spec, S, z))
                name = "relativistic-top" if rel else "elliptic-top"
                cases.append(Case("dynamics", f"lax-profile/{name}/N={N}", "lax-equation", top))

    def control():
        rng = np.random.default_rng(seed)
        spec = ModelSpec("CM", ell.RATIONAL, True, nu=nu, N=3)
        ph = dyn.sample_phase(3, rng, "rational")
        pr = dyn.lax_equation_profile(spec, ph, z, corrupt=True)
        return [("order-below-half", abs(pr.estimated_order), 0.5),
                ("min-residual", pr.min_residual, 1e-6, "fail")]
    cases.append(Case("dynamics", "lax-profile/corrupted-m", "lax-equation", control))

    for kind in ("trig", "rational"):
        if kind not in config.classes:
            continue
        for model in ("RS", "CM"):
            def cons(kind=kind, model=model):
                rng = np.random.default_rng(seed)
                cls = _make_class(kind, None)
                N = 3
                spec = ModelSpec(model, cls, True, hbar=hbar, nu=nu, c=1.0, N=N)
                ph = dyn.sample_phase(N, rng, kind, shifts=() if model == "CM" else (hbar, -hbar))
                tr = dyn.integrate(spec, ph, 1.0, 1e-11)
                rep = dyn.conservation_report(tr, z)
                H = np.array([hamiltonian(spec, s) for s in tr.states])
                return [("trace-powers", rep.max_drift(N, relative=True), 1e-7),
                        ("energy", float(np.max(np.abs(H - H[0]))), 1e-9)]
            cases.append(Case("dynamics", f"conservation/{kind}/{model}/N=3", "conservation", cons))

    def free():
        spec = ModelSpec("CM", ell.RATIONAL, False, nu=0.0, N=3)
        from .models import PhasePoint
        ph = PhasePoint([0.0, 1.0, 2.0], [0.1, 0.2, -0.3])
        tr = dyn.integrate(spec, ph, 1.0, 1e-10)
        return float(np.max(np.abs(tr.final.q - (ph.q + ph.p))))
    cases.append(Case("dynamics", "free-flow", "integrator", free, 1e-10))
    return cases


_BUILDERS = {
    "special-functions": _special,
    "factorization": _factorization,
    "irf-vertex": _irf,
    "theorem1": _theorem1,
    "theorem2": _theorem2,
    "zero-curvature": _zero_curvature,
    "root-systems": _root_systems,
    "dynamics": _dynamics,
}
