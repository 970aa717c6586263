"""Command-line interface: ``laxfactor verify | evolve | eval``.

Exit codes: 0 all pass, 1 verification failures, 2 configuration errors,
3 runtime aborts (collision, step underflow).
"""

import argparse
import json
import sys

import numpy as np

from .errors import CollisionDetected, ConfigError, LaxFactorError, StepUnderflow
from .suites import (CLASSES, SUITES, SuiteConfig, build_cases, parse_complex, parse_int_range,
                     run_cases)

__all__ = ["main", "build_parser", "format_complex", "cmd_verify", "cmd_evolve", "cmd_eval"]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


def format_complex(x):
    """Full-precision "re+imj" string."""
    x = complex(x)
    sign = "-" if np.signbit(x.imag) else "+"
    return f"{x.real!r}{sign}{abs(x.imag)!r}j"


def _encode(v):
    a = np.asarray(v)
    if a.ndim == 0:
        return format_complex(a[()])
    return [_encode(x) for x in a]


def _complex_list(text):
    if text is None:
        return None
    s = str(text).strip()
    if s.startswith("["):
        try:
            vals = json.loads(s)
        except ValueError as exc:
            raise ConfigError(f"cannot parse list {text!r}") from exc
        return np.array([parse_complex(v) for v in vals])
    return np.array([parse_complex(v) for v in s.split(",") if v])


def _class(name, tau):
    from .elliptic import make_class
    if name not in CLASSES:
        raise ConfigError(f"unknown class {name!r}; choose from {list(CLASSES)}")
    if name == "elliptic" and tau is None:
        raise ConfigError("the elliptic class needs --tau")
    return make_class(name, tau)


# ---------------------------------------------------------------------------
# verify


def _tolerance_map(items):
    out = {}
    for it in items or []:
        if "=" not in it:
            raise ConfigError(f"tolerance override must be key=value, got {it!r}")
        k, v = it.split("=", 1)
        try:
            out[k] = float(v)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value in {it!r}") from exc
    return out


def config_from_args(args):
    suites = [s for s in (args.suites or "").split(",") if s]
    if suites == ["all"]:
        suites = list(SUITES)
    classes = tuple(c for c in args.classes.split(",") if c) if args.classes else CLASSES
    seeds = tuple(int(s) for s in args.seed.split(",")) if args.seed else (0,)
    return SuiteConfig(
        suites=suites,
        N_range=parse_int_range(args.N) if args.N else None,
        classes=classes,
        seeds=seeds,
        tolerances=_tolerance_map(args.tol),
        tau=parse_complex(args.tau) if args.tau else None,
        output_path=args.output,
        format=args.format,
        preset=args.preset,
        points=args.points,
        threads=args.threads,
    )


def cmd_verify(config, stream=None):
    """Run the suites; returns (exit code, records)."""
    out = stream or sys.stdout

    def emit(rec):
        line = json.dumps(rec.as_dict()) if config.format == "json" else rec.as_text()
        (fh or out).write(line + "\n")
        (fh or out).flush()

    cases = build_cases(config)
    if not cases:
        raise ConfigError("the selection produced no verification cases")
    fh = open(config.output_path, "w") if config.output_path else None
    try:
        records = run_cases(cases, config, emit)
    finally:
        if fh:
            fh.close()
    bad = [r for r in records if not r.ok]
    print(f"{len(records)} checks, {len(bad)} unexpected outcome(s)", file=sys.stderr)
    return (EXIT_FAIL if bad else EXIT_OK), records


# ---------------------------------------------------------------------------
# evolve


def _read_initial(path):
    from .models import PhasePoint
    try:
        with open(path) as fh:
            data = json.load(fh)
        q = np.array([parse_complex(v) for v in data["q"]])
        p = np.array([parse_complex(v) for v in data["p"]])
        return PhasePoint(q, p)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot read initial condition {path!r}: {exc}") from exc


def _evolve_spec(args, N):
    from .models import ModelSpec
    from .rootsys import BCNSpec

    model = args.model.lower()
    if model == "bcn":
        return BCNSpec(N, parse_complex(args.m1), parse_complex(args.m2), parse_complex(args.m4))
    names = {"rs": "RS", "rsprime": "RSprime", "cm": "CM"}
    if model not in names:
        raise ConfigError(f"unknown model {args.model!r}")
    tau = parse_complex(args.tau) if args.tau else None
    cls = _class(args.cls, tau)
    try:
        return ModelSpec(names[model], cls, args.cls == "elliptic" or args.z is not None,
                         hbar=parse_complex(args.hbar) if args.hbar else None,
                         nu=parse_complex(args.nu) if args.nu else None,
                         c=parse_complex(args.c), N=N)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_evolve(args, stream=None):
    from .dynamics import conservation_report, integrate

    out = stream or sys.stdout
    ph = _read_initial(args.initial)
    spec = _evolve_spec(args, ph.N)
    z = parse_complex(args.z) if args.z else None
    try:
        traj = integrate(spec, ph, args.t_end, args.tol)
    except (CollisionDetected, StepUnderflow) as exc:
        rec = {"error": type(exc).__name__, "message": str(exc),
               "time": getattr(exc, "time", None), "pair": getattr(exc, "pair", None)}
        out.write(json.dumps(rec) + "\n")
        return EXIT_RUNTIME
    lines = [json.dumps({"t": t, "q": _encode(s.q), "p": _encode(s.p)})
             for t, s in zip(traj.times, traj.states)]
    if args.output:
        with open(args.output, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    rep = conservation_report(traj, z)
    table = {"conservation": [{"k": k, "drift": a, "relative": r} for k, a, r in rep.rows],
             "eigenvalue_drift": rep.eigen_drift, "steps": len(traj)}
    (sys.stderr if not args.output else out).write(json.dumps(table) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval


def cmd_eval(args, stream=None):
    from . import elliptic as ell
    from .models import ModelSpec, PhasePoint, lax_matrix, m_matrix

    out = stream or sys.stdout
    obj = args.object
    tau = parse_complex(args.tau) if args.tau else None
    z = parse_complex(args.z) if args.z is not None else None
    if obj == "theta":
        if tau is None or z is None:
            raise ConfigError("theta needs --z and --tau")
        val = ell.theta_char((float(args.a), float(args.b)), z, tau, args.deriv)
    elif obj in ("phi", "E1", "E2", "wp", "f"):
        cls = _class(args.cls or "elliptic", tau)
        if z is None:
            raise ConfigError(f"{obj} needs --z")
        if obj in ("phi", "f"):
            if args.eta is None:
                raise ConfigError(f"{obj} needs --eta")
            val = getattr(cls, obj)(z, parse_complex(args.eta))
        else:
            val = getattr(cls, obj)(z)
    elif obj in ("lax", "m"):
        names = {"rs": "RS", "rsprime": "RSprime", "cm": "CM"}
        if args.model is None or args.model.lower() not in names:
            raise ConfigError("lax/m need --model rs|rsprime|cm")
        q, p = _complex_list(args.q), _complex_list(args.p)
        if q is None or p is None:
            raise ConfigError("lax/m need --q and --p")
        cls = _class(args.cls or "elliptic", tau)
        spectral = args.cls == "elliptic" or z is not None
        try:
            spec = ModelSpec(names[args.model.lower()], cls, spectral,
                             hbar=parse_complex(args.hbar) if args.hbar else None,
                             nu=parse_complex(args.nu) if args.nu else None,
                             c=parse_complex(args.c), N=len(q))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        fn = lax_matrix if obj == "lax" else m_matrix
        val = fn(spec, PhasePoint(q, p), z)
    elif obj == "r-matrix":
        from .rmatrix import RMatrixSpec, r_matrix
        if tau is None or z is None or args.hbar is None:
            raise ConfigError("r-matrix needs --z, --hbar and --tau")
        q = _complex_list(args.q)
        try:
            spec = RMatrixSpec(args.kind, args.N, parse_complex(args.hbar), ell.Elliptic(tau),
                               None if q is None else tuple(q))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        val = r_matrix(spec, z, parse_complex(args.z2) if args.z2 else 0.0)
    else:
        raise ConfigError(f"unknown object {obj!r}")
    if args.entry:
        idx = tuple(int(i) for i in args.entry.split(","))
        val = np.asarray(val)[idx]
    out.write(json.dumps({"object": obj, "value": _encode(val)}) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="laxfactor", description="Lax pair factorization checks")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suites", default="all", help=f"comma list from {','.join(SUITES)} or 'all'")
    v.add_argument("--N", help="range such as 2..4 or 2,3")
    v.add_argument("--classes", help="comma list of elliptic,trig,rational")
    v.add_argument("--seed", help="seed or comma list of seeds (default 0)")
    v.add_argument("--tau", help="modular parameter, e.g. i or 0.3+0.8i")
    v.add_argument("--tol", action="append", help="override, e.g. factorization=1e-8")
    v.add_argument("--output", help="write records here instead of stdout")
    v.add_argument("--format", default="json", choices=("json", "text"))
    v.add_argument("--preset", help="root-system preset Bn, Cn or Dn")
    v.add_argument("--points", type=int, help="random points per case")
    v.add_argument("--threads", type=int, help="worker count (capped by LAXFACTOR_THREADS)")

    e = sub.add_parser("evolve", help="integrate a trajectory")
    e.add_argument("--model", required=True, help="rs, rsprime, cm or bcn")
    e.add_argument("--class", dest="cls", default="rational")
    e.add_argument("--initial", required=True, help='JSON file {"q": [...], "p": [...]}')
    e.add_argument("--t-end", dest="t_end", type=float, default=1.0)
    e.add_argument("--tol", type=float, default=1e-10)
    e.add_argument("--hbar")
    e.add_argument("--nu")
    e.add_argument("--c", default="1")
    e.add_argument("--tau")
    e.add_argument("--z", help="spectral parameter (enables the spectral form)")
    e.add_argument("--m1", default="0")
    e.add_argument("--m2", default="1")
    e.add_argument("--m4", default="0")
    e.add_argument("--output", help="trajectory file (JSON lines t, q, p)")

    x = sub.add_parser("eval", help="evaluate one object")
    x.add_argument("object", help="theta, phi, f, E1, E2, wp, lax, m or r-matrix")
    x.add_argument("--a", default="0.5")
    x.add_argument("--b", default="0.5")
    x.add_argument("--deriv", type=int, default=0)
    x.add_argument("--z")
    x.add_argument("--z2")
    x.add_argument("--tau")
    x.add_argument("--class", dest="cls")
    x.add_argument("--eta")
    x.add_argument("--model")
    x.add_argument("--N", type=int, default=2)
    x.add_argument("--q")
    x.add_argument("--p")
    x.add_argument("--nu")
    x.add_argument("--hbar")
    x.add_argument("--c", default="1")
    x.add_argument("--kind", default="BaxterBelavin")
    x.add_argument("--entry", help="row,col of a single entry")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            code, _ = cmd_verify(config_from_args(args))
            return code
        if args.command == "evolve":
            return cmd_evolve(args)
        return cmd_eval(args)
    except ConfigError as exc:
        print(json.dumps({"error": "ConfigError", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    except LaxFactorError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(json.dumps({"error": "ValueError", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
