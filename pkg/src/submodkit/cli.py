"""Command-line front end.

Every command prints one JSON report on stdout.  Exit status is 0 on
success, 2 when the computation succeeded but the answer is negative (not a
member, certificate fails, property fails), and 1 on error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np
import yaml

from . import __version__, bounds, optimize, polyhedra
from .core import (
    PROPERTIES,
    TOL,
    SubmodError,
    elements,
    exhaustive_cap,
    validate,
)
from .instance import FORMAT_VERSION, FlagValidationError, InstanceFile, parse_instance
from .sweep import run_sweep

TOOL = "submodkit"
COMMANDS = (
    "eval",
    "gain",
    "vertex",
    "subdiff-vertex",
    "member",
    "supergradient",
    "bound-eval",
    "minimize",
    "maximize",
    "third-max",
    "certify",
    "validate",
)
POLY_KINDS = [k.value for k in polyhedra.Kind]
EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


class UsageError(SubmodError):
    code = "usage"


def resolve_set(ref: str | None, inst: InstanceFile, default: int | None = None) -> int:
    """A named set, ``empty``, ``all``, or a comma-separated index list."""
    if ref is None:
        if default is None:
            raise UsageError("a --set argument is required")
        return default
    if ref in inst.sets:
        idx = inst.sets[ref]
    elif ref == "empty":
        idx = ()
    elif ref == "all":
        idx = range(inst.n)
    else:
        try:
            idx = [int(s) for s in ref.split(",") if s.strip()]
        except ValueError:
            raise UsageError(f"unknown set {ref!r}: not a named set, 'empty', 'all' or an index list") from None
    mask = 0
    for j in idx:
        if not 0 <= j < inst.n:
            raise UsageError(f"set {ref!r} has element {j} outside 0..{inst.n - 1}")
        mask |= 1 << j
    return mask


def resolve_point(ref: str | None, inst: InstanceFile) -> np.ndarray:
    if ref is None:
        raise UsageError("a --point argument is required")
    if ref in inst.points:
        return np.array(inst.points[ref])
    try:
        x = np.array([float(s) for s in ref.split(",")])
    except ValueError:
        raise UsageError(f"unknown point {ref!r}: not a named point or a comma-separated vector") from None
    if len(x) != inst.n:
        raise UsageError(f"point {ref!r} has {len(x)} coordinates, expected {inst.n}")
    return x


def resolve_perm(ref: str | None, n: int) -> list[int]:
    if ref is None:
        raise UsageError("a --perm argument is required")
    try:
        return [int(s) for s in ref.split(",")]
    except ValueError:
        raise UsageError(f"--perm must be a comma-separated index list, got {ref!r}") from None


def _floats(v) -> list[float]:
    return [float(a) for a in v]


def _descriptor(args, inst) -> polyhedra.Polyhedron:
    kind = polyhedra.Kind(args.poly)
    X = resolve_set(args.set, inst, default=0 if kind in (polyhedra.Kind.LOWER, polyhedra.Kind.BASE, polyhedra.Kind.UPPER) else None)
    return polyhedra.Polyhedron(kind, X, args.k, args.l, args.which)


def dispatch(command: str, inst: InstanceFile, args) -> tuple[dict, bool]:
    """Run one command; return the result payload and whether it is negative."""
    f = inst.function
    cap = args.cap
    if command == "eval":
        S = resolve_set(args.set, inst)
        return {"set": elements(S), "value": f(S)}, False
    if command == "gain":
        S = resolve_set(args.set, inst)
        if args.element is None:
            raise UsageError("gain needs --element")
        return {"set": elements(S), "element": args.element, "gain": f.gain(args.element, S)}, False
    if command == "vertex":
        order = resolve_perm(args.perm, inst.n)
        return {"perm": order, "point": _floats(polyhedra.greedy_vertex(f, order))}, False
    if command == "subdiff-vertex":
        X = resolve_set(args.set, inst)
        order = resolve_perm(args.perm, inst.n)
        return {"set": elements(X), "perm": order, "point": _floats(polyhedra.subdiff_vertex(f, X, order))}, False
    if command == "member":
        if args.poly is None:
            raise UsageError("member needs --poly")
        poly = _descriptor(args, inst)
        x = resolve_point(args.point, inst)
        v = polyhedra.membership(f, poly, x, cap=cap)
        desc = {"kind": poly.kind.value, "set": elements(poly.X)}
        if poly.kind is polyhedra.Kind.SUPER_OUTER:
            desc.update(k=poly.k, l=poly.l)
        if poly.kind is polyhedra.Kind.INNER_BOX:
            desc["which"] = poly.which
        return {"polyhedron": desc, "point": _floats(x), **v.to_dict()}, not v.member
    if command == "supergradient":
        X = resolve_set(args.set, inst)
        kind = args.kind or "grow"
        return {"set": elements(X), "kind": kind, "point": _floats(bounds.supergradient(f, X, kind))}, False
    if command == "bound-eval":
        X = resolve_set(args.set, inst)
        Y = resolve_set(args.at, inst, default=X)
        if args.bound == "upper":
            b = bounds.modular_upper_bound(f, X, args.kind or "grow")
            info = b.to_dict()
        elif args.bound == "lower":
            b = bounds.modular_lower_bound(f, X, resolve_perm(args.perm, inst.n))
            info = b.to_dict()
        else:
            b = bounds.nemhauser_bound(f, X, args.kind or "one")
            info = {"anchor": elements(X), "which": b.which, "direction": "upper"}
        return {"bound": args.bound, **info, "at": elements(Y), "value": b(Y), "f_value": f(Y)}, False
    if command in ("minimize", "maximize"):
        direction = "min" if command == "minimize" else "max"
        if args.method == "brute":
            res = optimize.brute_force_optimize(f, direction, cap=cap)
        else:
            res = optimize.local_search(f, direction, resolve_set(args.start, inst, default=0))
        return {"method": args.method, "direction": direction, **res.to_dict()}, False
    if command == "third-max":
        res = optimize.one_third_max(f, resolve_set(args.start, inst, default=0))
        out = {"result": res.to_dict()}
        if inst.n <= (exhaustive_cap() if cap is None else cap):
            opt = optimize.brute_force_optimize(f, "max", cap=cap)
            out["opt"] = opt.value
            out["ratio"] = 1.0 if opt.value <= TOL else res.value / opt.value
        return out, False
    if command == "certify":
        if args.kind is None:
            raise UsageError("certify needs --kind")
        A = resolve_set(args.set, inst)
        c = optimize.certificate(f, A, args.kind, cap=cap)
        return {"set": elements(A), **c.to_dict()}, not c.holds
    if command == "validate":
        if args.property:
            props = [args.property]
        else:
            fl = f.flags
            props = [p for p, on in (("normalization", fl.normalized), ("submodularity", fl.submodular), ("monotonicity", fl.monotone)) if on]
        reports = [validate(f, p, cap=cap) for p in props]
        return {"reports": [r.to_dict() for r in reports]}, not all(r.holds for r in reports)
    raise UsageError(f"unknown command {command!r}")


def _echo(args) -> dict:
    keys = ("set", "point", "perm", "poly", "k", "l", "which", "kind", "element", "bound", "at", "method", "start", "property")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def run(command: str, instance_path: str, args) -> tuple[dict, int]:
    """Build the report for one invocation and its exit code."""
    report = {
        "format_version": FORMAT_VERSION,
        "tool": TOOL,
        "version": __version__,
        "command": command,
        "args": _echo(args),
    }
    t0 = time.perf_counter()
    try:
        inst = parse_instance(instance_path, trust_flags=args.trust_flags, cap=args.cap)
        report["instance_digest"] = inst.digest()
        payload, negative = dispatch(command, inst, args)
    except SubmodError as e:
        report["error"] = {"code": e.code, "message": str(e)}
        if isinstance(e, FlagValidationError):
            report["error"]["reports"] = [r.to_dict() for r in e.reports]
        report["wall_time"] = time.perf_counter() - t0
        return report, EXIT_ERROR
    except (OSError, ValueError) as e:
        report["error"] = {"code": "io" if isinstance(e, OSError) else "usage", "message": str(e)}
        report["wall_time"] = time.perf_counter() - t0
        return report, EXIT_ERROR
    report["result"] = payload
    report["status"] = "negative" if negative else "ok"
    report["wall_time"] = time.perf_counter() - t0
    return report, EXIT_NEGATIVE if negative else EXIT_OK


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)


def _command_parser(sub, name: str, help_text: str):
    p = sub.add_parser(name, help=help_text)
    p.add_argument("instance", help="instance file (YAML)")
    p.add_argument("--trust-flags", action="store_true", help="skip re-validating declared flags")
    p.add_argument("--cap", type=int, default=None, help="exhaustive enumeration cap (elements)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description="Polyhedral tools for submodular set functions.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = _command_parser(sub, "eval", "evaluate f on a set")
    p.add_argument("--set")
    p = _command_parser(sub, "gain", "marginal gain f(j | S)")
    p.add_argument("--set")
    p.add_argument("--element", type=int)
    p = _command_parser(sub, "vertex", "greedy extreme point of the base polytope")
    p.add_argument("--perm")
    p = _command_parser(sub, "subdiff-vertex", "extreme subgradient at a set")
    p.add_argument("--set")
    p.add_argument("--perm")
    p = _command_parser(sub, "member", "polyhedron membership")
    p.add_argument("--poly", choices=POLY_KINDS)
    p.add_argument("--set")
    p.add_argument("--point")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--which", choices=polyhedra.INNER_BOXES)
    p = _command_parser(sub, "supergradient", "closed-form supergradient")
    p.add_argument("--set")
    p.add_argument("--kind", choices=bounds.SUPERGRADIENT_KINDS)
    p = _command_parser(sub, "bound-eval", "evaluate a modular or Nemhauser bound")
    p.add_argument("--set")
    p.add_argument("--bound", choices=("upper", "lower", "nemhauser"), default="upper")
    p.add_argument("--kind", help="grow/shrink/bar for upper, one/two for nemhauser")
    p.add_argument("--perm", help="permutation for lower bounds")
    p.add_argument("--at", help="set at which to evaluate (default: the anchor)")
    for name in ("minimize", "maximize"):
        p = _command_parser(sub, name, f"{name} f")
        p.add_argument("--method", choices=("brute", "local"), default="brute")
        p.add_argument("--start")
    p = _command_parser(sub, "third-max", "local search plus complement (1/3-approximation)")
    p.add_argument("--start")
    p = _command_parser(sub, "certify", "optimality certificate at a set")
    p.add_argument("--set")
    p.add_argument("--kind", choices=[k.value for k in optimize.CertificateKind])
    p = _command_parser(sub, "validate", "check a property (default: every declared flag)")
    p.add_argument("--property", choices=PROPERTIES)

    p = sub.add_parser("sweep", help="run a seeded randomized sweep")
    p.add_argument("config", help="sweep config (YAML)")
    return parser


def _sweep(path: str) -> int:
    try:
        with open(path, encoding="utf-8") as fh:
            config = yaml.safe_load(fh) or {}
        violations = 0
        for rec in run_sweep(config):
            print(json.dumps(rec, sort_keys=True))
            if rec["record"] == "summary":
                violations = rec["violations"]
    except (SubmodError, OSError, yaml.YAMLError) as e:
        code = getattr(e, "code", "io" if isinstance(e, OSError) else "parse")
        print(json.dumps({"record": "error", "error": {"code": code, "message": str(e)}}, sort_keys=True))
        return EXIT_ERROR
    return EXIT_NEGATIVE if violations else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "sweep":
        return _sweep(args.config)
    report, code = run(args.command, args.instance, args)
    print(dumps(report))
    if "error" in report:
        print(f"{TOOL}: {report['error']['code']}: {report['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
