"""Command-line interface.

Exit codes: 0 ok, 1 residuals found (or no solution), 2 usage error,
3 resource bound exceeded, 4 I/O error or malformed input file.

Series arguments use ``kind:args``::

    kdv:J            dispersionless KdV integral h_J (exact series)
    filtered:J       hierarchy element of --model (append /none for no degree filter)
    mu:2,1           branching Hamiltonian, truncated at the window (or --cutoff)
    file:PATH        polynomial JSON, read over --model
    zero             the zero series
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import hierarchy, hurwitz, serialize, weyl
from .algebra import BadOrbitError, Polynomial
from .orbits import CIRCLE, ModelError, OrbitModel
from .poisson import ExplicitSeries, ZeroSeries, bracket, bracket_coefficient

RESIDUALS, USAGE, BOUND, IO = 1, 2, 3, 4


class CLIError(Exception):
    def __init__(self, message, code=USAGE):
        super().__init__(message)
        self.code = code


def _version() -> str:
    from importlib.metadata import PackageNotFoundError, version
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror}", IO) from exc
    except json.JSONDecodeError as exc:
        raise CLIError(f"{path} is not valid JSON: {exc}", IO) from exc


def load_model(spec) -> OrbitModel:
    if spec is None or spec == "circle":
        return CIRCLE
    try:
        return OrbitModel.from_json(_read_json(spec))
    except ModelError as exc:
        raise CLIError(f"{spec}: {exc}", IO) from exc


def load_polynomial(path, model) -> Polynomial:
    try:
        return serialize.poly_from_json(_read_json(path), model)
    except (serialize.FormatError, KeyError, TypeError, ValueError) as exc:
        raise CLIError(f"{path}: {exc}", IO) from exc


def load_weyl(path, model) -> weyl.WeylElement:
    try:
        return serialize.weyl_from_json(_read_json(path), model)
    except (serialize.FormatError, KeyError, TypeError, ValueError) as exc:
        raise CLIError(f"{path}: {exc}", IO) from exc


def parse_series(text: str, model: OrbitModel, cutoff: int):
    kind, _, arg = text.partition(":")
    try:
        if kind == "zero":
            return ZeroSeries()
        if kind == "kdv":
            return hierarchy.KdVSeries(int(arg))
        if kind == "filtered":
            j, _, mode = arg.partition("/")
            return hierarchy.FilteredSeries(model, int(j), mode or "target")
        if kind == "mu":
            return ExplicitSeries(hurwitz.branching_hamiltonian(arg.strip('"'), cutoff))
        if kind == "file":
            return ExplicitSeries(load_polynomial(arg, model))
    except ValueError as exc:
        raise CLIError(f"bad series {text!r}: {exc}") from exc
    raise CLIError(f"unknown series kind in {text!r}")


def _partition(text):
    try:
        return hurwitz.as_partition(text)
    except ValueError as exc:
        raise CLIError(f"bad partition {text!r}: {exc}") from exc


def _fraction(c: Fraction) -> dict:
    return {"num": str(c.numerator), "den": str(c.denominator)}


# -------------------------------------------------------------- commands


def cmd_gen(args):
    if args.kind == "kdv":
        return serialize.poly_to_json(hierarchy.kdv(args.j, args.cutoff)), 0
    model = load_model(args.model)
    spec = hierarchy.HierarchySpec(model, args.j, args.cutoff, args.filter, args.theta_degree)
    return serialize.poly_to_json(spec.generate()), 0


def cmd_bracket(args):
    model = load_model(args.model)
    f = load_polynomial(args.f, model)
    g = load_polynomial(args.g, model)
    return serialize.poly_to_json(bracket(f, g, model)), 0


def cmd_bracket_coeff(args):
    model = load_model(args.model)
    try:
        target = tuple(int(k) for k in json.loads(args.target.replace("−", "-")))
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise CLIError(f"bad target {args.target!r}") from exc
    cutoff = args.cutoff or max((abs(k) for k in target), default=1)
    f = parse_series(args.f, model, cutoff)
    g = parse_series(args.g, model, cutoff)
    c = bracket_coefficient(target, f, g, model)
    return {"target": sorted(target), "f": f.describe(), "g": g.describe(), **_fraction(c)}, 0


def cmd_verify(args):
    model = load_model(args.model)
    cutoff = args.cutoff or args.window
    f = parse_series(args.f, model, cutoff)
    g = parse_series(args.g, model, cutoff)
    report = hierarchy.verify_commute(f, g, model, args.window, jobs=args.jobs)
    report.f, report.g = args.f, args.g
    return report.to_json(), 0 if report.passed else RESIDUALS


def cmd_sign_search(args):
    model = load_model(args.model)
    try:
        found = hierarchy.sign_search(model, args.j, args.k, args.cutoff, args.bound, args.filter,
                                      args.max_assignments, args.jobs)
    except hierarchy.SearchBoundError as exc:
        raise CLIError(str(exc), BOUND) from exc
    out = {"j": args.j, "k": args.k, "cutoff": args.cutoff, "count": len(found),
           "assignments": [{str(n): s for n, s in sorted(a.items())} for a in found]}
    return out, 0 if found else RESIDUALS


def _rho(args):
    sol = hurwitz.solve_rho(args.j, args.cutoff, strict=args.strict)
    return sol.to_json(), 0 if sol.status == "ok" else RESIDUALS


def cmd_hurwitz(args):
    if args.kind == "count":
        try:
            spec = hurwitz.FactorizationSpec(args.d, _partition(args.lp), _partition(args.lm),
                                             _partition(args.nu), args.connected)
            c = hurwitz.count(spec, args.max_degree)
        except hurwitz.BoundExceeded as exc:
            raise CLIError(str(exc), BOUND) from exc
        return {"d": args.d, "lp": list(spec.lam_plus), "lm": list(spec.lam_minus),
                "nu": list(spec.nu), "connected": spec.connected, **_fraction(c)}, 0
    if args.kind == "bh":
        return serialize.poly_to_json(hurwitz.branching_hamiltonian(_partition(args.mu),
                                                                    args.cutoff)), 0
    return _rho(args)


def cmd_weyl(args):
    model = load_model(args.model)
    if args.op == "master":
        if not args.h:
            raise CLIError("weyl master needs --h")
        report = weyl.check_master(load_weyl(args.h, model), args.order)
        return report.to_json(), 0 if report.passed else RESIDUALS
    if not (args.f and args.g):
        raise CLIError(f"weyl {args.op} needs --f and --g")
    f, g = load_weyl(args.f, model), load_weyl(args.g, model)
    op = weyl.star if args.op == "star" else weyl.commutator
    return serialize.weyl_to_json(op(f, g, args.order)), 0


def cmd_export(args):
    model = load_model(args.model)
    if args.what == "model":
        return model.to_json(), 0
    if not args.series:
        raise CLIError("export series needs --series")
    series = parse_series(args.series, model, args.cutoff)
    if isinstance(series, ExplicitSeries):
        return serialize.poly_to_json(series.poly), 0
    if isinstance(series, ZeroSeries):
        return serialize.poly_to_json(Polynomial.zero(model)), 0
    if isinstance(series, hierarchy.KdVSeries):
        return serialize.poly_to_json(hierarchy.kdv(series.j, args.cutoff)), 0
    return serialize.poly_to_json(hierarchy.filtered(model, series.j, args.cutoff,
                                                     series.mode)), 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--manifest", help="write a run manifest (JSON) here")
    common.add_argument("--model", help="orbit model JSON file, or 'circle' (default)")

    p = argparse.ArgumentParser(prog="reeb-hierarchy", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=_version())
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a hierarchy element")
    g.add_argument("kind", choices=("kdv", "filtered"))
    g.add_argument("--j", type=int, required=True)
    g.add_argument("--cutoff", type=int, required=True)
    g.add_argument("--filter", choices=hierarchy.FILTERS, default="target")
    g.add_argument("--theta-degree", type=int, choices=(0, 1), default=1)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bracket", parents=[common], help="Poisson bracket of two polynomial files")
    b.add_argument("--f", required=True)
    b.add_argument("--g", required=True)
    b.set_defaults(func=cmd_bracket)

    bc = sub.add_parser("bracket-coeff", parents=[common],
                        help="one coefficient of the bracket of two series")
    bc.add_argument("--target", required=True, help='JSON list, e.g. "[-2,1,1]"')
    bc.add_argument("--f", required=True)
    bc.add_argument("--g", required=True)
    bc.add_argument("--cutoff", type=int, help="truncation for mu: series")
    bc.set_defaults(func=cmd_bracket_coeff)

    v = sub.add_parser("verify", parents=[common], help="check that two series commute")
    v.add_argument("--f", required=True)
    v.add_argument("--g", required=True)
    v.add_argument("--window", type=int, required=True)
    v.add_argument("--cutoff", type=int, help="truncation for mu: series (default: window)")
    v.add_argument("--jobs", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sign-search", parents=[common],
                       help="search multiplicative orientation signs")
    s.add_argument("--j", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--cutoff", type=int, required=True)
    s.add_argument("--bound", type=int)
    s.add_argument("--filter", choices=("target", "none"), default="target")
    s.add_argument("--max-assignments", type=int, default=4096)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sign_search)

    h = sub.add_parser("hurwitz", parents=[common], help="branched cover counts")
    h.add_argument("kind", choices=("count", "bh", "rho"))
    h.add_argument("--d", type=int)
    h.add_argument("--lp")
    h.add_argument("--lm")
    h.add_argument("--nu")
    h.add_argument("--connected", action="store_true")
    h.add_argument("--max-degree", type=int, default=hurwitz.DEFAULT_MAX_DEGREE)
    h.add_argument("--mu")
    h.add_argument("--j", type=int)
    h.add_argument("--cutoff", type=int)
    h.add_argument("--strict", action="store_true",
                   help="only corrections with |mu| < j")
    h.set_defaults(func=cmd_hurwitz)

    r = sub.add_parser("rho", parents=[common], help="solve for branching coefficients")
    r.add_argument("--j", type=int, required=True)
    r.add_argument("--cutoff", type=int, required=True)
    r.add_argument("--strict", action="store_true")
    r.set_defaults(func=_rho)

    w = sub.add_parser("weyl", parents=[common], help="Weyl algebra products")
    w.add_argument("op", choices=("star", "commutator", "master"))
    w.add_argument("--f")
    w.add_argument("--g")
    w.add_argument("--h")
    w.add_argument("--order", type=int, help="drop hbar powers above this")
    w.set_defaults(func=cmd_weyl)

    e = sub.add_parser("export", parents=[common], help="export a model or series as JSON")
    e.add_argument("what", choices=("model", "series"))
    e.add_argument("--series")
    e.add_argument("--cutoff", type=int, default=4)
    e.set_defaults(func=cmd_export)
    return p


def _check_flags(args):
    if args.command == "hurwitz":
        need = {"count": ("d", "lp", "lm", "nu"), "bh": ("mu", "cutoff"),
                "rho": ("j", "cutoff")}[args.kind]
        missing = [n for n in need if getattr(args, n) is None]
        if missing:
            raise CLIError(f"hurwitz {args.kind} needs " + ", ".join("--" + n for n in missing))
    for name in ("cutoff", "window", "jobs"):
        value = getattr(args, name, None)
        if value is not None and value < 1:
            raise CLIError(f"--{name} must be positive")


def render_text(result) -> str:
    if isinstance(result, dict) and "terms" in result:
        rows = []
        for t in result["terms"]:
            c = t["num"] if t["den"] == "1" else f"{t['num']}/{t['den']}"
            extra = f"  hbar^{t['hbar']}" if "hbar" in t else ""
            rows.append((c, " ".join(map(str, t["mono"])) + extra))
        if not rows:
            return "0\n"
        width = max(len(c) for c, _ in rows)
        return "".join(f"{c:>{width}}  {m}\n" for c, m in rows)
    lines = []
    for key in sorted(result):
        value = result[key]
        if isinstance(value, (list, dict)):
            value = json.dumps(value, sort_keys=True)
        lines.append((key, str(value)))
    width = max((len(k) for k, _ in lines), default=0)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in lines)


def _manifest(argv, args, text, elapsed) -> dict:
    model_hash = None
    if getattr(args, "model", None) and args.model != "circle":
        model_hash = hashlib.sha256(Path(args.model).read_bytes()).hexdigest()
    flags = {k: v for k, v in sorted(vars(args).items())
             if k not in ("func", "out", "manifest")}
    return {
        "command": args.command, "argv": list(argv), "flags": flags,
        "model_sha256": model_hash,
        "cutoffs": {k: flags[k] for k in ("cutoff", "window", "bound") if flags.get(k) is not None},
        "version": _version(), "wall_time": round(elapsed, 6),
        "result_sha256": hashlib.sha256(text.encode()).hexdigest(),
    }


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        _check_flags(args)
        result, code = args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (hurwitz.BoundExceeded, weyl.TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BOUND
    except (BadOrbitError, ModelError, weyl.AlphabetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    text = serialize.dumps(result) if args.format == "json" else render_text(result)
    elapsed = time.perf_counter() - start
    try:
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        if args.manifest:
            Path(args.manifest).write_text(serialize.dumps(_manifest(argv, args, text, elapsed)))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IO
    return code


def main():
    sys.exit(run())
