"""Command-line front end: ``tsw <group> <command> [flags]``.

Every run prints one JSON report (or writes it to ``--out``) whose header
echoes the resolved configuration.  Exit status: 0 success, 1 verification
failure or exceeded cap, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .families import (
    CapExceeded,
    FamilyError,
    check_regular_on_ground,
    contains,
    enumerate_members,
    is_admissible,
    iterated_deriv_contains,
    parse_family,
)
from .lab import (
    KClass,
    LabError,
    NClass,
    ParamSchedule,
    ZVector,
    build_z,
    build_z_sequence,
    dagger_probe,
    decompose_z,
    enumerate_histories,
    gamma,
    reduced_schedule,
    repeated_average,
    select_params,
    spreading_constant,
    submultiplicative_probe,
    t2_tree,
    theta_rule,
    verify_l6_bound,
)
from .norm import NormCert, brute_force_norm, evaluate_tree, norm, restricted_norm, tree_problems
from .ordinal import Ordinal, OrdinalError, add, compare, format_ordinal, leading_exponent, mul, parse_ordinal
from .presets import named_space
from .space import SpaceSpec, Vector


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    def __init__(self, message: str, report: Optional[dict] = None):
        super().__init__(message)
        self.report = report


# ----------------------------------------------------------------------
# argument parsing helpers
# ----------------------------------------------------------------------

def rational(text: str) -> Fraction:
    try:
        if any(c in text for c in ".eE") and "/" not in text:
            raise ValueError
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational p/q, got {text!r}") from None


def int_set(text: str) -> List[int]:
    """``2,3,7`` or ``1-12`` or a mix such as ``1-4,9``; empty string is the empty set."""
    out: List[int] = []
    text = text.strip()
    if not text:
        return out
    for part in text.split(","):
        part = part.strip()
        try:
            if "-" in part:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad integer set element {part!r}") from None
    return out


def ordinal_arg(text: str) -> Ordinal:
    try:
        return parse_ordinal(text)
    except OrdinalError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def ordinal_list(text: str) -> List[Ordinal]:
    return [ordinal_arg(t) for t in text.split(",") if t.strip()]


def rational_list(text: str) -> List[Fraction]:
    return [rational(t.strip()) for t in text.split(",") if t.strip()]


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_space(text: str) -> SpaceSpec:
    """A JSON file path, or ``preset:name[:nmax]``."""
    if text.startswith("preset:"):
        try:
            return named_space(text[len("preset:"):])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    data = _load_json(text)
    try:
        return SpaceSpec.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"{text}: not a valid space: {exc}") from None


def load_vector(args) -> Vector:
    if getattr(args, "coords", None):
        coords = []
        for part in args.coords.split(","):
            try:
                k, v = part.split(":")
                coords.append((int(k), rational(v.strip())))
            except (ValueError, argparse.ArgumentTypeError):
                raise UsageError(f"bad coordinate {part!r}; expected index:p/q") from None
        return Vector(tuple(coords))
    if not getattr(args, "vec", None):
        raise UsageError("give a vector with --vec FILE or --coords k:v,...")
    data = _load_json(args.vec)
    try:
        return Vector.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"{args.vec}: not a valid vector: {exc}") from None


def load_schedule(path: str) -> ParamSchedule:
    data = _load_json(path)
    try:
        return ParamSchedule.from_json(data)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{path}: not a valid schedule: {exc}") from None


def family_arg(text: str):
    try:
        return parse_family(text)
    except (FamilyError, OrdinalError) as exc:
        raise UsageError(f"family expression {text!r}: {exc}") from None


# ----------------------------------------------------------------------
# JSON output
# ----------------------------------------------------------------------

def jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Ordinal):
        return format_ordinal(obj)
    if isinstance(obj, (Vector, ZVector, ParamSchedule, SpaceSpec, NormCert)):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence[Any]]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([jsonable(v) if not isinstance(v, (list, tuple)) else " ".join(map(str, jsonable(v)))
                        for v in row])


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def cmd_family_contains(args):
    fam = family_arg(args.expr)
    return {"result": contains(fam, tuple(sorted(set(args.set))))}


def cmd_family_admissible(args):
    fam = family_arg(args.expr)
    blocks = [int_set(b) for b in args.blocks.split(";")]
    try:
        return {"result": is_admissible(fam, blocks)}
    except FamilyError as exc:
        raise UsageError(str(exc)) from None


def cmd_family_enumerate(args):
    fam = family_arg(args.expr)
    members = enumerate_members(fam, args.ground, args.ground_cap)
    return {"count": len(members), "members": [list(m) for m in members]}


def cmd_family_index(args):
    fam = family_arg(args.expr)
    val, exact = fam.index()
    return {"index": val, "exact": exact, "leading_exponent": leading_exponent(val)}


def cmd_family_deriv(args):
    fam = family_arg(args.expr)
    res = iterated_deriv_contains(fam, args.k, tuple(sorted(set(args.set))), args.search_cap)
    return {
        "member": res.member,
        "certified": res.certified,
        "witness": None if res.witness is None else list(res.witness),
    }


def cmd_family_regular(args):
    fam = family_arg(args.expr)
    rep = check_regular_on_ground(fam, args.ground, max(args.ground_cap, len(args.ground)))
    out = rep.as_dict()
    if not rep.passed:
        raise VerificationFailure(f"{args.expr} is not regular on the ground", out)
    return out


def cmd_ordinal(args):
    a = args.a
    if args.command == "lexp":
        if not a:
            raise UsageError("the leading exponent of 0 is undefined")
        return {"result": leading_exponent(a)}
    b = args.b
    if args.command == "add":
        return {"result": add(a, b)}
    if args.command == "mul":
        return {"result": mul(a, b)}
    return {"result": compare(a, b)}


def cmd_norm_eval(args):
    space = load_space(args.space)
    x = load_vector(args)
    value, cert = norm(x, space, args.max_support)
    out: Dict[str, Any] = {"value": value, "vector": x}
    if args.cert:
        out["certificate"] = cert.to_json()
    return out


def cmd_norm_brute(args):
    space = load_space(args.space)
    x = load_vector(args)
    return {"value": brute_force_norm(x, space, args.brute_cap), "vector": x}


def cmd_norm_restricted(args):
    space = load_space(args.space)
    x = load_vector(args)
    restriction = None if args.p is None else (args.p, args.q)
    if (args.p is None) != (args.q is None):
        raise UsageError("give both --p and --q, or neither")
    value = restricted_norm(x, space, restriction, args.eps, args.max_support)
    return {"value": value, "restriction": list(restriction) if restriction else None, "epsilon": args.eps}


def cmd_norm_validate(args):
    space = load_space(args.space)
    x = load_vector(args)
    data = _load_json(args.cert)
    try:
        cert = NormCert.from_json(data.get("certificate", data))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{args.cert}: not a valid certificate: {exc}") from None
    problems = tree_problems(cert.root, space)
    value = evaluate_tree(cert.root, x)
    out = {"tree_valid": not problems, "problems": problems, "tree_value": value,
           "claimed_value": cert.value, "value_matches": value == cert.value}
    if args.check_norm:
        exact, _ = norm(x, space, args.max_support)
        out["norm"] = exact
        out["optimal"] = exact == value
    if problems or value != cert.value or (args.check_norm and not out["optimal"]):
        raise VerificationFailure("certificate does not check out", out)
    return out


def cmd_lab_gamma(args):
    space = load_space(args.space)
    return {"gamma": gamma(space, args.eps, args.m), "epsilon": args.eps, "m": args.m}


def cmd_lab_dagger(args):
    space = load_space(args.space)
    rows = dagger_probe(space, args.eps, args.betas, args.mbound)
    if args.csv:
        write_csv(args.csv, ["epsilon", "beta", "witness_m", "gamma_at_witness", "searched_up_to"],
                  [[r.epsilon, r.beta, r.witness, r.gamma_at_witness, r.searched_up_to] for r in rows])
    return {
        "rows": [r.as_dict() for r in rows],
        "note": "finite-range evidence only; absence of a witness up to the bound proves nothing about larger m",
    }


def cmd_lab_histories(args):
    space = load_space(args.space)
    if args.kind == "N":
        if args.r is None or args.eps is None:
            raise UsageError("N histories need --r and --eps")
        kind = NClass(args.r, args.eps)
    else:
        if args.delta is None or args.p is None or args.eta is None:
            raise UsageError("K histories need --delta, --p and --eta")
        kind = KClass(args.delta, args.p, args.eta)
    hs = enumerate_histories(space, kind)
    return {"count": len(hs), "histories": [list(h) for h in hs]}


def cmd_lab_select(args):
    space = load_space(args.space)
    if args.levels:
        try:
            raw = json.loads(args.levels)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--levels: invalid JSON at column {exc.colno}: {exc.msg}") from None
        levels = []
        for lv in raw:
            ground = lv["ground"]
            levels.append({"p": lv["p"], "q": lv["q"],
                           "ground": int_set(ground) if isinstance(ground, str) else ground,
                           **({"budget": Fraction(str(lv["budget"]))} if "budget" in lv else {})})
        sched = reduced_schedule(space, args.eps, levels, betas=args.betas,
                                 ground_cap=max([args.ground_cap] + [len(lv["ground"]) for lv in levels]))
    else:
        if args.depth is None:
            raise UsageError("give --depth (or --levels for a reduced schedule)")
        sched = select_params(space, args.m0, args.eps, args.depth, args.ground_cap, betas=args.betas)
    return {"schedule": sched.to_json()}


def cmd_lab_average(args):
    x = repeated_average(args.eta, args.ground, args.mass, args.budget, args.max_support)
    return {"vector": x, "support_size": len(x), "l1": x.l1()}


def _schedule_from(args) -> ParamSchedule:
    if not args.schedule:
        raise UsageError("give --schedule FILE")
    return load_schedule(args.schedule)


def cmd_lab_zvec(args):
    sched = _schedule_from(args)
    z = build_z(sched, args.n, args.k, args.after, args.max_support)
    return {"z": z.to_json(), "verified": True}


def cmd_lab_decompose(args):
    sched = _schedule_from(args)
    if args.z:
        data = _load_json(args.z)
        try:
            z = ZVector.from_json(data.get("z", data), sched)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"{args.z}: not a Z-vector: {exc}") from None
    else:
        z = build_z(sched, args.n, args.k, args.after, args.max_support)
    levels = decompose_z(z)
    masses = [y.l1() for y in levels]
    weighted = sum((sched.theta_p(z.n + j) * m for j, m in enumerate(masses)), Fraction(0))
    return {"levels": levels, "masses": masses, "weighted_mass_sum": weighted, "expected": z.k + 1}


def cmd_lab_spreading(args):
    space = None
    zinfo = None
    if args.schedule:
        sched = load_schedule(args.schedule)
        zs = build_z_sequence(sched, args.zcount, max_support=args.max_support)
        blocks = [z.vector for z in zs]
        space = sched.space
        zinfo = (sched, zs)
    else:
        if not args.blocks or not args.space:
            raise UsageError("give --space and --blocks FILE, or --schedule with --zcount")
        space = load_space(args.space)
        data = _load_json(args.blocks)
        try:
            blocks = [Vector.from_json(b) for b in (data["blocks"] if isinstance(data, dict) else data)]
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"{args.blocks}: not a list of vectors: {exc}") from None
    fam = family_arg(args.family)
    rep = spreading_constant(blocks, fam, space, args.pattern_budget, args.seed, zinfo,
                             args.max_support, threads=args.threads)
    out = rep.as_dict()
    out["certificates"] = {" ".join(map(str, G)): how for G, how in rep.certificates.items()}
    if zinfo is not None:
        sched, zs = zinfo
        trees = {}
        for G in rep.certificates:
            tree = t2_tree(sched, zs, G, [1] * len(G))
            trees[" ".join(map(str, G))] = "unavailable" if tree is None else (
                "valid" if not tree_problems(tree, space) else "invalid")
        out["z_trees"] = trees
        out["min_ratio_at_least_1"] = rep.empirical_min >= 1
    if args.csv:
        write_csv(args.csv, ["F", "coefficients", "ratio"], [[G, a, v] for G, a, v in rep.rows])
    if rep.certified_lower > rep.empirical_min:
        raise VerificationFailure("certified bound exceeds the empirical minimum", out)
    return out


def cmd_lab_bounds(args):
    sched = _schedule_from(args)
    z = build_z(sched, args.n, args.k, args.after, args.max_support)
    rep = verify_l6_bound(sched, z, args.m, args.max_support)
    failed = [name for name in ("c7", "l6") if args.check in (name, "both") and not rep[f"{name}_holds"]]
    if failed:
        raise VerificationFailure(f"closed-form bound violated: {', '.join(failed)}", rep)
    return rep


def cmd_lab_submult(args):
    try:
        rule = theta_rule(args.rule)
    except (LabError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    rep = submultiplicative_probe(rule, args.m_range, args.n_range)
    if args.csv:
        write_csv(args.csv, ["m", "edge_n", "ratio"], [[m, rep["edge_n"], r] for m, r in rep["ratio_proxy"]])
    return rep


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("common")
    g.add_argument("--out", help="write the JSON report here instead of stdout")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--threads", type=int, default=None, help="worker threads (default: $TSW_THREADS or 1)")
    g.add_argument("--ground-cap", type=int, default=16)
    g.add_argument("--max-support", type=int, default=24)
    g.add_argument("--pattern-budget", type=int, default=500)
    g.add_argument("--csv", help="also write the ratio table as CSV")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    top = _Parser(prog="tsw", description="Exact computations in mixed Tsirelson spaces.")
    top.add_argument("--version", action="version", version=f"tsw {__version__}")
    groups = top.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def leaf(sub, name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func, command=name)
        return p

    fam = groups.add_parser("family", help="regular families").add_subparsers(dest="command", required=True,
                                                                             parser_class=_Parser)
    p = leaf(fam, "contains", cmd_family_contains, "membership of a finite set")
    p.add_argument("--expr", required=True)
    p.add_argument("--set", type=int_set, required=True)
    p = leaf(fam, "admissible", cmd_family_admissible, "admissibility of successive blocks")
    p.add_argument("--expr", required=True)
    p.add_argument("--blocks", required=True, help="blocks separated by ';', e.g. '2,3;5,6,7'")
    p = leaf(fam, "enumerate", cmd_family_enumerate, "members inside a ground set")
    p.add_argument("--expr", required=True)
    p.add_argument("--ground", type=int_set, required=True)
    p = leaf(fam, "index", cmd_family_index, "Cantor-Bendixson index")
    p.add_argument("--expr", required=True)
    p = leaf(fam, "deriv", cmd_family_deriv, "membership in an iterated derivative")
    p.add_argument("--expr", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--set", type=int_set, default=[])
    p.add_argument("--search-cap", type=int, default=100)
    p = leaf(fam, "regular-check", cmd_family_regular, "hereditary and spreading on a ground")
    p.add_argument("--expr", required=True)
    p.add_argument("--ground", type=int_set, required=True)

    ordg = groups.add_parser("ordinal", help="ordinal arithmetic").add_subparsers(dest="command", required=True,
                                                                                 parser_class=_Parser)
    for name in ("add", "mul", "cmp"):
        p = leaf(ordg, name, cmd_ordinal, f"{name} two ordinals")
        p.add_argument("--a", type=ordinal_arg, required=True)
        p.add_argument("--b", type=ordinal_arg, required=True)
    p = leaf(ordg, "lexp", cmd_ordinal, "leading exponent")
    p.add_argument("--a", type=ordinal_arg, required=True)

    nrm = groups.add_parser("norm", help="norm engine").add_subparsers(dest="command", required=True,
                                                                      parser_class=_Parser)

    def vec_args(p):
        p.add_argument("--space", required=True, help="space JSON file or preset:name[:nmax]")
        p.add_argument("--vec", help="vector JSON file")
        p.add_argument("--coords", help="inline vector, e.g. '2:1,3:-1/2'")

    p = leaf(nrm, "eval", cmd_norm_eval, "exact norm")
    vec_args(p)
    p.add_argument("--cert", action="store_true", help="include the optimal admissible tree")
    p = leaf(nrm, "brute", cmd_norm_brute, "brute-force norm (small supports)")
    vec_args(p)
    p.add_argument("--brute-cap", type=int, default=8)
    p = leaf(nrm, "restricted", cmd_norm_restricted, "max over (p,q)-restricted trees")
    vec_args(p)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--eps", type=rational, required=True)
    p = leaf(nrm, "validate", cmd_norm_validate, "check a certificate tree")
    vec_args(p)
    p.add_argument("--cert", required=True, help="certificate JSON (as emitted by norm eval --cert)")
    p.add_argument("--check-norm", action="store_true", help="also compare against the exact norm")

    lab = groups.add_parser("lab", help="construction lab").add_subparsers(dest="command", required=True,
                                                                          parser_class=_Parser)
    p = leaf(lab, "gamma", cmd_lab_gamma, "gamma(eps, m)")
    p.add_argument("--space", required=True)
    p.add_argument("--eps", type=rational, required=True)
    p.add_argument("--m", type=int, required=True)
    p = leaf(lab, "dagger", cmd_lab_dagger, "smallest witnesses of the dagger inequality")
    p.add_argument("--space", required=True)
    p.add_argument("--eps", type=rational_list, required=True, help="comma-separated grid")
    p.add_argument("--betas", type=ordinal_list, required=True)
    p.add_argument("--mbound", type=int, required=True)
    p = leaf(lab, "histories", cmd_lab_histories, "enumerate N_r or K_(delta,p,eta)")
    p.add_argument("--space", required=True)
    p.add_argument("--kind", choices=["N", "K"], required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--eps", type=rational)
    p.add_argument("--delta", type=rational)
    p.add_argument("--p", type=int)
    p.add_argument("--eta", type=ordinal_arg)
    p = leaf(lab, "select", cmd_lab_select, "parameter schedule (full or reduced)")
    p.add_argument("--space", required=True)
    p.add_argument("--eps", type=rational, required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--m0", type=int_set, default=list(range(1, 33)))
    p.add_argument("--betas", type=ordinal_list)
    p.add_argument("--levels", help="JSON list of {p, q, ground, budget} for a reduced schedule")
    p = leaf(lab, "average", cmd_lab_average, "repeated average with a smallness budget")
    p.add_argument("--eta", type=ordinal_arg, required=True)
    p.add_argument("--ground", type=int_set, required=True)
    p.add_argument("--mass", type=rational, required=True)
    p.add_argument("--budget", type=rational, required=True)

    def z_args(p):
        p.add_argument("--schedule", required=True)
        p.add_argument("--n", type=int, default=1)
        p.add_argument("--k", type=int, default=0)
        p.add_argument("--after", type=int, default=0)

    p = leaf(lab, "zvec", cmd_lab_zvec, "build and verify a Z-vector")
    z_args(p)
    p = leaf(lab, "decompose", cmd_lab_decompose, "levels of a Z-vector")
    z_args(p)
    p.add_argument("--z", help="Z-vector JSON (as emitted by lab zvec); built afresh if omitted")
    p = leaf(lab, "spreading", cmd_lab_spreading, "empirical and certified spreading constants")
    p.add_argument("--family", required=True)
    p.add_argument("--space")
    p.add_argument("--blocks", help="JSON list of vectors")
    p.add_argument("--schedule", help="use Z-vectors z_1..z_K of this schedule as blocks")
    p.add_argument("--zcount", type=int, default=3)
    p = leaf(lab, "bounds", cmd_lab_bounds, "closed-form norm bounds for a Z-vector")
    z_args(p)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--check", choices=["c7", "l6", "both"], default="both", help="which bounds decide the exit code")
    p = leaf(lab, "submult", cmd_lab_submult, "submultiplicativity of a theta rule")
    p.add_argument("--rule", required=True, help="harmonic, geometric:r or power:s")
    p.add_argument("--m-range", type=int_set, required=True)
    p.add_argument("--n-range", type=int_set, required=True)
    return top


def _resolve_threads(args):
    if args.threads is None:
        env = os.environ.get("TSW_THREADS", "1")
        try:
            args.threads = int(env)
        except ValueError:
            raise UsageError(f"TSW_THREADS must be an integer, got {env!r}") from None
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")


def _config(args) -> dict:
    skip = {"func", "out"}
    return {k: jsonable(v) for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(report: dict, out: Optional[str]):
    text = json.dumps(report, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _resolve_threads(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    header = {"tool": f"tsw {__version__}", "command": f"{args.group} {args.command}", "config": _config(args)}
    try:
        result = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (OrdinalError, FamilyError) as exc:
        if isinstance(exc, CapExceeded):
            _emit({**header, "ok": False, "error": f"cap exceeded: {exc}"}, args.out)
            return 1
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        _emit({**header, "ok": False, "error": str(exc), **jsonable(exc.report or {})}, args.out)
        return 1
    except LabError as exc:
        _emit({**header, "ok": False, "error": str(exc)}, args.out)
        return 1
    except (ValueError, TypeError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    _emit({**header, "ok": True, **jsonable(result)}, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
