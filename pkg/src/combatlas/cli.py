"""Command-line front end.

Exit status: 0 when the verdict is true, 1 when it is false, 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import __version__, linalg
from .atlas import AtlasError, jsonable, validate_atlas, verify_all, check_property, verify_local_global
from .geometry import bricks as bk
from .geometry import polytope as pg
from .io import (InputError, read_atlas, read_bricks, read_matroid, read_polynomial, read_polytopes)
from .lorentzian import PolynomialError, hessian, is_lorentzian
from .matroid import (DEFAULT_T_SAMPLES, Matroid, NotAMatroid, WeightProfile, matroid_atlas,
                      recognize_matroid, verify_mason)

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT = 0, 1, 2


def parse_t_samples(text: str) -> list[Fraction]:
    out = []
    for tok in text.split(","):
        try:
            t = Fraction(tok.strip())
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"bad t-sample {tok!r}") from None
        if not 0 <= t <= 1:
            raise argparse.ArgumentTypeError(f"t-sample {tok} is outside [0, 1]")
        out.append(t)
    return out


def positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _names(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--eps", type=positive_float, default=linalg.DEFAULT_EPS,
                        help="float tolerance (default %(default)g)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--t-samples", type=parse_t_samples, default=list(DEFAULT_T_SAMPLES),
                        help="comma-separated rationals in [0,1] (default 0,1/4,1/2,3/4,1)")
    common.add_argument("--timing", action="store_true", help="add wall-clock time to the report")

    p = argparse.ArgumentParser(prog="combatlas", description="Hyperbolicity checks via combinatorial atlases.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("mason", parents=[common], help="Mason log-concavity for a matroid")
    s.add_argument("file")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--strong", action="store_true", help="ultra-log-concave form")
    s.add_argument("--atlas-route", action="store_true", help="also check every atlas vertex")

    s = sub.add_parser("recognize", parents=[common], help="decide whether a complex is a matroid")
    s.add_argument("file")

    s = sub.add_parser("lorentzian", parents=[common], help="certify a polynomial as Lorentzian")
    s.add_argument("file")
    s.add_argument("--witness", action="store_true", help="include the failing witness")

    s = sub.add_parser("hessian", parents=[common], help="Hessian inertia at a point")
    s.add_argument("file")
    s.add_argument("--at", required=True, help="comma-separated coordinates")

    s = sub.add_parser("mixvol", parents=[common], help="mixed volume of selected bodies")
    s.add_argument("file")
    s.add_argument("--select", required=True, type=_names)

    s = sub.add_parser("af", parents=[common], help="Alexandrov-Fenchel check")
    s.add_argument("file")
    s.add_argument("--A", dest="A", required=True)
    s.add_argument("--B", dest="B", required=True)
    s.add_argument("--P", dest="P", type=_names, default=None,
                   help="the dim-2 remaining bodies (default: the other bodies in file order)")
    s.add_argument("--perturb", type=positive_float, default=None, metavar="EPS")

    s = sub.add_parser("bm", parents=[common], help="Brunn-Minkowski for two brick regions")
    s.add_argument("file_a")
    s.add_argument("file_b")
    s.add_argument("--trace", action="store_true")

    s = sub.add_parser("atlas", help="operations on atlas files")
    asub = s.add_subparsers(dest="atlas_command", required=True)
    v = asub.add_parser("verify", parents=[common], help="local-global check at every regular vertex")
    v.add_argument("file")
    return p


def _check(name, holds, witness=None, slack=None) -> dict:
    out = {"name": name, "holds": bool(holds)}
    if witness is not None:
        out["witness"] = witness
    if slack is not None:
        out["slack"] = slack
    return out


# ---------------------------------------------------------------------------
# subcommands; each returns (checks, result)


def cmd_mason(args):
    c = read_matroid(args.file)
    try:
        Matroid(c.n, c.faces, check=False)
    except NotAMatroid as exc:
        raise InputError(f"{args.file}: {exc}") from exc
    if not 1 <= args.k < c.rank:
        raise InputError(f"--k must satisfy 1 <= k < rank = {c.rank}")
    rep = verify_mason(c, args.k, args.strong)
    d = rep.details
    checks = [
        _check("direct", d["direct"]["holds"], slack=d["direct"]["slack"]),
        _check("atlas", d["atlas"]["ope"] and d["atlas"]["pair_holds"] and all(d["atlas"]["formulas_match"]),
               slack=d["atlas"]["slack"]),
        _check("agree", d["agree"]),
    ]
    result = {"profile": d["profile"], "k": args.k, "strong": args.strong, "factor": d["factor"],
              "slack": d["slack"], "equality": d["slack"] == 0, "root_forms": {
                  "vMv": d["atlas"]["vMv"], "vMw": d["atlas"]["vMw"], "wMw": d["atlas"]["wMw"]}}
    if args.atlas_route:
        w = WeightProfile(args.k, c.n, args.strong)
        a = matroid_atlas(c, args.k, w, args.t_samples)
        bad = []
        for vid, v in a.vertices.items():
            if not linalg.check_ope(v.M):
                bad.append({"vertex": vid, "failed": "OPE"})
            if v.is_sink:
                continue
            for prop in ("Inh", "TInv", "DecSupp", "Iden"):
                if not check_property(a, vid, prop).holds:
                    bad.append({"vertex": vid, "failed": prop})
            regular = check_property(a, vid, "Irr").holds and check_property(a, vid, "hPos").holds
            if regular and not verify_local_global(a, vid).holds:
                bad.append({"vertex": vid, "failed": "LocalGlobal"})
        checks.append(_check("atlas_vertices", not bad, witness=bad[:5] or None))
        result["atlas_vertices"] = len(a)
    return checks, result


def cmd_recognize(args):
    c = read_matroid(args.file)
    rep = recognize_matroid(c)
    d = rep.details
    checks = [
        _check("exchange", d["exchange_route"], witness=d.get("exchange_witness")),
        _check("atlas_test", d["atlas_route"], witness=d.get("atlas_witness")),
        _check("agree", d["agree"]),
    ]
    verdict = d["exchange_route"] and d["atlas_route"] and d["agree"]
    return checks, {"n": c.n, "faces": len(c.faces), "rank": c.rank, "is_matroid": verdict}


def cmd_lorentzian(args):
    f = read_polynomial(args.file)
    try:
        rep = is_lorentzian(f)
    except PolynomialError as exc:
        raise InputError(f"{args.file}: {exc}") from exc
    wit = rep.witness if args.witness else None
    reason = rep.witness.get("reason") if rep.witness else None
    checks = [_check("lorentzian", rep.holds, witness=wit)]
    return checks, {"n": f.n, "degree": f.degree, "terms": len(f.terms), "reason": reason,
                    "hessians_checked": rep.details.get("hessians_checked")}


def cmd_hessian(args):
    f = read_polynomial(args.file)
    try:
        w = [linalg.to_fraction(x) for x in args.at.split(",")]
    except linalg.LinalgError as exc:
        raise InputError(f"--at: {exc}") from exc
    if len(w) != f.n:
        raise InputError(f"--at has {len(w)} coordinates, expected {f.n}")
    H = hessian(f, w)
    inn = linalg.inertia(H)
    checks = [_check("at_most_one_positive_eigenvalue", inn.n_pos <= 1)]
    return checks, {"at": w, "hessian": H.rows(), "inertia": list(inn)}


def _family(args, names_needed):
    system = read_polytopes(args.file)
    for nm in names_needed:
        if nm not in system["bodies"]:
            raise InputError(f"{args.file}: no body named {nm!r}")
    try:
        if getattr(args, "perturb", None):
            bodies = {nm: (system["normals"], off) for nm, off in system["bodies"].items()}
            return pg.perturb_family(bodies, args.perturb, seed=args.seed), system
        return pg.family_atype(system["normals"], system["bodies"]), system
    except pg.GeometryError as exc:
        raise InputError(f"{args.file}: {exc}") from exc


def cmd_mixvol(args):
    system = read_polytopes(args.file)
    if len(args.select) != system["dim"]:
        raise InputError(f"--select needs exactly dim = {system['dim']} names")
    fam, _ = _family(args, args.select)
    V = pg.mixed_volume(fam, args.select)
    return [_check("positive", V > 0)], {"selection": args.select, "mixed_volume": V}


def cmd_af(args):
    system = read_polytopes(args.file)
    m = system["dim"]
    if args.P is None:
        rest = [nm for nm in system["bodies"] if nm not in (args.A, args.B)]
        if len(rest) < m - 2:
            raise InputError(f"need {m - 2} further bodies for --P, file has {len(rest)}")
        P = rest[:m - 2]
    else:
        P = args.P
    if len(P) != m - 2:
        raise InputError(f"--P needs exactly dim - 2 = {m - 2} names")
    fam, _ = _family(args, [args.A, args.B] + P)
    rep = pg.verify_af(fam, args.A, args.B, P, eps=args.eps)
    d = rep.details
    checks = [
        _check("direct", d["direct"], slack=d["slack"]),
        _check("matrix", d["matrix_route"]),
        _check("agree", d["agree"]),
    ]
    result = {"A": args.A, "B": args.B, "P": P, "V_AB": d["V_AB"], "V_AA": d["V_AA"], "V_BB": d["V_BB"],
              "normals": fam.atype.r}
    return checks, result


def cmd_bm(args):
    A, B = read_bricks(args.file_a), read_bricks(args.file_b)
    try:
        rep = bk.bm_verify(A, B)
    except bk.BrickError as exc:
        raise InputError(str(exc)) from exc
    d = rep.details
    checks = [_check("brunn_minkowski", rep.holds, slack=d["slack"])]
    result = {k: d[k] for k in ("sqrt_area_sum", "sum_sqrt_areas", "area_A", "area_B", "area_sum", "equality")}
    if args.trace:
        tr = bk.bm_split_trace(A, B)
        checks.append(_check("split_trace", tr["holds"]))
        result["trace"] = tr
    return checks, result


def cmd_atlas_verify(args):
    a = read_atlas(args.file)
    val = validate_atlas(a)
    if not val.holds:
        raise InputError(f"{args.file}: invalid atlas: {jsonable(val.witness)}")
    summary = verify_all(a, args.eps)
    checks = [
        _check("ope_everywhere", not summary["ope_failures"], witness=summary["ope_failures"] or None),
        _check("local_global", not summary["local_global_failures"],
               witness=summary["local_global_failures"] or None),
    ]
    return checks, {"vertices": summary["vertices"], "regular": summary["regular"]}


COMMANDS = {
    "mason": cmd_mason, "recognize": cmd_recognize, "lorentzian": cmd_lorentzian, "hessian": cmd_hessian,
    "mixvol": cmd_mixvol, "af": cmd_af, "bm": cmd_bm, "atlas": cmd_atlas_verify,
}


def dispatch(args) -> tuple[dict, int]:
    header = {"command": args.command if args.command != "atlas" else "atlas verify",
              "config": {"eps": args.eps, "seed": args.seed, "format": args.format,
                         "t_samples": [str(t) for t in args.t_samples]}}
    start = time.perf_counter()
    try:
        checks, result = COMMANDS[args.command](args)
    except (InputError, AtlasError) as exc:
        return {**header, "verdict": None, "error": str(exc)}, EXIT_INPUT
    verdict = all(c["holds"] for c in checks)
    report = {**header, "verdict": verdict, "checks": checks, "result": result}
    if args.timing:
        report["timing_s"] = round(time.perf_counter() - start, 6)
    return jsonable(report), EXIT_TRUE if verdict else EXIT_FALSE


def render_text(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    if report.get("error"):
        lines.append(f"error: {report['error']}")
        return "\n".join(lines)
    lines.append(f"verdict: {'true' if report['verdict'] else 'false'}")
    for c in report["checks"]:
        line = f"  {c['name']}: {'ok' if c['holds'] else 'FAIL'}"
        if "slack" in c:
            line += f" (slack {c['slack']})"
        lines.append(line)
        if "witness" in c:
            lines.append(f"    witness: {json.dumps(c['witness'], sort_keys=True)}")
    for k, v in report["result"].items():
        if k != "trace":
            lines.append(f"{k}: {json.dumps(v, sort_keys=True)}")
    if "trace" in report["result"]:
        tr = report["result"]["trace"]
        lines.append(f"trace: {len(tr['nodes'])} nodes, depth {tr['max_depth']}")
    if "timing_s" in report:
        lines.append(f"time: {report['timing_s']}s")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    report, code = dispatch(args)
    if args.format == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        out = render_text(report)
        print(out, file=sys.stderr if code == EXIT_INPUT else sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
