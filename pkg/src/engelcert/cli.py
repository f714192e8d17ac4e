"""Command-line front end: ``engelcert <command> [options]``.

Exit status is 0 when every check passes, 1 when any check fails and 2 on
usage or internal errors.  ``--json`` prints a versioned report.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .classify import check_derived_relations, d2_residues, relation_residues
from .compactness import lattice_scan, obstruction, verify_certificate
from .coords import check_local_model, fixture_charts, load_chart
from .liealg import ADAPTED_BASES, identify, invariants, jacobi_check, realify
from .models import FAMILY_NAMES, FamilyId, family, family_model, from_constants, load_model_file
from .parsing import ParseError
from .scalar import UsageError

SCHEMA = "engelcert.report/1"
_RATIONAL = re.compile(r"^\s*-?\d+(\s*/\s*\d+)?\s*$")


def rational(text: str) -> Fraction:
    """Exact ``P/Q`` (or integer) parser; decimals are refused."""
    if not _RATIONAL.match(text):
        raise argparse.ArgumentTypeError(f"expected an exact rational P/Q, got {text!r}")
    return Fraction(text.replace(" ", ""))


_NEG_RATIONAL = re.compile(r"^-\d+/\d+$")


def _glue_negative_values(argv: list[str]) -> list[str]:
    # argparse takes "-1/3" for an option; attach it to the preceding flag
    out: list[str] = []
    for tok in argv:
        if _NEG_RATIONAL.match(tok) and out and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


class _Report:
    def __init__(self, command: str, inputs: dict):
        self.command = command
        self.inputs = inputs
        self.results: list[dict] = []

    def add(self, check: str, ok: bool, payload: dict | None = None, status: str | None = None):
        self.results.append({"check": check, "status": status or ("pass" if ok else "fail"),
                             "payload": payload or {}})

    @property
    def status(self) -> str:
        states = {r["status"] for r in self.results}
        if "error" in states:
            return "error"
        return "fail" if "fail" in states or not self.results else "pass"

    def to_json(self, elapsed) -> dict:
        return {
            "schema": SCHEMA,
            "version": __version__,
            "command": self.command,
            "inputs": self.inputs,
            "status": self.status,
            "results": self.results,
            "elapsed": elapsed,
        }


# --------------------------------------------------------------------------
# commands


def _family_id(case: str, args) -> FamilyId:
    if case not in FAMILY_NAMES:
        raise UsageError(f"unknown case {case!r}")
    if getattr(args, "symbolic", False):
        return FamilyId(case)
    a, b, t = getattr(args, "a", None), getattr(args, "b", None), getattr(args, "t", None)
    if case == "C6":
        if a is not None:
            raise UsageError("C6 is parametrized by --t, not --a")
        return FamilyId(case, b=b, t=t)
    if t is not None:
        raise UsageError("--t applies to C6 only")
    return FamilyId(case, a, b)


def _cases(case: str) -> list[str]:
    return list(FAMILY_NAMES) if case == "all" else [case]


def cmd_verify_family(args, rep: _Report):
    for case in _cases(args.case):
        fid = _family_id(case, args)
        system = d2_residues(family_model(fid))
        bad = system.nonzero()
        rep.add(f"d2=0 {fid.label()}", not bad,
                {"nonzero_residues": [r.to_json() for r in bad], "checked": len(system.residues)})


def cmd_residues(args, rep: _Report):
    constants = load_model_file(args.model_file)
    system = d2_residues(from_constants(constants))
    bad = system.nonzero()
    rep.add("d2=0", not bad, {"residues": system.to_json(), "nonzero": len(bad)})


def cmd_relations(args, rep: _Report):
    for case in _cases(args.case):
        fid = _family_id(case, args)
        c = family(fid)
        rel = check_derived_relations(c)
        res = relation_residues(c)
        rep.add(f"relations {fid.label()}", rel.all(),
                {"relations": rel.to_json(), "residues": {k: str(v) for k, v in res.items()}})


def _point(args) -> dict:
    out = {}
    for name in ("a", "b", "t"):
        v = getattr(args, name, None)
        if v is not None:
            out[name] = v
    return out


def _realified(args):
    fid = _family_id(args.case, args)
    basis = ADAPTED_BASES.get(args.case) if getattr(args, "basis", "adapted") == "adapted" else None
    model = family_model(FamilyId(args.case))
    return fid, realify(model, _point(args), basis)


def cmd_realify(args, rep: _Report):
    fid, L = _realified(args)
    rep.add(f"realify {fid.label()}", jacobi_check(L),
            {"basis": args.basis, "algebra": L.to_json(), "jacobi": jacobi_check(L)})


def cmd_classify_lie(args, rep: _Report):
    fid, L = _realified(args)
    label = identify(L)
    payload = {"label": label, "fingerprint": invariants(L).to_json(), "algebra": L.to_json()}
    ok = args.expect is None or label == args.expect
    if args.expect is not None:
        payload["expected"] = args.expect
    rep.add(f"identify {fid.label()}", ok, payload)


def cmd_obstruction(args, rep: _Report):
    for r in obstruction(args.case, args.witness):
        ok = r.matches_factored if r.factored else True
        rep.add(f"stokes {args.case} {r.witness}", ok, r.to_json())


def cmd_lattice_search(args, rep: _Report):
    if args.m is not None:
        args.m_min = args.m_max = args.m
    if args.n is not None:
        args.n_min = args.n_max = args.n
    if None in (args.m_min, args.m_max, args.n_min, args.n_max):
        raise UsageError("give --m/--n or the full --m-min/--m-max/--n-min/--n-max range")
    certs, rejects = lattice_scan((args.m_min, args.m_max), (args.n_min, args.n_max), args.k, args.precision)
    for cert in certs:
        rep.add(f"lattice m={cert.m} n={cert.n} k={cert.k}", verify_certificate(cert), cert.to_json())
    rep.add("rejections", True, {"rejected": [r.to_json() for r in rejects]})
    if not certs:
        rep.add("certificates found", False, {"count": 0})


def _chart_source(name: str) -> dict:
    path = Path(name)
    if path.exists():
        return load_chart(path)
    stem = path.name if path.name.endswith(".json") else path.name + ".json"
    for item in fixture_charts("all"):
        if item["file"] == stem:
            return item
    raise UsageError(f"no chart file {name!r} (bundled: {', '.join(c['file'] for c in fixture_charts('all'))})")


def cmd_coords_check(args, rep: _Report):
    src = _chart_source(args.chart)
    case = args.case or src.get("case")
    if case is None:
        raise UsageError("chart file names no case; pass --case")
    point = dict(src["point"])
    if args.symbolic:
        point = {k: v for k, v in point.items() if not _RATIONAL.match(str(v))}
    for name in ("a", "b"):
        v = getattr(args, name)
        if v is not None:
            point[name] = v
    report = check_local_model(src["chart"], src["omega1"], src["omega2"], case,
                               {k: (str(v) if isinstance(v, Fraction) else v) for k, v in point.items()},
                               src["name"])
    payload = report.to_json()
    payload["point"] = {k: str(v) for k, v in point.items()}
    rep.add(f"chart {src['name']}", report.ok, payload)


# --------------------------------------------------------------------------
# argument parsing


def _common(sub_default: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    kw = {"default": argparse.SUPPRESS} if sub_default else {}
    p.add_argument("--json", action="store_true", help="print a JSON report", **kw)
    p.add_argument("--quiet", action="store_true", help="suppress text output", **kw)
    p.add_argument("--timing", action="store_true", help="record elapsed seconds in the report", **kw)
    return p


def _add_point(p, c6: bool = True):
    p.add_argument("--a", type=rational, help="exact rational P/Q")
    p.add_argument("--b", type=rational, help="exact rational P/Q")
    if c6:
        p.add_argument("--t", type=rational, help="C6 circle parameter: cos=(1-t^2)/(1+t^2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="engelcert", parents=[_common(False)],
                                     description="Exact checks for homogeneous complex Engel structures.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common(True)
    cases = list(FAMILY_NAMES)

    p = sub.add_parser("verify-family", parents=[common], help="certify d^2 = 0 for a family")
    p.add_argument("--case", required=True, choices=cases + ["all"])
    g = p.add_mutually_exclusive_group()
    g.add_argument("--symbolic", action="store_true")
    _add_point(p)
    p.set_defaults(func=cmd_verify_family)

    p = sub.add_parser("residues", parents=[common], help="all d^2 residues of a model file")
    p.add_argument("--model-file", required=True)
    p.set_defaults(func=cmd_residues)

    p = sub.add_parser("relations", parents=[common], help="check the three derived relations")
    p.add_argument("--case", required=True, choices=cases + ["all"])
    p.add_argument("--symbolic", action="store_true")
    _add_point(p)
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("realify", parents=[common], help="real structure constants at a point")
    p.add_argument("--case", required=True, choices=cases)
    _add_point(p)
    p.add_argument("--basis", choices=["adapted", "identity"], default="adapted")
    p.set_defaults(func=cmd_realify)

    p = sub.add_parser("classify-lie", parents=[common], help="identify the real Lie algebra")
    p.add_argument("--case", required=True, choices=cases)
    _add_point(p)
    p.add_argument("--basis", choices=["adapted", "identity"], default="adapted")
    p.add_argument("--expect", help="fail unless the label matches")
    p.set_defaults(func=cmd_classify_lie)

    p = sub.add_parser("obstruction", parents=[common], help="Stokes obstruction factors")
    p.add_argument("--case", required=True, choices=cases)
    p.add_argument("--witness", help="3-form word such as w1^w2bar^w2")
    p.set_defaults(func=cmd_obstruction)

    p = sub.add_parser("lattice-search", parents=[common], help="search C2 lattice certificates")
    for name in ("m-min", "m-max", "n-min", "n-max", "m", "n"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--precision", type=int, default=128, help="working precision in bits (>= 64)")
    p.set_defaults(func=cmd_lattice_search)

    p = sub.add_parser("coords-check", parents=[common], help="verify a coordinate coframing")
    p.add_argument("--chart", required=True, help="chart JSON file or bundled chart name")
    p.add_argument("--case", choices=cases)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--symbolic", action="store_true", help="drop numeric parameter values of the chart file")
    _add_point(p, c6=False)
    p.set_defaults(func=cmd_coords_check)
    return parser


def _inputs(args) -> dict:
    skip = {"func", "json", "quiet", "timing", "command"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip or v is None or v is False:
            continue
        out[k] = str(v) if isinstance(v, Fraction) else v
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_negative_values(list(sys.argv[1:] if argv is None else argv)))
    except SystemExit as exc:
        return int(exc.code or 0)
    as_json = getattr(args, "json", False)
    quiet = getattr(args, "quiet", False)
    rep = _Report(args.command, _inputs(args))
    start = time.perf_counter()
    code = 0
    try:
        args.func(args, rep)
    except (UsageError, ParseError, ValueError, KeyError, FileNotFoundError) as exc:
        rep.add("input", False, {"error": f"{type(exc).__name__}: {exc}"}, status="error")
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        rep.add("internal", False, {"error": f"{type(exc).__name__}: {exc}"}, status="error")
    elapsed = round(time.perf_counter() - start, 6) if getattr(args, "timing", False) else None
    status = rep.status
    code = {"pass": 0, "fail": 1, "error": 2}[status]
    if as_json:
        print(json.dumps(rep.to_json(elapsed), indent=2))
    elif not quiet:
        for r in rep.results:
            line = f"{r['status'].upper():5s} {r['check']}"
            detail = _summary(r)
            print(line + (f"  {detail}" if detail else ""))
        n = len(rep.results)
        print(f"{status.upper()} ({n} check{'' if n == 1 else 's'})")
    return code


def _summary(result: dict) -> str:
    p = result["payload"]
    if "error" in p:
        return p["error"]
    if "label" in p:
        return p["label"]
    if "factor" in p:
        return f"factor {p['factor']}; vanishes when {p['vanishing_locus']}"
    if "q_side" in p:
        return f"q={p['q'][:22]} side={p['q_side']}"
    if "nonzero_residues" in p and p["nonzero_residues"]:
        return f"{len(p['nonzero_residues'])} nonzero residues"
    if "residues" in p and isinstance(p["residues"], list) and p.get("ok") is False:
        bad = [r for r in p["residues"] if r["verdict"] != "zero"]
        return f"{len(bad)} nonzero residues, first {bad[0]['equation']} {bad[0]['component']}"
    return ""


if __name__ == "__main__":
    sys.exit(main())
