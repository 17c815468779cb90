"""Command-line front end.

Subcommands: expand, eval, orbit, match, interval, scan, member,
gen-members, entropy, curve, coverage, dim.  Exact values are accepted as
"p/q", "(a+b*sqrt(d))/c", an expansion literal "[0;1,2,(3)]", or the alias
"g"; a decimal literal is treated as inexact and can only produce verdicts
certified for every parameter within its last printed digit.

Exit codes: 0 success, 1 domain/input error (JSON error object on stdout),
2 usage, 70 internal self-check failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction

from . import analysis, bifurcation, matching
from .cfdyn import FamilyKind, orbit
from .errors import AlphaCFError, InternalDisagreementError, StateViolationError
from .exactnum import (
    GOLDEN,
    QuadraticNumber,
    RcfExpansion,
    parse_value,
    rcf_eval,
    rcf_expand,
)

SCHEMA = "alpha-cf/1"

_DECIMAL_RE = re.compile(r"^\s*-?\d*\.\d+\s*$")

_FAMILIES = {
    "ti": FamilyKind.TANAKA_ITO,
    "nakada": FamilyKind.NAKADA,
    "gauss": FamilyKind.GAUSS,
}


class ParsedAlpha:
    def __init__(self, value, inexact=False, radius=Fraction(0)):
        self.value = value
        self.inexact = inexact
        self.radius = radius


def parse_alpha(text: str) -> ParsedAlpha:
    text = text.strip()
    if text == "g":
        return ParsedAlpha(GOLDEN)
    if _DECIMAL_RE.match(text):
        places = len(text.split(".")[1])
        v = Fraction(text)
        return ParsedAlpha(v, inexact=True, radius=Fraction(1, 2 * 10**places))
    return ParsedAlpha(parse_value(text))


def _emit(payload: dict, fmt: str, csv_rows=None, csv_header=None) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if csv_header:
            w.writerow(csv_header)
        for row in csv_rows or []:
            w.writerow(row)
        return buf.getvalue().rstrip("\n")
    lines = []
    for k, v in payload.items():
        if k == "schema":
            continue
        lines.append(f"{k}: {v}")
    return "\n".join(lines)


def _exact_and_float(v) -> dict:
    q = QuadraticNumber._coerce(v)
    return {"exact": q.exact_str(), "float": float(q)}


def cmd_expand(args, fmt):
    a = parse_alpha(args.value)
    if a.inexact:
        raise AlphaCFError("expand needs an exact value")
    e = rcf_expand(a.value if isinstance(a.value, QuadraticNumber)
                   else QuadraticNumber.from_rational(a.value))
    payload = {"schema": SCHEMA, "value": _exact_and_float(a.value),
               "expansion": str(e)}
    if fmt == "human":
        return str(e)
    return _emit(payload, fmt, [[str(e)]], ["expansion"])


def cmd_eval(args, fmt):
    e = RcfExpansion.parse(args.expansion)
    v = rcf_eval(e)
    payload = {"schema": SCHEMA, "expansion": str(e), "value": _exact_and_float(v)}
    if fmt == "human":
        return f"{v.exact_str()} ~ {float(v)}"
    return _emit(payload, fmt, [[v.exact_str(), float(v)]], ["exact", "float"])


def cmd_orbit(args, fmt):
    a = parse_alpha(args.alpha)
    x0 = parse_alpha(args.x0)
    if a.inexact or x0.inexact:
        raise AlphaCFError("orbit needs exact inputs")
    fam = _FAMILIES[args.family]
    res = orbit(fam, a.value, x0.value, args.n)
    rows = [
        [p.index, QuadraticNumber._coerce(p.value).exact_str(),
         "" if p.digit is None else p.digit, float(p.value)]
        for p in res.points
    ]
    payload = {
        "schema": SCHEMA,
        "family": fam.value,
        "alpha": _exact_and_float(a.value),
        "points": [
            {"n": p.index, "value": _exact_and_float(p.value),
             "digit": p.digit, "at_discontinuity": p.at_discontinuity}
            for p in res.points
        ],
        "cycle_entry": res.cycle_entry,
        "cycle_period": res.cycle_period,
        "absorbed_at": res.absorbed_at,
    }
    if fmt == "json":
        return _emit(payload, fmt)
    return _emit(payload, "csv", rows, ["n", "value", "digit", "approx"])


def _matched_payload(v: matching.MatchVerdict) -> dict:
    out = {
        "schema": SCHEMA,
        "outcome": {"matched": "matched", "bifurcation": "in-bifurcation-set",
                    "undecided": "undecided"}[v.outcome],
        "termination": v.termination,
        "reflected": v.reflected,
        "boundary": v.boundary,
    }
    if v.outcome == "matched":
        out.update({"M": v.M, "N": v.N, "index": v.index,
                    "m": v.m, "epsilon": v.epsilon})
    return out


def cmd_match(args, fmt):
    a = parse_alpha(args.alpha)
    if not a.inexact:
        v = matching.detect_matching(a.value, args.budget)
        payload = _matched_payload(v)
        payload["inexact"] = False
    else:
        lo, hi = a.value - a.radius, a.value + a.radius
        reflected = False
        if hi < Fraction(1, 2):
            lo, hi, reflected = 1 - hi, 1 - lo, True
        verdict = bifurcation.membership_interval(lo, hi, min(args.budget, 1000))
        payload = {"schema": SCHEMA, "inexact": True, "reflected": reflected}
        if verdict.member == "no":
            m = verdict.witness["n"]
            eps = verdict.witness["epsilon"]
            M = m + 2 - (1 - eps) // 2
            N = m + 2 + (1 - eps) // 2
            if reflected:
                M, N = N, M
            payload.update({"outcome": "matched", "M": M, "N": N,
                            "index": M - N, "m": m, "epsilon": eps})
        else:
            payload.update({"outcome": "undecided",
                            "termination": verdict.termination})
    if fmt == "human":
        return "\n".join(f"{k}: {v}" for k, v in payload.items() if k != "schema")
    return _emit(payload, fmt)


def cmd_interval(args, fmt):
    a = parse_alpha(args.alpha)
    if a.inexact:
        payload = {"schema": SCHEMA, "inexact": True, "outcome": "undecided",
                   "reason": "interval endpoints are never fabricated from truncated input"}
        return _emit(payload, fmt)
    iv = matching.interval_from_alpha(a.value, args.budget)
    payload = {"schema": SCHEMA, **matching.interval_to_json(iv)}
    if fmt == "human":
        return "\n".join(f"{k}: {v}" for k, v in payload.items() if k != "schema")
    return _emit(payload, fmt)


_INTERVAL_COLS = ["left_exact", "left_float", "right_exact", "right_float",
                  "left_expansion", "right_expansion", "M", "N", "index",
                  "pseudocenter", "case", "n"]


def cmd_scan(args, fmt):
    lo = parse_alpha(args.lo).value
    hi = parse_alpha(args.hi).value
    res = matching.scan_intervals(lo, hi, args.max_den, threads=args.threads,
                                  budget=args.budget)
    recs = [matching.interval_to_json(iv) for iv in res.intervals]
    payload = {
        "schema": SCHEMA,
        "lo": _exact_and_float(res.lo),
        "hi": _exact_and_float(res.hi),
        "max_den": res.max_den,
        "intervals": recs,
        "members": [f"{m.numerator}/{m.denominator}" for m in res.members],
    }
    if fmt == "json":
        return _emit(payload, fmt)
    rows = [[r[c] for c in _INTERVAL_COLS] for r in recs]
    return _emit(payload, "csv", rows, _INTERVAL_COLS)


def cmd_member(args, fmt):
    a = parse_alpha(args.alpha)
    if a.inexact:
        lo, hi = a.value - a.radius, a.value + a.radius
        v = bifurcation.membership_interval(lo, hi, min(args.budget, 1000))
        payload = {
            "schema": SCHEMA, "inexact": True,
            "verdicts": {"interval": {
                "member": v.member, "witness": v.witness,
                "termination": v.termination}},
        }
        return _emit(payload, fmt)
    verdicts = bifurcation.membership(a.value, args.method, args.budget)
    payload = {
        "schema": SCHEMA,
        "inexact": False,
        "verdicts": {
            k: {"member": v.member, "witness": v.witness,
                "termination": v.termination, "boundary": v.boundary}
            for k, v in verdicts.items()
        },
    }
    if fmt == "human":
        return "\n".join(
            f"{k}: {v['member']} ({v['termination']})"
            + (f" witness={v['witness']}" if v["witness"] else "")
            for k, v in payload["verdicts"].items()
        )
    return _emit(payload, fmt)


def cmd_gen_members(args, fmt):
    if args.family == "nminus1":
        values = bifurcation.gen_rational_members(args.n_max)
        items = [{"value": f"{v.numerator}/{v.denominator}", "float": float(v)}
                 for v in values]
    elif args.family == "embed":
        base = RcfExpansion.parse(args.base)
        v = bifurcation.embed_near_golden(args.n, base)
        items = [{"value": v.exact_str(), "float": float(v),
                  "expansion": str(rcf_expand(v))}]
    elif args.family == "separator":
        items = []
        for a in range(2, args.a_max + 1):
            t = bifurcation.separator_family(a)
            items.append({
                "a": a,
                "lower": _exact_and_float(t.lower),
                "separator": _exact_and_float(t.separator),
                "upper": _exact_and_float(t.upper),
            })
    else:  # pragma: no cover - argparse restricts choices
        raise AlphaCFError(f"unknown family {args.family}")
    payload = {"schema": SCHEMA, "family": args.family, "members": items}
    if fmt == "human":
        return "\n".join(json.dumps(i, sort_keys=True) for i in items)
    return _emit(payload, fmt)


def cmd_entropy(args, fmt):
    a = parse_alpha(args.alpha)
    est = analysis.estimate_entropy(_FAMILIES[args.family], float(a.value),
                                    args.n_iter, args.n_samples, args.seed)
    payload = {
        "schema": SCHEMA, "family": est.family.value, "alpha": est.alpha,
        "mean": est.mean, "stderr": est.std_error,
        "n_iter": est.n_iter, "n_samples": est.n_samples, "seed": est.seed,
    }
    row = [est.family.value, est.alpha, est.mean, est.std_error,
           est.n_iter, est.n_samples, est.seed]
    if fmt == "human":
        return f"h ~ {est.mean:.6f} +- {est.std_error:.6f} (seed {est.seed})"
    return _emit(payload, fmt, [row],
                 ["family", "alpha", "mean", "stderr", "n_iter", "n_samples", "seed"])


def cmd_curve(args, fmt):
    fams = [_FAMILIES[f] for f in args.families.split(",") if f]
    ests = analysis.entropy_curve(fams, args.lo_f, args.hi_f, args.step,
                                  args.n_iter, args.n_samples, args.seed)
    rows = [[e.family.value, e.alpha, e.mean, e.std_error, e.n_iter,
             e.n_samples, e.seed] for e in ests]
    payload = {"schema": SCHEMA, "points": [
        {"family": e.family.value, "alpha": e.alpha, "mean": e.mean,
         "stderr": e.std_error, "seed": e.seed} for e in ests]}
    if fmt == "json":
        return _emit(payload, fmt)
    return _emit(payload, "csv", rows,
                 ["family", "alpha", "mean", "stderr", "n_iter", "n_samples", "seed"])


def cmd_coverage(args, fmt):
    lo = parse_alpha(args.lo).value
    hi = parse_alpha(args.hi).value
    rep = analysis.coverage(args.max_den, lo, hi)
    payload = {
        "schema": SCHEMA, "max_den": rep.max_den, "lo": rep.lo, "hi": rep.hi,
        "covered": rep.covered, "fraction": rep.fraction,
        "interval_count": rep.interval_count,
    }
    if fmt == "human":
        return (f"coverage {rep.fraction:.6f} of [{rep.lo:.6f}, {rep.hi:.6f}] "
                f"by {rep.interval_count} intervals (max_den {rep.max_den})")
    return _emit(payload, fmt,
                 [[rep.max_den, rep.lo, rep.hi, rep.fraction, rep.interval_count]],
                 ["max_den", "lo", "hi", "fraction", "interval_count"])


def cmd_dim(args, fmt):
    lo = parse_alpha(args.lo).value
    hi = parse_alpha(args.hi).value
    scales = analysis.dyadic_scales(lo, hi, count=args.scales,
                                    first_exp=args.first_exp)
    est = analysis.boxcount_dimension(lo, hi, args.max_den, scales)
    payload = {
        "schema": SCHEMA, "lo": est.lo, "hi": est.hi, "max_den": est.max_den,
        "scales": list(est.scales), "counts": list(est.counts),
        "slope": est.slope, "r2": est.r2, "note": est.note,
    }
    rows = [[est.lo, est.hi, s, c, est.slope, est.r2]
            for s, c in zip(est.scales, est.counts)]
    if fmt == "human":
        return f"slope {est.slope:.4f} (r2 {est.r2:.4f}) counts {est.counts}"
    return _emit(payload, fmt, rows, ["lo", "hi", "scale", "count", "slope", "r2"])


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "human"],
                        default=argparse.SUPPRESS)
    common.add_argument("--json", action="store_const", dest="format",
                        const="json", default=argparse.SUPPRESS)
    common.add_argument("--csv", action="store_const", dest="format",
                        const="csv", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="alpha-cf", description=__doc__,
                                parents=[common],
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    subparsers = p.add_subparsers(dest="verb", required=True)

    class _Sub:
        @staticmethod
        def add_parser(name, **kw):
            return subparsers.add_parser(name, parents=[common], **kw)

    sub = _Sub()

    s = sub.add_parser("expand", help="continued fraction digits of an exact value")
    s.add_argument("value")
    s = sub.add_parser("eval", help="exact value of an expansion literal")
    s.add_argument("expansion")
    s = sub.add_parser("orbit", help="exact orbit dump")
    s.add_argument("alpha")
    s.add_argument("x0")
    s.add_argument("--family", choices=list(_FAMILIES), default="ti")
    s.add_argument("--n", type=int, default=20)
    s = sub.add_parser("match", help="matching verdict for a parameter")
    s.add_argument("alpha")
    s = sub.add_parser("interval", help="matching interval containing alpha")
    s.add_argument("alpha")
    s = sub.add_parser("scan", help="all matching intervals in a range")
    s.add_argument("--lo", default="g")
    s.add_argument("--hi", default="1")
    s.add_argument("--max-den", type=int, required=True)
    s = sub.add_parser("member", help="bifurcation-set membership")
    s.add_argument("alpha")
    s.add_argument("--method", choices=["talpha", "tg", "gauss", "all"],
                   default="all")
    s = sub.add_parser("gen-members", help="constructive member generators")
    s.add_argument("--family", choices=["nminus1", "embed", "separator"],
                   required=True)
    s.add_argument("--n-max", type=int, default=10)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--base", default="[0;(3)]")
    s.add_argument("--a-max", type=int, default=4)
    s = sub.add_parser("entropy", help="entropy estimate at one parameter")
    s.add_argument("alpha")
    s.add_argument("--family", choices=list(_FAMILIES), default="ti")
    s.add_argument("--n-iter", type=int, default=10_000)
    s.add_argument("--n-samples", type=int, default=1000)
    s = sub.add_parser("curve", help="entropy curve over a parameter grid")
    s.add_argument("--lo", dest="lo_f", type=float, required=True)
    s.add_argument("--hi", dest="hi_f", type=float, required=True)
    s.add_argument("--step", type=float, default=0.01)
    s.add_argument("--families", default="ti,nakada")
    s.add_argument("--n-iter", type=int, default=3000)
    s.add_argument("--n-samples", type=int, default=200)
    s = sub.add_parser("coverage", help="covered fraction of a range")
    s.add_argument("--max-den", type=int, required=True)
    s.add_argument("--lo", default="g")
    s.add_argument("--hi", default="1")
    s = sub.add_parser("dim", help="box-counting slope of the uncovered set")
    s.add_argument("--lo", default="g")
    s.add_argument("--hi", default="1")
    s.add_argument("--max-den", type=int, required=True)
    s.add_argument("--scales", type=int, default=6)
    s.add_argument("--first-exp", type=int, default=4)
    return p


_DEFAULT_FORMATS = {
    "expand": "human", "eval": "human", "orbit": "csv", "match": "human",
    "interval": "json", "scan": "json", "member": "human",
    "gen-members": "json", "entropy": "human", "curve": "csv",
    "coverage": "human", "dim": "human",
}

_HANDLERS = {
    "expand": cmd_expand, "eval": cmd_eval, "orbit": cmd_orbit,
    "match": cmd_match, "interval": cmd_interval, "scan": cmd_scan,
    "member": cmd_member, "gen-members": cmd_gen_members,
    "entropy": cmd_entropy, "curve": cmd_curve, "coverage": cmd_coverage,
    "dim": cmd_dim,
}


_GLOBAL_DEFAULTS = {"format": None, "seed": 20240501, "threads": 1,
                    "budget": 10_000}


def run(argv=None) -> tuple[int, str]:
    parser = build_parser()
    args = parser.parse_args(argv)
    # the shared flags use SUPPRESS defaults (so a pre-verb flag survives the
    # subparser pass); fill the fallbacks here
    for key, val in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, val)
    fmt = args.format or _DEFAULT_FORMATS[args.verb]
    try:
        return 0, _HANDLERS[args.verb](args, fmt)
    except (StateViolationError, InternalDisagreementError, AssertionError) as e:
        return 70, json.dumps(
            {"schema": SCHEMA, "error": {"kind": "internal", "message": str(e)}},
            sort_keys=True)
    except (AlphaCFError, ValueError) as e:
        return 1, json.dumps(
            {"schema": SCHEMA,
             "error": {"kind": type(e).__name__, "message": str(e)}},
            sort_keys=True)


def main(argv=None) -> int:
    code, text = run(argv)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
