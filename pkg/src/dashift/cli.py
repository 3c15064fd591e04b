"""``dashift`` command-line front end.

Exit codes: 0 success, 1 usage error, 2 invalid scenario or schema,
3 a checked property failed, 4 an indeterminate infinity was met.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__, verify
from .decomposition import DecompositionReport, decompose, verify_theorem1
from .divergence import dann_terms, multisource_div_bound, single_source_div_bound
from .errors import (
    DAShiftError,
    IndeterminateInfinity,
    InfiniteMismatch,
    ParamOutOfRange,
    UnknownScenario,
    ValidationError,
)
from .fairness import GroupPartition, fairness_bounds
from .invariance import check_eci, irm_eci_equivalence_report, irm_solve
from .measure import log_base
from .multisource import theorem2_report
from .risk import Loss
from .scenarios import gen
from .serialize import (
    dumps_scenario,
    envelope,
    load_extension,
    load_scenario,
    render_csv,
    render_json,
    render_md,
    save_scenario,
    to_jsonable,
)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p, ext=True):
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--format", choices=("json", "csv", "md"), help="output format (md on stdout, json with -o)")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    p.add_argument("--base", choices=("e", "2"), default="e", help="logarithm base")
    if ext:
        p.add_argument("--ext", default="uniform", help="uniform | source-marginal | file:PATH")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dashift", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"dashift {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", help="single-source risk decomposition")
    _add_common(p)
    p.add_argument("--source", help="source environment (default: first source role)")
    p.add_argument("--target", help="target environment (default: target role)")
    p.add_argument("--rep", required=True)

    p = sub.add_parser("multisource", help="multi-source bound for one representation")
    _add_common(p)
    p.add_argument("--rep", required=True)
    p.add_argument("--matrix", action="store_true", help="emit the pairwise term matrix as CSV")

    p = sub.add_parser("fairness", help="fairness bounds on covariate shift")
    _add_common(p)
    p.add_argument("--source")
    p.add_argument("--target")
    p.add_argument("--rep", required=True)
    p.add_argument("--groups", help="JSON file with a list of atom lists, or inline 'a,b;c,d'")

    p = sub.add_parser("eci", help="conditional invariance check across the sources")
    _add_common(p, ext=False)
    p.add_argument("--rep", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--envs", help="comma-separated environments (default: sources)")

    p = sub.add_parser("irm", help="exhaustive IRM over a finite class")
    _add_common(p)
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--loss", default="ce", help="ce | zero-one")
    p.add_argument("--equivalence", action="store_true", help="compare with ERM-ECI and check A2")

    p = sub.add_parser("hdiv", help="divergence bounds for every hypothesis of a class")
    _add_common(p, ext=False)
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--loss", default="zero-one")
    p.add_argument("--multi", action="store_true", help="multi-source form over all sources")
    p.add_argument("--source")

    p = sub.add_parser("dann", help="adversarial-training objective terms per hypothesis")
    _add_common(p, ext=False)
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--loss", default="zero-one")
    p.add_argument("--source")

    p = sub.add_parser("scenario", help="generate a named scenario file")
    p.add_argument("name")
    p.add_argument("--param", action="append", default=[], metavar="K=V")
    p.add_argument("-o", "--output", help="output path (default: stdout)")

    p = sub.add_parser("verify", help="run property and golden-value suites")
    p.add_argument("--seeds", default="0..499")
    p.add_argument("--suite", choices=("all",) + verify.SUITES, default="all")
    p.add_argument("--format", choices=("json", "md"))
    p.add_argument("-o", "--output")
    return ap


# -- helpers ------------------------------------------------------------------

def _emit(args, doc: dict, csv_rows=None, csv_columns=None) -> None:
    fmt = args.format or ("json" if args.output else "md")
    if fmt == "json":
        text = render_json(doc)
    elif fmt == "csv":
        if csv_rows is None:
            raise UsageError(f"{args.command} has no tabular CSV form")
        text = render_csv(csv_rows, csv_columns)
    else:
        text = render_md(doc)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _pick_env(spec, name, default):
    return spec.env(name or default)


def _parse_param(text: str):
    if "=" not in text:
        raise UsageError(f"--param expects K=V, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k, json.loads(v)
    except json.JSONDecodeError:
        return k, v


def _groups(text: str):
    path = Path(text)
    if path.exists():
        return GroupPartition.of(json.loads(path.read_text()))
    return GroupPartition.of([g.split(",") for g in text.split(";") if g])


def _decomp_rows(r: DecompositionReport) -> list:
    return [{"term": f, "symbol": sym, "value": getattr(r, f), "definition": d} for f, sym, d in r.TERMS]


# -- commands -----------------------------------------------------------------

def cmd_decompose(args, spec, ext) -> int:
    s = _pick_env(spec, args.source, spec.sources[0])
    t = _pick_env(spec, args.target, spec.target)
    r = decompose(s, t, spec.rep(args.rep), ext)
    try:
        verdict = verify_theorem1(r)
        status = EXIT_OK if verdict.passed else EXIT_VERIFY
    except InfiniteMismatch as exc:
        verdict, status = {"passed": False, "error": str(exc)}, EXIT_VERIFY
    payload = {
        "source": s.name, "target": t.name, "representation": r.representation,
        "terms": _decomp_rows(r), "decomposition_sum": r.rhs(), "check": verdict,
        "split": r.split, "notes": r.notes, "singular_extension_used": r.singular_extension_used,
    }
    _emit(args, envelope("decompose", payload, spec.name, ext.describe()),
          to_jsonable(_decomp_rows(r)), ["term", "symbol", "value", "definition"])
    return status


def cmd_multisource(args, spec, ext) -> int:
    r = theorem2_report(spec.source_set(), spec.rep(args.rep), ext)
    rows = [{"e": a, "e2": b, **v} for (a, b), v in sorted(r.pairwise.items())]
    if args.matrix and args.format is None:
        args.format = "csv"
    _emit(args, envelope("multisource", r, spec.name, ext.describe()),
          rows, ["e", "e2", "bayes_div", "kl", "cov_shift", "total"])
    if r.flags:
        return EXIT_NUMERIC
    return EXIT_OK if r.holds else EXIT_VERIFY


def cmd_fairness(args, spec, ext) -> int:
    s = _pick_env(spec, args.source, spec.sources[0])
    t = _pick_env(spec, args.target, spec.target)
    part = _groups(args.groups) if args.groups else None
    r = fairness_bounds(s, t, spec.rep(args.rep), part, ext)
    rows = [{"link": n, "lhs": lr[0], "rhs": lr[1], "holds": ok} for n, lr, ok in r.bound_chain]
    _emit(args, envelope("fairness", r, spec.name, ext.describe()), rows, ["link", "lhs", "rhs", "holds"])
    return EXIT_OK if r.certified else EXIT_VERIFY


def cmd_eci(args, spec, ext) -> int:
    envs = [spec.env(n) for n in args.envs.split(",")] if args.envs else spec.source_envs()
    r = check_eci(envs, spec.rep(args.rep), args.tol)
    rows = [{"env": a, "env2": b, "atom": g, "label": y, "gap": d} for a, b, g, y, d in r.violations]
    _emit(args, envelope("eci", r, spec.name, None), rows, ["env", "env2", "atom", "label", "gap"])
    return EXIT_OK


def cmd_irm(args, spec, ext) -> int:
    loss = Loss.parse(args.loss)
    hclass = spec.hypothesis_class(args.cls)
    envs = spec.source_envs()
    sol = irm_solve(envs, hclass, loss)
    target = spec.env(spec.target)
    from .risk import risk

    optima = [
        {"predictor": o.predictor.name, "representation": o.representation.name, "total": o.total,
         "target_risk": risk(target, o.predictor, o.representation, loss), **{f"risk_{k}": v for k, v in o.per_env.items()}}
        for o in sol.optima
    ]
    payload = {"loss": sol.loss, "feasible": sol.feasible, "feasible_count": sol.feasible_count,
               "admissible_count": sol.admissible_count, "optima": optima}
    if args.equivalence:
        payload["equivalence"] = irm_eci_equivalence_report(envs, hclass, ext)
    _emit(args, envelope("irm", payload, spec.name, ext.describe(), predictor_class=args.cls), optima)
    return EXIT_OK


def cmd_hdiv(args, spec, ext) -> int:
    loss = Loss.parse(args.loss)
    hset = spec.predictor_set(args.cls)
    if args.multi:
        reports = [multisource_div_bound(spec.source_set(), h, hset, loss) for h in hset.hypotheses]
    else:
        s = _pick_env(spec, args.source, spec.sources[0])
        reports = [single_source_div_bound(s, spec.env(spec.target), h, hset, loss) for h in hset.hypotheses]
    rows = to_jsonable(reports)
    _emit(args, envelope("hdiv-multi" if args.multi else "hdiv", {"bounds": reports}, spec.name, None,
                         predictor_class=args.cls), rows)
    if any(r.flags for r in reports):
        return EXIT_NUMERIC
    return EXIT_OK if all(r.holds for r in reports) else EXIT_VERIFY


def cmd_dann(args, spec, ext) -> int:
    loss = Loss.parse(args.loss)
    s = _pick_env(spec, args.source, spec.sources[0])
    d = dann_terms(s, spec.env(spec.target), spec.predictor_set(args.cls), loss)
    _emit(args, envelope("dann", d, spec.name, None, predictor_class=args.cls, loss=loss.value), d.rows,
          ["hypothesis", "representation", "source_risk", "d_tv", "target_risk"])
    return EXIT_OK


def cmd_scenario(args) -> int:
    params = dict(_parse_param(p) for p in args.param)
    spec = gen(args.name, **params)
    if args.output:
        save_scenario(spec, args.output)
    else:
        sys.stdout.write(dumps_scenario(spec))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        seeds = verify.parse_seeds(args.seeds)
    except ValueError as exc:
        raise UsageError(f"bad --seeds: {exc}") from None
    results = verify.run(args.suite, seeds)
    summary = {
        "suite": args.suite,
        "seeds": args.seeds,
        "passed": all(r.passed for r in results),
        "criteria": [r.as_dict() for r in results],
    }
    fmt = args.format or ("json" if args.output else "md")
    if fmt == "json":
        text = render_json(envelope("verify", summary))
    else:
        lines = [f"verify suite={args.suite} seeds={args.seeds} (dashift {__version__})"]
        for r in results:
            mark = "PASS" if r.passed else "FAIL"
            lines.append(f"[{mark}] criterion {r.criterion:>2}: {r.title} ({r.checks - len(r.failures)}/{r.checks})")
            for f in r.failures[:verify.MAX_FAILURES_LISTED]:
                lines.append(f"       - {f}")
        text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if not summary["passed"]:
        return EXIT_VERIFY
    if any(r.indeterminate for r in results):
        return EXIT_NUMERIC
    return EXIT_OK


COMMANDS = {
    "decompose": cmd_decompose, "multisource": cmd_multisource, "fairness": cmd_fairness, "eci": cmd_eci,
    "irm": cmd_irm, "hdiv": cmd_hdiv, "dann": cmd_dann,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "scenario":
            return cmd_scenario(args)
        if args.command == "verify":
            return cmd_verify(args)
        with log_base(math.e if args.base == "e" else 2.0):
            spec = load_scenario(args.scenario)
            ext = load_extension(args.ext) if hasattr(args, "ext") else None
            return COMMANDS[args.command](args, spec, ext)
    except UsageError as exc:
        print(f"dashift: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, UnknownScenario, ParamOutOfRange) as exc:
        print(f"dashift: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except IndeterminateInfinity as exc:
        print(f"dashift: indeterminate: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InfiniteMismatch as exc:
        print(f"dashift: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (DAShiftError, ValueError) as exc:
        print(f"dashift: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
