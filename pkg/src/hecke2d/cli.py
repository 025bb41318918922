"""Command line front end: ``hecke2d run|oracle|verify|suites``."""

import argparse
import csv
import io
import json
import logging
import sys

from .errors import BudgetExceeded, HeckeError, PrecisionExhausted, SingularAtPrecision
from .jobs import parse_job_file, run_job, run_oracle, validate_job
from .verify import SUITES

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("hecke2d")


def exit_code_for(exc):
    if isinstance(exc, (BudgetExceeded, PrecisionExhausted, SingularAtPrecision)):
        return EXIT_BUDGET
    return EXIT_INPUT


# ---------------------------------------------------------------------------
# rendering


def _flatten(doc, prefix=""):
    if isinstance(doc, dict):
        for k in sorted(doc):
            yield from _flatten(doc[k], f"{prefix}{k}.")
    else:
        value = doc if isinstance(doc, str) else json.dumps(doc, sort_keys=True)
        yield prefix[:-1], value


def _csv_rows(doc):
    if "table" in doc:
        yield ["i", "j", "k", "coefficient"]
        for row in doc["table"]:
            for k, c in enumerate(row["coefficients"]):
                yield [row["i"], row["j"], k, c]
    elif "report" in doc:
        yield ["case", "ok", "detail"]
        for c in doc["report"]["cases"]:
            yield [c["case"], c["ok"], c["detail"]]
    else:
        yield ["key", "value"]
        yield from ([k, v] for k, v in _flatten(doc))


def render(docs, fmt):
    if fmt == "json":
        return json.dumps(docs[0] if len(docs) == 1 else docs, sort_keys=True, indent=2) + "\n"
    out = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        for doc in docs:
            writer.writerows(_csv_rows(doc))
        return out.getvalue()
    for i, doc in enumerate(docs):
        if i:
            out.write("\n")
        for k, v in _flatten(doc):
            out.write(f"{k}: {v}\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# commands


def _overrides(args):
    keys = {"q": args.q, "n": args.n, "t1_prec": args.t1_prec, "t2_prec": args.t2_prec,
            "level": args.level, "budget": args.budget, "seed": args.seed}
    return {k: v for k, v in keys.items() if v is not None}


def _load(path):
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as ex:
        from .errors import ParseError
        raise ParseError(f"{path}: invalid JSON: {ex.msg}", ex.pos, text) from None


def _run_specs(specs, args, runner):
    docs, code = [], EXIT_OK
    for i, spec in enumerate(specs):
        for k, v in _overrides(args).items():
            setattr(spec, k, v)
        spec.parallel = args.parallel
        try:
            doc = runner(spec)
            if doc.get("ok") is False:
                code = max(code, EXIT_VERIFY)
        except HeckeError as ex:
            doc = {"op": spec.op, "job": i, "error": type(ex).__name__, "message": str(ex)}
            code = max(code, exit_code_for(ex))
        docs.append(doc)
    return docs, code


def cmd_run(args, runner=run_job):
    specs = parse_job_file(_load(args.job))
    docs, code = _run_specs(specs, args, runner)
    fmt = args.format or specs[0].format
    return render(docs, fmt), code


def cmd_oracle(args):
    return cmd_run(args, run_oracle)


def cmd_verify(args):
    params = {k: v for k, v in (("q", args.q), ("n", args.n), ("level", args.level)) if v is not None}
    job = {"op": "verify", "suite": args.suite, "params": params}
    if args.cases is not None:
        job["cases"] = args.cases
    spec = validate_job(job)
    docs, code = _run_specs([spec], args, run_job)
    return render(docs, args.format or "json"), code


def cmd_suites(args):
    docs = [{"suites": {name: s.description for name, s in SUITES.items()}}]
    return render(docs, args.format or "text"), EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, help="residue field size")
    common.add_argument("--n", type=int, help="matrix size")
    common.add_argument("--t1-prec", type=int, dest="t1_prec", help="t1-adic working precision")
    common.add_argument("--t2-prec", type=int, dest="t2_prec", help="t2-adic working precision")
    common.add_argument("--level", type=int, help="congruence level m")
    common.add_argument("--budget", type=int, help="enumeration budget")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--format", choices=("json", "text", "csv"), help="output format")
    common.add_argument("--parallel", type=int, default=0, help="worker processes for verify suites")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(prog="hecke2d", description="Exact measure, integration and Hecke algebra jobs.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", parents=[common], help="run a JSON job file ('-' for stdin)")
    p.add_argument("job")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("oracle", parents=[common], help="evaluate a measure/integrate job with the counting oracle")
    p.add_argument("job")
    p.set_defaults(func=cmd_oracle)
    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("suite")
    p.add_argument("--cases", type=int, help="number of cases")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("suites", parents=[common], help="list property suites")
    p.set_defaults(func=cmd_suites)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text, code = args.func(args)
    except HeckeError as ex:
        text = json.dumps({"error": type(ex).__name__, "message": str(ex)}, sort_keys=True) + "\n"
        code = exit_code_for(ex)
    except OSError as ex:
        text = json.dumps({"error": "OSError", "message": str(ex)}, sort_keys=True) + "\n"
        code = EXIT_INPUT
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
