"""Command-line entry point: ``froglab <subcommand> [flags]``.

Exit codes: 0 success, 1 a check or CLT threshold failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys

from . import analysis, oracle, simulate, stats

LEMMAS = ("ws", "var", "wbigger", "musum", "mgf")


def _seed_default():
    raw = os.environ.get("FROGLAB_SEED")
    if raw is None:
        return 42
    try:
        return _u64(raw)
    except argparse.ArgumentTypeError:
        return 42


def _u64(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_real(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--out", default="-", help="output path, '-' for standard output")
    common.add_argument("--tolerance", type=_positive_real, default=1e-12,
                        help="bisection tolerance for q")
    common.add_argument("--threads", type=_positive, default=None,
                        help="worker threads (default: machine parallelism)")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--n", type=_positive, required=True)
    sim.add_argument("--reps", "--replicates", dest="reps", type=_positive, default=10_000)
    sim.add_argument("--seed", type=_u64, default=_seed_default())

    parser = argparse.ArgumentParser(prog="froglab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", parents=[common], help="model constants q, mu_r, sigma, kappa")

    p = sub.add_parser("simulate", parents=[common, sim], help="per-replicate outcomes")
    p.add_argument("--mode", choices=simulate.MODES, default="level")

    p = sub.add_parser("oracle", parents=[common], help="exact law of V_inf")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--cap", type=_positive, default=oracle.DEFAULT_CAP)

    p = sub.add_parser("clt", parents=[common, sim], help="CLT reproduction report")
    p.add_argument("--mode", choices=("chain", "level"), default="level")
    p.add_argument("--t-mean", type=_positive_real, default=stats.CltThresholds.mean)
    p.add_argument("--t-sd", type=_positive_real, default=stats.CltThresholds.sd)
    p.add_argument("--t-ks", type=_positive_real, default=stats.CltThresholds.ks)
    p.add_argument("--dump-z", metavar="PATH", help="write replicate,z CSV of standardized samples")

    sub.add_parser("events", parents=[common, sim], help="frequencies of B0, B1, B2")

    p = sub.add_parser("verify", parents=[common], help="deterministic lemma checks")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--lemma", choices=LEMMAS + ("all",), default="all")
    p.add_argument("--grid", type=_positive, default=64, help="grid size per axis for the MGF check")
    return parser


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit(out, payload):
    out.write(json.dumps(payload) + "\n")


def _cmd_constants(args, out):
    c = analysis.model_constants(args.tolerance)
    if args.format == "csv":
        out.write("name,value\n")
        for key, value in c.to_dict().items():
            out.write(f"{key},{value!r}\n")
    else:
        _emit(out, c.to_dict())
    return 0


def _cmd_simulate(args, out):
    constants = analysis.model_constants(args.tolerance)
    rows = simulate.iter_rows(args.mode, args.n, args.seed, args.reps, threads=args.threads,
                              constants=constants)
    if args.format == "csv":
        simulate.write_csv(out, args.mode, rows)
    else:
        keys = simulate.CSV_HEADERS[args.mode]
        for row in rows:
            record = dict(zip(keys, row))
            if args.mode == "level":
                record.pop("b0")
            _emit(out, record)
    return 0


def _cmd_oracle(args, out):
    law = oracle.exact_law(args.n, cap=args.cap)
    if args.format == "csv":
        law.write_csv(out)
        if args.out not in (None, "-"):
            with open(args.out + ".moments.json", "w") as fh:
                _emit(fh, law.moments_dict())
    else:
        out.write(law.to_json() + "\n")
    return 0


def _cmd_clt(args, out):
    constants = analysis.model_constants(args.tolerance)
    thresholds = stats.CltThresholds(args.t_mean, args.t_sd, args.t_ks)
    v = stats.sample_v(args.n, args.reps, args.seed, args.mode, args.threads)
    report, z = stats.clt_report(v, args.n, args.seed, args.mode, thresholds, constants)
    if args.dump_z:
        with open(args.dump_z, "w") as fh:
            fh.write("replicate,z\n")
            for i, value in enumerate(z.tolist()):
                fh.write(f"{i},{value!r}\n")
    payload = report.to_dict(constants)
    if args.format == "csv":
        out.write(",".join(payload) + "\n")
        out.write(",".join(_csv_value(x) for x in payload.values()) + "\n")
    else:
        _emit(out, payload)
    return 0 if report.passed else 1


def _cmd_events(args, out):
    if args.n < 16:
        raise _UsageError("events needs --n >= 16")
    constants = analysis.model_constants(args.tolerance)
    report = stats.run_event_experiment(args.n, args.reps, args.seed, constants, args.threads)
    payload = report.to_dict()
    if args.format == "csv":
        out.write(",".join(payload) + "\n")
        out.write(",".join(_csv_value(x) for x in payload.values()) + "\n")
    else:
        _emit(out, payload)
    return 0


def _run_lemma(name, n, grid):
    if name == "ws":
        return analysis.check_lemma_ws(n)
    if name == "var":
        return analysis.check_lemma_var(n)
    if name == "wbigger":
        return analysis.check_lemma_wbigger(n)
    if name == "musum":
        return analysis.check_mu_sum(n)
    return analysis.check_mgf_bound(grid, grid)


def _cmd_verify(args, out):
    if args.n < 2 and args.lemma != "mgf":
        raise _UsageError("verify needs --n >= 2")
    names = LEMMAS if args.lemma == "all" else (args.lemma,)
    reports = [_run_lemma(name, args.n, args.grid) for name in names]
    if args.format == "csv":
        out.write("lemma,n,lo,hi,max_slack,violations,applicable\n")
        for r in reports:
            lo, hi = r.checked_range
            out.write(f"{r.lemma},{r.n},{lo},{hi},{r.max_slack!r},{len(r.violations)},{int(r.applicable)}\n")
    else:
        for r in reports:
            _emit(out, r.to_dict())
    return 1 if any(r.violations for r in reports) else 0


def _csv_value(x):
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return repr(x)
    return str(x)


class _UsageError(Exception):
    pass


COMMANDS = {
    "constants": _cmd_constants,
    "simulate": _cmd_simulate,
    "oracle": _cmd_oracle,
    "clt": _cmd_clt,
    "events": _cmd_events,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with _output(args.out) as out:
            return COMMANDS[args.command](args, out)
    except (_UsageError, ValueError) as exc:
        print(f"froglab {args.command}: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except oracle.ResourceLimitError as exc:
        print(f"froglab {args.command}: {exc}", file=sys.stderr)
        return 2
