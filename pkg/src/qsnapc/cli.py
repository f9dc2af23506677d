"""Command line front end: ``qsnapc gen|compile|verify|sweep``.

Statistics go to stdout as ``key=value`` lines. Exit codes: 0 success,
2 usage error, 3 numerical or validation failure, 4 malformed file,
5 unsupported file version.
"""
import argparse
import math
import os
import sys
import time

import numpy as np

from . import io as qio
from .decompose import decompose, matrix_checksum, plan_stats
from .errors import (FormatError, InsufficientDataError, InvalidArgumentError,
                     InvalidDimensionError, NonUnitaryInputError, QsnapcError,
                     UnsupportedVersionError)
from .synth import SynthesisOptions, sequence_stats, synthesize
from .targets import TargetSpec, build_target, default_active_levels
from .verify import clamp, fit_slope, infidelity_vs_target, sweep_givens, sweep_qft

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FAILURE = 3
EXIT_FORMAT = 4
EXIT_VERSION = 5


class UsageError(QsnapcError):
    pass


class ValidationFailure(QsnapcError):
    pass


def _emit(key, value):
    if isinstance(value, float):
        value = repr(value)
    elif isinstance(value, bool):
        value = "true" if value else "false"
    print(f"{key}={value}")


def parse_int_list(text):
    """Parse ``"0..13"``, ``"1,2,4"`` or mixtures like ``"0..3,10"``."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("..")
        try:
            if sep:
                a, b = int(lo), int(hi)
                if b < a:
                    raise UsageError(f"empty range {part!r}")
                values.extend(range(a, b + 1))
            else:
                values.append(int(part))
        except ValueError:
            raise UsageError(f"cannot parse integer list {text!r}") from None
    if not values:
        raise UsageError(f"empty integer list {text!r}")
    return values


def parse_window(text):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"window must be 'lo,hi', got {text!r}") from None
    if not lo < hi:
        raise UsageError(f"window must satisfy lo < hi, got {text!r}")
    return lo, hi


def cmd_gen(args):
    if args.kind == "qft":
        if args.n is None:
            raise UsageError("gen qft requires --n")
        dim = args.dim if args.dim is not None else args.n
        spec = TargetSpec("qft", args.n, dim)
    else:
        if args.dim is None:
            raise UsageError("gen haar requires --dim")
        spec = TargetSpec("haar", args.n if args.n is not None else args.dim, args.dim, args.seed)
    U = build_target(spec)
    qio.write_matrix(args.out, U)
    _emit("kind", spec.kind)
    _emit("N", spec.N)
    _emit("dim", spec.dim)
    _emit("checksum", matrix_checksum(U))
    return EXIT_OK


def cmd_compile(args):
    U = qio.read_matrix(args.input)
    prune_tol = None if args.no_prune else args.prune_tol
    options = SynthesisOptions(m=args.m, merge=not args.no_merge, prune_tol=prune_tol)
    t0 = time.perf_counter()
    try:
        plan = decompose(U, unitarity_tol=args.unitarity_tol, prune_tol=prune_tol)
    except NonUnitaryInputError as exc:
        raise ValidationFailure(f"{exc} (unitarity_deviation={exc.deviation!r})") from None
    t1 = time.perf_counter()
    seq = synthesize(plan, options)
    t2 = time.perf_counter()
    qio.write_sequence(args.out, seq, options, plan.source_checksum)
    if args.plan_out:
        qio.write_plan(args.plan_out, plan)
    _emit("dim", plan.dim)
    _emit("m", options.m)
    _emit("merge", options.merge)
    _emit("source_checksum", plan.source_checksum)
    for key, value in plan_stats(plan).as_dict().items():
        _emit(key, value)
    for key, value in sequence_stats(seq).as_dict().items():
        _emit(key, value)
    _emit("decompose_seconds", t1 - t0)
    _emit("synthesize_seconds", t2 - t1)
    _emit("compile_seconds", t2 - t0)
    return EXIT_OK


def cmd_verify(args):
    seq, options, seq_checksum = qio.read_sequence(args.sequence)
    target = qio.read_matrix(args.target)
    if target.shape != (seq.dim, seq.dim):
        raise ValidationFailure(
            f"dimension mismatch: sequence dim {seq.dim}, target dim {target.shape[0]}")
    t0 = time.perf_counter()
    eps = infidelity_vs_target(seq, target)
    t1 = time.perf_counter()
    target_checksum = matrix_checksum(target)
    stats = sequence_stats(seq)
    _emit("dim", seq.dim)
    _emit("m", options.m)
    _emit("infidelity_raw", eps)
    _emit("infidelity_clamped", clamp(eps))
    _emit("gate_count", stats.gates)
    _emit("snap_count", stats.snaps)
    _emit("disp_count", stats.displacements)
    _emit("source_checksum", seq_checksum or "-")
    _emit("target_checksum", target_checksum)
    _emit("checksum_match", seq_checksum == target_checksum)
    _emit("simulate_seconds", t1 - t0)
    _emit("budget", args.budget)
    passed = eps < args.budget
    _emit("pass", passed)
    return EXIT_OK if passed else EXIT_FAILURE


def cmd_sweep(args):
    jobs = args.jobs
    if args.experiment == "givens":
        if args.theta_grid < 2 or not 0 < args.theta_min < args.theta_max:
            raise UsageError("theta grid needs >= 2 points and 0 < theta-min < theta-max")
        ks = parse_int_list(args.k) if args.k else list(range(args.dim - 2))
        thetas = np.geomspace(args.theta_min, args.theta_max, args.theta_grid)
        records = sweep_givens(args.dim, ks, thetas, jobs=jobs)
        qio.write_sweep_csv(args.out, records, timings=not args.no_timings)
        _emit("records", len(records))
        slopes = []
        for k in sorted(set(r.k for r in records)):
            try:
                fit = fit_slope([r for r in records if r.k == k], "theta")
            except InsufficientDataError:
                continue
            slopes.append(fit.slope)
            _emit(f"slope_k{k}", fit.slope)
        if slopes:
            _emit("slope_min", min(slopes))
            _emit("slope_max", max(slopes))
    else:
        n = args.n if args.n is not None else default_active_levels(args.dim)
        ms = parse_int_list(args.m)
        window = parse_window(args.fit_window)
        records = sweep_qft(n, args.dim, ms, jobs=jobs, merge=not args.no_merge)
        qio.write_sweep_csv(args.out, records, timings=not args.no_timings)
        _emit("records", len(records))
        _emit("fit_window", f"{window[0]:g},{window[1]:g}")
        try:
            fit = fit_slope(records, "m", window)
        except InsufficientDataError as exc:
            _emit("slope", "nan")
            print(f"qsnapc: {exc}", file=sys.stderr)
        else:
            _emit("slope", fit.slope)
            _emit("r_squared", fit.r_squared)
    return EXIT_OK


def _default_jobs():
    raw = os.environ.get("QSNAPC_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qsnapc",
        description="Compile qudit unitaries into SNAP and displacement gate sequences.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a benchmark target matrix")
    gen.add_argument("kind", choices=["qft", "haar"])
    gen.add_argument("--n", type=int, help="active levels (QFT size)")
    gen.add_argument("--dim", type=int, help="full qudit dimension")
    gen.add_argument("--seed", type=int, default=0, help="seed for haar targets")
    gen.add_argument("-o", "--out", required=True)
    gen.set_defaults(func=cmd_gen)

    comp = sub.add_parser("compile", help="compile a matrix file into a gate sequence")
    comp.add_argument("input")
    comp.add_argument("-o", "--out", required=True)
    comp.add_argument("--m", type=int, default=1, help="split factor per rotation")
    comp.add_argument("--no-merge", action="store_true", help="keep adjacent same-type gates")
    comp.add_argument("--unitarity-tol", type=float, default=1e-10)
    comp.add_argument("--prune-tol", type=float, default=1e-14)
    comp.add_argument("--no-prune", action="store_true", help="keep zero-angle steps")
    comp.add_argument("--plan-out", help="also write the SNAP/Givens plan")
    comp.set_defaults(func=cmd_compile)

    ver = sub.add_parser("verify", help="simulate a sequence and compare with a target")
    ver.add_argument("sequence")
    ver.add_argument("target")
    ver.add_argument("--budget", type=float, default=1e-2,
                     help="exit 0 only if infidelity is below this value")
    ver.set_defaults(func=cmd_verify)

    sw = sub.add_parser("sweep", help="run a scaling experiment and write CSV")
    sw.add_argument("experiment", choices=["givens", "qft"])
    sw.add_argument("--dim", type=int, required=True)
    sw.add_argument("--k", help="levels for the givens sweep, e.g. 0..13 or 0,10,30")
    sw.add_argument("--theta-grid", type=int, default=20, help="number of log-spaced angles")
    sw.add_argument("--theta-min", type=float, default=math.pi / 100)
    sw.add_argument("--theta-max", type=float, default=math.pi / 2)
    sw.add_argument("--n", type=int, help="active QFT levels (default leaves guard levels)")
    sw.add_argument("--m", default="1,2,4,8,16,32,64", help="split factors")
    sw.add_argument("--fit-window", default="8,64", help="m range used for the slope fit")
    sw.add_argument("--no-merge", action="store_true")
    sw.add_argument("--no-timings", action="store_true",
                    help="write zero timing columns so reruns are byte-identical")
    sw.add_argument("--jobs", type=int, default=_default_jobs(),
                    help="worker processes (default $QSNAPC_JOBS or 1)")
    sw.add_argument("-o", "--out", required=True)
    sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedVersionError as exc:
        code, msg = EXIT_VERSION, exc
    except FormatError as exc:
        code, msg = EXIT_FORMAT, exc
    except (UsageError, InvalidArgumentError, InvalidDimensionError) as exc:
        code, msg = EXIT_USAGE, exc
    except QsnapcError as exc:
        code, msg = EXIT_FAILURE, exc
    except OSError as exc:
        code, msg = EXIT_USAGE, exc
    print(f"qsnapc: error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
