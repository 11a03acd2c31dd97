"""Command-line surface: zeros, envelope, mc, construct, verify, fit.

Configuration comes from flags, optionally backed by a flat key=value file
given with --config; flags override the file and environment variables are
never consulted.  Exit codes: 0 success, 1 hard-assertion verification
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import reporting, verify
from .ensemble import (
    construct_few_zeros,
    fit_scaling,
    mc_envelope_measure,
    mc_expected_zeros,
    mc_sign_change_prob,
    mc_small_ball,
    sample_mask,
)
from .envelope import envelope_plus_set, envelope_prime_set, envelope_set
from .errors import CoslabError, ParameterError
from .poly import CoeffMask, DiffPoly, to_index_set
from .zeros import count_fast_slow, count_grid, count_total, oracle_count

POLE_CLAMP = 1e-3


def _parse_interval(text: str):
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError:
        raise ParameterError("--interval must look like a:b") from None


def _parse_sweep(text: str):
    """Sweep values: '8', '8,32,128', or '8..512 geom 4' / '8..512 lin 4'."""
    text = text.strip()
    if ".." in text:
        parts = text.split()
        if len(parts) != 3 or parts[1] not in ("geom", "lin"):
            raise ParameterError("sweep must look like 'a..b geom k' or 'a..b lin k'")
        try:
            a, b = (int(v) for v in parts[0].split(".."))
            k = int(parts[2])
        except ValueError:
            raise ParameterError("sweep endpoints and count must be integers") from None
        if k < 1 or a < 1 or b < a:
            raise ParameterError("sweep needs 1 <= a <= b and k >= 1")
        if k == 1:
            return [a]
        space = np.geomspace if parts[1] == "geom" else np.linspace
        vals = [int(round(v)) for v in space(a, b, k)]
        out = []
        for v in vals:
            if v not in out:
                out.append(v)
        return out
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise ParameterError("sweep must be an integer list or a range") from None


def _parse_floats(text: str):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ParameterError("expected a comma-separated list of numbers") from None


def _parse_threads(text: str) -> int:
    if text == "auto":
        return os.cpu_count() or 1
    try:
        v = int(text)
    except ValueError:
        raise ParameterError("--threads must be an integer or 'auto'") from None
    if v < 1:
        raise ParameterError("--threads must be positive")
    return v


# Keys each subcommand accepts from a key=value config file.
CONFIG_KEYS = {
    "zeros": {"n", "m", "mask", "mask-file", "seed", "interval", "method", "step"},
    "envelope": {"n", "m", "mask", "mask-file", "seed", "kind", "out"},
    "mc": {"kind", "n", "m", "j", "x", "center", "trials", "seed", "threads", "out"},
    "construct": {"N", "attempts", "seed", "out"},
    "verify": {"suite", "n", "m", "seed", "alpha", "r-max", "cells", "trials"},
    "fit": {"records", "out"},
}


def _load_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParameterError("config line without '=': %r" % line)
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _inject_config(argv: list) -> list:
    """Expand --config into flags, letting explicit flags win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ParameterError("--config needs a file path")
    cfg = _load_config(argv[i + 1])
    rest = argv[:i] + argv[i + 2 :]
    command = next((tok for tok in rest if not tok.startswith("-")), None)
    if command not in CONFIG_KEYS:
        raise ParameterError("--config requires a known subcommand")
    allowed = CONFIG_KEYS[command]
    for key, val in cfg.items():
        if key not in allowed:
            raise ParameterError("unknown config key %r for %s" % (key, command))
        flag = "--" + key
        if flag not in rest:
            rest = rest + [flag, val]
    return rest


def _build_mask(args) -> CoeffMask:
    given = [
        name
        for name, val in (
            ("--mask", args.mask),
            ("--mask-file", args.mask_file),
            ("--m", args.m),
        )
        if val is not None
    ]
    if len(given) > 1:
        raise ParameterError("give only one of --mask, --mask-file, --m")
    if args.mask is not None:
        if not all(c in "01" for c in args.mask):
            raise ParameterError("--mask must be a string of 0s and 1s")
        return CoeffMask(tuple(int(c) for c in args.mask))
    if args.mask_file is not None:
        with open(args.mask_file) as fh:
            bits = json.load(fh)
        return CoeffMask(tuple(bits))
    if args.m is not None:
        return sample_mask(args.m, args.seed)
    return CoeffMask.empty()


def _emit(obj: dict, path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_zeros(args) -> int:
    mask = _build_mask(args)
    if mask.m > args.n:
        raise ParameterError("--m/--mask degree %d exceeds --n %d" % (mask.m, args.n))
    f = DiffPoly(args.n, mask)
    a, b = _parse_interval(args.interval)
    if args.method == "total":
        rep = count_total(f, want_roots=args.roots)
    elif args.method == "fast_slow":
        a2 = max(a, POLE_CLAMP)
        b2 = min(b, 2.0 * math.pi - POLE_CLAMP)
        if not a2 < b2:
            raise ParameterError("--interval is empty after pole clamping")
        rep = count_fast_slow(f, (a2, b2), want_roots=args.roots)
    elif args.method == "oracle":
        rep = oracle_count(f, (max(a, POLE_CLAMP), min(b, 2.0 * math.pi - POLE_CLAMP)))
    else:
        step = args.step if args.step else math.pi / (64.0 * f.T)
        rep = count_grid(
            f,
            (max(a, POLE_CLAMP), min(b, 2.0 * math.pi - POLE_CLAMP)),
            step,
            want_roots=args.roots,
        )
    out = reporting.file_header("zeros", _echo(args, ("n", "interval", "method")))
    out["mask_degree"] = mask.m
    out["report"] = rep.to_dict()
    _emit(out)
    return 0


def cmd_envelope(args) -> int:
    mask = _build_mask(args)
    if args.kind == "base":
        iset = envelope_set(mask)
    elif args.kind == "plus":
        iset = envelope_plus_set(mask)
    else:
        if args.n is None:
            raise ParameterError("--kind prime requires --n")
        iset = envelope_prime_set(mask, args.n)
    out = reporting.file_header("envelope", _echo(args, ("kind", "n")))
    out["mask_degree"] = mask.m
    out["set"] = iset.to_dict()
    _emit(out, args.out)
    return 0


def _echo(args, names) -> dict:
    return {name: getattr(args, name.replace("-", "_")) for name in names}


def cmd_mc(args) -> int:
    threads = _parse_threads(args.threads)
    ms = _parse_sweep(args.m)
    records = []
    if args.kind == "zeros":
        if args.n is None:
            raise ParameterError("--kind zeros requires --n")
        ns = _parse_sweep(args.n)
        cells = [(n, m) for n in ns for m in ms if m <= n]
        if not cells:
            raise ParameterError("sweep has no cells with m <= n")
        for n, m in cells:
            records.append(mc_expected_zeros(n, m, args.trials, args.seed, threads))
    elif args.kind == "envelope":
        for m in ms:
            records.append(mc_envelope_measure(m, args.trials, args.seed, threads))
    elif args.kind == "signchange":
        if args.n is None:
            raise ParameterError("--kind signchange requires --n")
        for n in _parse_sweep(args.n):
            for m in ms:
                j = args.j if args.j is not None else (3 * m) // 4
                records.append(
                    mc_sign_change_prob(n, m, j, args.trials, args.seed, threads)
                )
    elif args.kind == "smallball":
        if args.x is None:
            raise ParameterError("--kind smallball requires --x")
        center = _parse_floats(args.center)
        if len(center) != 2:
            raise ParameterError("--center must be c1,c2")
        for m in ms:
            for x in _parse_floats(args.x):
                records.append(
                    mc_small_ball(m, x, center, args.trials, args.seed, threads)
                )
    params = _echo(args, ("kind", "n", "m", "j", "x", "center", "trials", "seed"))
    if args.out:
        reporting.write_jsonl(args.out, "mc", params, records)
        reporting.write_csv(args.out + ".csv", "mc", params, records)
        reporting.render_mc_figure(args.out + ".png", records, title=args.kind)
    else:
        print(json.dumps(reporting.file_header("mc", params), sort_keys=True))
        for rec in records:
            print(json.dumps(rec.to_dict(), sort_keys=True))
    return 0


def cmd_construct(args) -> int:
    if args.N < 64:
        raise ParameterError("--N must be at least 64")
    result = construct_few_zeros(args.N, args.attempts, args.seed)
    summary = reporting.file_header(
        "construct", _echo(args, ("N", "attempts", "seed"))
    )
    summary["summary"] = result.summary(args.N)
    summary["envelope_measure"] = result.envelope_measure
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(result.index_set.to_lines())
        with open(args.out + ".json", "w") as fh:
            fh.write(result.index_set.to_json() + "\n")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_verify(args) -> int:
    if args.suite == "identities":
        outcomes = verify.identity_suite(seed=args.seed)
    elif args.suite == "kernel":
        outcomes = verify.check_kernel_bounds(args.n, r_max=args.r_max, seed=args.seed)
    elif args.suite == "instance":
        if args.m is None:
            raise ParameterError("--suite instance requires --m")
        mask = sample_mask(args.m, args.seed)
        f = DiffPoly(args.n, mask)
        outcomes = [
            verify.check_roots_inside_envelope(f),
            verify.check_envelope_root_floor(f),
        ]
        if max(mask.m, 0) <= args.n ** (1.0 - args.alpha):
            outcomes.append(verify.check_sandwich(f, args.alpha))
            outcomes.extend(verify.check_short_interval_bounds(f, args.alpha))
    elif args.suite == "measure":
        cells = []
        for chunk in args.cells.split(","):
            try:
                n, m = (int(v) for v in chunk.split(":"))
            except ValueError:
                raise ParameterError("--cells must look like n:m,n:m") from None
            cells.append((n, m))
        outcomes = [verify.check_measure_stability(cells, args.trials, args.seed)]
    else:
        raise ParameterError("unknown suite %r" % args.suite)
    failed_hard = False
    for oc in outcomes:
        print(oc.to_json(sort_keys=True))
        if not oc.passed and oc.name in verify.HARD_CHECKS:
            failed_hard = True
    return 1 if failed_hard else 0


def cmd_fit(args) -> int:
    records = reporting.read_jsonl(args.records)
    fit = fit_scaling(records)
    out = reporting.file_header("fit", {"records": args.records})
    out["fit"] = fit.to_dict()
    if args.out:
        _emit(out, args.out)
        reporting.render_fit_figure(args.out + ".png", fit)
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _add_mask_flags(p) -> None:
    p.add_argument("--m", type=int, default=None, help="random mask degree")
    p.add_argument("--mask", default=None, help="explicit bit string, e.g. 101")
    p.add_argument("--mask-file", default=None, help="JSON bit array file")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coslab",
        description="Zero counting and envelope experiments for cosine polynomials",
    )
    parser.add_argument(
        "--version", action="version", version=reporting.TOOL_VERSION
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeros", help="count zeros of one polynomial")
    p.add_argument("--n", type=int, required=True)
    _add_mask_flags(p)
    p.add_argument("--interval", default="0:%.15f" % (2.0 * math.pi))
    p.add_argument(
        "--method",
        choices=("fast_slow", "oracle", "grid", "total"),
        default="fast_slow",
    )
    p.add_argument("--step", type=float, default=None, help="grid step for --method grid")
    p.add_argument("--roots", action="store_true", help="include refined root list")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("envelope", help="compute an envelope interval set")
    p.add_argument("--n", type=int, default=None, help="needed for --kind prime")
    _add_mask_flags(p)
    p.add_argument("--kind", choices=("base", "prime", "plus"), default="base")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("mc", help="Monte Carlo sweeps over (n, m) cells")
    p.add_argument(
        "--kind",
        choices=("zeros", "envelope", "signchange", "smallball"),
        required=True,
    )
    p.add_argument("--n", default=None, help="sweep, e.g. 256,512,1024")
    p.add_argument("--m", required=True, help="sweep, e.g. '8..512 geom 4'")
    p.add_argument("--j", type=int, default=None, help="window index for signchange")
    p.add_argument("--x", default=None, help="comma list of points for smallball")
    p.add_argument("--center", default="0.25,0.25", help="small-ball center c1,c2")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", default="1", help="worker count or 'auto'")
    p.add_argument("--out", default=None, help="JSONL path; CSV and PNG ride along")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("construct", help="search for an index set with few zeros")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--attempts", type=int, default=50)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default=None, help="index set path; .json rides along")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="run deterministic checker suites")
    p.add_argument(
        "--suite",
        choices=("identities", "kernel", "instance", "measure"),
        default="identities",
    )
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--r-max", type=int, default=3)
    p.add_argument("--cells", default="", help="n:m pairs for --suite measure")
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fit", help="fit the zero-count scaling model to a JSONL log")
    p.add_argument("--records", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _inject_config(argv)
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CoslabError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
