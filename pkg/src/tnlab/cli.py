"""Command line: ``tnlab norm``, ``tnlab verify`` and ``tnlab suite``.

Exit codes: 0 success / check passed, 1 unreadable or invalid input,
2 incompatible method or unknown check (argparse usage errors also exit 2),
3 a check or suite instance failed.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .io import (
    TensorFileError,
    config_has_seed,
    load_tensor,
    parse_suite_config,
    read_suite_text,
    write_reports,
)
from .kernels import BACKEND
from .lattice import parse_exponent
from .norms import METHODS, NORM_KINDS, IncompatibleMethodError, NormConfig, compute_norm
from .seeding import resolve_seed
from .tensor import symmetrize
from .theorems import CHECKS, run_check, run_suite, summarize, summary_line

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INCOMPATIBLE = 2
EXIT_FAILED = 3


def _seed(text: str) -> int:
    try:
        return resolve_seed(int(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _exponent(text: str) -> float:
    try:
        return parse_exponent(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tnlab", description="Injective tensor norms on finite l_p lattices.")
    parser.add_argument("--version", action="version", version=f"%(prog)s (kernels: {BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="compute one of the four injective norms of a tensor file")
    p.add_argument("file")
    p.add_argument("--norm", choices=NORM_KINDS, default="eps")
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--starts", type=_positive_int, default=NormConfig.starts)
    p.add_argument("--seed", type=_seed, default=None, help="default: $TNL_SEED, else 0")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--json", action="store_true", help="print a JSON object instead of text")

    v = sub.add_parser("verify", help="run one check on one instance")
    v.add_argument("--check", required=True, choices=sorted(CHECKS))
    v.add_argument("--p", type=_exponent, default=None, help="exponent (number or inf)")
    v.add_argument("--m", type=_positive_int, default=None, help="dimension")
    v.add_argument("--n", type=_positive_int, default=None, help="tensor order")
    v.add_argument("--diag", type=_floats, default=None, help="diagonal coefficients a_1,...,a_m")
    v.add_argument("--tensor", default=None, help="tensor file supplying the instance")
    v.add_argument("--seed", type=_seed, default=None)
    v.add_argument("--index", type=int, default=0)
    v.add_argument("--method", choices=METHODS, default="auto")
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--json", action="store_true")

    s = sub.add_parser("suite", help="run a configured grid of checks and write reports")
    s.add_argument("config", nargs="?", default=None, help="suite config (default: shipped config)")
    s.add_argument("--out", default="tnlab-report", help="output directory for report.csv and witnesses.json")
    s.add_argument("--seed", type=_seed, default=None)
    s.add_argument("--samples", type=int, default=None)
    s.add_argument("--workers", type=_positive_int, default=None)
    return parser


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_norm(args) -> int:
    try:
        tf = load_tensor(args.file)
    except TensorFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    u = tf.tensor
    if args.norm in ("s-eps", "pos-s-eps"):
        if tf.symmetric or u.is_symmetric:
            u = tf.symmetric_tensor()
        else:
            print("note: tensor is not symmetric; using its symmetrization", file=sys.stderr)
            u = symmetrize(u)
    config = NormConfig(starts=args.starts, seed=resolve_seed(args.seed), workers=args.workers)
    try:
        est = compute_norm(u, args.norm, args.method, config)
    except IncompatibleMethodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    if args.json:
        _print_json(est.to_dict())
        return EXIT_OK
    print(f"norm:     {est.kind}")
    print(f"value:    {est.value!r}")
    print(f"method:   {est.method}")
    print(f"rigor:    {est.rigor}")
    print(f"starts:   {est.starts}")
    print(f"iters:    {est.iterations}")
    print(f"gap:      {'-' if est.gap is None else repr(est.gap)}")
    for j, c in enumerate(est.certificates, 1):
        print(f"x*_{j}:     {c.to_list()}")
    return EXIT_OK


def cmd_verify(args) -> int:
    data = {}
    p, m, n = args.p, args.m, args.n
    if args.tensor is not None:
        try:
            tf = load_tensor(args.tensor)
        except TensorFileError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        t = tf.tensor
        p = t.space.exponent if p is None else p
        m = t.dim if m is None else m
        n = t.order if n is None else n
        data["tensor"] = t
        weights = t.space.weights
    else:
        weights = None
    if args.diag is not None:
        if m is None:
            m = len(args.diag)
        if len(args.diag) != m:
            print(f"error: --diag: expected {m} values, got {len(args.diag)}", file=sys.stderr)
            return EXIT_INPUT
        data["diag"] = args.diag
    p = 2.0 if p is None else p
    m = 2 if m is None else m
    n = 2 if n is None else n
    try:
        report = run_check(args.check, p, m, n, resolve_seed(args.seed), args.index, args.method, args.tol,
                           weights=weights, data=data)
    except IncompatibleMethodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        _print_json(report.to_dict())
    else:
        inst = report.instance
        print(f"check {report.check_id}: {'PASS' if report.passed else 'FAIL'}")
        print(f"  instance: p={inst['p']} m={inst['m']} n={inst['n']} seed={inst['seed']}")
        for k, val in report.quantities.items():
            print(f"  {k} = {val!r}")
        print(f"  tolerance = {report.tolerance!r}")
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_suite(args) -> int:
    try:
        text = read_suite_text(args.config)
        config = parse_suite_config(text)
    except TensorFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    elif not config_has_seed(text):
        overrides["seed"] = resolve_seed(None)
    if args.samples is not None:
        overrides["samples"] = args.samples
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        try:
            config = replace(config, **overrides)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    try:
        reports = run_suite(config)
    except IncompatibleMethodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    csv_path, json_path = write_reports(reports, args.out)
    print(summary_line(reports))
    first = summarize(reports)["first_failure"]
    if first is not None:
        inst = first["instance"]
        print(f"first failure: {first['check_id']} p={inst['p']} m={inst['m']} n={inst['n']} "
              f"seed={inst['seed']} index={inst['index']}")
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_FAILED if first is not None else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"norm": cmd_norm, "verify": cmd_verify, "suite": cmd_suite}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
