"""Command-line interface.

Subcommands emit CSV with the fixed header
variant,kappa,distance_km,mu,qber_total,q_single,p_lost,chi_s_max,rate_raw,rate
to stdout or to --out.  Exit codes: 0 success, 1 failed validation check,
2 infeasible or invalid input.
"""

from __future__ import annotations

import argparse
import os
import sys

from .attack import DEFAULT_SEED, InfeasibleError
from .channel import default_params, load_params
from .engine import compare_variants, cutoff_distance, distance_scan, format_csv, qubit_point, qubit_scan
from .protocol import Variant, make_config
from .squash import monte_carlo_check

VARIANT_CHOICES = [v.value for v in Variant]


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--out", metavar="FILE", help="write CSV here instead of stdout")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="optimizer / sampling seed (default %(default)s)")
    parser.add_argument("--threads", type=int, default=0,
                        help="worker processes for scans; 0 = all cores (default)")


def _threads(args) -> int:
    return args.threads if args.threads > 0 else (os.cpu_count() or 1)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_kappas(raw: str):
    try:
        values = [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValueError(f"bad --kappas list {raw!r}") from exc
    if not values:
        raise ValueError("empty --kappas list")
    return values


def _qber_grid(start: float, stop: float, step: float):
    if step <= 0:
        raise ValueError("--qber-step must be positive")
    values = []
    q = start
    while q <= stop + 1e-12:
        values.append(round(q, 12))
        q += step
    return values


def _distances(args):
    if args.lstep <= 0 or args.lmax < args.lmin:
        raise ValueError("need --lstep > 0 and --lmax >= --lmin")
    out = []
    d = args.lmin
    while d <= args.lmax + 1e-9:
        out.append(round(d, 9))
        d += args.lstep
    return out


def _params(args):
    params = load_params(args.preset) if args.preset else default_params()
    return params


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ubb84",
        description="Provably-secure key rates for phase-encoded BB84 with an "
                    "unbalanced interferometer, its PBS variant, and two hardware fixes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qubit-rate", help="single qubit-level key rate")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--qber", type=float, required=True)
    p.add_argument("--variant", choices=VARIANT_CHOICES, default="unbalanced")
    _add_common(p)

    p = sub.add_parser("qubit-scan", help="qubit-level rates over a QBER grid")
    p.add_argument("--kappas", required=True, help="comma-separated kappa list")
    p.add_argument("--qber-start", type=float, default=0.0)
    p.add_argument("--qber-stop", type=float, default=0.12)
    p.add_argument("--qber-step", type=float, default=0.01)
    p.add_argument("--variant", choices=VARIANT_CHOICES, default="unbalanced")
    _add_common(p)

    p = sub.add_parser("distance-scan", help="mu-optimized realistic rates over distance")
    p.add_argument("--variant", choices=VARIANT_CHOICES, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--preset", metavar="FILE", help="key=value channel preset")
    p.add_argument("--lmin", type=float, default=0.0)
    p.add_argument("--lmax", type=float, default=60.0)
    p.add_argument("--lstep", type=float, default=5.0)
    _add_common(p)

    p = sub.add_parser("compare", help="distance scans of all four variants")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--preset", metavar="FILE")
    p.add_argument("--lmin", type=float, default=0.0)
    p.add_argument("--lmax", type=float, default=60.0)
    p.add_argument("--lstep", type=float, default=5.0)
    _add_common(p)

    p = sub.add_parser("squash-validate", help="Monte-Carlo check of the click post-processing")
    p.add_argument("--trials", type=int, default=100_000)
    _add_common(p)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "qubit-rate":
            cfg = make_config(args.kappa, args.variant)
            point = qubit_point(cfg, args.qber, seed=args.seed)
            _emit(format_csv([point]), args.out)
        elif args.command == "qubit-scan":
            cfgs = [make_config(k, args.variant) for k in _parse_kappas(args.kappas)]
            qs = _qber_grid(args.qber_start, args.qber_stop, args.qber_step)
            _emit(format_csv(qubit_scan(cfgs, qs, seed=args.seed)), args.out)
        elif args.command == "distance-scan":
            cfg = make_config(args.kappa, args.variant)
            points = distance_scan(cfg, _params(args), _distances(args),
                                   threads=_threads(args), seed=args.seed)
            _emit(format_csv(points), args.out)
            cutoff = cutoff_distance(points)
            if cutoff is not None:
                print(f"# cutoff: first nonpositive rate at {cutoff:g} km", file=sys.stderr)
        elif args.command == "compare":
            points = compare_variants(args.kappa, _params(args), _distances(args),
                                      threads=_threads(args), seed=args.seed)
            _emit(format_csv(points), args.out)
        elif args.command == "squash-validate":
            rows, ok = monte_carlo_check(args.trials, args.seed)
            lines = [f"{'pattern':24s} {'outcome':8s} {'expected':>9s} {'observed':>9s} "
                     f"{'3sigma':>9s} status"]
            for name, outcome, expected, observed, bound, within in rows:
                lines.append(f"{name:24s} {outcome.value:8s} {expected:9.6f} {observed:9.6f} "
                             f"{bound:9.6f} {'ok' if within else 'FAIL'}")
            lines.append(f"squash-validate: {'PASS' if ok else 'FAIL'} "
                         f"(trials={args.trials}, seed={args.seed})")
            _emit("\n".join(lines) + "\n", args.out)
            if not ok:
                return 1
    except (ValueError, InfeasibleError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry():  # console-script hook
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
