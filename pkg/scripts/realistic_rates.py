#!/usr/bin/env python3
"""Mu-optimized realistic key rates vs distance.

Two data sets: all four variants at one kappa (protocol comparison), and
the unbalanced protocol across several kappas (loss sweep).  Cutoff
distances are printed per curve.
"""

import argparse
import itertools

from ubb84.channel import default_params, load_params
from ubb84.engine import compare_variants, cutoff_distance, distance_scan, format_csv
from ubb84.protocol import make_config


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kappa", type=float, default=0.5, help="kappa for the variant comparison")
    parser.add_argument("--kappas", default="1.0,0.8,0.5,0.3", help="unbalanced loss sweep")
    parser.add_argument("--lmax", type=float, default=60.0)
    parser.add_argument("--lstep", type=float, default=2.5)
    parser.add_argument("--preset", help="key=value channel preset file")
    parser.add_argument("--threads", type=int, default=0)
    parser.add_argument("--out", default="realistic_rates.csv")
    args = parser.parse_args()

    params = load_params(args.preset) if args.preset else default_params()
    threads = args.threads if args.threads > 0 else None
    import os

    threads = threads or (os.cpu_count() or 1)
    distances = [i * args.lstep for i in range(int(args.lmax / args.lstep) + 1)]

    points = compare_variants(args.kappa, params, distances, threads=threads)
    for kappa in (float(k) for k in args.kappas.split(",")):
        points.extend(distance_scan(make_config(kappa), params, distances, threads=threads))

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(points))
    print(f"wrote {len(points)} rows to {args.out}")

    for (variant, kappa), group in itertools.groupby(points, key=lambda p: (p.variant, p.kappa)):
        cutoff = cutoff_distance(list(group))
        where = f"{cutoff:g} km" if cutoff is not None else f"beyond {args.lmax:g} km"
        print(f"{variant} kappa={kappa:g}: cutoff {where}")


if __name__ == "__main__":
    main()
