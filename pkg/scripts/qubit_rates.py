#!/usr/bin/env python3
"""Qubit-level key rates over a QBER grid for several modulator losses.

Writes the data behind the rate-vs-error-rate comparison plot.
"""

import argparse

from ubb84.engine import format_csv, qubit_scan
from ubb84.protocol import make_config


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kappas", default="0.2,0.4,0.6,0.8,1.0")
    parser.add_argument("--qber-stop", type=float, default=0.12)
    parser.add_argument("--qber-step", type=float, default=0.005)
    parser.add_argument("--out", default="qubit_rates.csv")
    args = parser.parse_args()

    cfgs = [make_config(float(k)) for k in args.kappas.split(",")]
    qs = []
    q = 0.0
    while q <= args.qber_stop + 1e-12:
        qs.append(round(q, 12))
        q += args.qber_step
    points = qubit_scan(cfgs, qs)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(points))
    print(f"wrote {len(points)} rows to {args.out}")


if __name__ == "__main__":
    main()
