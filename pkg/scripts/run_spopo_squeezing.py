#!/usr/bin/env python3
"""Squeezing of synchronously pumped OPO supermodes versus pump ratio.

For gain eigenvalues lambda_k, the k-th supermode X variance below
threshold is ((lambda_1 - r lambda_k) / (lambda_1 + r lambda_k))^2 with
r the pump amplitude over its threshold value.  The leading supermode
squeezes without bound as r -> 1; the others saturate.
"""

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from mmqo import sources
from mmqo.serialize import csv_lines


@dataclass
class SpopoConfig:
    lambdas: list = field(default_factory=lambda: [1.0, 0.8, 0.5, 0.2])
    r_start: float = 0.0
    r_stop: float = 0.99
    r_step: float = 0.01
    out: str | None = None


def run(cfg):
    lam = np.asarray(cfg.lambdas, dtype=float)
    rs = np.arange(cfg.r_start, cfg.r_stop + 0.5 * cfg.r_step, cfg.r_step)
    header = ["r"] + ["delta_x2_%d" % k for k in range(lam.size)] \
        + ["leading_db"]
    rows = []
    for r in rs:
        vals = sources.spopo_squeezing(lam, float(r))
        rows.append((float(r),) + tuple(vals)
                    + (10.0 * np.log10(vals[0]) if vals[0] > 0
                       else float("-inf"),))

    text = csv_lines(header, rows)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    final = sources.spopo_squeezing(lam, float(rs[-1]))
    print("# lambdas      : %s" % lam.tolist(), file=sys.stderr)
    print("# r = %.4f     : leading supermode %.3f dB, weakest %.3f dB"
          % (rs[-1], 10.0 * np.log10(final[0]), 10.0 * np.log10(final[-1])),
          file=sys.stderr)
    return 0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lambdas", default="1.0,0.8,0.5,0.2",
                    help="comma-separated gain eigenvalues, descending")
    ap.add_argument("--r-start", type=float, default=SpopoConfig.r_start)
    ap.add_argument("--r-stop", type=float, default=SpopoConfig.r_stop)
    ap.add_argument("--r-step", type=float, default=SpopoConfig.r_step)
    ap.add_argument("--out", default=None, help="CSV path (default stdout)")
    args = ap.parse_args(argv)
    cfg = SpopoConfig(
        lambdas=[float(x) for x in args.lambdas.split(",") if x.strip()],
        r_start=args.r_start, r_stop=args.r_stop, r_step=args.r_step,
        out=args.out)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
