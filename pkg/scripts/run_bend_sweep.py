#!/usr/bin/env python3
"""Bending sweep over an angle grid for a bend preset.

Tabulates the Cartan invariant of the tracked boundary triple and the
relation-probe outcome per angle; optionally writes the limit-sample
scatter as SVG.
"""

import argparse

import numpy as np

import chgeom.bending as bd
import chgeom.presets as ps
from chgeom.cli import _to_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="hnn-bend", choices=ps.BEND_PRESETS)
    ap.add_argument("--etas", default="-0.2,-0.1,-0.05,0,0.05,0.1,0.2")
    ap.add_argument("--zeta", type=float, default=float(np.pi / 4))
    ap.add_argument("--depth", type=int, default=5)
    ap.add_argument("--svg", default=None, help="write scatter panels here")
    args = ap.parse_args()

    grid = [float(s) for s in args.etas.split(",") if s.strip()]
    spec = ps.bend_preset(args.preset)
    report = bd.bend_sweep(spec, grid, zeta=args.zeta, limit_depth=args.depth)

    print(f"{args.preset}  zeta={args.zeta:.4f}")
    print(f"{'eta':>8}  {'cartan':>14}  probe  {'min gap':>10}")
    for row in report.rows:
        print(f"{row.eta:8.3f}  {row.cartan_alpha:14.9f}  "
              f"{'pass' if row.probe_passed else 'FAIL'}  "
              f"{row.min_word_gap:10.3e}")
    print(f"cartan values distinct: {report.cartan_distinct}")
    print(f"zero only at eta=0:     {report.zero_only_at_origin}")

    if args.svg:
        rows = [{
            "eta": row.eta,
            "limit_xi_re": list(row.limit_points.xi[:, 0].real),
            "limit_xi_im": list(row.limit_points.xi[:, 0].imag),
            "limit_v": list(row.limit_points.v),
        } for row in report.rows]
        with open(args.svg, "w") as fh:
            fh.write(_to_svg("bend", {"rows": rows}))
        print(f"scatter written to {args.svg}")


if __name__ == "__main__":
    main()
