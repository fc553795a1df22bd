"""Crofton ratios (integral / length) for the reference curve family.

Convex curves sit at 2; self-crossing and open curves stay at or below the
bound 2 (1 + tolerance) within 3 standard errors.
"""

import argparse

from barcode_entropy.geometry import crofton_lines, curve_family


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--tolerance", type=float, default=0.05)
    args = ap.parse_args(argv)
    print("curve\testimate\tstderr\tlength\tratio\tbound_ok")
    for curve in curve_family():
        r = crofton_lines(curve, args.samples, args.seed)
        ok = r.estimate <= 2 * (1 + args.tolerance) * r.length + 3 * r.stderr
        print(f"{curve.name}\t{r.estimate:.5f}\t{r.stderr:.2g}\t{r.length:.5f}\t{r.ratio:.4f}\t{ok}")


if __name__ == "__main__":
    main()
