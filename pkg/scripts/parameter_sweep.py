"""Capacity and IE_A across a (K, n) grid for both schemes; writes CSV."""

import argparse
import sys

from s2irt.attacks import AttackSpec
from s2irt.experiments import make_mapper, parse_grid, sweep, to_csv

KEY = bytes(range(32))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", default="2,4,8,16,32 x 1,4,16,32,64")
    ap.add_argument("--dim", type=int, default=3072)
    ap.add_argument("--mapper", default="noise:0.05")
    ap.add_argument("--attack", help="KIND:MAG[:SEED]")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args()

    Ks, ns = parse_grid(args.grid)
    attack = AttackSpec.parse(args.attack) if args.attack else None
    mapper = make_mapper(args.mapper, args.dim)
    text = to_csv(sweep(["s2irt", "se"], Ks, ns, args.dim, KEY, mapper, args.trials, attack))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
