"""Count, for every poset space up to a size, how many supporting functions pass the criterion."""
import argparse
import sys

from tstruct.space import enumerate_spaces
from tstruct.supports import criterion_batch, enumerate_data


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-points", type=int, default=3)
    ap.add_argument("--lo", type=int, default=-1)
    ap.add_argument("--hi", type=int, default=2)
    args = ap.parse_args(argv)
    print("points  relations  data  t-structures")
    for X in enumerate_spaces(args.max_points):
        P = enumerate_data(X, args.lo, args.hi)
        ok = criterion_batch(X, P).ii
        print(f"{X.n:6d}  {len(X.strict_pairs):9d}  {len(P):4d}  {int(ok.sum()):12d}   codim={list(X.codim)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
