"""How often is a random finite metric space rigid?  Tabulated by size."""

import argparse
import random
from collections import Counter
from fractions import Fraction

from freeiso.errors import CapExceeded
from freeiso.isogroup import decide_rigidity
from freeiso.metric import validate_metric


def random_metric(rng, n, top):
    # shortest paths over random integer weights always give a metric
    d = [[Fraction(0 if i == j else rng.randint(1, top)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            d[i][j] = d[j][i]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                d[i][j] = min(d[i][j], d[i][k] + d[k][j])
    return validate_metric(d)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[3, 4, 5, 6])
    ap.add_argument("--per-size", type=int, default=30)
    ap.add_argument("--top", type=int, default=4, help="largest random edge weight before shortest paths")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    print(f"{'n':>3}{'rigid':>8}{'not':>6}{'capped':>8}  routes")
    for n in args.sizes:
        counts, routes = Counter(), Counter()
        for _ in range(args.per_size):
            M = random_metric(rng, n, args.top)
            try:
                v = decide_rigidity(M)
            except CapExceeded:
                counts["capped"] += 1
                continue
            counts["rigid" if v.rigid else "not"] += 1
            routes[v.route] += 1
        print(f"{n:>3}{counts['rigid']:>8}{counts['not']:>6}{counts['capped']:>8}  {dict(routes)}")


if __name__ == "__main__":
    main()
