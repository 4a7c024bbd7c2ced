"""Heuristic order length over the best order length, small n.

    python3 scripts/brute_ratio.py --n 3,4,5 --cases 50 --out results/brute_ratio.csv
"""

import argparse
from pathlib import Path

from obsplan.harness import Q_STAR_FRACTIONS, format_summary, gen_instance, run_cases, summarize, write_csv
from obsplan.orders import METHODS


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", default="3,4,5")
    ap.add_argument("--cases", type=int, default=50)
    ap.add_argument("--map", type=float, default=200.0)
    ap.add_argument("--epsilon", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=20_000)
    ap.add_argument("--out", default="results/brute_ratio.csv")
    args = ap.parse_args()

    ns = [int(v) for v in args.n.split(",")]
    insts = [
        gen_instance(n, map_size=args.map, epsilon=args.epsilon, seed=args.seed + 100 * n + c)
        for n in ns
        for c in range(args.cases)
    ]
    recs = run_cases(insts, methods=METHODS + ("BRUTE",), q_star_fractions=Q_STAR_FRACTIONS, initial_paths=False)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_csv(recs, args.out)
    rows = [r for r in summarize(recs) if r["method"] in METHODS]
    print(format_summary(rows))


if __name__ == "__main__":
    main()
