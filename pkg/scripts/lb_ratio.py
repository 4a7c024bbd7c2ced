"""GTSP length over the MST lower bound across n and d_max.

    python3 scripts/lb_ratio.py --n 5,10,15 --dmax 4,8,12 --cases 30
"""

import argparse
from pathlib import Path

from obsplan.geometry import SensingSpec
from obsplan.harness import format_summary, gen_instance, run_cases, summarize, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", default="5,10,15")
    ap.add_argument("--dmax", default="4,8,12")
    ap.add_argument("--cases", type=int, default=30)
    ap.add_argument("--qstar", type=float, default=0.5)
    ap.add_argument("--methods", default="GTSP,LBTSP,NPF")
    ap.add_argument("--seed", type=int, default=30_000)
    ap.add_argument("--out", default="results/lb_ratio.csv")
    args = ap.parse_args()

    insts = [
        gen_instance(n, sensing=SensingSpec(d_max=d), epsilon=0.5, seed=args.seed + 1000 * n + 10 * int(d) + c)
        for n in (int(v) for v in args.n.split(","))
        for d in (float(v) for v in args.dmax.split(","))
        for c in range(args.cases)
    ]
    recs = run_cases(
        insts, methods=tuple(args.methods.split(",")), q_star_fractions=(args.qstar,), initial_paths=False, maxq=False
    )
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_csv(recs, args.out)
    print(format_summary(summarize(recs)))


if __name__ == "__main__":
    main()
