"""How much the DP shortens RS, NPF and GTSP seed paths that already meet q*.

    python3 scripts/improver.py --n 15 --cases 30 --qstar 0.3
"""

import argparse
from pathlib import Path

from obsplan.harness import format_summary, gen_instance, run_cases, summarize, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=15)
    ap.add_argument("--cases", type=int, default=30)
    ap.add_argument("--qstar", default="0.3")
    ap.add_argument("--seed", type=int, default=40_000)
    ap.add_argument("--out", default="results/improver.csv")
    args = ap.parse_args()

    insts = [gen_instance(args.n, seed=args.seed + c) for c in range(args.cases)]
    fracs = tuple(float(v) for v in args.qstar.split(","))
    recs = run_cases(insts, methods=("RS", "NPF", "GTSP"), q_star_fractions=fracs)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_csv(recs, args.out)
    print(format_summary(summarize(recs)))


if __name__ == "__main__":
    main()
