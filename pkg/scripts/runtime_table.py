"""Wall time of one exact DP solve against n and the mesh parameter.

Finer meshes (smaller epsilon) multiply the point count per object, which
dominates the cost.

    python3 scripts/runtime_table.py --n 5,10,15 --epsilon 1.0,0.5,0.25
"""

import argparse
import time

from obsplan.harness import gen_instance
from obsplan.instance import prepare
from obsplan.orders import make_order
from obsplan.pareto import dp_solve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", default="5,10,15")
    ap.add_argument("--epsilon", default="1.0,0.5,0.25")
    ap.add_argument("--cases", type=int, default=3)
    ap.add_argument("--seed", type=int, default=100_000)
    args = ap.parse_args()

    print(f"{'n':>3} {'eps':>5} {'pts/obj':>8} {'mean s':>9}")
    for n in (int(v) for v in args.n.split(",")):
        for eps in (float(v) for v in args.epsilon.split(",")):
            times, pts = [], 0
            for c in range(args.cases):
                prep = prepare(gen_instance(n, epsilon=eps, seed=args.seed + c))
                order = make_order(prep, "GTSP").sequence
                t0 = time.perf_counter()
                dp_solve(prep, order, prep.q_star(0.5))
                times.append(time.perf_counter() - t0)
                pts = len(prep.point_ids[0])
            print(f"{n:>3} {eps:>5g} {pts:>8} {sum(times) / len(times):>9.3f}")


if __name__ == "__main__":
    main()
