"""Solve exported micro models with HiGHS and compare against brute-force DP.

The integer program has no run skipping (every zone gets its own point), so
the comparison uses the DP with skipping disabled.  Requires ``highspy``:

    pip install highspy
    python scripts/ilp_crosscheck.py --cases 5
"""

import argparse
import itertools
import tempfile
from pathlib import Path

import highspy

from obsplan.harness import gen_instance
from obsplan.ilp import build_model, validate_solution, write_lp
from obsplan.instance import prepare
from obsplan.pareto import close_table, fill_table


def solve_lp(path):
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.readModel(str(path))
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        return None, {}
    lp = h.getLp()
    values = h.getSolution().col_value
    return h.getInfo().objective_function_value, dict(zip(lp.col_names_, values))


def brute_no_skip(prep, q_star):
    best = None
    for perm in itertools.permutations(range(prep.n)):
        plan = close_table(fill_table(prep, perm, allow_skipping=False), q_star)
        if plan.feasible and (best is None or plan.objective < best.objective):
            best = plan
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cases", type=int, default=5)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--map", type=float, default=50.0)
    ap.add_argument("--qstar", type=float, default=0.6)
    args = ap.parse_args()
    worst = 0.0
    for seed in range(args.cases):
        prep = prepare(gen_instance(args.n, map_size=args.map, epsilon=1.0, seed=seed))
        q = prep.q_star(args.qstar)
        model = build_model(prep, q)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "model.lp"
            write_lp(model, path)
            obj, values = solve_lp(path)
        ref = brute_no_skip(prep, q)
        if obj is None or ref is None:
            print(f"seed {seed}: solver {'infeasible' if obj is None else obj:}, dp {ref and ref.objective}")
            continue
        rep = validate_solution(model, values, prep)
        gap = abs(obj - ref.objective)
        worst = max(worst, gap)
        print(f"seed {seed}: ilp {obj:.9f}  dp {ref.objective:.9f}  gap {gap:.2e}  valid {rep.ok} {rep.violations}")
    print(f"max gap {worst:.3e}")


if __name__ == "__main__":
    main()
