"""Command-line entry point.

Exit status: 0 on success, 1 on a domain error (bad configuration, q* outside
the solvable band), 2 on an I/O error.  Angles are degrees on the command line
and in JSON.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from obsplan import __doc__ as _pkg_doc
from obsplan.geometry import DomainError, SensingSpec
from obsplan.harness import (
    Q_STAR_FRACTIONS,
    format_summary,
    gen_instance,
    plan_to_json,
    plan_with_method,
    run_cases,
    summarize,
    verify_plan,
    write_csv,
)
from obsplan.ilp import build_model, validate_solution, write_lp
from obsplan.instance import Instance, prepare
from obsplan.lower_bound import lower_bound
from obsplan.orders import METHODS
from obsplan.pareto import EXACT, ROUNDED, check_band


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _emit(payload: str, out: str | None) -> None:
    if out:
        Path(out).write_text(payload)
    else:
        sys.stdout.write(payload)


def _load(path: str) -> Instance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON ({exc})") from exc
    return Instance.from_json(data)


def _sensing_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dmin", type=float, default=2.0, help="minimum observing distance (m)")
    p.add_argument("--dmax", type=float, default=10.0, help="maximum observing distance (m)")
    p.add_argument("--theta", type=float, default=30.0, help="half-angle of the observation cone (deg)")
    p.add_argument("--a", type=float, default=1.0, help="quality scale")
    p.add_argument("--b", type=float, default=0.0, help="quality distance offset (m)")


def _sensing(args, d_max: float | None = None) -> SensingSpec:
    return SensingSpec(
        d_min=args.dmin,
        d_max=args.dmax if d_max is None else d_max,
        theta=math.radians(args.theta),
        a=args.a,
        b=args.b,
    )


def _mode_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", dest="mode", action="store_const", const=EXACT, help="exact path lengths (default)")
    g.add_argument("--rounded", dest="mode", action="store_const", const=ROUNDED, help="lengths rounded up to the mesh pitch")
    p.set_defaults(mode=EXACT)


def cmd_gen(args) -> int:
    inst = gen_instance(
        args.n,
        map_size=args.map,
        sensing=_sensing(args),
        epsilon=args.epsilon,
        seed=args.seed,
        start=tuple(_floats(args.start)),
        q_star_fraction=args.qstar,
    )
    _emit(json.dumps(inst.to_json(), indent=2) + "\n", args.out)
    return 0


def cmd_points(args) -> int:
    prep = prepare(_load(args.inp))
    payload = {
        "delta": prep.grid.delta,
        "rings": list(prep.grid.ring_boundaries),
        "points": [
            {
                "x": p.position.x,
                "y": p.position.y,
                "object": p.object_index,
                "ring": p.ring_index,
                "angle": p.angle_index,
                "quality": p.own_quality,
            }
            for p in prep.points
        ],
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _plan(args, method: str) -> int:
    inst = _load(args.inp)
    prep = prepare(inst)
    frac = inst.q_star_fraction if args.qstar is None else args.qstar
    q_star = prep.q_star(frac)
    check_band(prep, q_star)
    plan = plan_with_method(prep, method, q_star, mode=args.mode, seed=args.seed)
    problems = verify_plan(prep, plan)
    if problems:
        raise RuntimeError("plan failed re-validation: " + "; ".join(problems))
    _emit(json.dumps(plan_to_json(plan), indent=2) + "\n", args.out)
    return 0


def cmd_plan(args) -> int:
    return _plan(args, args.method)


def cmd_brute(args) -> int:
    return _plan(args, "BRUTE")


def cmd_bound(args) -> int:
    lb = lower_bound(prepare(_load(args.inp)))
    _emit(json.dumps({"lower_bound_m": lb}) + "\n", args.out)
    return 0


def cmd_bench(args) -> int:
    methods = [m.strip().upper() for m in args.methods.split(",") if m.strip()]
    instances = [
        gen_instance(
            n,
            map_size=args.map,
            sensing=_sensing(args, d_max),
            epsilon=args.epsilon,
            seed=args.seed + case,
        )
        for n in _ints(args.n)
        for d_max in _floats(args.dmax)
        for case in range(args.cases)
    ]
    records = run_cases(
        instances,
        methods=tuple(methods),
        q_star_fractions=tuple(_floats(args.qstar)),
        mode=args.mode,
    )
    write_csv(records, args.out)
    if args.summary:
        Path(args.summary).write_text(format_summary(summarize(records)) + "\n")
    return 0


def cmd_lp_export(args) -> int:
    inst = _load(args.inp)
    prep = prepare(inst)
    frac = inst.q_star_fraction if args.qstar is None else args.qstar
    write_lp(build_model(prep, prep.q_star(frac)), args.out)
    return 0


def _read_assignment(path: str) -> dict[str, float]:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    if isinstance(data, dict):
        return {str(k): float(v) for k, v in data.items()}
    values = {}
    for line in text.splitlines():
        parts = line.split()
        if len(parts) >= 2 and (parts[0].startswith("X_") or parts[0].startswith("u_")):
            values[parts[0]] = float(parts[1])
    return values


def cmd_validate(args) -> int:
    inst = _load(args.inp)
    prep = prepare(inst)
    frac = inst.q_star_fraction if args.qstar is None else args.qstar
    model = build_model(prep, prep.q_star(frac))
    rep = validate_solution(model, _read_assignment(args.solution), prep)
    payload = {
        "ok": rep.ok,
        "violations": rep.violations,
        "tour": [list(t) for t in rep.tour],
        "length_m": rep.length,
        "quality": rep.quality,
        "objective": rep.objective_value,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0 if rep.ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="obsplan", description=(_pkg_doc or "").strip())
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--map", type=float, default=200.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--qstar", type=float, default=0.5, help="quality threshold as a fraction of n*q_max")
    p.add_argument("--start", default="0,0")
    _sensing_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("points", help="dump the observation points of an instance")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_points)

    for name, func in (("plan", cmd_plan), ("brute", cmd_brute)):
        p = sub.add_parser(name, help="plan a tour" if name == "plan" else "plan over every visiting order")
        p.add_argument("--in", dest="inp", required=True)
        if name == "plan":
            p.add_argument("--method", default="GTSP", type=str.upper, choices=METHODS + ("BRUTE",))
        p.add_argument("--qstar", type=float)
        p.add_argument("--seed", type=int, default=0, help="seed for random point selection (RS)")
        _mode_args(p)
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("bound", help="MST lower bound on the tour length")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("bench", help="run the synthetic benchmark and write CSV records")
    p.add_argument("--n", default="3,4,5")
    p.add_argument("--cases", type=int, default=50)
    p.add_argument("--dmax", default="10")
    p.add_argument("--qstar", default=",".join(str(q) for q in Q_STAR_FRACTIONS))
    p.add_argument("--methods", default=",".join(METHODS + ("BRUTE",)))
    p.add_argument("--map", type=float, default=200.0)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0, help="seed of the first case")
    p.add_argument("--dmin", type=float, default=2.0)
    p.add_argument("--theta", type=float, default=30.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.0)
    _mode_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="also write a text summary table here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("lp-export", help="write the integer program in LP format")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--qstar", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lp_export)

    p = sub.add_parser("validate", help="check a solver assignment against the integer program")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--solution", required=True, help="JSON {var: value} or 'name value' lines")
    p.add_argument("--qstar", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"obsplan: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"obsplan: I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
