"""Instance generation, experiment drivers, metrics and result serialisation."""

from __future__ import annotations

import csv
import itertools
import json
import math
import os
import statistics
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from obsplan.geometry import DomainError, Object, Point2, SensingSpec, can_observe, quality
from obsplan.instance import Instance, PreparedInstance, prepare
from obsplan.lower_bound import build_cluster_graph, lower_bound
from obsplan.orders import BRUTE_CAP, METHODS, make_order, stops_length, stops_quality
from obsplan.pareto import EXACT, TOL, PlanResult, close_table, fill_table, path_length
from obsplan.tsp import distance_matrix, order_from_tour, tsp_tour

Q_STAR_FRACTIONS = (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
INITIAL_METHODS = ("RS", "NPF", "GTSP")
WORKERS_ENV = "OBSPLAN_WORKERS"

CSV_COLUMNS = [
    "seed",
    "n",
    "d_max",
    "epsilon",
    "method",
    "q_star_frac",
    "length_m",
    "quality",
    "lb_m",
    "ratio_lb",
    "ratio_brute",
    "feasible",
    "dp_ms",
]


def gen_instance(
    n: int,
    map_size: float = 200.0,
    sensing: SensingSpec | None = None,
    epsilon: float = 0.5,
    seed: int = 0,
    start=(0.0, 0.0),
    q_star_fraction: float = 0.5,
) -> Instance:
    if n < 2:
        raise DomainError(f"need at least two objects, got {n}")
    rng = np.random.default_rng(seed)
    xy = rng.uniform(0.0, map_size, size=(n, 2))
    facing = rng.uniform(0.0, 2 * math.pi, size=n)
    objects = tuple(Object(Point2(float(x), float(y)), float(f)) for (x, y), f in zip(xy, facing))
    return Instance(
        objects=objects,
        sensing=sensing or SensingSpec(),
        start=Point2(*start),
        epsilon=epsilon,
        q_star_fraction=q_star_fraction,
        map_size=map_size,
        seed=seed,
    )


@dataclass
class ExperimentRecord:
    seed: int
    n: int
    d_max: float
    epsilon: float
    method: str
    q_star_frac: float
    length_m: float
    quality: float
    lb_m: float
    ratio_lb: float
    ratio_brute: float
    feasible: bool
    dp_ms: float

    def csv_row(self) -> dict:
        row = asdict(self)
        row["feasible"] = int(self.feasible)
        for k in ("length_m", "quality", "lb_m", "ratio_lb", "ratio_brute", "dp_ms"):
            v = row[k]
            row[k] = "" if v is None or (isinstance(v, float) and math.isnan(v)) else repr(float(v))
        return row


def verify_plan(prep: PreparedInstance, plan: PlanResult) -> list[str]:
    """Recompute a plan from geometry; returns a list of problems (empty if sound)."""
    if not plan.feasible:
        return []
    inst = prep.instance
    problems = []
    seen = []
    for p, objs in plan.stops:
        for k in objs:
            if not can_observe(inst.objects[k], p, inst.sensing):
                problems.append(f"object {k} is not observable from stop {tuple(p)}")
        seen.extend(objs)
    if sorted(seen) != list(range(prep.n)):
        problems.append("stops do not observe every object exactly once")
    q = sum(quality(inst.objects[k], p, inst.sensing) for p, objs in plan.stops for k in objs)
    if abs(q - plan.total_quality) > 1e-9:
        problems.append(f"quality mismatch {q} vs {plan.total_quality}")
    if q < plan.q_star - 1e-9:
        problems.append(f"quality {q} below q* {plan.q_star}")
    length = path_length(inst.start, plan.waypoints)
    if abs(length - plan.total_length) > 1e-9:
        problems.append(f"length mismatch {length} vs {plan.total_length}")
    return problems


def brute_force(prep: PreparedInstance, q_stars, mode: str = EXACT, cap: int = BRUTE_CAP):
    """Best DP plan over every visiting order (both directions of each class).

    Returns ``({q*: PlanResult}, elapsed_ms)``; ties are broken by length,
    then lexicographically smallest order.
    """
    n = prep.n
    if n > cap:
        raise DomainError(f"brute force capped at n <= {cap}, got {n}")
    best = {q: PlanResult(feasible=False, q_star=q) for q in q_stars}
    t0 = time.perf_counter()
    for perm in itertools.permutations(range(n)):
        table = fill_table(prep, perm, mode=mode)
        for q in q_stars:
            plan = close_table(table, q)
            cur = best[q]
            if plan.feasible and (not cur.feasible or plan.objective < cur.objective - TOL):
                best[q] = plan
    elapsed = (time.perf_counter() - t0) * 1e3
    for plan in best.values():
        plan.method = "BRUTE"
    return best, elapsed


def maxq_stops(prep: PreparedInstance):
    """Each object's best-quality point, flown in tour order."""
    picks = [int(ids[np.argmax(prep.own_quality[ids])]) for ids in prep.point_ids]
    xy = np.vstack([np.asarray(prep.start, dtype=float)[None, :], prep.xy[picks]])
    flown = [picks[v - 1] for v in order_from_tour(tsp_tour(distance_matrix(xy), 0))]
    return [(Point2(*map(float, prep.xy[p])), [int(prep.owner[p])]) for p in flown]


def plan_with_method(
    prep: PreparedInstance,
    method: str,
    q_star: float,
    mode: str = EXACT,
    seed: int = 0,
) -> PlanResult:
    method = method.upper()
    if method == "BRUTE":
        return brute_force(prep, [q_star], mode)[0][q_star]
    order = make_order(prep, method, seed)
    plan = close_table(fill_table(prep, order.sequence, mode=mode), q_star)
    plan.method = method
    return plan


def run_case(
    instance: Instance,
    methods=METHODS + ("BRUTE",),
    q_star_fractions=Q_STAR_FRACTIONS,
    mode: str = EXACT,
    initial_paths: bool = True,
    maxq: bool = True,
) -> list[ExperimentRecord]:
    prep = prepare(instance)
    graph = build_cluster_graph(prep)
    lb = lower_bound(prep, graph)
    seed = instance.seed or 0
    base = dict(seed=seed, n=prep.n, d_max=instance.sensing.d_max, epsilon=instance.epsilon)
    q_of = {f: prep.q_star(f) for f in q_star_fractions}
    records: list[ExperimentRecord] = []

    def emit(method, frac, feasible, length, q, ms):
        if not feasible:
            length = math.nan
        ratio = length / lb if feasible and lb > 0 else math.nan
        records.append(
            ExperimentRecord(
                method=method,
                q_star_frac=frac,
                length_m=length,
                quality=q,
                lb_m=lb,
                ratio_lb=ratio,
                ratio_brute=math.nan,
                feasible=feasible,
                dp_ms=ms,
                **base,
            )
        )

    for method in methods:
        if method.upper() == "BRUTE":
            plans, ms = brute_force(prep, list(q_of.values()), mode)
            for f, q in q_of.items():
                p = plans[q]
                emit("BRUTE", f, p.feasible, p.total_length, p.total_quality, ms)
            continue
        order = make_order(prep, method, seed, graph)
        t0 = time.perf_counter()
        table = fill_table(prep, order.sequence, mode=mode)
        fill_ms = (time.perf_counter() - t0) * 1e3
        for f, q in q_of.items():
            t1 = time.perf_counter()
            p = close_table(table, q)
            ms = fill_ms + (time.perf_counter() - t1) * 1e3
            emit(method, f, p.feasible, p.total_length, p.total_quality, ms)
        if initial_paths and order.initial_stops is not None and method.upper() in INITIAL_METHODS:
            length = stops_length(prep, order.initial_stops)
            q_init = stops_quality(prep, order.initial_stops)
            for f, q in q_of.items():
                emit(f"{method}-init", f, q_init >= q - TOL, length, q_init, 0.0)
                # Initial paths are flyable either way; keep the length.
                records[-1].length_m = length
                records[-1].ratio_lb = length / lb if lb > 0 else math.nan
    if maxq:
        stops = maxq_stops(prep)
        length = stops_length(prep, stops)
        q_max = stops_quality(prep, stops)
        for f, q in q_of.items():
            emit("MaxQ", f, q_max >= q - TOL, length, q_max, 0.0)
            records[-1].length_m = length
            records[-1].ratio_lb = length / lb if lb > 0 else math.nan

    brute = {r.q_star_frac: r for r in records if r.method == "BRUTE" and r.feasible}
    for r in records:
        b = brute.get(r.q_star_frac)
        if b is not None and r.feasible and b.length_m > 0:
            r.ratio_brute = r.length_m / b.length_m
    return records


def _run_case_args(args):
    instance, kw = args
    return run_case(instance, **kw)


def worker_count(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, default)))
    except ValueError:
        return default


def run_cases(instances, workers: int | None = None, **kw) -> list[ExperimentRecord]:
    """Run many cases; output order follows ``instances`` regardless of worker count."""
    workers = worker_count() if workers is None else workers
    jobs = [(inst, kw) for inst in instances]
    if workers <= 1:
        results = [_run_case_args(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_case_args, jobs))
    return [r for rs in results for r in rs]


def _stats(values):
    values = [v for v in values if not math.isnan(v)]
    if not values:
        return math.nan, math.nan
    return statistics.fmean(values), statistics.median(values)


def summarize(records) -> list[dict]:
    """Aggregate per (n, d_max, method, q*): ratios, satisfaction and DP reductions."""
    groups = defaultdict(list)
    for r in records:
        groups[r.n, r.d_max, r.method, r.q_star_frac].append(r)
    by_case = {(r.seed, r.n, r.d_max, r.method, r.q_star_frac): r for r in records}
    rows = []
    for (n, d_max, method, frac), rs in sorted(groups.items()):
        if not rs:
            continue
        mean_b, med_b = _stats([r.ratio_brute for r in rs])
        mean_lb, med_lb = _stats([r.ratio_lb for r in rs])
        mean_len, _ = _stats([r.length_m for r in rs if r.feasible])
        row = {
            "n": n,
            "d_max": d_max,
            "method": method,
            "q_star_frac": frac,
            "cases": len(rs),
            "satisfied_pct": 100.0 * sum(r.feasible for r in rs) / len(rs),
            "mean_ratio_brute": mean_b,
            "median_ratio_brute": med_b,
            "mean_ratio_lb": mean_lb,
            "median_ratio_lb": med_lb,
            "mean_length_m": mean_len,
            "mean_dp_ms": statistics.fmean(r.dp_ms for r in rs),
            "mean_reduction_pct": math.nan,
        }
        if method.endswith("-init"):
            base = method[: -len("-init")]
            reds = []
            for r in rs:
                dp = by_case.get((r.seed, n, d_max, base, frac))
                if r.feasible and dp is not None and dp.feasible:
                    reds.append(reduction_pct(r.length_m, dp.length_m))
            row["mean_reduction_pct"] = statistics.fmean(reds) if reds else math.nan
        rows.append(row)
    return rows


def reduction_pct(initial: float, improved: float) -> float:
    return 100.0 * (initial - improved) / initial


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in records:
            w.writerow(r.csv_row())


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def plan_to_json(plan: PlanResult) -> dict:
    return {
        "method": plan.method,
        "order": list(plan.order_used),
        "stops": [{"x": p.x, "y": p.y, "observes": list(objs)} for p, objs in plan.stops],
        "total_length_m": plan.total_length if plan.feasible else None,
        "total_quality": plan.total_quality if plan.feasible else None,
        "q_star": plan.q_star,
        "feasible": plan.feasible,
    }


def write_plan(plan: PlanResult, path) -> None:
    Path(path).write_text(json.dumps(plan_to_json(plan), indent=2) + "\n")


def format_summary(rows: list[dict]) -> str:
    cols = [
        ("n", "{:>3}"),
        ("d_max", "{:>5g}"),
        ("method", "{:>10}"),
        ("q_star_frac", "{:>4g}"),
        ("cases", "{:>5}"),
        ("satisfied_pct", "{:>6.1f}"),
        ("median_ratio_brute", "{:>7.3f}"),
        ("mean_ratio_lb", "{:>7.3f}"),
        ("mean_reduction_pct", "{:>7.2f}"),
        ("mean_dp_ms", "{:>9.1f}"),
    ]
    head = " ".join(f"{name[:10]:>10}" for name, _ in cols)
    lines = [head]
    for row in rows:
        lines.append(" ".join(f"{fmt.format(row[name]):>10}" for name, fmt in cols))
    return "\n".join(lines)
