"""Visiting-order heuristics (RS, NPF, GTSP, TSPO, LBTSP) and brute-force enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from obsplan.geometry import DomainError, Point2, quality
from obsplan.instance import PreparedInstance
from obsplan.lower_bound import ClusterGraph, build_cluster_graph
from obsplan.pareto import path_length
from obsplan.tsp import distance_matrix, order_from_tour, tsp_tour, two_opt

METHODS = ("RS", "NPF", "GTSP", "TSPO", "LBTSP")
BRUTE_CAP = 8

Stop = tuple[Point2, list[int]]


@dataclass
class VisitOrder:
    sequence: list[int]
    method: str
    # Stops of the path the heuristic itself proposes, when it builds one.
    initial_stops: list[Stop] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.sequence = [int(k) for k in self.sequence]


def _stops_from_points(prep: PreparedInstance, pids) -> list[Stop]:
    return [(Point2(*map(float, prep.xy[p])), [int(prep.owner[p])]) for p in pids]


def _order_through_points(prep: PreparedInstance, pids: list[int]) -> list[int]:
    """Tour over start + one point per object; returns the point ids in flight order."""
    xy = np.vstack([np.asarray(prep.start, dtype=float)[None, :], prep.xy[pids]])
    tour = order_from_tour(tsp_tour(distance_matrix(xy), 0))
    return [pids[v - 1] for v in tour]


def rs_order(prep: PreparedInstance, seed: int = 0) -> VisitOrder:
    rng = np.random.default_rng(seed)
    picks = [int(rng.choice(ids)) for ids in prep.point_ids]
    flown = _order_through_points(prep, picks)
    return VisitOrder([int(prep.owner[p]) for p in flown], "RS", _stops_from_points(prep, flown))


def npf_order(prep: PreparedInstance) -> VisitOrder:
    remaining = set(range(prep.n))
    alive = np.ones(len(prep.xy), dtype=bool)
    here = np.asarray(prep.start, dtype=float)
    sequence: list[int] = []
    stops: list[Stop] = []
    while remaining:
        cand = np.flatnonzero(alive)
        d = np.hypot(*(prep.xy[cand] - here).T)
        pid = int(cand[np.argmin(d)])
        owner = int(prep.owner[pid])
        seen = sorted(k for k in remaining if prep.observable[k, pid])
        # The owner closes the run so the stop stays reachable by the DP.
        run = [k for k in seen if k != owner] + [owner]
        sequence.extend(run)
        stops.append((Point2(*map(float, prep.xy[pid])), run))
        remaining.difference_update(run)
        for k in run:
            alive[prep.point_ids[k]] = False
        here = prep.xy[pid]
    return VisitOrder(sequence, "NPF", stops)


def _gtsp_insert(prep: PreparedInstance) -> list[int]:
    """Cheapest insertion over (zone, point, tour edge)."""
    start = np.asarray(prep.start, dtype=float)
    tour_xy = [start]
    tour_pid = [-1]
    left = list(range(prep.n))
    while left:
        best = None
        T = np.array(tour_xy)
        nxt = np.roll(T, -1, axis=0)
        edge = np.hypot(*(T - nxt).T)
        for z in left:
            ids = prep.point_ids[z]
            P = prep.xy[ids]
            d_in = np.hypot(P[:, None, 0] - T[None, :, 0], P[:, None, 1] - T[None, :, 1])
            d_out = np.hypot(P[:, None, 0] - nxt[None, :, 0], P[:, None, 1] - nxt[None, :, 1])
            cost = d_in + d_out - edge[None, :]
            flat = int(np.argmin(cost))
            c = float(cost.flat[flat])
            if best is None or c < best[0] - 1e-12:
                best = (c, z, int(ids[flat // cost.shape[1]]), flat % cost.shape[1])
        _, z, pid, a = best
        tour_xy.insert(a + 1, prep.xy[pid])
        tour_pid.insert(a + 1, pid)
        left.remove(z)
    return tour_pid[1:]


def _reselect(prep: PreparedInstance, pids: list[int]) -> bool:
    start = np.asarray(prep.start, dtype=float)
    changed = False
    m = len(pids)
    for i in range(m):
        prev = start if i == 0 else prep.xy[pids[i - 1]]
        nxt = start if i == m - 1 else prep.xy[pids[i + 1]]
        ids = prep.point_ids[int(prep.owner[pids[i]])]
        P = prep.xy[ids]
        cost = np.hypot(*(P - prev).T) + np.hypot(*(P - nxt).T)
        cur = float(np.hypot(*(prep.xy[pids[i]] - prev)) + np.hypot(*(prep.xy[pids[i]] - nxt)))
        k = int(np.argmin(cost))
        if cost[k] < cur - 1e-10:
            pids[i] = int(ids[k])
            changed = True
    return changed


def _path_xy(prep: PreparedInstance, pids: list[int]) -> np.ndarray:
    return np.vstack([np.asarray(prep.start, dtype=float)[None, :], prep.xy[pids]])


def gtsp_order(prep: PreparedInstance, max_rounds: int = 50) -> VisitOrder:
    pids = _gtsp_insert(prep)
    for _ in range(max_rounds):
        xy = _path_xy(prep, pids)
        tour = two_opt(distance_matrix(xy), list(range(len(xy))))
        moved = tour != list(range(len(xy)))
        pids = [pids[v - 1] for v in tour[1:]]
        if not (_reselect(prep, pids) or moved):
            break
    return VisitOrder([int(prep.owner[p]) for p in pids], "GTSP", _stops_from_points(prep, pids))


def tspo_order(prep: PreparedInstance) -> VisitOrder:
    inst = prep.instance
    xy = [inst.start] + [o.position for o in inst.objects]
    tour = tsp_tour(distance_matrix(xy), 0)
    return VisitOrder([v - 1 for v in order_from_tour(tour)], "TSPO")


def lbtsp_order(prep: PreparedInstance, graph: ClusterGraph | None = None) -> VisitOrder:
    if graph is None:
        graph = build_cluster_graph(prep)
    tour = tsp_tour(graph.dist, 0)
    return VisitOrder([v - 1 for v in order_from_tour(tour)], "LBTSP")


def enumerate_orders(n: int, cap: int = BRUTE_CAP):
    """Yield one order per reversal class: ``n!/2`` orders for ``n >= 2``."""
    if n > cap:
        raise DomainError(f"brute-force enumeration capped at n <= {cap}, got {n}")
    if n < 1:
        raise DomainError("need at least one object")
    if n == 1:
        yield VisitOrder([0], "BRUTE")
        return
    for perm in itertools.permutations(range(n)):
        if perm[0] < perm[-1]:
            yield VisitOrder(list(perm), "BRUTE")


def make_order(prep: PreparedInstance, method: str, seed: int = 0, graph: ClusterGraph | None = None) -> VisitOrder:
    method = method.upper()
    if method == "RS":
        return rs_order(prep, seed)
    if method == "NPF":
        return npf_order(prep)
    if method == "GTSP":
        return gtsp_order(prep)
    if method == "TSPO":
        return tspo_order(prep)
    if method == "LBTSP":
        return lbtsp_order(prep, graph)
    raise DomainError(f"unknown order method {method!r}")


def stops_quality(prep: PreparedInstance, stops: list[Stop]) -> float:
    inst = prep.instance
    return sum(quality(inst.objects[k], p, inst.sensing) for p, objs in stops for k in objs)


def stops_length(prep: PreparedInstance, stops: list[Stop]) -> float:
    return path_length(prep.start, [p for p, _ in stops])
