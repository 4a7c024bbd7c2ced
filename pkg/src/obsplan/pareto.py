"""Pareto-label dynamic program over a fixed visiting order.

Position 0 of the table is the start point; position ``i`` (1-based) holds one
cell per observation point of the ``i``-th object in the order.  A transition
from a label at ``(j, p_j)`` to point ``p_i`` flies straight from ``p_j`` to
``p_i`` and observes the whole run of objects at positions ``j+1 .. i`` from
``p_i``, which is only allowed when every object of the run is observable
there.  Each cell keeps the Pareto frontier of (length, quality) labels.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from obsplan.geometry import DomainError, Point2, can_observe, euclid, quality
from obsplan.instance import PreparedInstance

# Equality tolerance for dominance on both coordinates.
TOL = 1e-9

INFEASIBLE = -math.inf

EXACT = "exact"
ROUNDED = "rounded"


class InfeasibleAssumption(DomainError):
    """The quality threshold lies outside ``[n*q_min, n*q_max]``."""


@dataclass(frozen=True)
class PathLabel:
    length: float
    quality: float
    pred_object: int | None = None
    pred_point: int | None = None
    pred_label: int | None = None


def dominates(a: PathLabel, b: PathLabel) -> bool:
    same_len = abs(a.length - b.length) <= TOL
    same_q = abs(a.quality - b.quality) <= TOL
    if same_len:
        return a.quality > b.quality or same_q
    return a.length < b.length and (a.quality > b.quality or same_q)


@dataclass
class ParetoSet:
    """Labels sorted by strictly increasing length and strictly increasing quality."""

    labels: list[PathLabel] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def pairs(self) -> list[tuple[float, float]]:
        return [(lab.length, lab.quality) for lab in self.labels]


def insert_pruned(pset: ParetoSet, label: PathLabel) -> ParetoSet:
    """Insert ``label`` unless dominated; drop whatever it dominates.  Mutates and returns ``pset``."""
    labels = pset.labels
    lengths = [lab.length for lab in labels]
    # Longest label not longer than the candidate (up to TOL) has the best
    # quality among all such labels.
    hi = bisect.bisect_right(lengths, label.length + TOL)
    if hi > 0 and labels[hi - 1].quality >= label.quality - TOL:
        return pset
    lo = bisect.bisect_left(lengths, label.length - TOL)
    end = lo
    while end < len(labels) and labels[end].quality <= label.quality + TOL:
        end += 1
    labels[lo:end] = [label]
    return pset


def pareto_mask(lengths: np.ndarray, qualities: np.ndarray) -> np.ndarray:
    """Indices (sorted by length) of the non-dominated entries of a label batch."""
    if len(lengths) == 0:
        return np.empty(0, dtype=int)
    order = np.lexsort((-qualities, lengths))
    q = qualities[order]
    prev_best = np.maximum.accumulate(q)
    keep = np.empty(len(q), dtype=bool)
    keep[0] = True
    keep[1:] = q[1:] > prev_best[:-1] + TOL
    kept = order[keep]
    if len(kept) > 1:
        # Near-equal lengths: the later (higher quality) entry wins.
        last = np.append(np.diff(lengths[kept]) > TOL, True)
        kept = kept[last]
    return kept


def run_quality(p, objects_run, s) -> float:
    """Summed quality of a run of objects from ``p``, or ``INFEASIBLE``."""
    total = 0.0
    for o in objects_run:
        if not can_observe(o, p, s):
            return INFEASIBLE
        total += quality(o, p, s)
    return total


@dataclass
class Cell:
    """Labels of one (position, point) cell as parallel arrays."""

    length: np.ndarray
    quality: np.ndarray
    pred_pos: np.ndarray
    pred_point: np.ndarray
    pred_label: np.ndarray


@dataclass
class DpTable:
    prep: PreparedInstance
    order: tuple[int, ...]
    mode: str
    delta: float
    # cells[i][k] belongs to the k-th point of the object at position i;
    # cells[0] holds the single start cell.
    cells: list[list[Cell]]

    def point_ids(self, pos: int) -> np.ndarray:
        if pos == 0:
            return np.array([-1])
        return self.prep.point_ids[self.order[pos - 1]]

    def xy(self, pos: int) -> np.ndarray:
        if pos == 0:
            return np.array([self.prep.start], dtype=float)
        return self.prep.xy[self.point_ids(pos)]

    def pareto_set(self, pos: int, k: int) -> ParetoSet:
        c = self.cells[pos][k]
        return ParetoSet(
            [
                PathLabel(float(l), float(q), int(pp), int(pk), int(pl))
                if pp >= 0
                else PathLabel(float(l), float(q))
                for l, q, pp, pk, pl in zip(c.length, c.quality, c.pred_pos, c.pred_point, c.pred_label)
            ]
        )

    def label_counts(self) -> list[int]:
        return [len(c.length) for row in self.cells for c in row]


@dataclass
class PlanResult:
    feasible: bool
    total_length: float = math.inf
    total_quality: float = 0.0
    objective: float = math.inf
    stops: list[tuple[Point2, list[int]]] = field(default_factory=list)
    order_used: list[int] = field(default_factory=list)
    q_star: float = 0.0
    method: str = ""

    @property
    def waypoints(self) -> list[Point2]:
        return [p for p, _ in self.stops]


def _check_order(order, n: int) -> tuple[int, ...]:
    order = tuple(int(k) for k in order)
    if sorted(order) != list(range(n)):
        raise DomainError(f"order {order} is not a permutation of 0..{n - 1}")
    return order


def _round_up(values: np.ndarray, delta: float) -> np.ndarray:
    return np.ceil(values / delta - 1e-9) * delta


def fill_table(
    prep: PreparedInstance,
    order,
    mode: str = EXACT,
    allow_skipping: bool = True,
) -> DpTable:
    """Fill every Pareto cell for ``order``; the table is independent of q*."""
    if mode not in (EXACT, ROUNDED):
        raise DomainError(f"unknown length mode {mode!r}")
    n = prep.n
    order = _check_order(order, n)
    delta = prep.grid.delta
    start = Cell(
        np.zeros(1), np.zeros(1), np.full(1, -1), np.full(1, -1), np.full(1, -1)
    )
    table = DpTable(prep, order, mode, delta, [[start]])
    # Flattened label arrays per filled position: (length, quality, point k, label idx).
    flat = [_flatten(table.cells[0])]

    for i in range(1, n + 1):
        ids = prep.point_ids[order[i - 1]]
        xy_i = prep.xy[ids]
        row = []
        for k, pid in enumerate(ids):
            p = xy_i[k]
            parts_len, parts_q, parts_pos, parts_pt, parts_lab = [], [], [], [], []
            run_q = 0.0
            for j in range(i - 1, -1, -1):
                obj = order[j]
                if not prep.observable[obj, pid]:
                    break
                run_q += prep.qual[obj, pid]
                f_len, f_q, f_pt, f_lab = flat[j]
                src = table.xy(j)[f_pt]
                d = np.hypot(src[:, 0] - p[0], src[:, 1] - p[1])
                cand = f_len + d
                if mode == ROUNDED:
                    cand = _round_up(cand, delta)
                parts_len.append(cand)
                parts_q.append(f_q + run_q)
                parts_pos.append(np.full(len(cand), j))
                parts_pt.append(f_pt)
                parts_lab.append(f_lab)
                if not allow_skipping:
                    break
            if parts_len:
                L = np.concatenate(parts_len)
                Q = np.concatenate(parts_q)
                keep = pareto_mask(L, Q)
                row.append(
                    Cell(
                        L[keep],
                        Q[keep],
                        np.concatenate(parts_pos)[keep],
                        np.concatenate(parts_pt)[keep],
                        np.concatenate(parts_lab)[keep],
                    )
                )
            else:
                e = np.empty(0)
                ei = np.empty(0, dtype=int)
                row.append(Cell(e, e, ei, ei, ei))
        table.cells.append(row)
        flat.append(_flatten(row))
    return table


def _flatten(row: list[Cell]):
    lens = [c.length for c in row]
    return (
        np.concatenate(lens),
        np.concatenate([c.quality for c in row]),
        np.concatenate([np.full(len(c.length), k, dtype=int) for k, c in enumerate(row)]),
        np.concatenate([np.arange(len(c.length)) for c in row]),
    )


def close_table(table: DpTable, q_star: float) -> PlanResult:
    """Pick the shortest closed tour whose quality reaches ``q_star``."""
    prep = table.prep
    n = prep.n
    start = np.asarray(prep.start, dtype=float)
    xy_n = table.xy(n)
    best = None
    candidates = []
    for k, cell in enumerate(table.cells[n]):
        ok = cell.quality >= q_star - TOL
        if not ok.any():
            continue
        back = math.hypot(xy_n[k, 0] - start[0], xy_n[k, 1] - start[1])
        totals = cell.length[ok] + back
        for lab, tot in zip(np.flatnonzero(ok), totals):
            candidates.append((float(tot), -float(cell.quality[lab]), k, int(lab)))
    if not candidates:
        return PlanResult(feasible=False, order_used=list(table.order), q_star=q_star)
    best_total = min(c[0] for c in candidates)
    tied = [c for c in candidates if c[0] <= best_total + TOL]
    best_q = min(c[1] for c in tied)
    tied = [c for c in tied if c[1] <= best_q + TOL]
    plans = [reconstruct(table, k, lab, objective=tot) for tot, _, k, lab in tied]
    best = min(plans, key=lambda pl: (pl.objective, [tuple(p) for p in pl.waypoints]))
    best.q_star = q_star
    return best


def reconstruct(table: DpTable, point_k: int, label: int, objective: float | None = None) -> PlanResult:
    """Follow backpointers from a label at the last position back to the start."""
    prep = table.prep
    order = table.order
    pos, k, lab = prep.n, point_k, label
    stops = []
    while pos > 0:
        cell = table.cells[pos][k]
        assert 0 <= lab < len(cell.length), "dangling backpointer"
        j = int(cell.pred_pos[lab])
        assert 0 <= j < pos, "backpointer must move to an earlier position"
        pid = int(table.point_ids(pos)[k])
        stops.append((Point2(*map(float, prep.xy[pid])), list(order[j:pos])))
        pos, k, lab = j, int(cell.pred_point[lab]), int(cell.pred_label[lab])
    stops.reverse()
    inst = prep.instance
    length = path_length(inst.start, [p for p, _ in stops])
    q = sum(quality(inst.objects[o], p, inst.sensing) for p, objs in stops for o in objs)
    return PlanResult(
        feasible=True,
        total_length=length,
        total_quality=q,
        objective=length if objective is None else objective,
        stops=stops,
        order_used=list(order),
    )


def path_length(start, waypoints) -> float:
    """Closed polyline length start -> waypoints -> start."""
    total = 0.0
    prev = start
    for p in waypoints:
        total += euclid(prev, p)
        prev = p
    return total + euclid(prev, start)


def check_band(prep: PreparedInstance, q_star: float) -> None:
    lo, hi = prep.quality_band()
    if not lo - TOL <= q_star <= hi + TOL:
        raise InfeasibleAssumption(
            f"q* = {q_star:.6g} outside the solvable band [{lo:.6g}, {hi:.6g}]"
        )


def dp_solve(
    prep: PreparedInstance,
    order,
    q_star: float | None = None,
    mode: str = EXACT,
    allow_skipping: bool = True,
    enforce_band: bool = True,
) -> PlanResult:
    """Shortest quality-feasible tour visiting the objects in ``order``.

    ``q_star`` defaults to the instance's fraction of ``n * q_max``.  An
    infeasible result is returned (not raised) when no label reaches q*.
    """
    if q_star is None:
        q_star = prep.q_star()
    if enforce_band:
        check_band(prep, q_star)
    table = fill_table(prep, order, mode=mode, allow_skipping=allow_skipping)
    return close_table(table, q_star)
