"""Zone-based integer program: construction, LP-file export, solution checking.

Zone 0 holds the start point alone; zone ``k + 1`` holds the observation
points of object ``k``.  ``X_i_j_p1_p2 = 1`` selects the edge from local point
``p1`` of zone ``i`` to local point ``p2`` of zone ``j``.  Row families:

* ``eq6``  one inbound edge per zone
* ``eq7``  one outbound edge per zone
* ``eq8``  flow balance at every object-zone point (a point is used for both
  entering and leaving, or not at all)
* ``eq9``  flow balance at the start point; the separate first/last start
  zones collapse into one start zone closed by the tour
* ``eq10`` MTZ subtour elimination over object zones, aggregated per zone pair
* ``eq11`` gross quality of the selected points reaches q*
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from obsplan.geometry import DomainError, euclid, quality
from obsplan.instance import PreparedInstance
from obsplan.pareto import PlanResult, path_length

BIN_TOL = 1e-6
ROW_TOL = 1e-6

_VAR_RE = re.compile(r"^X_(\d+)_(\d+)_(\d+)_(\d+)$")


def x_name(i: int, j: int, p1: int, p2: int) -> str:
    return f"X_{i}_{j}_{p1}_{p2}"


def u_name(i: int) -> str:
    return f"u_{i}"


def parse_var(name: str) -> tuple[int, int, int, int]:
    m = _VAR_RE.match(name)
    if m is None:
        raise ValueError(f"not an edge variable: {name!r}")
    return tuple(int(g) for g in m.groups())


@dataclass
class Row:
    name: str
    coeffs: dict[str, float]
    sense: str  # "<=", ">=", "="
    rhs: float

    @property
    def tag(self) -> str:
        return self.name.split("_", 1)[0]

    def activity(self, values: dict[str, float]) -> float:
        return sum(c * values.get(v, 0.0) for v, c in self.coeffs.items())

    def satisfied(self, values: dict[str, float], tol: float = ROW_TOL) -> bool:
        a = self.activity(values)
        if self.sense == "=":
            return abs(a - self.rhs) <= tol
        if self.sense == "<=":
            return a <= self.rhs + tol
        return a >= self.rhs - tol


@dataclass
class IlpModel:
    zone_xy: list[np.ndarray]
    zone_quality: list[np.ndarray]
    q_star: float
    binaries: list[str]
    continuous: list[str]
    objective: dict[str, float]
    rows: list[Row] = field(default_factory=list)

    @property
    def n_zones(self) -> int:
        return len(self.zone_xy)

    def rows_tagged(self, tag: str) -> list[Row]:
        return [r for r in self.rows if r.tag == tag]


def build_model(prep: PreparedInstance, q_star: float | None = None) -> IlpModel:
    if prep.n < 2:
        raise DomainError("the integer program needs at least two objects")
    if q_star is None:
        q_star = prep.q_star()
    zone_xy = [np.asarray([prep.start], dtype=float)]
    zone_q = [np.zeros(1)]
    for k in range(prep.n):
        ids = prep.point_ids[k]
        if len(ids) == 0:
            raise DomainError(f"object {k} has no observation points")
        zone_xy.append(prep.xy[ids])
        zone_q.append(prep.own_quality[ids])
    Z = len(zone_xy)
    N = Z

    objective: dict[str, float] = {}
    out_vars = defaultdict(list)  # (zone, point) -> outbound names
    in_vars = defaultdict(list)
    zone_out = defaultdict(list)
    zone_in = defaultdict(list)
    pair_vars = defaultdict(list)
    binaries = []
    for i in range(Z):
        for j in range(Z):
            if i == j:
                continue
            A, B = zone_xy[i], zone_xy[j]
            d = np.hypot(A[:, None, 0] - B[None, :, 0], A[:, None, 1] - B[None, :, 1])
            for p1 in range(len(A)):
                for p2 in range(len(B)):
                    v = x_name(i, j, p1, p2)
                    binaries.append(v)
                    objective[v] = float(d[p1, p2])
                    out_vars[i, p1].append(v)
                    in_vars[j, p2].append(v)
                    zone_out[i].append(v)
                    zone_in[j].append(v)
                    pair_vars[i, j].append(v)

    rows = []
    for z in range(Z):
        rows.append(Row(f"eq6_zone{z}", {v: 1.0 for v in zone_in[z]}, "=", 1.0))
    for z in range(Z):
        rows.append(Row(f"eq7_zone{z}", {v: 1.0 for v in zone_out[z]}, "=", 1.0))
    for z in range(1, Z):
        for p in range(len(zone_xy[z])):
            rows.append(Row(f"eq8_zone{z}_pt{p}", _balance(out_vars[z, p], in_vars[z, p]), "=", 0.0))
    for p in range(len(zone_xy[0])):
        rows.append(Row(f"eq9_start_pt{p}", _balance(out_vars[0, p], in_vars[0, p]), "=", 0.0))
    for i in range(1, Z):
        for j in range(1, Z):
            if i == j:
                continue
            coeffs = {u_name(i): 1.0, u_name(j): -1.0}
            coeffs.update({v: float(N) for v in pair_vars[i, j]})
            rows.append(Row(f"eq10_mtz{i}_{j}", coeffs, "<=", float(N - 1)))
    q_coeffs = {}
    for z in range(1, Z):
        for p in range(len(zone_xy[z])):
            for v in out_vars[z, p]:
                q_coeffs[v] = float(zone_q[z][p])
    rows.append(Row("eq11_quality", q_coeffs, ">=", float(q_star)))

    return IlpModel(
        zone_xy=zone_xy,
        zone_quality=zone_q,
        q_star=float(q_star),
        binaries=binaries,
        continuous=[u_name(i) for i in range(1, Z)],
        objective=objective,
        rows=rows,
    )


def _balance(out_names, in_names) -> dict[str, float]:
    coeffs = {v: 1.0 for v in out_names}
    for v in in_names:
        coeffs[v] = coeffs.get(v, 0.0) - 1.0
    return coeffs


def expected_counts(model: IlpModel) -> dict[str, int]:
    """Closed-form variable and row counts for a model's zone sizes."""
    sizes = [len(z) for z in model.zone_xy]
    total = sum(sizes)
    n = len(sizes) - 1
    return {
        "binaries": total * total - sum(s * s for s in sizes),
        "eq6": n + 1,
        "eq7": n + 1,
        "eq8": sum(sizes[1:]),
        "eq9": sizes[0],
        "eq10": n * (n - 1),
        "eq11": 1,
    }


def _fmt(c: float) -> str:
    return format(c, ".17g")


def _expr(coeffs: dict[str, float], per_line: int = 4) -> list[str]:
    terms = []
    for v, c in coeffs.items():
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        terms.append(f"{sign} {v}" if mag == 1 else f"{sign} {_fmt(mag)} {v}")
    if not terms:
        terms = ["+ 0 " + next(iter(coeffs))] if coeffs else ["0"]
    lines = []
    for k in range(0, len(terms), per_line):
        lines.append(" ".join(terms[k : k + per_line]))
    return lines


def lp_text(model: IlpModel) -> str:
    out = ["\\ observation tour model", "Minimize"]
    obj = _expr(model.objective)
    out.append(" obj: " + obj[0])
    out.extend("   " + line for line in obj[1:])
    out.append("Subject To")
    for row in model.rows:
        body = _expr(row.coeffs)
        out.append(f" {row.name}: " + body[0])
        out.extend("   " + line for line in body[1:])
        out[-1] += f" {row.sense} {_fmt(row.rhs)}"
    out.append("Bounds")
    for v in model.continuous:
        out.append(f" {v} >= 0")
    out.append("Binaries")
    for k in range(0, len(model.binaries), 8):
        out.append(" " + " ".join(model.binaries[k : k + 8]))
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp(model: IlpModel, path) -> None:
    Path(path).write_text(lp_text(model))


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str]
    tour: list[tuple[int, int]]
    length: float
    quality: float
    objective_value: float


def validate_solution(model: IlpModel, assignment: dict[str, float], prep: PreparedInstance | None = None) -> ValidationReport:
    """Check a variable assignment against every row and recover the tour.

    Missing binaries count as 0.  Missing ``u`` values skip the numeric MTZ
    rows; the subtour check on the extracted successor map still runs.
    """
    violations = []
    values = {v: float(assignment.get(v, 0.0)) for v in model.binaries}
    fractional = [v for v, x in values.items() if min(abs(x), abs(x - 1)) > BIN_TOL]
    if fractional:
        violations.append("fractional: " + ", ".join(sorted(fractional)))
    have_u = all(u in assignment for u in model.continuous)
    if have_u:
        values.update({u: float(assignment[u]) for u in model.continuous})
        violations += [f"bound_{u}" for u in model.continuous if values[u] < -ROW_TOL]
    for row in model.rows:
        if row.tag == "eq10" and not have_u:
            continue
        if not row.satisfied(values):
            violations.append(row.name)

    succ = {}
    for v, x in values.items():
        if v.startswith("X_") and x > 0.5:
            i, j, p1, p2 = parse_var(v)
            succ.setdefault((i, p1), []).append((j, p2))
    tour = [(0, 0)]
    seen = {0}
    node = (0, 0)
    while True:
        nxt = succ.get(node, [])
        if len(nxt) != 1:
            if not nxt:
                violations.append(f"dead_end_zone{node[0]}")
            break
        node = nxt[0]
        if node[0] == 0:
            break
        if node[0] in seen:
            violations.append(f"revisit_zone{node[0]}")
            break
        seen.add(node[0])
        tour.append(node)
    if len(seen) < model.n_zones:
        violations.append("eq10_subtour")

    pts = [model.zone_xy[z][p] for z, p in tour]
    length = path_length(pts[0], pts[1:]) if len(pts) > 1 else 0.0
    if prep is not None:
        inst = prep.instance
        q = sum(quality(inst.objects[z - 1], model.zone_xy[z][p], inst.sensing) for z, p in tour[1:])
    else:
        q = sum(float(model.zone_quality[z][p]) for z, p in tour[1:])
    obj = sum(c * values.get(v, 0.0) for v, c in model.objective.items())
    if q < model.q_star - ROW_TOL and "eq11_quality" not in violations:
        violations.append("eq11_quality")
    return ValidationReport(not violations, violations, tour, length, q, obj)


def tour_assignment(model: IlpModel, tour: list[tuple[int, int]]) -> dict[str, float]:
    """Assignment for a tour given as ``(zone, local point)`` pairs starting at zone 0."""
    if tour[0] != (0, 0):
        tour = [(0, 0)] + list(tour)
    values = {v: 0.0 for v in model.binaries}
    for (i, p1), (j, p2) in zip(tour, tour[1:] + tour[:1]):
        values[x_name(i, j, p1, p2)] = 1.0
    for pos, (z, _) in enumerate(tour[1:], start=1):
        values[u_name(z)] = float(pos)
    return values


def plan_tour(model: IlpModel, plan: PlanResult) -> list[tuple[int, int]]:
    """Map a plan whose every stop observes exactly one object onto zone points."""
    tour = [(0, 0)]
    for p, objs in plan.stops:
        if len(objs) != 1:
            raise DomainError("plans with multi-object stops have no single-point-per-zone encoding")
        z = objs[0] + 1
        d = [euclid(p, q) for q in model.zone_xy[z]]
        k = int(np.argmin(d))
        if d[k] > 1e-9:
            raise DomainError(f"stop {p} is not an observation point of object {objs[0]}")
        tour.append((z, k))
    return tour


def model_stats(model: IlpModel) -> dict[str, int]:
    stats = {"binaries": len(model.binaries)}
    for r in model.rows:
        stats[r.tag] = stats.get(r.tag, 0) + 1
    return stats

