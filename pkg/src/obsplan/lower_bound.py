"""MST lower bound over observation-point clusters.

Vertex 0 is the start point, vertex ``k + 1`` the cluster of object ``k``.
Edge weights are minimum pairwise point distances, forced to zero whenever
the two continuous observation regions intersect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from obsplan.geometry import Object, SensingSpec, observable_many
from obsplan.instance import PreparedInstance
from obsplan.tsp import mst


@dataclass(frozen=True)
class ClusterGraph:
    dist: np.ndarray

    @property
    def size(self) -> int:
        return self.dist.shape[0]


def region_boundary(o: Object, s: SensingSpec, spacing: float) -> np.ndarray:
    """Sample points on the closed boundary of an object's observation region."""
    arcs = []
    for r in (s.d_min, s.d_max):
        m = max(2, math.ceil(2 * s.theta * r / spacing) + 1)
        ang = np.linspace(-s.theta, s.theta, m)
        arcs.append(np.column_stack([r * np.cos(ang), r * np.sin(ang)]))
    m = max(2, math.ceil((s.d_max - s.d_min) / spacing) + 1)
    radii = np.linspace(s.d_min, s.d_max, m)
    for a in (-s.theta, s.theta):
        arcs.append(np.column_stack([radii * math.cos(a), radii * math.sin(a)]))
    local = np.vstack(arcs)
    c, sn = math.cos(o.facing), math.sin(o.facing)
    rot = np.array([[c, -sn], [sn, c]])
    return local @ rot.T + np.asarray(o.position)


def regions_overlap(a: Object, b: Object, s: SensingSpec, spacing: float) -> bool:
    """Sampled test for intersecting observation regions.

    Two closed regions meet iff the boundary of one touches the other or one
    contains the other; both are probed through boundary samples, so slivers
    thinner than ``spacing`` can be missed.
    """
    if math.dist(a.position, b.position) > 2 * s.d_max + 1e-9:
        return False
    if observable_many(b, region_boundary(a, s, spacing), s).any():
        return True
    return bool(observable_many(a, region_boundary(b, s, spacing), s).any())


def build_cluster_graph(prep: PreparedInstance) -> ClusterGraph:
    inst = prep.instance
    s = inst.sensing
    n = prep.n
    spacing = min(prep.grid.delta, (s.d_max - s.d_min) / 8.0)
    dist = np.zeros((n + 1, n + 1))
    start = np.asarray(inst.start, dtype=float)
    for k in range(n):
        xy = prep.xy[prep.point_ids[k]]
        d = float(np.hypot(*(xy - start).T).min())
        if observable_many(inst.objects[k], start[None, :], s)[0]:
            d = 0.0
        dist[0, k + 1] = dist[k + 1, 0] = d
    for a in range(n):
        xa = prep.xy[prep.point_ids[a]]
        for b in range(a + 1, n):
            xb = prep.xy[prep.point_ids[b]]
            diff = xa[:, None, :] - xb[None, :, :]
            d = float(np.hypot(diff[..., 0], diff[..., 1]).min())
            if d > 0 and (
                prep.observable[b, prep.point_ids[a]].any()
                or prep.observable[a, prep.point_ids[b]].any()
                or regions_overlap(inst.objects[a], inst.objects[b], s, spacing)
            ):
                d = 0.0
            dist[a + 1, b + 1] = dist[b + 1, a + 1] = d
    return ClusterGraph(dist)


def lower_bound(prep: PreparedInstance, graph: ClusterGraph | None = None) -> float:
    if graph is None:
        graph = build_cluster_graph(prep)
    return mst(graph.dist)[1]
