"""Annular-sector discretisation of each object's observation region.

The region of a canonical object (origin, facing +x) is cut into rings in the
distance domain and, per ring, into an odd number of equal angular segments
symmetric about the facing axis.  Each segment is represented by its
best-quality corner: inner radius, angle boundary nearest the axis (the
central segment is represented on the axis itself).  Every object's point set
is the canonical set rotated by its facing and translated to its position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from obsplan.geometry import (
    DomainError,
    Object,
    Point2,
    SensingSpec,
    quality,
    quality_many,
    rotate,
)

# Boundary comparisons in ring construction.
_RING_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    epsilon: float
    delta: float
    radial_step: float
    angular_arc_step: float
    ring_boundaries: tuple[float, ...]
    angle_boundaries: tuple[tuple[float, ...], ...]

    @property
    def n_rings(self) -> int:
        return len(self.ring_boundaries) - 1

    @property
    def segments_per_ring(self) -> tuple[int, ...]:
        return tuple(len(b) - 1 for b in self.angle_boundaries)


@dataclass(frozen=True)
class ObservationPoint:
    position: Point2
    object_index: int
    ring_index: int
    angle_index: int
    own_quality: float


def pairwise_diameter(objects) -> float:
    if len(objects) < 2:
        raise DomainError("at least two objects are required")
    xy = np.array([o.position for o in objects], dtype=float)
    diff = xy[:, None, :] - xy[None, :, :]
    return float(np.sqrt((diff**2).sum(-1)).max())


def _ring_boundaries(s: SensingSpec, delta: float, epsilon: float) -> list[float]:
    # a/(l+b)^2 may drop by at most (1+eps) across a ring: (l'+b) <= (l+b)*sqrt(1+eps).
    growth = math.sqrt(1.0 + epsilon)
    bounds = [s.d_min]
    while bounds[-1] < s.d_max - _RING_TOL:
        l = bounds[-1]
        nxt = min(l + delta, (l + s.b) * growth - s.b, s.d_max)
        if s.d_max - nxt <= _RING_TOL:
            nxt = s.d_max
        bounds.append(nxt)
    return bounds


def _angle_segment_count(s: SensingSpec, outer_radius: float, delta: float, epsilon: float) -> int:
    """Smallest odd segment count meeting the arc-length and cosine-ratio caps."""
    m = max(1, math.ceil(2.0 * s.theta * outer_radius / delta - 1e-12))
    if m % 2 == 0:
        m += 1
    if math.cos(s.theta) < 1e-12:
        # Quality vanishes on a 90 degree rim, so no segmentation bounds the
        # ratio there; only the arc-length cap applies.
        return m
    while True:
        w = 2.0 * s.theta / m
        # For equal widths cos(near)/cos(far) grows away from the axis, so the
        # rim segment and the central one bound every other segment.
        rim = math.cos(s.theta - w) / math.cos(s.theta)
        centre = 1.0 / math.cos(min(w / 2.0, s.theta))
        if max(rim, centre) <= 1.0 + epsilon + 1e-15:
            return m
        m += 2


def build_grid(s: SensingSpec, n: int, D: float, epsilon: float) -> GridSpec:
    if not 0 < epsilon <= 1:
        raise DomainError(f"epsilon must lie in (0, 1], got {epsilon}")
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if not D > 0:
        raise DomainError(f"D must be > 0, got {D}")
    delta = epsilon * D / n
    rings = _ring_boundaries(s, delta, epsilon)
    angles = []
    for outer in rings[1:]:
        m = _angle_segment_count(s, outer, delta, epsilon)
        w = 2.0 * s.theta / m
        edges = [-s.theta + k * w for k in range(m + 1)]
        edges[0], edges[-1] = -s.theta, s.theta
        angles.append(tuple(edges))
    radial_step = max(b - a for a, b in zip(rings, rings[1:]))
    arc_step = max(outer * (e[1] - e[0]) for outer, e in zip(rings[1:], angles))
    return GridSpec(
        epsilon=epsilon,
        delta=delta,
        radial_step=radial_step,
        angular_arc_step=arc_step,
        ring_boundaries=tuple(rings),
        angle_boundaries=tuple(angles),
    )


def _representative_angle(lo: float, hi: float) -> float:
    if lo <= 0.0 <= hi:
        return 0.0
    return lo if abs(lo) < abs(hi) else hi


_CANONICAL = Object(Point2(0.0, 0.0), 0.0, 1.0)


def canonical_points(s: SensingSpec, grid: GridSpec) -> list[ObservationPoint]:
    pts = []
    for k, (inner, edges) in enumerate(zip(grid.ring_boundaries[:-1], grid.angle_boundaries)):
        for j, (lo, hi) in enumerate(zip(edges, edges[1:])):
            ang = _representative_angle(lo, hi)
            pos = Point2(inner * math.cos(ang), inner * math.sin(ang))
            pts.append(ObservationPoint(pos, 0, k, j, quality(_CANONICAL, pos, s)))
    return pts


def generate_observation_points(objects, s: SensingSpec, epsilon: float) -> list[ObservationPoint]:
    """Observation points of every object, ordered by object, ring, angle."""
    n = len(objects)
    D = pairwise_diameter(objects)
    grid = build_grid(s, n, D, epsilon)
    return place_points(objects, s, canonical_points(s, grid))


def place_points(objects, s: SensingSpec, canonical) -> list[ObservationPoint]:
    out = []
    for i, o in enumerate(objects):
        placed = [rotate(cp.position, o.facing) for cp in canonical]
        placed = [Point2(p.x + o.position.x, p.y + o.position.y) for p in placed]
        q = quality_many(o, np.array(placed), s)
        out.extend(
            ObservationPoint(p, i, cp.ring_index, cp.angle_index, float(qi))
            for p, cp, qi in zip(placed, canonical, q)
        )
    return out


def group_by_object(points, n: int) -> list[list[ObservationPoint]]:
    groups: list[list[ObservationPoint]] = [[] for _ in range(n)]
    for p in points:
        groups[p.object_index].append(p)
    return groups

