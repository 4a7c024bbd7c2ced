"""Planar geometry, the observation predicate and the observation-quality model.

An object at ``o`` facing ``f`` is observable from ``p`` when
``d_min <= |op| <= d_max`` and the angle between ``f`` and ``op`` is at most
``theta``.  Observed quality is ``w * a / (|op| + b)**2 * cos(angle)``.
All angles are radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi

# Slack on the closed observation region.  Generated points sit exactly on
# the d_min circle and rotation/translation perturbs them by a few ulps.
GEOM_TOL = 1e-9


class Point2(NamedTuple):
    x: float
    y: float


class DomainError(ValueError):
    """Raised when an input violates a documented precondition."""


@dataclass(frozen=True)
class Object:
    position: Point2
    facing: float = 0.0
    weight: float = 1.0

    def __post_init__(self):
        x, y = self.position
        if not (math.isfinite(x) and math.isfinite(y)):
            raise DomainError(f"non-finite object position {self.position!r}")
        if not math.isfinite(self.facing):
            raise DomainError("non-finite facing")
        if self.weight < 0:
            raise DomainError(f"weight must be >= 0, got {self.weight}")
        object.__setattr__(self, "position", Point2(float(x), float(y)))
        facing = math.fmod(self.facing, TWO_PI) % TWO_PI
        object.__setattr__(self, "facing", 0.0 if facing >= TWO_PI else facing)

    @property
    def direction(self) -> tuple[float, float]:
        return math.cos(self.facing), math.sin(self.facing)


@dataclass(frozen=True)
class SensingSpec:
    d_min: float = 2.0
    d_max: float = 10.0
    theta: float = math.radians(30.0)
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        if not self.d_min > 0:
            raise DomainError(f"d_min must be > 0, got {self.d_min}")
        if not self.d_max > self.d_min:
            raise DomainError(f"d_max ({self.d_max}) must exceed d_min ({self.d_min})")
        if not 0 < self.theta <= math.pi / 2 + 1e-12:
            raise DomainError(f"theta must lie in (0, pi/2], got {self.theta}")
        if not self.a > 0:
            raise DomainError(f"a must be > 0, got {self.a}")
        if self.b < 0:
            raise DomainError(f"b must be >= 0, got {self.b}")

    def distance_factor(self, dist):
        return self.a / (dist + self.b) ** 2


class QualityBounds(NamedTuple):
    q_min_single: float
    q_max_single: float


def angle_between(u, v) -> float:
    """Unsigned angle in ``[0, pi]`` between two nonzero planar vectors."""
    ux, uy = u
    vx, vy = v
    if (ux == 0 and uy == 0) or (vx == 0 and vy == 0):
        raise DomainError("angle_between is undefined for a zero-length vector")
    # atan2 of cross/dot stays accurate near 0 and pi, unlike acos.
    return abs(math.atan2(ux * vy - uy * vx, ux * vx + uy * vy))


def _offset(o: Object, p) -> tuple[float, float, float]:
    dx = p[0] - o.position.x
    dy = p[1] - o.position.y
    return dx, dy, math.hypot(dx, dy)


def _deviation(o: Object, dx: float, dy: float) -> float:
    return angle_between(o.direction, (dx, dy))


def can_observe(o: Object, p, s: SensingSpec) -> bool:
    dx, dy, dist = _offset(o, p)
    if dist < s.d_min - GEOM_TOL or dist > s.d_max + GEOM_TOL:
        return False
    return _deviation(o, dx, dy) <= s.theta + GEOM_TOL


def quality(o: Object, p, s: SensingSpec) -> float:
    dx, dy, dist = _offset(o, p)
    if dist < s.d_min - GEOM_TOL or dist > s.d_max + GEOM_TOL:
        return 0.0
    dev = _deviation(o, dx, dy)
    if dev > s.theta + GEOM_TOL:
        return 0.0
    return o.weight * s.distance_factor(dist) * math.cos(dev)


def quality_bounds(s: SensingSpec) -> QualityBounds:
    """Per-object quality extremes over the observation region, unit weight."""
    return QualityBounds(
        q_min_single=s.distance_factor(s.d_max) * math.cos(s.theta),
        q_max_single=s.distance_factor(s.d_min),
    )


def euclid(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def rotate(p, angle: float) -> Point2:
    c, s = math.cos(angle), math.sin(angle)
    return Point2(c * p[0] - s * p[1], s * p[0] + c * p[1])


def quality_many(o: Object, xy: np.ndarray, s: SensingSpec) -> np.ndarray:
    """Vectorised :func:`quality` over an ``(m, 2)`` array; 0 where unobservable."""
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    dx = xy[:, 0] - o.position.x
    dy = xy[:, 1] - o.position.y
    dist = np.hypot(dx, dy)
    fx, fy = o.direction
    dev = np.abs(np.arctan2(fx * dy - fy * dx, fx * dx + fy * dy))
    ok = (dist >= s.d_min - GEOM_TOL) & (dist <= s.d_max + GEOM_TOL) & (dev <= s.theta + GEOM_TOL)
    out = np.zeros(len(xy))
    d = dist[ok]
    out[ok] = o.weight * s.a / (d + s.b) ** 2 * np.cos(dev[ok])
    return out


def observable_many(o: Object, xy: np.ndarray, s: SensingSpec) -> np.ndarray:
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    dx = xy[:, 0] - o.position.x
    dy = xy[:, 1] - o.position.y
    dist = np.hypot(dx, dy)
    fx, fy = o.direction
    dev = np.abs(np.arctan2(fx * dy - fy * dx, fx * dx + fy * dy))
    return (dist >= s.d_min - GEOM_TOL) & (dist <= s.d_max + GEOM_TOL) & (dev <= s.theta + GEOM_TOL)
