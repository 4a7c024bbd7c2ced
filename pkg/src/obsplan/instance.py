"""Problem instances, their JSON form, and the prepared (discretised) view."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from obsplan.discretize import (
    GridSpec,
    ObservationPoint,
    build_grid,
    canonical_points,
    pairwise_diameter,
    place_points,
)
from obsplan.geometry import (
    DomainError,
    Object,
    Point2,
    SensingSpec,
    observable_many,
    quality_bounds,
    quality_many,
)


@dataclass(frozen=True)
class Instance:
    objects: tuple[Object, ...]
    sensing: SensingSpec = field(default_factory=SensingSpec)
    start: Point2 = Point2(0.0, 0.0)
    epsilon: float = 0.5
    q_star_fraction: float = 0.5
    map_size: float = 200.0
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "start", Point2(*map(float, self.start)))
        if not 0 < self.q_star_fraction <= 1:
            raise DomainError(f"q_star_fraction must lie in (0, 1], got {self.q_star_fraction}")

    @property
    def n(self) -> int:
        return len(self.objects)

    def to_json(self) -> dict:
        s = self.sensing
        return {
            "map_size": self.map_size,
            "start": [self.start.x, self.start.y],
            "epsilon": self.epsilon,
            "q_star_fraction": self.q_star_fraction,
            "sensing": {
                "d_min": s.d_min,
                "d_max": s.d_max,
                "theta_deg": math.degrees(s.theta),
                "a": s.a,
                "b": s.b,
            },
            "objects": [
                {
                    "x": o.position.x,
                    "y": o.position.y,
                    "facing_deg": math.degrees(o.facing),
                    "weight": o.weight,
                }
                for o in self.objects
            ],
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: dict) -> Instance:
        try:
            s = data["sensing"]
            sensing = SensingSpec(
                d_min=float(s["d_min"]),
                d_max=float(s["d_max"]),
                theta=math.radians(float(s["theta_deg"])),
                a=float(s.get("a", 1.0)),
                b=float(s.get("b", 0.0)),
            )
            objects = tuple(
                Object(
                    Point2(float(o["x"]), float(o["y"])),
                    math.radians(float(o.get("facing_deg", 0.0))),
                    float(o.get("weight", 1.0)),
                )
                for o in data["objects"]
            )
            return cls(
                objects=objects,
                sensing=sensing,
                start=Point2(*map(float, data.get("start", (0.0, 0.0)))),
                epsilon=float(data.get("epsilon", 0.5)),
                q_star_fraction=float(data.get("q_star_fraction", 0.5)),
                map_size=float(data.get("map_size", 200.0)),
                seed=data.get("seed"),
            )
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed instance JSON: {exc!r}") from exc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> Instance:
        return cls.from_json(json.loads(Path(path).read_text()))


class PreparedInstance:
    """An instance together with its observation points and cached lookups.

    ``qual[k, u]`` is the (weighted) quality of object ``k`` from global point
    ``u``; it is zero exactly where ``k`` cannot be observed from ``u``.
    """

    def __init__(self, instance: Instance, points: list[ObservationPoint], grid: GridSpec):
        self.instance = instance
        self.points = points
        self.grid = grid
        n = instance.n
        self.xy = np.array([p.position for p in points], dtype=float).reshape(-1, 2)
        self.owner = np.array([p.object_index for p in points], dtype=int)
        self.own_quality = np.array([p.own_quality for p in points], dtype=float)
        self.point_ids = [np.flatnonzero(self.owner == k) for k in range(n)]
        if any(len(ids) == 0 for ids in self.point_ids):
            raise DomainError("some object has no observation points")
        s = instance.sensing
        self.qual = np.vstack([quality_many(o, self.xy, s) for o in instance.objects])
        self.observable = np.vstack([observable_many(o, self.xy, s) for o in instance.objects])

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def start(self) -> Point2:
        return self.instance.start

    @cached_property
    def best_quality(self) -> np.ndarray:
        """Best grid-attainable quality per object."""
        return np.array([self.own_quality[ids].max() for ids in self.point_ids])

    @cached_property
    def q_unit(self) -> float:
        return float(self.best_quality.max())

    def q_star(self, fraction: float | None = None) -> float:
        if fraction is None:
            fraction = self.instance.q_star_fraction
        return fraction * self.n * self.q_unit

    def quality_band(self) -> tuple[float, float]:
        inst = self.instance
        q_min = quality_bounds(inst.sensing).q_min_single
        w_min = min(o.weight for o in inst.objects)
        return self.n * q_min * w_min, self.n * self.q_unit


def prepare(instance: Instance) -> PreparedInstance:
    D = pairwise_diameter(instance.objects)
    grid = build_grid(instance.sensing, instance.n, D, instance.epsilon)
    points = place_points(instance.objects, instance.sensing, canonical_points(instance.sensing, grid))
    return PreparedInstance(instance, points, grid)
