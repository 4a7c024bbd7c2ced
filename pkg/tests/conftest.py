import math
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from obsplan.geometry import Object, Point2, SensingSpec  # noqa: E402
from obsplan.instance import Instance  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    def record(criterion: int, passed: bool, detail: str) -> None:
        ACCEPTANCE[criterion] = (bool(passed), detail)
        print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def default_sensing():
    return SensingSpec()


def make_instance(specs, start=(0.0, 0.0), sensing=None, epsilon=0.5, q_star_fraction=0.5):
    """Instance from ``(x, y, facing_deg[, weight])`` tuples."""
    objs = [
        Object(Point2(x, y), math.radians(f), *(rest or ()))
        for x, y, f, *rest in specs
    ]
    return Instance(
        objects=tuple(objs),
        sensing=sensing or SensingSpec(),
        start=Point2(*start),
        epsilon=epsilon,
        q_star_fraction=q_star_fraction,
    )
