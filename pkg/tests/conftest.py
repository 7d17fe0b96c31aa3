from pathlib import Path

import pytest

from ncs_abstract import DISCRETE, DelayBounds, MetricDescriptor, System

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def two_state_plant() -> System:
    """The two-state, two-input loop used throughout the worked examples."""
    return System(
        states={"x", "y"},
        initial={"x", "y"},
        inputs={"a", "b"},
        transitions={("x", "a", "x"), ("x", "b", "y"), ("y", "a", "x"), ("y", "b", "y")},
        outputs={"x": "Z", "y": "W"},
        metric=MetricDescriptor(DISCRETE),
    )


@pytest.fixture
def split_bounds() -> DelayBounds:
    """Channel bounds with combined range [1; 2]."""
    return DelayBounds(1, 1, 0, 1)


@pytest.fixture
def plant_file() -> Path:
    return REPO_ROOT / "plants" / "two_state_plant.json"
