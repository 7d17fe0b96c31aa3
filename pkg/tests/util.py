"""Random instance generators shared by the property and acceptance suites."""

from __future__ import annotations

import random

from ncs_abstract import DISCRETE, INF_NORM, DelayBounds, MetricDescriptor, System

ATOMS = ("A", "B", "C")
LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)


def random_plant(rng: random.Random, max_states: int = 5, max_inputs: int = 3) -> System:
    """A finite plant with every input enabled at every state."""
    n = rng.randint(1, max_states)
    m = rng.randint(1, max_inputs)
    states = [f"s{i}" for i in range(n)]
    inputs = [f"u{i}" for i in range(m)]
    transitions = set()
    for s in states:
        for u in inputs:
            for t in rng.sample(states, rng.randint(1, min(2, n))):
                transitions.add((s, u, t))
    return System(
        states=states,
        initial=rng.sample(states, rng.randint(1, n)),
        inputs=inputs,
        transitions=transitions,
        outputs={s: rng.choice(ATOMS) for s in states},
        metric=MetricDescriptor(DISCRETE),
    )


def random_bounds(rng: random.Random, total_max: int = 3) -> DelayBounds:
    """Channel bounds with nsc_max + nca_max <= total_max and each max >= 1."""
    nsc_max = rng.randint(1, total_max - 1)
    nca_max = rng.randint(1, total_max - nsc_max)
    return DelayBounds(rng.randint(0, nsc_max), nsc_max, rng.randint(0, nca_max), nca_max)


def random_vector_system(
    rng: random.Random, max_states: int = 20, deterministic: bool = False
) -> System:
    """A system with one-dimensional vector outputs, for epsilon-sensitive tests."""
    n = rng.randint(2, max_states)
    m = rng.randint(1, 2)
    states = [f"s{i}" for i in range(n)]
    inputs = [f"u{i}" for i in range(m)]
    transitions = set()
    for s in states:
        for u in inputs:
            width = 1 if deterministic else rng.randint(1, 2)
            for t in rng.sample(states, width):
                transitions.add((s, u, t))
    return System(
        states=states,
        initial=rng.sample(states, rng.randint(1, n)),
        inputs=inputs,
        transitions=transitions,
        outputs={s: (rng.choice(LEVELS),) for s in states},
        metric=MetricDescriptor(INF_NORM),
    )
