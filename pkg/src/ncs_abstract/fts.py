"""Finite transition systems with outputs and an extended output metric.

A :class:`System` is a plain labelled transition system: a finite set of
states (opaque, hashable identifiers), a subset of initial states, a finite
input alphabet, a set of ``(source, input, target)`` triples, and a total
output map.  Systems are immutable after construction and all queries are
read-only, so they can be shared freely between threads.

Output labels come in four shapes:

* symbolic atoms (strings),
* real vectors (tuples of floats, compared in the infinity norm),
* the dummy symbol :data:`Q`, which is at infinite distance from every
  concrete label and at distance zero only from itself,
* pairs of the above (:class:`Pair`), compared componentwise and combined
  with ``max``.  Pairs nest exactly one level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Union

from .errors import LabelTypeError, UnknownIdentifierError

StateId = Hashable
InputId = Hashable
Transition = "tuple[StateId, InputId, StateId]"

INFINITY = math.inf


class _DummySymbol:
    """The placeholder output for buffer slots that predate the first sample."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "q"

    def __reduce__(self):
        return (_DummySymbol, ())


#: The unique dummy output symbol.
Q = _DummySymbol()


@dataclass(frozen=True)
class Pair:
    """A two-component output label; components must not be pairs themselves."""

    first: "OutputLabel"
    second: "OutputLabel"

    def __post_init__(self):
        if isinstance(self.first, Pair) or isinstance(self.second, Pair):
            raise LabelTypeError("output pairs nest exactly one level")


OutputLabel = Union[str, "tuple[float, ...]", _DummySymbol, Pair]

DISCRETE = "discrete"
INF_NORM = "infinity-norm"
PAIRWISE_MAX = "pairwise-max"
_METRIC_KINDS = (DISCRETE, INF_NORM, PAIRWISE_MAX)


@dataclass(frozen=True)
class MetricDescriptor:
    """Names the shape of an output space and how distances are taken on it.

    ``discrete`` compares symbolic atoms: distance 0 on equal atoms and
    +inf otherwise, so epsilon-closeness means equality for every finite
    epsilon.  ``infinity-norm`` compares real vectors of equal dimension.
    ``pairwise-max`` compares pairs by the maximum of the componentwise
    distances.  Every kind extends to the dummy symbol: d(q, q) = 0 and
    d(q, y) = +inf for any concrete y.
    """

    kind: str

    def __post_init__(self):
        if self.kind not in _METRIC_KINDS:
            raise LabelTypeError(
                f"unknown metric kind {self.kind!r}; expected one of {_METRIC_KINDS}"
            )


def _atom_or_vector_distance(y1: OutputLabel, y2: OutputLabel) -> float:
    if y1 is Q or y2 is Q:
        return 0.0 if (y1 is Q and y2 is Q) else INFINITY
    if isinstance(y1, str) and isinstance(y2, str):
        return 0.0 if y1 == y2 else INFINITY
    if isinstance(y1, tuple) and isinstance(y2, tuple):
        if len(y1) != len(y2):
            raise LabelTypeError(f"vector labels of different dimension: {y1!r} vs {y2!r}")
        if not y1:
            return 0.0
        return max(abs(a - b) for a, b in zip(y1, y2))
    raise LabelTypeError(f"incompatible output labels: {y1!r} vs {y2!r}")


def output_distance(metric: MetricDescriptor, y1: OutputLabel, y2: OutputLabel) -> float:
    """Extended distance between two output labels under ``metric``.

    Returns a nonnegative float, possibly ``math.inf``.  Raises
    :class:`LabelTypeError` when the labels do not fit the metric kind or
    each other.
    """
    if metric.kind == PAIRWISE_MAX:
        if not (isinstance(y1, Pair) and isinstance(y2, Pair)):
            raise LabelTypeError("pairwise-max metric expects pair labels on both sides")
        return max(
            _atom_or_vector_distance(y1.first, y2.first),
            _atom_or_vector_distance(y1.second, y2.second),
        )
    if isinstance(y1, Pair) or isinstance(y2, Pair):
        raise LabelTypeError(f"{metric.kind} metric cannot compare pair labels")
    if metric.kind == DISCRETE:
        if isinstance(y1, tuple) or isinstance(y2, tuple):
            raise LabelTypeError("discrete metric expects symbolic atoms, not vectors")
    if metric.kind == INF_NORM:
        if isinstance(y1, str) or isinstance(y2, str):
            raise LabelTypeError("infinity-norm metric expects vector labels, not atoms")
    return _atom_or_vector_distance(y1, y2)


@dataclass(frozen=True)
class System:
    """An immutable labelled transition system with outputs.

    ``outputs`` must be total on ``states``; transition endpoints must be
    states and transition labels must be inputs.  The constructor freezes
    all collections, so any iterable may be passed in.
    """

    states: frozenset
    initial: frozenset
    inputs: frozenset
    transitions: frozenset
    outputs: Mapping[StateId, OutputLabel]
    metric: MetricDescriptor

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        object.__setattr__(self, "outputs", dict(self.outputs))
        if not self.initial <= self.states:
            raise UnknownIdentifierError(
                f"initial states not contained in states: {sorted(map(str, self.initial - self.states))}"
            )
        for src, label, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise UnknownIdentifierError(f"transition endpoint not a state: {(src, label, dst)!r}")
            if label not in self.inputs:
                raise UnknownIdentifierError(f"transition input not declared: {(src, label, dst)!r}")
        missing = self.states - self.outputs.keys()
        if missing:
            raise UnknownIdentifierError(
                f"output map is not total; missing {sorted(map(str, missing))}"
            )

    @cached_property
    def _post(self) -> dict:
        index: dict = {}
        for src, label, dst in self.transitions:
            index.setdefault((src, label), set()).add(dst)
        return {key: frozenset(v) for key, v in index.items()}

    @cached_property
    def _enabled(self) -> dict:
        index: dict = {}
        for (src, label), succ in self._post.items():
            if succ:
                index.setdefault(src, set()).add(label)
        return {key: frozenset(v) for key, v in index.items()}

    def posts(self, state: StateId, input_id: InputId) -> frozenset:
        """All ``input_id``-successors of ``state`` (possibly empty)."""
        if state not in self.states:
            raise UnknownIdentifierError(f"unknown state {state!r}")
        if input_id not in self.inputs:
            raise UnknownIdentifierError(f"unknown input {input_id!r}")
        return self._post.get((state, input_id), frozenset())

    def enabled_inputs(self, state: StateId) -> frozenset:
        """Inputs with at least one successor from ``state``."""
        if state not in self.states:
            raise UnknownIdentifierError(f"unknown state {state!r}")
        return self._enabled.get(state, frozenset())

    def size(self) -> int:
        """Number of transitions; the storage-relevant measure of a system."""
        return len(self.transitions)

    def is_deterministic(self) -> bool:
        """True iff every (state, input) has at most one successor."""
        return all(len(succ) <= 1 for succ in self._post.values())

    def output_of(self, state: StateId) -> OutputLabel:
        if state not in self.states:
            raise UnknownIdentifierError(f"unknown state {state!r}")
        return self.outputs[state]

    def is_input_complete(self) -> bool:
        """True iff every declared input is enabled at every state."""
        return all(self.enabled_inputs(s) == self.inputs for s in self.states)


def reachable_prune(system: System) -> System:
    """The subsystem induced by forward reachability from the initial states.

    Initial states are preserved, every remaining transition has a reachable
    source (and therefore a reachable target), and pruning is idempotent.
    """
    reached = set(system.initial)
    frontier = list(system.initial)
    while frontier:
        state = frontier.pop()
        for label in system.enabled_inputs(state):
            for succ in system.posts(state, label):
                if succ not in reached:
                    reached.add(succ)
                    frontier.append(succ)
    return System(
        states=reached,
        initial=system.initial,
        inputs=system.inputs,
        transitions=frozenset(t for t in system.transitions if t[0] in reached),
        outputs={s: system.outputs[s] for s in reached},
        metric=system.metric,
    )
