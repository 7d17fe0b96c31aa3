"""Approximate (bi)simulation relations between finite metric systems.

A relation between two systems is a finite set of state pairs.  It is an
epsilon-approximate simulation when (i) every left initial state has a
related right initial state, (ii) related states have outputs within
epsilon of each other, and (iii) every left move is matched by a right move
that stays inside the relation.  The *alternating* variant replaces (iii)
with the game-flavored transfer needed for nondeterministic systems: for
every left input there is a right input such that every right successor is
matched by some left successor.  The two variants coincide on deterministic
systems.

Checks report the first violated condition in the fixed order (i), (ii),
(iii) together with a witness, so failures are deterministic and
machine-readable.  :func:`largest_approx_simulation` computes the greatest
fixed point of conditions (ii) + (iii); :func:`lift_relation` lifts a
relation between two plants to a relation between the network-closure
models built from them, buffer slot by buffer slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import LabelTypeError, NcsAbstractError, StructuralError
from .fts import Q, System, output_distance
from .packets import DelayBounds
from .builder import NcsState, StaticNcsState

COND_INITIAL = "initial-coverage"
COND_CLOSENESS = "output-closeness"
COND_TRANSFER = "transfer"


@dataclass(frozen=True)
class Relation:
    """A finite set of (left-state, right-state) pairs between two systems."""

    left: System
    right: System
    pairs: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        for a, b in self.pairs:
            if a not in self.left.states or b not in self.right.states:
                raise StructuralError(f"pair {(a, b)!r} not within the related systems")

    def inverse(self) -> "Relation":
        return Relation(self.right, self.left, frozenset((b, a) for a, b in self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __iter__(self):
        return iter(self.pairs)


@dataclass(frozen=True)
class Violation:
    """Witness of the first failed condition of a relation check."""

    condition: str
    left_state: Optional[str] = None
    right_state: Optional[str] = None
    input_label: Optional[str] = None
    direction: str = "forward"

    def as_dict(self) -> dict:
        return {
            "condition": self.condition,
            "left": None if self.left_state is None else str(self.left_state),
            "right": None if self.right_state is None else str(self.right_state),
            "input": None if self.input_label is None else str(self.input_label),
            "direction": self.direction,
        }


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    violation: Optional[Violation] = None

    def __bool__(self) -> bool:
        return self.holds


def _require_same_metric(left: System, right: System) -> None:
    if left.metric != right.metric:
        raise LabelTypeError(
            f"systems carry different output metrics: {left.metric.kind} vs {right.metric.kind}"
        )


def _sorted_pairs(pairs) -> list:
    return sorted(pairs, key=lambda p: (str(p[0]), str(p[1])))


def _plain_transfer_ok(rel: Relation, left_state, right_state, input_label) -> bool:
    # every u_a-successor on the left must be matched by some right move
    pairs = rel.pairs
    right = rel.right
    right_succs = [
        s for u in sorted(right.enabled_inputs(right_state), key=str)
        for s in right.posts(right_state, u)
    ]
    for left_succ in rel.left.posts(left_state, input_label):
        if not any((left_succ, s) in pairs for s in right_succs):
            return False
    return True


def _alternating_transfer_ok(rel: Relation, left_state, right_state, input_label) -> bool:
    # exists u_b such that every u_b-successor is matched by some u_a-successor
    pairs = rel.pairs
    left_succs = rel.left.posts(left_state, input_label)
    for u_b in sorted(rel.right.enabled_inputs(right_state), key=str):
        if all(
            any((a, b) in pairs for a in left_succs)
            for b in rel.right.posts(right_state, u_b)
        ):
            return True
    return False


def _transfer_ok(rel: Relation, left_state, right_state, input_label, alternating: bool) -> bool:
    if alternating:
        return _alternating_transfer_ok(rel, left_state, right_state, input_label)
    return _plain_transfer_ok(rel, left_state, right_state, input_label)


def check_simulation(
    relation: Relation, epsilon: float, alternating: bool = False, direction: str = "forward"
) -> CheckResult:
    """Check the three simulation conditions at tolerance ``epsilon``.

    Returns the first violation in the order initial coverage, output
    closeness, transfer, scanning states in sorted order so reruns are
    bit-identical.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    left, right = relation.left, relation.right
    _require_same_metric(left, right)
    related_rights = {}
    for a, b in relation.pairs:
        related_rights.setdefault(a, set()).add(b)

    for a0 in sorted(left.initial, key=str):
        if not related_rights.get(a0, set()) & right.initial:
            return CheckResult(False, Violation(COND_INITIAL, str(a0), None, None, direction))

    for a, b in _sorted_pairs(relation.pairs):
        if output_distance(left.metric, left.outputs[a], right.outputs[b]) > epsilon:
            return CheckResult(False, Violation(COND_CLOSENESS, str(a), str(b), None, direction))

    for a, b in _sorted_pairs(relation.pairs):
        for u in sorted(left.enabled_inputs(a), key=str):
            if not _transfer_ok(relation, a, b, u, alternating):
                return CheckResult(False, Violation(COND_TRANSFER, str(a), str(b), str(u), direction))
    return CheckResult(True)


def check_bisimulation(relation: Relation, epsilon: float, alternating: bool = False) -> CheckResult:
    """Check ``relation`` forward and its inverse backward.

    A failing result carries a direction flag telling which side broke.
    """
    forward = check_simulation(relation, epsilon, alternating, direction="forward")
    if not forward.holds:
        return forward
    return check_simulation(relation.inverse(), epsilon, alternating, direction="backward")


class LargestRelationResult(NamedTuple):
    relation: Relation
    initial_covered: bool


def largest_approx_simulation(
    left: System, right: System, epsilon: float, alternating: bool = False
) -> LargestRelationResult:
    """Greatest relation satisfying output closeness and transfer.

    Starts from all output-close pairs and removes violating pairs until a
    fixed point is reached; the result contains every relation that
    satisfies conditions (ii) and (iii).  Initial-state coverage is reported
    separately, so the caller decides whether a simulation exists.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    _require_same_metric(left, right)
    pairs = {
        (a, b)
        for a in left.states
        for b in right.states
        if output_distance(left.metric, left.outputs[a], right.outputs[b]) <= epsilon
    }

    changed = True
    while changed:
        changed = False
        rel = Relation(left, right, frozenset(pairs))
        doomed = [
            (a, b)
            for (a, b) in pairs
            if any(
                not _transfer_ok(rel, a, b, u, alternating)
                for u in left.enabled_inputs(a)
            )
        ]
        if doomed:
            pairs.difference_update(doomed)
            changed = True

    relation = Relation(left, right, frozenset(pairs))
    related = {}
    for a, b in pairs:
        related.setdefault(a, set()).add(b)
    covered = all(related.get(a0, set()) & right.initial for a0 in left.initial)
    return LargestRelationResult(relation, covered)


def largest_approx_bisimulation(
    left: System, right: System, epsilon: float, alternating: bool = False
) -> LargestRelationResult:
    """Greatest relation whose pairs satisfy output closeness and transfer in
    both directions; initial coverage is reported for both directions at once."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    _require_same_metric(left, right)
    pairs = {
        (a, b)
        for a in left.states
        for b in right.states
        if output_distance(left.metric, left.outputs[a], right.outputs[b]) <= epsilon
    }

    changed = True
    while changed:
        changed = False
        rel = Relation(left, right, frozenset(pairs))
        inv = rel.inverse()
        doomed = [
            (a, b)
            for (a, b) in pairs
            if any(not _transfer_ok(rel, a, b, u, alternating) for u in left.enabled_inputs(a))
            or any(not _transfer_ok(inv, b, a, u, alternating) for u in right.enabled_inputs(b))
        ]
        if doomed:
            pairs.difference_update(doomed)
            changed = True

    relation = Relation(left, right, frozenset(pairs))
    fwd = {}
    bwd = {}
    for a, b in pairs:
        fwd.setdefault(a, set()).add(b)
        bwd.setdefault(b, set()).add(a)
    covered = all(fwd.get(a0, set()) & right.initial for a0 in left.initial) and all(
        bwd.get(b0, set()) & left.initial for b0 in right.initial
    )
    return LargestRelationResult(relation, covered)


def _parse_states(system: System, bounds: DelayBounds, side: str):
    """Parse a built model's canonical state keys; returns (kind, mapping)."""
    states = {}
    kind = None
    for key in system.states:
        if not isinstance(key, str):
            raise StructuralError(f"{side} system state {key!r} is not a canonical string")
        groups = key.count("|") + 1 if key.startswith("(") else 0
        if groups == 4:
            parsed, this_kind = NcsState.from_key(key), "dynamic"
        elif groups == 3:
            parsed, this_kind = StaticNcsState.from_key(key), "static"
        else:
            raise StructuralError(f"{side} system state {key!r} is not a network-closure state")
        if kind is None:
            kind = this_kind
        elif kind != this_kind:
            raise StructuralError(f"{side} system mixes buffer shapes")
        try:
            parsed.check_shape(bounds)
        except NcsAbstractError as exc:
            raise StructuralError(f"{side} system was not built with bounds {bounds}: {exc}") from exc
        states[key] = parsed
    return kind, states


def _inputs_compatible(plant_rel: Relation) -> "callable":
    """Buffered-input matching for the lift.

    With identical input alphabets the match is plain equality.  Otherwise
    input ``u`` on the left matches ``v`` on the right when, from every
    related plant pair, every right ``v``-move is matched by some left
    ``u``-move staying related (evaluated by enumeration; both plants are
    finite).
    """
    left, right = plant_rel.left, plant_rel.right
    if left.inputs == right.inputs:
        return lambda u, v: u == v

    table = {}
    for u in left.inputs:
        for v in right.inputs:
            table[(u, v)] = all(
                any((a2, b2) in plant_rel.pairs for a2 in left.posts(a, u))
                for (a, b) in plant_rel.pairs
                for b2 in right.posts(b, v)
            )
    return lambda u, v: table[(u, v)]


def lift_relation(
    plant_rel: Relation, bounds: DelayBounds, left: System, right: System
) -> Relation:
    """Lift a plant relation to the built network-closure models.

    A left state is related to a right state when all delay buffers agree
    componentwise, every measurement slot is related under ``plant_rel``
    (with the dummy ``q`` matching only ``q``), and buffered inputs match
    slot by slot.  Both models must have been built with the same ``bounds``
    and the same shape (two-channel or single-channel).
    """
    left_kind, left_states = _parse_states(left, bounds, "left")
    right_kind, right_states = _parse_states(right, bounds, "right")
    if left_kind != right_kind:
        raise StructuralError(f"cannot lift between a {left_kind} and a {right_kind} model")

    plant_pairs = plant_rel.pairs
    inputs_match = _inputs_compatible(plant_rel)

    def meas_related(a, b) -> bool:
        if a is Q or b is Q:
            return a is b
        return (a, b) in plant_pairs

    by_delays = {}
    if left_kind == "dynamic":
        for key, st in right_states.items():
            by_delays.setdefault((st.sc_delays, st.ca_delays), []).append((key, st))
        pairs = set()
        for lkey, ls in left_states.items():
            for rkey, rs in by_delays.get((ls.sc_delays, ls.ca_delays), ()):
                if all(meas_related(a, b) for a, b in zip(ls.measurements, rs.measurements)) and all(
                    inputs_match(u, v) for u, v in zip(ls.inputs, rs.inputs)
                ):
                    pairs.add((lkey, rkey))
    else:
        for key, st in right_states.items():
            by_delays.setdefault(st.delays, []).append((key, st))
        pairs = set()
        for lkey, ls in left_states.items():
            for rkey, rs in by_delays.get(ls.delays, ()):
                if (ls.plant_state, rs.plant_state) in plant_pairs and all(
                    inputs_match(u, v) for u, v in zip(ls.inputs, rs.inputs)
                ):
                    pairs.add((lkey, rkey))

    return Relation(left, right, frozenset(pairs))
