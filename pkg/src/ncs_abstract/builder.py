"""Construction of finite network-closure models from a plant abstraction.

Given any finite plant model whose inputs are enabled everywhere, the
builders below produce the closed-loop model of plant + sampler + delayed,
lossy, reordering channels + hold elements, as a plain :class:`~.fts.System`:

* :func:`build_ncs_dynamic` keeps the two channels separate.  States buffer
  the last ``nsc_max`` measurements (padded with the dummy symbol ``q``
  before real samples propagate), the last ``nca_max`` control inputs, and
  the delays those packets suffered.  Outputs are pairs: the plant output at
  the sensor and the plant output the controller currently uses.
* :func:`build_ncs_static` merges both delays into a single actuation-side
  channel bounded by ``[nsc_min + nca_min; nsc_max + nca_max]``, which is
  sound when the controller is memoryless.  Outputs are plain plant outputs.

Each transition shifts every buffer by one slot, draws fresh channel delays
nondeterministically from their ranges, and moves the plant by the buffered
input selected by the packet logic of :mod:`.packets`.  Only states reachable
from the initial states are materialized unless the full product space is
explicitly requested.

Model states are canonical strings (see :meth:`NcsState.key`), so built
systems serialize and reload without loss.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

from .errors import ConstructionError, ParseError, RangeError
from .fts import INF_NORM, PAIRWISE_MAX, MetricDescriptor, OutputLabel, Pair, Q, System
from .packets import (
    DelayBounds,
    channel_history,
    controller_measurement_index,
    held_input_index,
)

#: Spelling of the dummy symbol inside canonical state strings and JSON.
Q_TOKEN = "__q__"

_RESERVED = re.compile(r"[()<>|,]")


def _check_plant_identifiers(plant: System) -> None:
    for name in list(plant.states) + list(plant.inputs):
        if not isinstance(name, str) or not name or _RESERVED.search(name) or name == Q_TOKEN:
            raise ConstructionError(
                f"plant identifier {name!r} must be a nonempty string without any of ( ) < > | ,"
            )


def _check_plant(plant: System, bounds: DelayBounds) -> None:
    if not plant.inputs:
        raise ConstructionError("plant has an empty input set")
    if not plant.initial:
        raise ConstructionError("plant has no initial states")
    if not plant.is_input_complete():
        raise ConstructionError(
            "every plant input must be enabled at every plant state "
            "(forward completeness of the closed loop requires it)"
        )
    _check_plant_identifiers(plant)
    if bounds.nsc_max < 1 or bounds.nca_max < 1:
        raise ConstructionError(
            "each channel must be able to hold at least one in-flight packet "
            f"(nsc_max={bounds.nsc_max}, nca_max={bounds.nca_max})"
        )


def _group(items: Iterable[str]) -> str:
    return "<" + ",".join(items) + ">"


def _split_groups(key: str, count: int) -> list:
    if not (key.startswith("(") and key.endswith(")")):
        raise ParseError(f"malformed state key {key!r}")
    groups = key[1:-1].split("|")
    if len(groups) != count:
        raise ParseError(f"state key {key!r} must have {count} buffer groups")
    items = []
    for group in groups:
        if not (group.startswith("<") and group.endswith(">")):
            raise ParseError(f"malformed buffer group in {key!r}")
        body = group[1:-1]
        items.append(tuple(body.split(",")) if body else ())
    return items


def _ints(items: Sequence[str], key: str) -> tuple:
    try:
        return tuple(int(x) for x in items)
    except ValueError as exc:
        raise ParseError(f"non-integer delay in state key {key!r}") from exc


@dataclass(frozen=True)
class NcsState:
    """One state of the two-channel model: four shift buffers.

    ``measurements[i]`` is the plant state sampled ``i`` samples ago (or the
    dummy ``q`` for slots predating the first sample; slot 0 is always a real
    plant state).  ``inputs[i]`` is the control value sent ``i + 1`` samples
    ago, and ``sc_delays[i]`` / ``ca_delays[i]`` are the delays of the
    measurement / control packets sent ``i + 1`` samples ago.
    """

    measurements: tuple
    inputs: tuple
    sc_delays: tuple
    ca_delays: tuple

    def key(self) -> str:
        """Canonical interchange string, e.g. ``(<x,__q__>|<a>|<1,1>|<0>)``."""
        meas = (Q_TOKEN if m is Q else m for m in self.measurements)
        return "(" + "|".join(
            (
                _group(meas),
                _group(self.inputs),
                _group(str(d) for d in self.sc_delays),
                _group(str(d) for d in self.ca_delays),
            )
        ) + ")"

    @classmethod
    def from_key(cls, key: str) -> "NcsState":
        meas, inputs, sc, ca = _split_groups(key, 4)
        return cls(
            measurements=tuple(Q if m == Q_TOKEN else m for m in meas),
            inputs=inputs,
            sc_delays=_ints(sc, key),
            ca_delays=_ints(ca, key),
        )

    def check_shape(self, bounds: DelayBounds) -> None:
        ok = (
            len(self.measurements) == bounds.nsc_max
            and len(self.inputs) == bounds.nca_max
            and len(self.sc_delays) == bounds.nsc_max
            and len(self.ca_delays) == bounds.nca_max
            and all(d in bounds.sc_choices for d in self.sc_delays)
            and all(d in bounds.ca_choices for d in self.ca_delays)
        )
        if not ok:
            raise RangeError(f"state {self.key()} does not fit bounds {bounds}")


@dataclass(frozen=True)
class StaticNcsState:
    """One state of the single-channel model: plant state plus two buffers."""

    plant_state: str
    inputs: tuple
    delays: tuple

    def key(self) -> str:
        return "(" + "|".join(
            (
                _group((self.plant_state,)),
                _group(self.inputs),
                _group(str(d) for d in self.delays),
            )
        ) + ")"

    @classmethod
    def from_key(cls, key: str) -> "StaticNcsState":
        plant, inputs, delays = _split_groups(key, 3)
        if len(plant) != 1:
            raise ParseError(f"state key {key!r} must hold exactly one plant state")
        return cls(plant_state=plant[0], inputs=inputs, delays=_ints(delays, key))

    def check_shape(self, bounds: DelayBounds) -> None:
        n_max = bounds.n_max
        ok = (
            len(self.inputs) == n_max
            and len(self.delays) == n_max
            and all(d in bounds.combined_choices for d in self.delays)
        )
        if not ok:
            raise RangeError(f"state {self.key()} does not fit bounds {bounds}")


def _plant_output(plant: System, entry) -> OutputLabel:
    return Q if entry is Q else plant.outputs[entry]


def controller_slot(state: NcsState, bounds: DelayBounds) -> int:
    """Buffer slot (0-based) of the measurement the controller currently uses.

    With ``nsc_min == 0`` a measurement can cross the channel within its own
    sampling interval, and the freshest buffered plant state resolves the
    selection; the delay of that just-sent packet is not yet part of the
    state, so the model commits to the delivered reading.
    """
    if bounds.nsc_min == 0:
        return 0
    history = channel_history(state.sc_delays, bounds.nsc_min, bounds.nsc_max)
    # offset is l* - nsc_max in [-nsc_max; -nsc_min]; slot counts from the newest entry
    return -controller_measurement_index(history) - 1


def ncs_output(state: NcsState, bounds: DelayBounds, plant: System) -> Pair:
    """Output pair of a two-channel state.

    First component: plant output of the newest buffered measurement (what
    the sensor just sampled).  Second component: plant output of the
    measurement the controller currently uses, which is the dummy ``q`` when
    that slot has not been filled yet.
    """
    state.check_shape(bounds)
    slot = controller_slot(state, bounds)
    return Pair(
        _plant_output(plant, state.measurements[0]),
        _plant_output(plant, state.measurements[slot]),
    )


def _dynamic_initials(plant: System, bounds: DelayBounds) -> list:
    padding = (Q,) * (bounds.nsc_max - 1)
    return [
        NcsState(
            measurements=(x0,) + padding,
            inputs=(u0,) * bounds.nca_max,
            sc_delays=(bounds.nsc_max,) * bounds.nsc_max,
            ca_delays=(bounds.nca_max,) * bounds.nca_max,
        )
        for x0 in sorted(plant.initial)
        for u0 in sorted(plant.inputs)
    ]


def _dynamic_successors(
    state: NcsState, input_id: str, plant: System, bounds: DelayBounds
) -> Iterator[NcsState]:
    """All successors of ``state`` under ``input_id``: one per combination of
    fresh channel delays and plant successor under the held input."""
    if state.measurements[0] is Q:
        return
    for fresh_ca in bounds.ca_choices:
        window = channel_history(state.ca_delays, bounds.nca_min, bounds.nca_max, fresh=fresh_ca)
        held_slot = -held_input_index(window)  # nca_max - j*; 0 selects the fresh input
        held = input_id if held_slot == 0 else state.inputs[held_slot - 1]
        for fresh_sc in bounds.sc_choices:
            for plant_next in sorted(plant.posts(state.measurements[0], held)):
                yield NcsState(
                    measurements=(plant_next,) + state.measurements[:-1],
                    inputs=(input_id,) + state.inputs[:-1],
                    sc_delays=(fresh_sc,) + state.sc_delays[:-1],
                    ca_delays=(fresh_ca,) + state.ca_delays[:-1],
                )


def _static_initials(plant: System, bounds: DelayBounds) -> list:
    n_max = bounds.n_max
    return [
        StaticNcsState(plant_state=x0, inputs=(u0,) * n_max, delays=(n_max,) * n_max)
        for x0 in sorted(plant.initial)
        for u0 in sorted(plant.inputs)
    ]


def _static_successors(
    state: StaticNcsState, input_id: str, plant: System, bounds: DelayBounds
) -> Iterator[StaticNcsState]:
    for fresh in bounds.combined_choices:
        window = channel_history(state.delays, bounds.n_min, bounds.n_max, fresh=fresh)
        held_slot = -held_input_index(window)
        held = input_id if held_slot == 0 else state.inputs[held_slot - 1]
        for plant_next in sorted(plant.posts(state.plant_state, held)):
            yield StaticNcsState(
                plant_state=plant_next,
                inputs=(input_id,) + state.inputs[:-1],
                delays=(fresh,) + state.delays[:-1],
            )


def enumerate_dynamic_states(plant: System, bounds: DelayBounds) -> Iterator[NcsState]:
    """The full (unpruned) two-channel product space; desk scale only."""
    from itertools import product

    meas_pool = sorted(plant.states) + [Q]
    for meas in product(meas_pool, repeat=bounds.nsc_max):
        for inputs in product(sorted(plant.inputs), repeat=bounds.nca_max):
            for sc in product(bounds.sc_choices, repeat=bounds.nsc_max):
                for ca in product(bounds.ca_choices, repeat=bounds.nca_max):
                    yield NcsState(meas, inputs, sc, ca)


def enumerate_static_states(plant: System, bounds: DelayBounds) -> Iterator[StaticNcsState]:
    """The full (unpruned) single-channel product space; desk scale only."""
    from itertools import product

    for x in sorted(plant.states):
        for inputs in product(sorted(plant.inputs), repeat=bounds.n_max):
            for delays in product(bounds.combined_choices, repeat=bounds.n_max):
                yield StaticNcsState(x, inputs, delays)


def _assemble(
    plant: System,
    bounds: DelayBounds,
    initials: list,
    successors: Callable,
    output_of: Callable,
    metric: MetricDescriptor,
    full_space: Optional[Iterable] = None,
) -> System:
    if full_space is not None:
        pool = list(full_space)
        states = {s.key(): s for s in pool}
        frontier = pool
    else:
        states = {s.key(): s for s in initials}
        frontier = list(initials)

    transitions = set()
    inputs = sorted(plant.inputs)
    while frontier:
        state = frontier.pop()
        src = state.key()
        for input_id in inputs:
            for succ in successors(state, input_id, plant, bounds):
                dst = succ.key()
                if dst not in states:
                    states[dst] = succ
                    if full_space is None:
                        frontier.append(succ)
                transitions.add((src, input_id, dst))

    return System(
        states=states.keys(),
        initial=[s.key() for s in initials],
        inputs=inputs,
        transitions=transitions,
        outputs={key: output_of(state) for key, state in states.items()},
        metric=metric,
    )


def build_ncs_dynamic(plant: System, bounds: DelayBounds, *, full_space: bool = False) -> System:
    """Closed-loop model with separate sensor and actuation channels.

    The plant must be finite, with nonempty initial states and every input
    enabled everywhere.  Initial model states pair each initial plant state
    with each input replicated through the input buffer, measurement slots
    padded with ``q``, and both delay buffers at their channel maxima.  With
    ``full_space=True`` the entire product space is materialized instead of
    the reachable part (use :func:`~.fts.reachable_prune` to cut it back).
    """
    _check_plant(plant, bounds)
    return _assemble(
        plant,
        bounds,
        _dynamic_initials(plant, bounds),
        _dynamic_successors,
        lambda s: ncs_output(s, bounds, plant),
        MetricDescriptor(PAIRWISE_MAX),
        full_space=enumerate_dynamic_states(plant, bounds) if full_space else None,
    )


def build_ncs_static(plant: System, bounds: DelayBounds, *, full_space: bool = False) -> System:
    """Closed-loop model with both delays folded into one actuation channel.

    Valid for memoryless controllers.  The combined delay ranges over
    ``[bounds.n_min; bounds.n_max]``; outputs are plain plant outputs under
    the plant's own metric.
    """
    _check_plant(plant, bounds)
    if bounds.n_max < 1:
        raise ConstructionError("combined delay bound n_max must be at least 1")
    return _assemble(
        plant,
        bounds,
        _static_initials(plant, bounds),
        _static_successors,
        lambda s: plant.outputs[s.plant_state],
        plant.metric,
        full_space=enumerate_static_states(plant, bounds) if full_space else None,
    )


ChoicePolicy = Callable[[str, str, tuple], str]


def simulate_trace(
    plant: System,
    bounds: DelayBounds,
    sc_delay_seq: Sequence[int],
    ca_delay_seq: Sequence[int],
    input_seq: Sequence[str],
    init: str,
    init_input: str,
    policy: Optional[ChoicePolicy] = None,
) -> tuple:
    """Run the two-channel semantics along one concrete delay realization.

    Returns the output pairs of all visited states, starting with the
    initial one (so the result has ``len(input_seq) + 1`` entries).  The
    plant must be deterministic unless ``policy(state, input, candidates)``
    picks among multiple successors.
    """
    if not (len(sc_delay_seq) == len(ca_delay_seq) == len(input_seq)):
        raise RangeError("delay and input sequences must have equal length")
    for d in sc_delay_seq:
        if d not in bounds.sc_choices:
            raise RangeError(f"sensor-channel delay {d} outside {bounds.sc_choices}")
    for d in ca_delay_seq:
        if d not in bounds.ca_choices:
            raise RangeError(f"actuation-channel delay {d} outside {bounds.ca_choices}")
    _check_plant(plant, bounds)

    state = NcsState(
        measurements=(init,) + (Q,) * (bounds.nsc_max - 1),
        inputs=(init_input,) * bounds.nca_max,
        sc_delays=(bounds.nsc_max,) * bounds.nsc_max,
        ca_delays=(bounds.nca_max,) * bounds.nca_max,
    )
    outputs = [ncs_output(state, bounds, plant)]
    for input_id, fresh_sc, fresh_ca in zip(input_seq, sc_delay_seq, ca_delay_seq):
        window = channel_history(state.ca_delays, bounds.nca_min, bounds.nca_max, fresh=fresh_ca)
        held_slot = -held_input_index(window)
        held = input_id if held_slot == 0 else state.inputs[held_slot - 1]
        candidates = tuple(sorted(plant.posts(state.measurements[0], held)))
        if len(candidates) == 1:
            plant_next = candidates[0]
        elif policy is not None:
            plant_next = policy(state.measurements[0], held, candidates)
            if plant_next not in candidates:
                raise ConstructionError(f"policy chose {plant_next!r}, not a successor")
        else:
            raise ConstructionError(
                "plant is nondeterministic here; supply a successor-choice policy"
            )
        state = NcsState(
            measurements=(plant_next,) + state.measurements[:-1],
            inputs=(input_id,) + state.inputs[:-1],
            sc_delays=(fresh_sc,) + state.sc_delays[:-1],
            ca_delays=(fresh_ca,) + state.ca_delays[:-1],
        )
        outputs.append(ncs_output(state, bounds, plant))
    return tuple(outputs)


def trace_contained(system: System, trace: Sequence[OutputLabel], epsilon: float = 0.0) -> bool:
    """Whether some run of ``system`` from an initial state matches ``trace``
    stepwise within ``epsilon`` in the system's output metric.

    The empty trace is vacuously contained.  Uses a subset-style frontier
    search, so nondeterminism and repeated labels are handled exactly.
    """
    from .fts import output_distance

    labels = tuple(trace)
    if not labels:
        return True
    frontier = {
        s for s in system.initial
        if output_distance(system.metric, system.outputs[s], labels[0]) <= epsilon
    }
    for label in labels[1:]:
        if not frontier:
            return False
        step = set()
        for state in frontier:
            for input_id in system.enabled_inputs(state):
                for succ in system.posts(state, input_id):
                    if succ in step:
                        continue
                    if output_distance(system.metric, system.outputs[succ], label) <= epsilon:
                        step.add(succ)
        frontier = step
    return bool(frontier)
