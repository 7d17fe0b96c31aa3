"""Finite symbolic models of control loops closed over non-ideal networks.

The package builds finite models of a plant abstraction composed with a
periodically sampled network that delays, reorders and rejects packets on
both the sensor and the actuation side, and provides the approximate
(bi)simulation machinery to relate those models to one another.
"""

from .errors import (
    ConstructionError,
    DivergenceError,
    LabelTypeError,
    NcsAbstractError,
    ParseError,
    RangeError,
    StructuralError,
    UnknownIdentifierError,
)
from .fts import (
    DISCRETE,
    INF_NORM,
    INFINITY,
    PAIRWISE_MAX,
    MetricDescriptor,
    Pair,
    Q,
    System,
    output_distance,
    reachable_prune,
)
from .packets import (
    DelayBounds,
    DelayHistory,
    channel_history,
    controller_measurement_index,
    f_hat,
    g_hat,
    held_input_index,
    oracle_held_packet,
)
from .builder import (
    NcsState,
    StaticNcsState,
    build_ncs_dynamic,
    build_ncs_static,
    enumerate_dynamic_states,
    enumerate_static_states,
    ncs_output,
    simulate_trace,
    trace_contained,
)
from .relations import (
    CheckResult,
    Relation,
    Violation,
    check_bisimulation,
    check_simulation,
    largest_approx_bisimulation,
    largest_approx_simulation,
    lift_relation,
)
from .grid import (
    GridAbstraction,
    PlantSpec,
    build_grid_abstraction,
    grid_cardinality,
    input_grid_cardinality,
    integrate,
    register_rhs,
)
from .sizing import (
    SizeInputs,
    size_dynamic,
    size_prior_work,
    size_static,
    state_count_dynamic,
    state_count_static,
)
from .io import (
    load_plant_spec,
    load_relation,
    load_system,
    save_relation,
    save_system,
    to_dot,
)

__version__ = "0.1.0"

__all__ = [
    "CheckResult",
    "ConstructionError",
    "DISCRETE",
    "DelayBounds",
    "DelayHistory",
    "DivergenceError",
    "GridAbstraction",
    "INFINITY",
    "INF_NORM",
    "LabelTypeError",
    "MetricDescriptor",
    "NcsAbstractError",
    "NcsState",
    "PAIRWISE_MAX",
    "Pair",
    "ParseError",
    "PlantSpec",
    "Q",
    "RangeError",
    "Relation",
    "SizeInputs",
    "StaticNcsState",
    "StructuralError",
    "System",
    "UnknownIdentifierError",
    "Violation",
    "build_grid_abstraction",
    "build_ncs_dynamic",
    "build_ncs_static",
    "channel_history",
    "check_bisimulation",
    "check_simulation",
    "controller_measurement_index",
    "enumerate_dynamic_states",
    "enumerate_static_states",
    "f_hat",
    "g_hat",
    "grid_cardinality",
    "held_input_index",
    "input_grid_cardinality",
    "integrate",
    "largest_approx_bisimulation",
    "largest_approx_simulation",
    "lift_relation",
    "load_plant_spec",
    "load_relation",
    "load_system",
    "ncs_output",
    "oracle_held_packet",
    "output_distance",
    "reachable_prune",
    "register_rhs",
    "save_relation",
    "save_system",
    "simulate_trace",
    "size_dynamic",
    "size_prior_work",
    "size_static",
    "state_count_dynamic",
    "state_count_static",
    "to_dot",
    "trace_contained",
]
