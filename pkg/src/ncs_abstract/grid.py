"""Grid-quantized plant abstractions of sampled continuous dynamics.

A :class:`PlantSpec` describes the continuous plant: either linear dynamics
``x' = A x + B u`` or a registered nonlinear right-hand side, together with
an axis-aligned state domain, an input box, the sampling time ``tau`` and
the quantization steps ``eta`` (state) and ``mu`` (input).

:func:`build_grid_abstraction` samples the flow over one period from every
state grid point under every input grid point and snaps the result to the
nearest grid point, yielding a deterministic finite model whose outputs are
the grid-point vectors under the infinity norm.  Flows that leave the domain
drop the transition and are counted.

Counting conventions (also used by :mod:`.sizing`): state grids cover the
domain half-open with ``floor(length / eta)`` points per axis, while input
grids include both endpoints, ``floor(length / mu) + 1`` points per axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from .errors import ConstructionError, DivergenceError, RangeError
from .fts import INF_NORM, MetricDescriptor, System

#: Registered nonlinear right-hand sides, by name: f(x, u) -> dx/dt.
RHS_REGISTRY: dict = {}


def register_rhs(name: str) -> Callable:
    """Decorator registering a vector field under ``name`` for use in specs."""

    def deco(fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> Callable:
        RHS_REGISTRY[name] = fn
        return fn

    return deco


@register_rhs("scalar_decay")
def _scalar_decay(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    return -x


@register_rhs("damped_pendulum")
def _damped_pendulum(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.array([x[1], -math.sin(x[0]) - x[1] + u[0]])


@dataclass(frozen=True)
class PlantSpec:
    """Continuous plant plus quantization parameters.

    Exactly one of (``a``, ``b``) or ``rhs`` must be given; matrices are
    stored as nested tuples so the spec stays hashable.
    """

    domain: tuple
    input_box: tuple
    tau: float
    eta: float
    mu: float
    a: Optional[tuple] = None
    b: Optional[tuple] = None
    rhs: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(tuple(map(float, ax)) for ax in self.domain))
        object.__setattr__(self, "input_box", tuple(tuple(map(float, ax)) for ax in self.input_box))
        if self.a is not None:
            object.__setattr__(self, "a", tuple(tuple(map(float, row)) for row in self.a))
        if self.b is not None:
            object.__setattr__(self, "b", tuple(tuple(map(float, row)) for row in self.b))
        if self.tau <= 0 or self.eta <= 0 or self.mu <= 0:
            raise RangeError("tau, eta and mu must all be positive")
        for lo, hi in self.domain + self.input_box:
            if hi < lo:
                raise RangeError(f"empty box axis [{lo}, {hi}]")
        linear = self.a is not None and self.b is not None
        if linear == (self.rhs is not None):
            raise ConstructionError("give either matrices a and b, or a registered rhs name")
        if self.rhs is not None and self.rhs not in RHS_REGISTRY:
            raise ConstructionError(f"unknown right-hand side {self.rhs!r}")
        if linear:
            n = len(self.a)
            if any(len(row) != n for row in self.a):
                raise ConstructionError("matrix a must be square")
            if len(self.b) != n:
                raise ConstructionError("matrix b must have one row per state dimension")
            if n != len(self.domain):
                raise ConstructionError("matrix a does not match the domain dimension")
            m = len(self.b[0]) if self.b else 0
            if any(len(row) != m for row in self.b) or m != len(self.input_box):
                raise ConstructionError("matrix b does not match the input dimension")

    @property
    def dimension(self) -> int:
        return len(self.domain)

    @property
    def input_dimension(self) -> int:
        return len(self.input_box)

    @property
    def is_linear(self) -> bool:
        return self.a is not None


_SNAP_TOL = 1e-9


def _div_snap(a: float, b: float) -> float:
    """a / b with results within 1e-9 of an integer snapped to it.

    Quantization arithmetic like 2.0 / 0.1 lands a hair under the exact
    integer in binary floating point; snapping keeps the grid conventions
    exact for η-aligned boxes.
    """
    q = a / b
    nearest = round(q)
    return float(nearest) if abs(q - nearest) <= _SNAP_TOL else q


def grid_cardinality(interval_lengths: Sequence[float], eta: float) -> int:
    """Number of state grid points: product of floor(length / eta) per axis."""
    if eta <= 0 or any(length <= 0 for length in interval_lengths):
        raise RangeError("lengths and eta must be positive")
    count = 1
    for length in interval_lengths:
        count *= int(math.floor(_div_snap(length, eta)))
    return count


def input_grid_cardinality(interval_lengths: Sequence[float], mu: float) -> int:
    """Number of input grid points: product of floor(length / mu) + 1 per axis."""
    if mu <= 0 or any(length < 0 for length in interval_lengths):
        raise RangeError("lengths must be nonnegative and mu positive")
    count = 1
    for length in interval_lengths:
        count *= int(math.floor(_div_snap(length, mu))) + 1
    return count


def _axis_indices(lo: float, hi: float, step: float, closed: bool) -> range:
    first = math.ceil(_div_snap(lo, step))
    if closed:
        last = math.floor(_div_snap(hi, step))
    else:
        last = math.ceil(_div_snap(hi, step)) - 1
    return range(first, last + 1)


@lru_cache(maxsize=None)
def _lti_step(spec: PlantSpec, tau: float):
    """Discrete-time update matrices (Phi, Gamma) for x' = A x + B u over tau.

    Computed exactly (to numerical precision) through the exponential of the
    augmented matrix [[A, B], [0, 0]].
    """
    a = np.asarray(spec.a, dtype=float)
    b = np.asarray(spec.b, dtype=float)
    n, m = a.shape[0], b.shape[1]
    block = np.zeros((n + m, n + m))
    block[:n, :n] = a
    block[:n, n:] = b
    full = expm(block * tau)
    return full[:n, :n], full[:n, n:]


def integrate(spec: PlantSpec, x: Sequence[float], u: Sequence[float], tau: float) -> np.ndarray:
    """State reached after ``tau`` seconds from ``x`` under constant input ``u``.

    Linear specs use the exact matrix-exponential update; nonlinear specs a
    fixed-step classical Runge-Kutta scheme.  Raises
    :class:`~.errors.DivergenceError` on non-finite intermediate values.
    """
    if tau < 0:
        raise RangeError("tau must be nonnegative")
    state = np.asarray(x, dtype=float)
    inp = np.asarray(u, dtype=float)
    if tau == 0:
        return state.copy()
    if spec.is_linear:
        phi, gamma = _lti_step(spec, tau)
        result = phi @ state + gamma @ inp
        if not np.all(np.isfinite(result)):
            raise DivergenceError("linear update produced non-finite values")
        return result

    field = RHS_REGISTRY[spec.rhs]
    steps = max(8, math.ceil(tau / 0.05))
    h = tau / steps
    for _ in range(steps):
        k1 = field(state, inp)
        k2 = field(state + 0.5 * h * k1, inp)
        k3 = field(state + 0.5 * h * k2, inp)
        k4 = field(state + h * k3, inp)
        state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(state)):
            raise DivergenceError(f"flow diverged integrating {spec.rhs!r}")
    return state


def _point_id(indices) -> str:
    return "_".join(str(i) for i in indices)


def _nearest_index(value: float, step: float) -> int:
    # round half toward -inf so exact midpoints snap to the smaller grid point
    shifted = _div_snap(value, step) - 0.5
    nearest = round(shifted)
    if abs(shifted - nearest) <= _SNAP_TOL:
        return int(nearest)
    return math.ceil(shifted)


@dataclass(frozen=True)
class GridAbstraction:
    """A built grid model plus its bookkeeping.

    ``system`` states are underscore-joined lattice indices; ``system``
    outputs are the corresponding real vectors.  ``input_vectors`` maps input
    identifiers back to real input values.  ``dropped_transitions`` counts
    flows that left the domain (their transitions are omitted, so those
    states are not input-complete).
    """

    system: System
    input_vectors: dict
    dropped_transitions: int


def build_grid_abstraction(spec: PlantSpec) -> GridAbstraction:
    """Quantize the sampled plant onto its state and input grids.

    Every grid state is initial.  The model is deterministic by
    construction: the one-period flow is a function and so is snapping to
    the nearest grid point (ties go to the lexicographically smaller point).
    """
    from itertools import product

    axes = [_axis_indices(lo, hi, spec.eta, closed=False) for lo, hi in spec.domain]
    if any(len(r) == 0 for r in axes):
        raise ConstructionError("state grid is empty; shrink eta or grow the domain")
    input_axes = [_axis_indices(lo, hi, spec.mu, closed=True) for lo, hi in spec.input_box]
    if any(len(r) == 0 for r in input_axes):
        raise ConstructionError("input grid is empty; shrink mu or grow the input box")

    states = {}
    for idx in product(*axes):
        states[_point_id(idx)] = tuple(k * spec.eta for k in idx)
    inputs = {}
    for idx in product(*input_axes):
        inputs[_point_id(idx)] = tuple(k * spec.mu for k in idx)

    index_sets = [frozenset(r) for r in axes]
    transitions = set()
    dropped = 0
    for sid, x in states.items():
        for uid, u in inputs.items():
            flow = integrate(spec, x, u, spec.tau)
            target_idx = tuple(_nearest_index(v, spec.eta) for v in flow)
            if all(k in allowed for k, allowed in zip(target_idx, index_sets)):
                transitions.add((sid, uid, _point_id(target_idx)))
            else:
                dropped += 1

    system = System(
        states=states.keys(),
        initial=states.keys(),
        inputs=inputs.keys(),
        transitions=transitions,
        outputs=states,
        metric=MetricDescriptor(INF_NORM),
    )
    return GridAbstraction(system=system, input_vectors=inputs, dropped_transitions=dropped)
