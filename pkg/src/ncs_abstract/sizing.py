"""Closed-form size bounds for the built models and the prior-art baseline.

All formulas are evaluated in exact integer arithmetic (the baseline grows
past 64 bits for realistic parameters).  ``size_*`` counts transitions, the
storage-relevant measure; ``state_count_*`` counts states before reachable
pruning, so actual built models may be smaller.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RangeError
from .packets import DelayBounds


@dataclass(frozen=True)
class SizeInputs:
    """Parameters the bounds depend on.

    ``d_card``/``u_card`` are the cardinalities of the state and input grids
    of the plant abstraction and ``k_max`` is the largest number of
    successors any plant state has under one input (1 for deterministic
    abstractions).
    """

    d_card: int
    u_card: int
    bounds: DelayBounds
    k_max: int = 1

    def __post_init__(self):
        if self.d_card < 1 or self.u_card < 1:
            raise RangeError("grid cardinalities must be positive")
        if self.k_max < 1:
            raise RangeError("k_max must be at least 1")


def state_count_static(si: SizeInputs) -> int:
    """State bound of the single-channel model:
    ``d * u**n_max * (n_max - n_min + 1)**n_max``."""
    b = si.bounds
    spread = b.n_max - b.n_min + 1
    return si.d_card * si.u_card**b.n_max * spread**b.n_max


def state_count_dynamic(si: SizeInputs) -> int:
    """State bound of the two-channel model:
    ``(d + 1)**nsc_max * u**nca_max * sc_spread**nsc_max * ca_spread**nca_max``."""
    b = si.bounds
    sc_spread = b.nsc_max - b.nsc_min + 1
    ca_spread = b.nca_max - b.nca_min + 1
    return (
        (si.d_card + 1) ** b.nsc_max
        * si.u_card**b.nca_max
        * sc_spread**b.nsc_max
        * ca_spread**b.nca_max
    )


def size_static(si: SizeInputs) -> int:
    """Transition bound of the single-channel model."""
    b = si.bounds
    spread = b.n_max - b.n_min + 1
    return state_count_static(si) * si.u_card * spread * si.k_max


def size_dynamic(si: SizeInputs) -> int:
    """Transition bound of the two-channel model."""
    b = si.bounds
    sc_spread = b.nsc_max - b.nsc_min + 1
    ca_spread = b.nca_max - b.nca_min + 1
    return state_count_dynamic(si) * si.u_card * sc_spread * ca_spread * si.k_max


def size_prior_work(si: SizeInputs) -> int:
    """Transition bound of the extended-state-space construction this
    package's models are compared against: state set
    ``sum(d**i for i in {1} | [n_min; n_max])`` times ``u * spread * k``."""
    b = si.bounds
    spread = b.n_max - b.n_min + 1
    exponents = {1} | set(range(b.n_min, b.n_max + 1))
    states = sum(si.d_card**i for i in sorted(exponents))
    return states * si.u_card * spread * si.k_max
