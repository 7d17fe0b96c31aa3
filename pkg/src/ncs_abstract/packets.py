"""Network timing semantics: which packet a hold element actually uses.

Both channels of the network (sensor-to-controller and controller-to-
actuator) carry periodically sent packets that suffer integer delays, may
arrive out of order, and are rejected when a more recently sent packet has
already arrived.  Given the delays of the packets currently in flight, the
selection function :func:`f_hat` returns the index of the packet the
receiving end holds: the most recently *sent* packet that has arrived.

Delay histories are indexed by send lag: entry ``j`` is the delay suffered
by the packet sent ``j`` samples ago, for ``j`` in ``[lo; hi]``.  A packet
sent ``j`` samples ago has arrived iff its delay is at most ``j``; the one
sent ``hi`` samples ago always has (delays never exceed ``hi``), so the
selection is total.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .errors import RangeError


@dataclass(frozen=True)
class DelayBounds:
    """Per-channel delay bounds, in units of the sampling time.

    ``nsc_*`` bound the sensor-to-controller delay, ``nca_*`` the
    controller-to-actuator delay.  Packet dropouts are not modelled
    separately; a bounded number of subsequent drops is absorbed by
    enlarging the delay bounds.
    """

    nsc_min: int
    nsc_max: int
    nca_min: int
    nca_max: int

    def __post_init__(self):
        for name in ("nsc_min", "nsc_max", "nca_min", "nca_max"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise RangeError(f"{name} must be a nonnegative integer, got {value!r}")
        if self.nsc_min > self.nsc_max:
            raise RangeError(f"nsc_min={self.nsc_min} exceeds nsc_max={self.nsc_max}")
        if self.nca_min > self.nca_max:
            raise RangeError(f"nca_min={self.nca_min} exceeds nca_max={self.nca_max}")

    @property
    def n_min(self) -> int:
        """Combined round-trip minimum, used by the single-delay model."""
        return self.nsc_min + self.nca_min

    @property
    def n_max(self) -> int:
        """Combined round-trip maximum, used by the single-delay model."""
        return self.nsc_max + self.nca_max

    @property
    def sc_choices(self) -> range:
        return range(self.nsc_min, self.nsc_max + 1)

    @property
    def ca_choices(self) -> range:
        return range(self.nca_min, self.nca_max + 1)

    @property
    def combined_choices(self) -> range:
        return range(self.n_min, self.n_max + 1)


@dataclass(frozen=True)
class DelayHistory:
    """Delays of the packets sent ``lo`` .. ``hi`` samples ago on one channel.

    ``values[i]`` is the delay of the packet sent ``lo + i`` samples ago, so
    reading ``values`` left to right goes from the most recently sent packet
    to the oldest tracked one.  Every delay lies in ``[lo; hi]``.
    """

    lo: int
    hi: int
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not (isinstance(self.lo, int) and isinstance(self.hi, int)):
            raise RangeError("history bounds must be integers")
        if self.lo < 0 or self.lo > self.hi:
            raise RangeError(f"need 0 <= lo <= hi, got lo={self.lo}, hi={self.hi}")
        if len(self.values) != self.hi - self.lo + 1:
            raise RangeError(
                f"history must have {self.hi - self.lo + 1} entries, got {len(self.values)}"
            )
        for v in self.values:
            if not isinstance(v, int) or not self.lo <= v <= self.hi:
                raise RangeError(f"delay {v!r} outside [{self.lo}; {self.hi}]")

    @property
    def span(self) -> int:
        return self.hi - self.lo

    def delay(self, sent_lag: int) -> int:
        """Delay of the packet sent ``sent_lag`` samples ago."""
        if not self.lo <= sent_lag <= self.hi:
            raise RangeError(f"send lag {sent_lag} outside [{self.lo}; {self.hi}]")
        return self.values[sent_lag - self.lo]


def g_hat(j: int, history: DelayHistory) -> int:
    """Rejection score of candidate index ``j``: 0 iff some packet at least as
    recent as the one sent ``hi - j`` samples ago has arrived.

    Evaluates, literally, the minimum of the descending term list
    ``max(0, delay(hi - m - j) + j - hi + m)`` for ``m = 0, 1, ...`` down to
    send lag ``lo``, together with the constant 1.
    """
    if not 0 <= j <= history.span:
        raise RangeError(f"candidate index {j} outside [0; {history.span}]")
    terms = []
    for m in range(history.span - j + 1):
        terms.append(max(0, history.delay(history.hi - m - j) + j - history.hi + m))
    terms.append(1)
    return min(terms)


def f_hat(history: DelayHistory) -> int:
    """Index of the packet the hold element uses: the largest minimizer of
    :func:`g_hat`, i.e. ties resolve to the most recently sent packet.

    The result ``j`` lies in ``[0; hi - lo]`` and selects the packet sent
    ``hi - j`` samples ago.
    """
    scores = [g_hat(j, history) for j in range(history.span + 1)]
    best = min(scores)
    return max(j for j, score in enumerate(scores) if score == best)


def oracle_held_packet(k: int, delays: Mapping[int, int], lo: int, hi: int) -> int:
    """Independent brute-force reference for :func:`f_hat`.

    ``delays[p]`` is the delay of the packet sent at absolute time ``p``;
    entries must cover ``k - hi`` .. ``k - lo``.  The held packet is the one
    with the latest send time among those that arrived by time ``k``, which
    always exists because the packet sent at ``k - hi`` arrives by ``k``.
    Returns ``m - k + hi`` where ``m`` is that send time.
    """
    if lo < 0 or lo > hi:
        raise RangeError(f"need 0 <= lo <= hi, got lo={lo}, hi={hi}")
    arrived = [p for p in range(k - hi, k - lo + 1) if p + delays[p] <= k]
    return max(arrived) - k + hi


def held_input_index(history: DelayHistory) -> int:
    """Offset from the current sample of the control value the hold applies.

    For a controller-to-actuator history this is ``j* - nca_max``: the input
    applied during the current sampling interval was sent ``-offset``
    samples ago.
    """
    return f_hat(history) - history.hi


def controller_measurement_index(history: DelayHistory) -> int:
    """Offset from the current sample of the measurement the controller uses.

    Same selection as :func:`held_input_index`, applied to the
    sensor-to-controller channel: returns ``l* - nsc_max``.
    """
    return f_hat(history) - history.hi


def channel_history(
    buffer: Sequence[int], lo: int, hi: int, fresh: Optional[int] = None
) -> DelayHistory:
    """Assemble the selection window from a state's delay buffer.

    ``buffer[i - 1]`` holds the delay of the packet sent ``i`` samples ago.
    When ``lo == 0`` the window also covers the packet sent right now, whose
    delay is not part of the buffer and must be supplied as ``fresh``.
    """
    values = []
    for lag in range(lo, hi + 1):
        if lag == 0:
            if fresh is None:
                raise RangeError("window starts at lag 0 but no fresh delay was supplied")
            values.append(fresh)
        else:
            values.append(buffer[lag - 1])
    return DelayHistory(lo, hi, tuple(values))
