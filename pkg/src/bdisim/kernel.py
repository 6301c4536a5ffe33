"""Deterministic discrete-event simulation core.

The future-event list is a binary heap keyed by ``(fire_at, -priority, seq)``:
earlier events first, then higher priority tiers, then insertion order.
Randomness is handed out as labelled streams forked from a root seed, so the
draws of one element never depend on how many draws another element made.
"""

from __future__ import annotations

import hashlib
import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

__all__ = [
    "TIME_EPS",
    "NORMAL",
    "CHAINED",
    "ScheduledEvent",
    "EventQueue",
    "Simulator",
    "SchedulingError",
    "SimulationError",
    "RngStream",
    "fork_rng",
]

#: Two timestamps closer than this are considered equal.
TIME_EPS = 1e-9

#: Priority tiers. Higher fires first at equal time.
NORMAL = 0
CHAINED = 1


class SchedulingError(ValueError):
    """Raised when an event is scheduled before the current clock."""


class SimulationError(RuntimeError):
    """A handler raised while the simulation was running."""

    def __init__(self, event: "ScheduledEvent", cause: BaseException):
        super().__init__(f"handler for {event.label!r} at t={event.fire_at:.9g} failed: {cause!r}")
        self.event = event
        self.__cause__ = cause


@dataclass(order=False)
class ScheduledEvent:
    fire_at: float
    handler: Callable[[], Any]
    priority: int = NORMAL
    label: str = ""
    seq: int = -1

    @property
    def key(self) -> tuple[float, int, int]:
        return (self.fire_at, -self.priority, self.seq)


class EventQueue:
    """Future-event list ordered by ``(fire_at, -priority, seq)``."""

    def __init__(self):
        self._heap: list[tuple[float, int, int, ScheduledEvent]] = []
        self._counter = itertools.count()
        self._cancelled: set[int] = set()

    def __len__(self) -> int:
        return len(self._heap) - len(self._cancelled)

    def push(self, ev: ScheduledEvent) -> int:
        ev.seq = next(self._counter)
        heapq.heappush(self._heap, (ev.fire_at, -ev.priority, ev.seq, ev))
        return ev.seq

    def cancel(self, event_id: int) -> None:
        self._cancelled.add(event_id)

    def _skip_cancelled(self) -> None:
        while self._heap and self._heap[0][2] in self._cancelled:
            _, _, seq, _ = heapq.heappop(self._heap)
            self._cancelled.discard(seq)

    def peek(self) -> ScheduledEvent | None:
        self._skip_cancelled()
        return self._heap[0][3] if self._heap else None

    def pop(self) -> ScheduledEvent:
        self._skip_cancelled()
        if not self._heap:
            raise IndexError("pop from empty event queue")
        return heapq.heappop(self._heap)[3]


class Simulator:
    """Virtual clock plus future-event list.

    Handlers are zero-argument callables; they read ``sim.now`` and may
    schedule further events. With ``record_trace=True`` every processed event
    appends ``"<time> <label>"`` to :attr:`trace`.
    """

    def __init__(self, record_trace: bool = False):
        self.now = 0.0
        self.queue = EventQueue()
        self.processed = 0
        self.record_trace = record_trace
        self.trace: list[str] = []
        self._last_fired = -math.inf

    def schedule(self, fire_at: float, handler: Callable[[], Any], *,
                 priority: int = NORMAL, label: str = "") -> int:
        if not math.isfinite(fire_at):
            raise SchedulingError(f"non-finite fire time {fire_at!r} for {label!r}")
        if fire_at < self.now - TIME_EPS:
            raise SchedulingError(
                f"cannot schedule {label!r} at t={fire_at:.9g}: clock is already at {self.now:.9g}")
        return self.queue.push(ScheduledEvent(max(fire_at, self.now), handler, priority, label))

    def schedule_in(self, delay: float, handler: Callable[[], Any], **kw) -> int:
        return self.schedule(self.now + delay, handler, **kw)

    def cancel(self, event_id: int) -> None:
        self.queue.cancel(event_id)

    def run_until(self, t_end: float) -> int:
        """Process every event with ``fire_at <= t_end``; return how many ran."""
        if t_end < self.now - TIME_EPS:
            raise SchedulingError(f"run_until({t_end}) is in the past (clock {self.now})")
        count = 0
        while True:
            ev = self.queue.peek()
            if ev is None or ev.fire_at > t_end + TIME_EPS:
                break
            self.queue.pop()
            assert ev.fire_at >= self._last_fired, "event order went backwards"
            self._last_fired = ev.fire_at
            self.now = ev.fire_at
            if self.record_trace:
                self.trace.append(f"{ev.fire_at:.9f} {ev.label}")
            try:
                ev.handler()
            except Exception as exc:
                raise SimulationError(ev, exc) from exc
            count += 1
        self.processed += count
        self.now = max(self.now, t_end)
        return count


def _label_words(label: str) -> list[int]:
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=16).digest()
    return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]


@dataclass
class RngStream:
    """A labelled, reproducible random stream.

    The generator is a Philox counter-based bit generator keyed by the root
    seed and a hash of the label path, so ``RngStream(42, "agent/3/sense")``
    produces the same draws in every run and process.
    """

    seed: int
    label: str = ""
    gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        entropy = [self.seed & 0xFFFFFFFF, self.seed >> 32, *_label_words(self.label)]
        self.gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))

    def uniform(self) -> float:
        """One draw in [0, 1)."""
        return float(self.gen.random())

    def fork(self, label: str) -> "RngStream":
        return fork_rng(self, label)


def fork_rng(root: RngStream, label: str) -> RngStream:
    """Derive the substream ``root.label/label``; a pure function of its inputs."""
    if not label:
        raise ValueError("fork label must be non-empty")
    path = f"{root.label}/{label}" if root.label else label
    return RngStream(root.seed, path)
