"""Segmentation of demonstrations into events.

An event is a maximal run of consecutive primary actions whose preceding
secondary sets all fit inside one set of required secondary actions. The
event's identity is the union of those sets; two events are equal when
their identities are equal. The scan absorbs a step into the current event
when its secondary set is a subset of the tokens accumulated so far (the
empty set always qualifies, and also absorbs while nothing has accumulated
yet); otherwise the step opens a new event.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import OutOfRange
from .model import Demonstration, SecondaryActionSet, TimeStep


@dataclass(frozen=True)
class Event:
    """A run of steps sharing one set of required secondary actions.

    start_step/end_step are 1-based inclusive time-step indices.
    """

    primaries: tuple
    secondaries: tuple[SecondaryActionSet, ...]
    identity: SecondaryActionSet
    start_step: int
    end_step: int

    def __len__(self) -> int:
        return len(self.primaries)


@dataclass(frozen=True)
class EventSequence:
    user_id: str
    events: tuple[Event, ...]

    def __len__(self) -> int:
        return len(self.events)


def _segment_steps(steps: tuple[TimeStep, ...], user_id: str) -> EventSequence:
    events: list[Event] = []
    cur_primaries: list = []
    cur_secondaries: list[SecondaryActionSet] = []
    accumulated: frozenset[str] = frozenset()
    start = 1

    def flush(end: int) -> None:
        events.append(
            Event(
                primaries=tuple(cur_primaries),
                secondaries=tuple(cur_secondaries),
                identity=SecondaryActionSet(accumulated),
                start_step=start,
                end_step=end,
            )
        )

    for t, step in enumerate(steps, start=1):
        s = step.secondary
        if cur_primaries and accumulated and not s.issubset(accumulated):
            flush(t - 1)
            cur_primaries, cur_secondaries = [], []
            accumulated = frozenset()
            start = t
        cur_primaries.append(step.primary)
        cur_secondaries.append(s)
        accumulated = accumulated | s.members
    if cur_primaries:
        flush(len(steps))
    return EventSequence(user_id=user_id, events=tuple(events))


def segment(demo: Demonstration) -> EventSequence:
    """Convert a demonstration into its event sequence."""
    return _segment_steps(demo.steps, demo.user_id)


def segment_prefix(demo: Demonstration, t: int) -> EventSequence:
    """Segment only the first t steps (1 <= t <= N)."""
    if not 1 <= t <= len(demo.steps):
        raise OutOfRange(f"t={t} outside 1..{len(demo.steps)}")
    return _segment_steps(demo.steps[:t], demo.user_id)


def identities(seq: EventSequence) -> list[SecondaryActionSet]:
    """Each event's identity, in order. This is what the high level compares."""
    return [e.identity for e in seq.events]


def event_sequence_to_dicts(seq: EventSequence) -> list[dict]:
    """Debug/model-file form: one {identity, primaries} record per event."""
    return [
        {
            "identity": e.identity.sorted_tokens(),
            "primaries": [p.id for p in e.primaries],
        }
        for e in seq.events
    ]


def prefix_identity_table(demo: Demonstration) -> list[tuple[frozenset[str], ...]]:
    """identities(segment_prefix(demo, t)) for t = 1..N, in one pass.

    Entry t-1 holds the identity sequence of the t-step prefix, with the
    in-progress event's identity being the union accumulated so far. Used to
    make repeated prefix-likelihood computations cheap during inference.
    """
    table: list[tuple[frozenset[str], ...]] = []
    closed: list[frozenset[str]] = []
    accumulated: frozenset[str] = frozenset()
    open_event = False
    for step in demo.steps:
        s = step.secondary
        if open_event and accumulated and not s.issubset(accumulated):
            closed.append(accumulated)
            accumulated = frozenset()
        open_event = True
        accumulated = accumulated | s.members
        table.append(tuple(closed) + (accumulated,))
    return table
