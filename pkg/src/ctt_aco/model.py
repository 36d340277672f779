"""Domain types for curriculum-based course timetabling.

Periods are addressed by a flat index ``day * periods_per_day + slot`` inside
:class:`Event`; :class:`Period` is the (day, slot) view used at the I/O edge.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple


class MalformedTimetableError(ValueError):
    """An event references a course, room or period outside the instance."""


@dataclass(frozen=True)
class Course:
    id: str
    teacher: str
    lectures: int
    min_working_days: int
    students: int

    def __post_init__(self) -> None:
        if self.lectures < 1:
            raise ValueError(f"course {self.id}: lectures must be >= 1")
        if self.min_working_days < 1:
            raise ValueError(f"course {self.id}: min_working_days must be >= 1")
        if self.students < 0:
            raise ValueError(f"course {self.id}: students must be >= 0")


@dataclass(frozen=True)
class Room:
    id: str
    capacity: int


@dataclass(frozen=True, order=True)
class Period:
    day: int
    slot: int

    def flat_index(self, periods_per_day: int) -> int:
        return self.day * periods_per_day + self.slot


@dataclass(frozen=True)
class Curriculum:
    id: str
    course_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "course_ids", tuple(self.course_ids))


@dataclass(frozen=True)
class Instance:
    """Immutable problem description.

    Validated on construction: ids unique, curricula and unavailability refer
    to known courses, unavailable periods in range. Index lookups used by the
    evaluators are derived lazily and cached.
    """

    name: str
    days: int
    periods_per_day: int
    courses: tuple[Course, ...]
    rooms: tuple[Room, ...]
    curricula: tuple[Curriculum, ...]
    unavailability: frozenset[tuple[str, Period]] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "courses", tuple(self.courses))
        object.__setattr__(self, "rooms", tuple(self.rooms))
        object.__setattr__(self, "curricula", tuple(self.curricula))
        object.__setattr__(self, "unavailability", frozenset(self.unavailability))
        if self.days < 1 or self.periods_per_day < 1:
            raise ValueError("days and periods_per_day must be positive")
        _require_unique("course", [c.id for c in self.courses])
        _require_unique("room", [r.id for r in self.rooms])
        _require_unique("curriculum", [q.id for q in self.curricula])
        known = {c.id for c in self.courses}
        for q in self.curricula:
            for cid in q.course_ids:
                if cid not in known:
                    raise ValueError(f"curriculum {q.id} references unknown course {cid}")
        for cid, period in self.unavailability:
            if cid not in known:
                raise ValueError(f"unavailability references unknown course {cid}")
            if not (0 <= period.day < self.days and 0 <= period.slot < self.periods_per_day):
                raise ValueError(f"unavailability period {period} out of range")

    @property
    def n_periods(self) -> int:
        return self.days * self.periods_per_day

    @property
    def n_room_periods(self) -> int:
        return self.n_periods * len(self.rooms)

    @property
    def total_lectures(self) -> int:
        return sum(c.lectures for c in self.courses)

    def period(self, flat: int) -> Period:
        day, slot = divmod(flat, self.periods_per_day)
        return Period(day, slot)

    @cached_property
    def course_index(self) -> dict[str, int]:
        return {c.id: i for i, c in enumerate(self.courses)}

    @cached_property
    def room_index(self) -> dict[str, int]:
        return {r.id: i for i, r in enumerate(self.rooms)}

    @cached_property
    def teachers(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(c.teacher for c in self.courses))

    @cached_property
    def teacher_of(self) -> tuple[int, ...]:
        idx = {t: i for i, t in enumerate(self.teachers)}
        return tuple(idx[c.teacher] for c in self.courses)

    @cached_property
    def curricula_of(self) -> tuple[tuple[int, ...], ...]:
        """Curriculum indices containing each course."""
        member: list[list[int]] = [[] for _ in self.courses]
        for q, cur in enumerate(self.curricula):
            for cid in dict.fromkeys(cur.course_ids):
                member[self.course_index[cid]].append(q)
        return tuple(tuple(m) for m in member)

    @cached_property
    def unavailable(self) -> tuple[frozenset[int], ...]:
        """Flat unavailable periods per course index."""
        per: list[set[int]] = [set() for _ in self.courses]
        for cid, period in self.unavailability:
            per[self.course_index[cid]].add(period.flat_index(self.periods_per_day))
        return tuple(frozenset(s) for s in per)


def _require_unique(kind: str, ids: list[str]) -> None:
    seen: set[str] = set()
    for i in ids:
        if i in seen:
            raise ValueError(f"duplicate {kind} id {i!r}")
        seen.add(i)


class Event(NamedTuple):
    course: int
    room: int
    period: int


@dataclass(frozen=True)
class Timetable:
    """Multiset of events.

    Events are stored sorted, so two timetables compare equal exactly when
    they hold the same events regardless of insertion order.
    """

    events: tuple[Event, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(sorted(Event(*e) for e in self.events)))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    @cached_property
    def per_course_counts(self) -> Counter[int]:
        return Counter(e.course for e in self.events)

    def with_events(self, extra: Iterable[Event]) -> Timetable:
        return Timetable(self.events + tuple(extra))


def check_timetable(instance: Instance, timetable: Timetable) -> None:
    n_c, n_r, n_p = len(instance.courses), len(instance.rooms), instance.n_periods
    for e in timetable.events:
        if not (0 <= e.course < n_c and 0 <= e.room < n_r and 0 <= e.period < n_p):
            raise MalformedTimetableError(f"event {tuple(e)} out of range for {instance.name}")
