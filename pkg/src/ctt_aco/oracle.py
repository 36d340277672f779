"""Exhaustive enumeration of feasible timetables for tiny instances.

The counting here is deliberately written independently of
:mod:`ctt_aco.evaluation` (event-by-event scans instead of tallies) so the two
can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterator

from .model import Event, Instance, Timetable


class BudgetExceededError(RuntimeError):
    """Enumeration visited more partial assignments than allowed; results are partial."""


@dataclass(frozen=True)
class EnumerationBudget:
    max_states: int = 1_000_000

    def __post_init__(self) -> None:
        if self.max_states < 1:
            raise ValueError("max_states must be positive")


def oracle_hard_counts(instance: Instance, timetable: Timetable) -> tuple[int, int, int, int, int]:
    events = list(timetable.events)
    teacher = [c.teacher for c in instance.courses]
    members = [set(q.course_ids) for q in instance.curricula]
    ids = [c.id for c in instance.courses]
    hc1 = 0
    for i, course in enumerate(instance.courses):
        scheduled = sum(1 for e in events if e.course == i)
        hc1 += abs(course.lectures - scheduled)
    hc2 = hc3 = hc4 = hc5 = 0
    for k, e in enumerate(events):
        earlier = events[:k]
        if any(f.room == e.room and f.period == e.period for f in earlier):
            hc4 += 1
        if any(teacher[f.course] == teacher[e.course] and f.period == e.period for f in earlier):
            hc2 += 1
        for m in members:
            if ids[e.course] in m and any(ids[f.course] in m and f.period == e.period for f in earlier):
                hc3 += 1
        day, slot = divmod(e.period, instance.periods_per_day)
        if any(cid == ids[e.course] and p.day == day and p.slot == slot for cid, p in instance.unavailability):
            hc5 += 1
    return hc1, hc2, hc3, hc4, hc5


def oracle_soft_counts(instance: Instance, timetable: Timetable) -> tuple[int, int, int, int]:
    events = list(timetable.events)
    ppd = instance.periods_per_day
    sc1 = sum(max(0, instance.courses[e.course].students - instance.rooms[e.room].capacity) for e in events)
    sc2 = sc4 = 0
    for i, course in enumerate(instance.courses):
        mine = [e for e in events if e.course == i]
        sc2 += max(0, course.min_working_days - len({e.period // ppd for e in mine}))
        sc4 += max(0, len({e.room for e in mine}) - 1)
    sc3 = 0
    for q in instance.curricula:
        mine = [e for e in events if instance.courses[e.course].id in q.course_ids]
        for e in mine:
            day, slot = divmod(e.period, ppd)
            neighbour = any(
                f.period // ppd == day and abs(f.period % ppd - slot) == 1 for f in mine
            )
            if not neighbour:
                sc3 += 1
    return sc1, sc2, sc3, sc4


def oracle_quality(instance: Instance, timetable: Timetable) -> int:
    sc1, sc2, sc3, sc4 = oracle_soft_counts(instance, timetable)
    return sc1 * 1 + sc2 * 5 + sc3 * 2 + sc4 * 1


def _compatible(instance: Instance, placed: list[Event], new: list[Event]) -> bool:
    teacher = [c.teacher for c in instance.courses]
    cur = [set(instance.curricula_of[c]) for c in range(len(instance.courses))]
    for k, e in enumerate(new):
        if instance.period(e.period) in {p for cid, p in instance.unavailability
                                         if cid == instance.courses[e.course].id}:
            return False
        for f in placed + new[:k]:
            if f.period != e.period:
                continue
            if f.room == e.room or teacher[f.course] == teacher[e.course] or cur[f.course] & cur[e.course]:
                return False
    return True


def enumerate_feasible(instance: Instance, budget: EnumerationBudget = EnumerationBudget()
                       ) -> Iterator[tuple[Timetable, int]]:
    """Yield every hard-feasible timetable once, with its quality.

    Lectures of a course are interchangeable, so each course's room-periods
    are taken in non-decreasing (day, slot, room) order.
    """
    R = len(instance.rooms)
    slots = [(p, r) for p in range(instance.n_periods) for r in range(R)]
    n_courses = len(instance.courses)
    visited = 0

    def rec(c: int, placed: list[Event]) -> Iterator[list[Event]]:
        nonlocal visited
        if c == n_courses:
            yield placed
            return
        for combo in combinations_with_replacement(slots, instance.courses[c].lectures):
            visited += 1
            if visited > budget.max_states:
                raise BudgetExceededError(f"more than {budget.max_states} states visited")
            new = [Event(c, r, p) for p, r in combo]
            if _compatible(instance, placed, new):
                yield from rec(c + 1, placed + new)

    for events in rec(0, []):
        tt = Timetable(events)
        yield tt, oracle_quality(instance, tt)


@dataclass(frozen=True)
class OptimumResult:
    quality: int | None
    witness: Timetable | None
    n_feasible: int

    @property
    def feasible(self) -> bool:
        return self.witness is not None


def exhaustive_optimum(instance: Instance, budget: EnumerationBudget = EnumerationBudget()) -> OptimumResult:
    """Minimum quality over all feasible timetables; first one in enumeration order wins ties.

    ``quality`` and ``witness`` are None when no feasible timetable exists.
    """
    best_q, best_t, n = None, None, 0
    for tt, q in enumerate_feasible(instance, budget):
        n += 1
        if best_q is None or q < best_q:
            best_q, best_t = q, tt
    return OptimumResult(best_q, best_t, n)
