"""Hard/soft constraint evaluation, full recount and incremental.

Room-period slots are numbered ``period * n_rooms + room`` throughout the
package, so sorting by slot index is sorting by (day, slot, room).
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .model import Event, Instance, Timetable, check_timetable

SOFT_WEIGHTS = (1, 5, 2, 1)
N_HARD = 5


@dataclass(frozen=True)
class ViolationReport:
    hc: tuple[int, int, int, int, int]
    sc: tuple[int, int, int, int]

    @property
    def quality(self) -> int:
        return quality(self.sc)

    @property
    def feasible(self) -> bool:
        return not any(self.hc)

    def as_dict(self) -> dict[str, int]:
        out = {f"HC{i + 1}": v for i, v in enumerate(self.hc)}
        out.update({f"SC{i + 1}": v for i, v in enumerate(self.sc)})
        out["quality"] = self.quality
        return out


def quality(sc: Sequence[int]) -> int:
    """Weighted soft cost: ``sc1 + 5*sc2 + 2*sc3 + sc4``."""
    return sum(w * n for w, n in zip(SOFT_WEIGHTS, sc, strict=True))


def count_hard_violations(instance: Instance, timetable: Timetable) -> tuple[int, int, int, int, int]:
    check_timetable(instance, timetable)
    events = timetable.events
    counts = timetable.per_course_counts
    hc1 = sum(abs(c.lectures - counts.get(i, 0)) for i, c in enumerate(instance.courses))
    teacher = Counter((instance.teacher_of[e.course], e.period) for e in events)
    curric = Counter((q, e.period) for e in events for q in instance.curricula_of[e.course])
    room = Counter((e.room, e.period) for e in events)
    hc2 = sum(n - 1 for n in teacher.values())
    hc3 = sum(n - 1 for n in curric.values())
    hc4 = sum(n - 1 for n in room.values())
    hc5 = sum(1 for e in events if e.period in instance.unavailable[e.course])
    return hc1, hc2, hc3, hc4, hc5


def count_soft_violations(instance: Instance, timetable: Timetable) -> tuple[int, int, int, int]:
    check_timetable(instance, timetable)
    courses, rooms, ppd = instance.courses, instance.rooms, instance.periods_per_day
    sc1 = 0
    days_used: defaultdict[int, set[int]] = defaultdict(set)
    rooms_used: defaultdict[int, set[int]] = defaultdict(set)
    curr_slots: defaultdict[int, Counter[int]] = defaultdict(Counter)
    for e in timetable.events:
        sc1 += max(0, courses[e.course].students - rooms[e.room].capacity)
        days_used[e.course].add(e.period // ppd)
        rooms_used[e.course].add(e.room)
        for q in instance.curricula_of[e.course]:
            curr_slots[q][e.period] += 1
    sc2 = sum(max(0, c.min_working_days - len(days_used[i])) for i, c in enumerate(courses))
    sc4 = sum(max(0, len(rooms_used[i]) - 1) for i in range(len(courses)))
    sc3 = 0
    for slots in curr_slots.values():
        for p, n in slots.items():
            s = p % ppd
            if not ((s > 0 and slots[p - 1]) or (s < ppd - 1 and slots[p + 1])):
                sc3 += n
    return sc1, sc2, sc3, sc4


def evaluate(instance: Instance, timetable: Timetable) -> ViolationReport:
    return ViolationReport(
        count_hard_violations(instance, timetable), count_soft_violations(instance, timetable)
    )


class DeltaEvaluator:
    """Running constraint tallies supporting O(1)-ish add/remove/swap deltas.

    Keeps per-(room, period), per-(teacher, period), per-(curriculum, period),
    per-(course, day) and per-(course, room) counts in flat lists. Totals
    always equal a full recount of the events currently held.
    """

    def __init__(self, instance: Instance, events=()) -> None:
        self.instance = instance
        n_c, n_r, n_p = len(instance.courses), len(instance.rooms), instance.n_periods
        self.n_rooms, self.n_periods, self.ppd, self.days = n_r, n_p, instance.periods_per_day, instance.days
        self._students = [c.students for c in instance.courses]
        self._mwd = [c.min_working_days for c in instance.courses]
        self._lectures = [c.lectures for c in instance.courses]
        self._cap = [r.capacity for r in instance.rooms]
        self._teacher = list(instance.teacher_of)
        self._curr = [list(q) for q in instance.curricula_of]
        self._unavail = [set(u) for u in instance.unavailable]

        self.room_period = [0] * (n_r * n_p)
        self.teacher_period = [0] * (len(instance.teachers) * n_p)
        self.curr_period = [0] * (len(instance.curricula) * n_p)
        self.course_day = [0] * (n_c * self.days)
        self.course_room = [0] * (n_c * n_r)
        self.course_count = [0] * n_c
        self.days_used = [0] * n_c
        self.rooms_used = [0] * n_c
        self.hard = [0, 0, 0, 0]  # HC2..HC5
        self.sc1 = 0
        self.sc3 = 0
        self.sc2 = sum(self._mwd)
        self.sc4 = 0
        for e in events:
            self.add(*e)

    def copy(self) -> DeltaEvaluator:
        new = object.__new__(DeltaEvaluator)
        new.__dict__.update(self.__dict__)
        for name in ("room_period", "teacher_period", "curr_period", "course_day",
                     "course_room", "course_count", "days_used", "rooms_used", "hard"):
            setattr(new, name, list(getattr(self, name)))
        return new

    # -- queries ---------------------------------------------------------

    @property
    def hc(self) -> tuple[int, int, int, int, int]:
        hc1 = sum(abs(n - k) for n, k in zip(self._lectures, self.course_count))
        return (hc1, *self.hard)

    @property
    def sc(self) -> tuple[int, int, int, int]:
        return self.sc1, self.sc2, self.sc3, self.sc4

    @property
    def quality(self) -> int:
        return self.sc1 + 5 * self.sc2 + 2 * self.sc3 + self.sc4

    def report(self) -> ViolationReport:
        return ViolationReport(self.hc, self.sc)

    def hard_delta(self, course: int, room: int, period: int) -> int:
        """Additional HC2..HC5 violations if the event were added."""
        P = self.n_periods
        d = (self.room_period[room * P + period] > 0) + (self.teacher_period[self._teacher[course] * P + period] > 0)
        cp = self.curr_period
        for q in self._curr[course]:
            d += cp[q * P + period] > 0
        return d + (period in self._unavail[course])

    # -- updates -----------------------------------------------------------

    def _sc3_window(self, q: int, period: int) -> int:
        ppd, cp = self.ppd, self.curr_period
        base = q * self.n_periods + period - period % ppd
        s = period % ppd
        cost = 0
        for j in range(max(0, s - 1), min(ppd, s + 2)):
            n = cp[base + j]
            if n and not ((j > 0 and cp[base + j - 1]) or (j < ppd - 1 and cp[base + j + 1])):
                cost += n
        return cost

    def add(self, course: int, room: int, period: int) -> None:
        P = self.n_periods
        hard = self.hard
        k = room * P + period
        hard[2] += self.room_period[k] > 0
        self.room_period[k] += 1
        k = self._teacher[course] * P + period
        hard[0] += self.teacher_period[k] > 0
        self.teacher_period[k] += 1
        hard[3] += period in self._unavail[course]
        for q in self._curr[course]:
            k = q * P + period
            hard[1] += self.curr_period[k] > 0
            before = self._sc3_window(q, period)
            self.curr_period[k] += 1
            self.sc3 += self._sc3_window(q, period) - before
        self.course_count[course] += 1
        self.sc1 += max(0, self._students[course] - self._cap[room])
        k = course * self.days + period // self.ppd
        self.course_day[k] += 1
        if self.course_day[k] == 1:
            mwd = self._mwd[course]
            self.days_used[course] += 1
            if self.days_used[course] <= mwd:
                self.sc2 -= 1
        k = course * self.n_rooms + room
        self.course_room[k] += 1
        if self.course_room[k] == 1:
            self.rooms_used[course] += 1
            if self.rooms_used[course] > 1:
                self.sc4 += 1

    def remove(self, course: int, room: int, period: int) -> None:
        P = self.n_periods
        hard = self.hard
        k = room * P + period
        if self.room_period[k] <= 0:
            raise ValueError(f"no event at room {room}, period {period}")
        self.room_period[k] -= 1
        hard[2] -= self.room_period[k] > 0
        k = self._teacher[course] * P + period
        self.teacher_period[k] -= 1
        hard[0] -= self.teacher_period[k] > 0
        hard[3] -= period in self._unavail[course]
        for q in self._curr[course]:
            k = q * P + period
            before = self._sc3_window(q, period)
            self.curr_period[k] -= 1
            self.sc3 += self._sc3_window(q, period) - before
            hard[1] -= self.curr_period[k] > 0
        self.course_count[course] -= 1
        self.sc1 -= max(0, self._students[course] - self._cap[room])
        k = course * self.days + period // self.ppd
        self.course_day[k] -= 1
        if self.course_day[k] == 0:
            self.days_used[course] -= 1
            if self.days_used[course] < self._mwd[course]:
                self.sc2 += 1
        k = course * self.n_rooms + room
        self.course_room[k] -= 1
        if self.course_room[k] == 0:
            self.rooms_used[course] -= 1
            if self.rooms_used[course] >= 1:
                self.sc4 -= 1

    def _clashes(self, course: int, period: int, leaving: int) -> bool:
        """Would ``course`` meet a teacher/curriculum clash at ``period`` once ``leaving`` departs it?"""
        if course < 0:
            return False
        P = self.n_periods
        t = self._teacher[course]
        n = self.teacher_period[t * P + period]
        if leaving >= 0 and self._teacher[leaving] == t:
            n -= 1
        if n > 0:
            return True
        cp = self.curr_period
        gone = self._curr[leaving] if leaving >= 0 else ()
        for q in self._curr[course]:
            if cp[q * P + period] - (q in gone) > 0:
                return True
        return False

    def swap_delta(self, course_a: int, slot_a: int, course_b: int, slot_b: int) -> int | None:
        """Quality change from exchanging the occupants of two room-period slots.

        ``course_a`` sits at ``slot_a`` and moves to ``slot_b``; ``course_b``
        moves the other way. Either course may be -1 (empty slot). Returns
        None when the result would carry any HC2..HC5 violation.
        """
        if course_a == course_b or slot_a == slot_b:
            return 0
        R = self.n_rooms
        pa, ra = divmod(slot_a, R)
        pb, rb = divmod(slot_b, R)
        # cheap rejections before touching the tallies
        if course_a >= 0 and pb in self._unavail[course_a]:
            return None
        if course_b >= 0 and pa in self._unavail[course_b]:
            return None
        if pa != pb and (self._clashes(course_a, pb, course_b) or self._clashes(course_b, pa, course_a)):
            return None
        q0 = self.quality
        if course_a >= 0:
            self.remove(course_a, ra, pa)
        if course_b >= 0:
            self.remove(course_b, rb, pb)
        if course_a >= 0:
            self.add(course_a, rb, pb)
        if course_b >= 0:
            self.add(course_b, ra, pa)
        infeasible = any(self.hard)
        q1 = self.quality
        if course_b >= 0:
            self.remove(course_b, ra, pa)
        if course_a >= 0:
            self.remove(course_a, rb, pb)
        if course_a >= 0:
            self.add(course_a, ra, pa)
        if course_b >= 0:
            self.add(course_b, rb, pb)
        return None if infeasible else q1 - q0


def incremental_hard_delta(instance: Instance, partial: Timetable, candidate: Event) -> int:
    """Increase in HC2+HC3+HC4+HC5 when ``candidate`` is appended to ``partial``."""
    check_timetable(instance, Timetable((candidate,)))
    return DeltaEvaluator(instance, partial.events).hard_delta(*candidate)


class SwapMove(NamedTuple):
    position_a: int
    position_b: int


class Layout:
    """A timetable seen as fixed room-period positions for the swap neighbourhood.

    Positions ``0..n_events-1`` are the slots occupied when the layout was
    built (in timetable order); the remaining positions are the empty slots in
    ascending order. A position's room and period never change; swaps only
    exchange occupants, so positions stay meaningful for trail bookkeeping.
    """

    def __init__(self, instance: Instance, timetable: Timetable) -> None:
        check_timetable(instance, timetable)
        R = len(instance.rooms)
        occupied = [e.period * R + e.room for e in timetable.events]
        if len(set(occupied)) != len(occupied):
            raise ValueError("timetable books a room twice in one period")
        taken = set(occupied)
        empty = [s for s in range(instance.n_room_periods) if s not in taken]
        self.instance = instance
        self.slots: list[int] = occupied + empty
        self.n_events = len(occupied)
        self.occupant: list[int] = [e.course for e in timetable.events] + [-1] * len(empty)
        self.evaluator = DeltaEvaluator(instance, timetable.events)

    def __len__(self) -> int:
        return len(self.slots)

    def copy(self) -> Layout:
        new = object.__new__(Layout)
        new.instance, new.slots, new.n_events = self.instance, self.slots, self.n_events
        new.occupant = list(self.occupant)
        new.evaluator = self.evaluator.copy()
        return new

    @property
    def quality(self) -> int:
        return self.evaluator.quality

    def timetable(self) -> Timetable:
        R = self.n_rooms
        return Timetable(
            Event(c, s % R, s // R) for c, s in zip(self.occupant, self.slots) if c >= 0
        )

    @property
    def n_rooms(self) -> int:
        return self.evaluator.n_rooms

    def delta(self, a: int, b: int) -> int | None:
        occ, slots = self.occupant, self.slots
        return self.evaluator.swap_delta(occ[a], slots[a], occ[b], slots[b])

    def apply(self, move: SwapMove) -> None:
        """Exchange occupants of the two positions in place."""
        a, b = move
        occ, slots, ev, R = self.occupant, self.slots, self.evaluator, self.n_rooms
        ca, cb = occ[a], occ[b]
        if a == b or ca == cb:
            return
        if ca >= 0:
            ev.remove(ca, slots[a] % R, slots[a] // R)
        if cb >= 0:
            ev.remove(cb, slots[b] % R, slots[b] // R)
        if ca >= 0:
            ev.add(ca, slots[b] % R, slots[b] // R)
        if cb >= 0:
            ev.add(cb, slots[a] % R, slots[a] // R)
        occ[a], occ[b] = cb, ca


def apply_swap(layout: Layout, move: SwapMove) -> Layout:
    """Return a copy of ``layout`` with the two positions' courses exchanged."""
    out = layout.copy()
    out.apply(move)
    return out


def swap_quality_delta(instance: Instance, layout: Layout, move: SwapMove) -> int | None:
    """``quality(after) - quality(before)`` for ``move``, or None if it breaks a hard constraint."""
    if layout.instance is not instance and layout.instance != instance:
        raise ValueError("layout belongs to a different instance")
    return layout.delta(*move)
