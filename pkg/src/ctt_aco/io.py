"""ITC-2007 curriculum-based ``.ctt`` instances and solution files."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Course, Curriculum, Event, Instance, Period, Room, Timetable

HEADER_KEYS = ("Name", "Courses", "Rooms", "Days", "Periods_per_day", "Curricula", "Constraints")
SECTIONS = ("COURSES", "ROOMS", "CURRICULA", "UNAVAILABILITY_CONSTRAINTS")


class ParseError(ValueError):
    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class GenerationError(ValueError):
    pass


def _lines(text: str | bytes) -> list[tuple[int, list[str]]]:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if tokens:
            out.append((no, tokens))
    return out


def _int(token: str, line: int, what: str, minimum: int = 0) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(line, f"{what} is not an integer: {token!r}") from None
    if value < minimum:
        raise ParseError(line, f"{what} must be >= {minimum}, got {value}")
    return value


def parse_instance(text: str | bytes) -> Instance:
    lines = _lines(text)
    header: dict[str, str] = {}
    i = 0
    while i < len(lines):
        no, tokens = lines[i]
        if len(tokens) == 1 and tokens[0].endswith(":") and tokens[0][:-1].isupper():
            break
        key = tokens[0].rstrip(":")
        if not tokens[0].endswith(":") or key not in HEADER_KEYS:
            raise ParseError(no, f"unknown header entry {tokens[0]!r}")
        if key in header:
            raise ParseError(no, f"duplicate header key {key}")
        if len(tokens) < 2:
            raise ParseError(no, f"header key {key} has no value")
        header[key] = " ".join(tokens[1:])
        i += 1
    first_section_line = lines[i][0] if i < len(lines) else (lines[-1][0] if lines else 1)
    for key in HEADER_KEYS:
        if key not in header:
            raise ParseError(first_section_line, f"missing header key {key}")
    hline = {k: no for no, t in lines[:i] for k in [t[0].rstrip(":")]}
    counts = {k: _int(header[k], hline[k], k, 1 if k in ("Days", "Periods_per_day") else 0)
              for k in HEADER_KEYS[1:]}
    days, ppd = counts["Days"], counts["Periods_per_day"]

    sections: dict[str, list[tuple[int, list[str]]]] = {}
    section_line: dict[str, int] = {}
    current = None
    ended = False
    for no, tokens in lines[i:]:
        if tokens == ["END."]:
            ended = True
            break
        if len(tokens) == 1 and tokens[0].endswith(":"):
            name = tokens[0][:-1]
            if name not in SECTIONS:
                raise ParseError(no, f"unknown section {tokens[0]}")
            if name in sections:
                raise ParseError(no, f"duplicate section {tokens[0]}")
            current = name
            sections[name] = []
            section_line[name] = no
            continue
        if current is None:
            raise ParseError(no, "data before first section")
        sections[current].append((no, tokens))
    last = lines[-1][0] if lines else 1
    if not ended:
        raise ParseError(last, "missing END. terminator")
    for name in SECTIONS:
        if name not in sections:
            raise ParseError(last, f"missing section {name}:")

    def check_count(name: str, key: str) -> None:
        rows = sections[name]
        if len(rows) != counts[key]:
            at = rows[-1][0] if rows else section_line[name]
            raise ParseError(at, f"{name} has {len(rows)} rows, header declares {counts[key]}")

    courses = []
    for no, t in sections["COURSES"]:
        if len(t) != 5:
            raise ParseError(no, "course line needs: id teacher lectures min_days students")
        courses.append(Course(t[0], t[1], _int(t[2], no, "lectures", 1),
                              _int(t[3], no, "min_working_days", 1), _int(t[4], no, "students")))
        if t[0] in {c.id for c in courses[:-1]}:
            raise ParseError(no, f"duplicate course {t[0]}")
    check_count("COURSES", "Courses")
    known = {c.id for c in courses}

    rooms = []
    for no, t in sections["ROOMS"]:
        if len(t) != 2:
            raise ParseError(no, "room line needs: id capacity")
        if t[0] in {r.id for r in rooms}:
            raise ParseError(no, f"duplicate room {t[0]}")
        rooms.append(Room(t[0], _int(t[1], no, "capacity")))
    check_count("ROOMS", "Rooms")

    curricula = []
    for no, t in sections["CURRICULA"]:
        if len(t) < 2:
            raise ParseError(no, "curriculum line needs: id n course...")
        n = _int(t[1], no, "curriculum size")
        members = t[2:]
        if len(members) != n:
            raise ParseError(no, f"curriculum {t[0]} declares {n} courses, lists {len(members)}")
        for cid in members:
            if cid not in known:
                raise ParseError(no, f"curriculum {t[0]} references unknown course {cid}")
        if t[0] in {q.id for q in curricula}:
            raise ParseError(no, f"duplicate curriculum {t[0]}")
        curricula.append(Curriculum(t[0], tuple(members)))
    check_count("CURRICULA", "Curricula")

    unavailable: set[tuple[str, Period]] = set()
    for no, t in sections["UNAVAILABILITY_CONSTRAINTS"]:
        if len(t) != 3:
            raise ParseError(no, "unavailability line needs: course day period")
        if t[0] not in known:
            raise ParseError(no, f"unavailability references unknown course {t[0]}")
        day, slot = _int(t[1], no, "day"), _int(t[2], no, "period")
        if day >= days:
            raise ParseError(no, f"day {day} out of range [0, {days})")
        if slot >= ppd:
            raise ParseError(no, f"period {slot} out of range [0, {ppd})")
        unavailable.add((t[0], Period(day, slot)))
    check_count("UNAVAILABILITY_CONSTRAINTS", "Constraints")

    return Instance(header["Name"], days, ppd, tuple(courses), tuple(rooms),
                    tuple(curricula), frozenset(unavailable))


def write_instance(instance: Instance) -> str:
    order = instance.course_index
    unavail = sorted(instance.unavailability, key=lambda u: (order[u[0]], u[1]))
    out = [
        f"Name: {instance.name}",
        f"Courses: {len(instance.courses)}",
        f"Rooms: {len(instance.rooms)}",
        f"Days: {instance.days}",
        f"Periods_per_day: {instance.periods_per_day}",
        f"Curricula: {len(instance.curricula)}",
        f"Constraints: {len(unavail)}",
        "",
        "COURSES:",
    ]
    out += [f"{c.id} {c.teacher} {c.lectures} {c.min_working_days} {c.students}" for c in instance.courses]
    out += ["", "ROOMS:"]
    out += [f"{r.id}\t{r.capacity}" for r in instance.rooms]
    out += ["", "CURRICULA:"]
    out += [f"{q.id}  {len(q.course_ids)} " + " ".join(q.course_ids) for q in instance.curricula]
    out += ["", "UNAVAILABILITY_CONSTRAINTS:"]
    out += [f"{cid} {p.day} {p.slot}" for cid, p in unavail]
    out += ["", "END.", ""]
    return "\n".join(out)


def write_solution(instance: Instance, timetable: Timetable) -> str:
    """One ``<CourseID> <RoomID> <Day> <Period>`` line per event."""
    ppd = instance.periods_per_day
    rows = sorted(
        (instance.courses[e.course].id, e.period // ppd, e.period % ppd, instance.rooms[e.room].id)
        for e in timetable.events
    )
    return "".join(f"{c} {r} {d} {s}\n" for c, d, s, r in rows)


def parse_solution(instance: Instance, text: str | bytes) -> Timetable:
    events = []
    for no, t in _lines(text):
        if len(t) != 4:
            raise ParseError(no, "solution line needs: course room day period")
        course = instance.course_index.get(t[0])
        if course is None:
            raise ParseError(no, f"unknown course {t[0]}")
        room = instance.room_index.get(t[1])
        if room is None:
            raise ParseError(no, f"unknown room {t[1]}")
        day, slot = _int(t[2], no, "day"), _int(t[3], no, "period")
        if day >= instance.days or slot >= instance.periods_per_day:
            raise ParseError(no, f"period ({day}, {slot}) out of range")
        events.append(Event(course, room, day * instance.periods_per_day + slot))
    return Timetable(events)


@dataclass(frozen=True)
class GenSpec:
    courses: int = 12
    rooms: int = 4
    days: int = 5
    periods_per_day: int = 4
    curricula: int = 4
    max_lectures_per_course: int = 4
    unavailability_density: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("courses", "rooms", "days", "periods_per_day", "curricula", "max_lectures_per_course"):
            if getattr(self, name) < 1:
                raise GenerationError(f"{name} must be positive")
        if not 0.0 <= self.unavailability_density <= 1.0:
            raise GenerationError("unavailability_density must lie in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise GenerationError("seed must be a 64-bit unsigned integer")


def generate_instance(spec: GenSpec) -> Instance:
    """Deterministic synthetic instance with room for a feasible timetable.

    Teacher and curriculum loads are kept to at most half the periods and
    every course keeps at least twice its lectures in available periods, so
    instances are loosely rather than tightly constrained.
    """
    rng = np.random.default_rng(spec.seed)
    n_p = spec.days * spec.periods_per_day
    half = max(1, n_p // 2)
    max_lec = min(spec.max_lectures_per_course, half)
    lectures = rng.integers(1, max_lec + 1, size=spec.courses)
    if lectures.sum() > spec.rooms * n_p:
        raise GenerationError(
            f"{int(lectures.sum())} lectures exceed {spec.rooms * n_p} room-period slots")

    capacities = np.sort(rng.integers(20, 121, size=spec.rooms))[::-1]
    rooms = [Room(f"R{r}", int(cap)) for r, cap in enumerate(capacities)]

    n_teachers = max(1, math.ceil(spec.courses * 0.75))
    load = np.zeros(n_teachers, dtype=int)
    teachers = []
    for c in range(spec.courses):
        ok = np.flatnonzero(load + lectures[c] <= half)
        t = int(rng.choice(ok)) if ok.size else int(np.argmin(load))
        load[t] += lectures[c]
        teachers.append(t)

    courses = []
    for c in range(spec.courses):
        fit = int(capacities[rng.integers(spec.rooms)])
        students = int(rng.integers(5, fit + 2))
        mwd = int(rng.integers(1, min(lectures[c], spec.days) + 1))
        courses.append(Course(f"C{c}", f"T{teachers[c]}", int(lectures[c]), mwd, students))

    curricula = []
    for q in range(spec.curricula):
        size = int(rng.integers(min(2, spec.courses), min(4, spec.courses) + 1))
        for _ in range(20):
            members = np.sort(rng.choice(spec.courses, size=size, replace=False))
            if lectures[members].sum() <= half:
                break
        else:
            members = members[:1]
        curricula.append(Curriculum(f"Q{q}", tuple(f"C{int(m)}" for m in members)))

    unavail: set[tuple[str, Period]] = set()
    for c in range(spec.courses):
        blocked = np.flatnonzero(rng.random(n_p) < spec.unavailability_density)
        keep_free = min(n_p, 2 * int(lectures[c]))
        excess = len(blocked) - (n_p - keep_free)
        if excess > 0:
            blocked = np.sort(rng.choice(blocked, size=len(blocked) - excess, replace=False))
        for p in blocked:
            unavail.add((f"C{c}", Period(*divmod(int(p), spec.periods_per_day))))

    name = f"gen-{spec.courses}c{spec.rooms}r{spec.days}x{spec.periods_per_day}-s{spec.seed}"
    return Instance(name, spec.days, spec.periods_per_day, tuple(courses), tuple(rooms),
                    tuple(curricula), frozenset(unavail))
