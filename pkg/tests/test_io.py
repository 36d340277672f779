from pathlib import Path

import numpy as np
import pytest

from builders import random_timetable
from ctt_aco import (
    AcoParams,
    Event,
    GenSpec,
    ParseError,
    Period,
    Timetable,
    construct_feasible,
    generate_instance,
    load_toy,
    parse_instance,
    parse_solution,
    write_instance,
    write_solution,
)
from ctt_aco.construction import build_construction_graph
from ctt_aco.io import GenerationError

FIXTURES = sorted((Path(__file__).parent / "fixtures").glob("*.ctt"))


def fixture_text(name):
    return (Path(__file__).parent / "fixtures" / name).read_text()


def test_minimal_document():
    inst = parse_instance(fixture_text("minimal.ctt"))
    assert len(inst.courses) == 1 and len(inst.rooms) == 1
    assert inst.courses[0].id == "c1" and inst.courses[0].students == 10
    assert (inst.days, inst.periods_per_day) == (1, 2)
    assert inst.curricula[0].course_ids == ("c1",)


def test_toy_instance_contents():
    inst = load_toy()
    assert [c.id for c in inst.courses] == ["SceCosC", "ArcTec", "TecCos", "Geotec"]
    assert inst.total_lectures == 16
    assert ("TecCos", Period(2, 0)) in inst.unavailability
    assert len(inst.unavailability) == 8


def test_bytes_crlf_and_duplicate_unavailability():
    raw = (Path(__file__).parent / "fixtures" / "crlf_dupes.ctt").read_bytes()
    assert b"\r\n" in raw
    inst = parse_instance(raw)
    assert inst.unavailability == {("a", Period(0, 0)), ("b", Period(1, 2))}
    assert "Constraints: 2" in write_instance(inst)


@pytest.mark.parametrize("path", FIXTURES, ids=lambda p: p.name)
def test_round_trip_fixtures(path):
    inst = parse_instance(path.read_bytes())
    assert parse_instance(write_instance(inst)) == inst


def test_round_trip_generated():
    for seed in range(100):
        inst = generate_instance(GenSpec(courses=5 + seed % 20, rooms=4 + seed % 4, seed=seed))
        assert parse_instance(write_instance(inst)) == inst


def _error(text):
    with pytest.raises(ParseError) as info:
        parse_instance(text)
    return info.value


def test_dangling_unavailability_reference():
    text = fixture_text("toy.ctt").replace("TecCos 2 0", "cX 2 0")
    err = _error(text)
    assert "cX" in err.reason
    assert text.splitlines()[err.line - 1].startswith("cX")


MUTATIONS = {
    "curriculum dangling": ("Cur2  2 TecCos Geotec", "Cur2  2 TecCos Nope"),
    "unavailability dangling": ("ArcTec 4 3", "Missing 4 3"),
    "day out of range": ("ArcTec 4 3", "ArcTec 5 3"),
    "slot out of range": ("ArcTec 4 3", "ArcTec 4 4"),
    "missing header": ("Rooms: 3\n", ""),
    "unknown header": ("Days: 5", "Weeks: 5"),
    "unknown section": ("ROOMS:", "HALLS:"),
    "course count": ("Courses: 4", "Courses: 5"),
    "curriculum size": ("Cur1  3 SceCosC", "Cur1  4 SceCosC"),
    "constraint count": ("Constraints: 8", "Constraints: 7"),
    "non-integer": ("A\t32", "A\tlarge"),
    "course arity": ("Geotec Scarlatti 5 4 18", "Geotec Scarlatti 5 4"),
    "zero lectures": ("Geotec Scarlatti 5 4 18", "Geotec Scarlatti 0 4 18"),
    "duplicate room": ("C\t40", "A\t40"),
    "missing end": ("END.", ""),
}


@pytest.mark.parametrize("name", sorted(MUTATIONS))
def test_mutation_fuzz_rejected_with_line(name):
    old, new = MUTATIONS[name]
    text = fixture_text("toy.ctt")
    assert old in text
    err = _error(text.replace(old, new, 1))
    assert err.line >= 1
    assert str(err).startswith(f"line {err.line}:")


def test_random_token_fuzz_never_crashes_uncontrolled():
    text = fixture_text("toy.ctt")
    lines = text.splitlines()
    rng = np.random.default_rng(0)
    for _ in range(300):
        i = int(rng.integers(len(lines)))
        tokens = lines[i].split()
        if not tokens:
            continue
        tokens[int(rng.integers(len(tokens)))] = str(rng.choice(["zz", "-1", "99", "", "Q:"]))
        mutated = "\n".join(lines[:i] + [" ".join(tokens)] + lines[i + 1:])
        try:
            parse_instance(mutated)
        except ParseError as err:
            assert err.line >= 1


# -- solutions -------------------------------------------------------------

def test_single_event_line():
    inst = parse_instance(fixture_text("minimal.ctt"))
    assert write_solution(inst, Timetable([Event(0, 0, 1)])) == "c1 r1 0 1\n"
    assert write_solution(inst, Timetable()) == ""


def test_parse_solution_examples():
    inst = parse_instance(fixture_text("minimal.ctt"))
    assert parse_solution(inst, "c1 r1 0 1") == Timetable([Event(0, 0, 1)])
    with pytest.raises(ParseError, match="unknown room r9"):
        parse_solution(inst, "c1 r9 0 1")
    with pytest.raises(ParseError, match="unknown course"):
        parse_solution(inst, "\nc2 r1 0 1")
    with pytest.raises(ParseError, match="out of range"):
        parse_solution(inst, "c1 r1 0 2")


def test_solution_order_is_deterministic():
    inst = load_toy()
    tt = construct_feasible(inst, AcoParams(max_cycles=50, seed=3)).timetable
    text = write_solution(inst, tt)
    keys = [(ln.split()[0], int(ln.split()[2]), int(ln.split()[3])) for ln in text.splitlines()]
    assert keys == sorted(keys)


def test_solution_round_trip_random():
    rng = np.random.default_rng(11)
    for seed in range(50):
        inst = generate_instance(GenSpec(courses=6, rooms=3, seed=seed))
        tt = random_timetable(inst, rng)
        assert parse_solution(inst, write_solution(inst, tt)) == tt


# -- generator -------------------------------------------------------------

def test_generator_is_deterministic():
    spec = GenSpec(courses=9, rooms=3, seed=2**63 + 5)
    assert write_instance(generate_instance(spec)) == write_instance(generate_instance(spec))
    assert generate_instance(GenSpec(seed=1)) != generate_instance(GenSpec(seed=2))


def test_generator_course_count():
    assert len(generate_instance(GenSpec(courses=5)).courses) == 5


def test_generator_rejects_unsatisfiable():
    with pytest.raises(GenerationError):
        generate_instance(GenSpec(courses=40, rooms=1, days=1, periods_per_day=2,
                                  max_lectures_per_course=2, seed=0))


@pytest.mark.parametrize("seed", range(20))
def test_generated_courses_have_unrelaxed_edges(seed):
    inst = generate_instance(GenSpec(courses=15, rooms=4, unavailability_density=0.6, seed=seed))
    graph = build_construction_graph(inst)
    assert not graph.relaxed
    assert all(graph.edges[c].sum() >= 1 for c in range(len(inst.courses)))
    for i, c in enumerate(inst.courses):
        assert inst.n_periods - len(inst.unavailable[i]) >= min(inst.n_periods, 2 * c.lectures)
