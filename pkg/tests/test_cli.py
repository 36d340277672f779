import csv
import io
from pathlib import Path

import pytest

from builders import tiny_instance
from ctt_aco import exhaustive_optimum, parse_instance, parse_solution, write_instance
from ctt_aco.cli import REPORT_HEADER, TRACE_HEADER, main
from ctt_aco.oracle import oracle_soft_counts

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def report_rows(out):
    return list(csv.DictReader(io.StringIO(out)))


@pytest.fixture
def tiny_path(tmp_path):
    path = tmp_path / "tiny.ctt"
    path.write_text(write_instance(tiny_instance(1)))
    return path


def test_solve_repeat_is_deterministic(capsys, tiny_path, tmp_path):
    args = ["solve", "--instance", tiny_path, "--seed", 1, "--repeat", 3, "--workers", 1,
            "--max-cycles", 100, "--csv", tmp_path / "trace.csv", "--out", tmp_path / "best.sol"]
    code, out, _ = run(capsys, *args)
    assert code == 0
    rows = report_rows(out)
    assert [r["seed"] for r in rows] == ["1", "2", "3"]
    assert all(r["feasible"] == "True" for r in rows)
    assert list(rows[0]) == REPORT_HEADER
    traces = {s: (tmp_path / f"trace_{s}.csv").read_text() for s in (1, 2, 3)}

    code2, out2, _ = run(capsys, *args)
    drop_time = lambda rs: [{k: v for k, v in r.items() if not k.endswith("_s")} for r in rs]
    assert code2 == 0 and drop_time(report_rows(out2)) == drop_time(rows)
    for s, text in traces.items():
        again = (tmp_path / f"trace_{s}.csv").read_text()
        strip = lambda t: [ln.rsplit(",", 1)[0] for ln in t.splitlines()]
        assert strip(again) == strip(text)


def test_trace_schema_and_monotone_global_best(capsys, tiny_path, tmp_path):
    run(capsys, "solve", "--instance", tiny_path, "--seed", 4, "--max-cycles", 100, "--csv", tmp_path / "t.csv")
    with open(tmp_path / "t_4.csv") as fh:
        reader = csv.reader(fh)
        assert next(reader) == TRACE_HEADER
        rows = list(reader)
    assert {r[0] for r in rows} == {"construct", "improve"}
    for phase in ("construct", "improve"):
        gb = [int(r[3]) for r in rows if r[0] == phase]
        assert gb == sorted(gb, reverse=True)


def test_written_solution_matches_reported_quality(capsys, tiny_path, tmp_path):
    code, out, _ = run(capsys, "solve", "--instance", tiny_path, "--seed", 0, "--repeat", 2,
                       "--max-cycles", 100, "--out", tmp_path / "best.sol")
    assert code == 0
    best = min(int(r["final_quality"]) for r in report_rows(out))
    inst = parse_instance(tiny_path.read_text())
    sc = oracle_soft_counts(inst, parse_solution(inst, (tmp_path / "best.sol").read_text()))
    assert sc[0] + 5 * sc[1] + 2 * sc[2] + sc[3] == best
    code, out, _ = run(capsys, "validate", "--instance", tiny_path, "--solution", tmp_path / "best.sol")
    assert code == 0 and f"quality {best}" in out.splitlines()


def validate_output(out):
    return dict(line.split() for line in out.splitlines())


def test_validate_feasible_fixture(capsys):
    code, out, _ = run(capsys, "validate", "--instance", FIXTURES / "sc2134.ctt",
                       "--solution", FIXTURES / "sc2134.sol")
    values = validate_output(out)
    assert code == 0
    assert all(values[f"HC{i}"] == "0" for i in range(1, 6))
    assert [values[f"SC{i}"] for i in range(1, 5)] == ["2", "1", "3", "4"]
    assert values["quality"] == "17"


def test_validate_double_booking(capsys, tmp_path):
    lines = (FIXTURES / "sc2134.sol").read_text().splitlines()
    first, second = lines[0].split(), lines[1].split()
    # put the second event in the first event's room and period
    lines[1] = " ".join([second[0], first[1], first[2], first[3]])
    bad = tmp_path / "bad.sol"
    bad.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "validate", "--instance", FIXTURES / "sc2134.ctt", "--solution", bad)
    assert code != 0
    assert int(validate_output(out)["HC4"]) >= 1


def test_generate_is_byte_identical(capsys, tmp_path):
    flags = ["generate", "--courses", 9, "--rooms", 3, "--seed", 17]
    run(capsys, *flags, "--out", tmp_path / "a.ctt")
    run(capsys, *flags, "--out", tmp_path / "b.ctt")
    assert (tmp_path / "a.ctt").read_bytes() == (tmp_path / "b.ctt").read_bytes()
    _, out, _ = run(capsys, *flags)
    assert out == (tmp_path / "a.ctt").read_text()


def test_oracle_on_single_slot(capsys, tmp_path):
    path = tmp_path / "one.ctt"
    path.write_text("Name: one\nCourses: 1\nRooms: 1\nDays: 1\nPeriods_per_day: 1\nCurricula: 0\n"
                    "Constraints: 0\n\nCOURSES:\nc t 1 1 5\n\nROOMS:\nr 10\n\nCURRICULA:\n\n"
                    "UNAVAILABILITY_CONSTRAINTS:\n\nEND.\n")
    code, out, _ = run(capsys, "oracle", "--instance", path)
    assert code == 0
    assert out.splitlines() == ["optimum 0", "feasible_timetables 1", "c r 0 0"]


def test_environment_override(capsys, tiny_path, tmp_path, monkeypatch):
    monkeypatch.setenv("CTT_ACO_INSTANCE", str(tiny_path))
    monkeypatch.setenv("CTT_ACO_SEED", "7")
    monkeypatch.setenv("CTT_ACO_MAX_CYCLES", "50")
    code, out, _ = run(capsys, "solve")
    assert code == 0 and report_rows(out)[0]["seed"] == "7"
    code, out, _ = run(capsys, "solve", "--seed", "9")
    assert report_rows(out)[0]["seed"] == "9"


def test_parse_error_exit(capsys, tmp_path):
    path = tmp_path / "bad.ctt"
    path.write_text((FIXTURES / "toy.ctt").read_text().replace("Courses: 4", "Courses: 5"))
    code, _, err = run(capsys, "solve", "--instance", path)
    assert code == 2
    assert '"line"' in err


def test_missing_file_exit(capsys, tmp_path):
    code, _, _ = run(capsys, "validate", "--instance", tmp_path / "nope.ctt", "--solution", tmp_path / "x")
    assert code == 2


def test_infeasible_instance_times_out(capsys, tmp_path):
    path = tmp_path / "pigeon.ctt"
    path.write_text("Name: pigeon\nCourses: 2\nRooms: 1\nDays: 1\nPeriods_per_day: 3\nCurricula: 0\n"
                    "Constraints: 0\n\nCOURSES:\na t1 2 1 5\nb t2 2 1 5\n\nROOMS:\nr 10\n\nCURRICULA:\n\n"
                    "UNAVAILABILITY_CONSTRAINTS:\n\nEND.\n")
    code, out, err = run(capsys, "solve", "--instance", path, "--max-cycles", 20)
    assert code == 3
    assert "construction_timeout" in err
    assert report_rows(out)[0]["feasible"] == "False"


@pytest.mark.parametrize("seed", range(10))
def test_oracle_bounds_cli_solve(capsys, tmp_path, seed):
    inst = tiny_instance(seed)
    path = tmp_path / "t.ctt"
    path.write_text(write_instance(inst))
    code, out, _ = run(capsys, "solve", "--instance", path, "--seed", seed, "--max-cycles", 100)
    assert code == 0
    code_o, out_o, _ = run(capsys, "oracle", "--instance", path)
    optimum = int(out_o.splitlines()[0].split()[1])
    assert optimum == exhaustive_optimum(inst).quality
    assert optimum <= int(report_rows(out)[0]["final_quality"])
