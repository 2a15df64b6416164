import json

import pytest

from dglalab import cli, report
from dglalab.fixtures import FixtureError, bundled_names, loads

FIXTURES = [n[:-3] for n in bundled_names()]


# ---- fixture grammar


@pytest.mark.parametrize("text,line,col,fragment", [
    ("space V { a:0 \n b:1 \n", 2, 6, "unexpected end of file"),
    ("space V { a:0 b:1 }\nd V { a -> c }\n", 2, 12, "undeclared name 'c'"),
    ("space V { a:0 b:1 }\nd V { a -> 2/0*b }\n", 2, 12, "bad number"),
    ("space V { a:0 a:1 }\n", 1, 1, "appears twice"),
])
def test_parse_errors_carry_positions(text, line, col, fragment):
    with pytest.raises(FixtureError) as info:
        loads(text)
    err = info.value
    assert (err.line, err.col) == (line, col)
    assert fragment in str(err)
    assert err.failed_check is None


@pytest.mark.parametrize("text,check", [
    ("space V { a:0  b:1  c:2 }\nd V { a -> b ; b -> c }\n", "d^2 = 0"),
    ("dgla g {\n space x:0 y:0 z:0\n bracket x y = x\n bracket y z = x\n bracket x z = y\n}\n",
     "graded Jacobi identity"),
])
def test_axiom_failures_name_the_check(text, check):
    with pytest.raises(FixtureError) as info:
        loads(text)
    assert info.value.failed_check == check
    assert info.value.witness is not None


def test_bundled_fixtures_load_with_logged_checks(bundled):
    for name in FIXTURES:
        fx = bundled(name)
        assert all(r.passed for r in fx.checks)
    assert len(bundled("A1").checks) > 0


# ---- commands


def _run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


COMMANDS = ["check", "cohomology", "tw", "tw2", "jacobian", "grassmann", "qbundle", "mc",
            "gauge", "lift", "period", "aj", "ainf-check", "pipeline"]


@pytest.mark.parametrize("command", COMMANDS)
def test_every_command_passes_on_p1(command, capsys):
    code, out, err = _run([command, "P1.dg", "--samples", "20", "--max-len", "2",
                           "--max-polydeg", "2"], capsys)
    assert code == 0, err + out
    assert out.rstrip().endswith("result: pass")


@pytest.mark.parametrize("name", ["A4", "P2", "obstructed_period"])
def test_machine_output_round_trips(name, capsys):
    code, out, _ = _run(["check", f"{name}.dg", "--format", "machine"], capsys)
    assert code == 0
    assert report.roundtrip(out) == out
    data = json.loads(out)
    assert data["passed"] is True and "timing_seconds" not in data


def test_timing_only_on_request(capsys):
    _, out, _ = _run(["check", "P1.dg", "--format", "machine", "--timing"], capsys)
    assert "timing_seconds" in json.loads(out)


def test_repeated_runs_are_identical(capsys):
    argv = ["gauge", "A4.dg", "--samples", "50", "--seed", "7", "--format", "machine"]
    first = _run(argv, capsys)
    second = _run(argv, capsys)
    assert first == second


def test_lift_verdicts_on_p2(capsys):
    code, out, _ = _run(["lift", "P2.dg", "--artin", "1:3"], capsys)
    assert code == 0
    assert 'class 0: verdict: "lifts"' in out
    assert 'class 1: verdict: "lifts"' in out
    assert 'class 0 + class 1: verdict: "obstructed at order 2"' in out
    assert '"tried": 729' in out


def test_aj_on_a1(capsys):
    code, out, _ = _run(["aj", "A1.dg", "--artin", "1:2"], capsys)
    assert code == 0
    assert 'D: aj matrix: {"(1,0)": ["-1"]}' in out
    assert 'D: aj values: {"(1,0)": {"f0": "-1"}}' in out


def test_exit_codes(tmp_path, capsys):
    assert _run(["check", str(tmp_path / "missing.dg")], capsys)[0] == 2
    assert _run(["check", "P1.dg", "--bogus"], capsys)[0] == 2
    bad_syntax = tmp_path / "syntax.dg"
    bad_syntax.write_text("space V { a:0 \n")
    code, _, err = _run(["check", str(bad_syntax)], capsys)
    assert code == 2 and "line" in err
    bad_d = tmp_path / "bad_d.dg"
    bad_d.write_text("space V { a:0  b:1  c:2 }\nd V { a -> b ; b -> c }\n")
    code, _, err = _run(["check", str(bad_d)], capsys)
    assert code == 1 and "d^2 = 0" in err


def test_artin_flag_validation(capsys):
    assert _run(["lift", "P2.dg", "--artin", "2:3"], capsys)[0] == 2
    assert _run(["mc", "P2.dg", "--artin", "x"], capsys)[0] == 2


def test_thread_variable_is_validated(monkeypatch, capsys):
    monkeypatch.setenv("DGLA_LAB_THREADS", "4")
    assert _run(["check", "P1.dg"], capsys)[0] == 0
    monkeypatch.setenv("DGLA_LAB_THREADS", "zero")
    assert _run(["check", "P1.dg"], capsys)[0] == 2


def test_selftest_subset(capsys):
    code, out, _ = _run(["selftest", "--only", "2,3"], capsys)
    assert code == 0
    assert "[PASS] criterion 2:" in out and "[PASS] criterion 3:" in out
    assert "criterion 4" not in out
