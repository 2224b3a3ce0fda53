import shutil
from pathlib import Path

import pytest

from courantred import cli
from courantred import scenario as sc
from courantred.errors import InternalError

CORPUS = Path(cli.__file__).parent / "corpus"

GOOD = """courantred-scenario 1
name: standard R^2
seed: 3

[chart]
standard 2

[theta]
standard

[tasks]
master-equation
axioms
"""


def write(tmp_path, text, name="s.scn"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_parse_basic():
    sf = sc.parse_text(GOOD)
    assert sf.name == "standard R^2" and sf.seed == 3
    assert [t for t, _ in sf.tasks] == ["master-equation", "axioms"]


@pytest.mark.parametrize("text, fragment", [
    ("courantred-scenario 2\n", "line 1"),
    (GOOD.replace("standard 2", "standard x"), "line 6 column 10"),
    (GOOD.replace("[tasks]\nmaster-equation", "[tasks]\nfrobnicate"), "frobnicate"),
    (GOOD + "\n[coiso]\nideal e9\n", "unknown generator 'e9'"),
    (GOOD + "\n[coiso]\nideal 1/0*x1\n", "zero denominator"),
    (GOOD.replace("[theta]\nstandard", "[theta]\nexplicit v1*p1 + x1"), "mixes degrees"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(sc.ScenarioError) as exc:
        sc.parse_text(text)
    assert fragment in str(exc.value)


def test_error_position_reported():
    with pytest.raises(sc.ScenarioError) as exc:
        sc.parse_text(GOOD + "\n[coiso]\nideal x1 + e9\n")
    msg = str(exc.value)
    assert "[coiso]" in msg and "line 16" in msg and "column" in msg


def test_exit_codes(tmp_path, capsys):
    assert cli.main(["validate", str(write(tmp_path, GOOD))]) == 0
    # a correct verdict that the user expected to fail is an unexpected verdict
    unexpected = GOOD.replace("master-equation\n", "master-equation expect=fail\n")
    assert cli.main(["validate", str(write(tmp_path, unexpected, "u.scn"))]) == 1
    assert cli.main(["validate", str(write(tmp_path, "garbage\n", "g.scn"))]) == 2
    assert "input error" in capsys.readouterr().err


def test_expected_failure_is_exit_zero(tmp_path):
    p = CORPUS / "twisted_open_r4.scn"
    assert cli.main(["validate", str(p)]) == 0


def test_internal_error_exit_code(tmp_path, monkeypatch):
    def boom(sf):
        raise InternalError("invariant broken")
    monkeypatch.setitem(sc._DISPATCH, "master-equation", boom)
    assert cli.main(["validate", str(write(tmp_path, GOOD))]) == 3


def test_input_error_in_task(tmp_path):
    # reduce without a [coiso] block is an input error
    assert cli.main(["reduce", str(write(tmp_path, GOOD))]) == 2


def test_report_is_deterministic(tmp_path, capsys):
    p = write(tmp_path, GOOD)
    cli.main(["report", str(p)])
    a = capsys.readouterr().out
    cli.main(["report", str(p)])
    b = capsys.readouterr().out
    assert a == b and a.startswith(sc.REPORT_HEADER)
    assert "summary: 2/2 tasks as expected" in a
    cli.main(["report", str(p), "--seed", "4"])
    c = capsys.readouterr().out
    assert "seed: 4" in c


def test_report_out_file(tmp_path, capsys):
    out = tmp_path / "r.report"
    assert cli.main(["report", str(write(tmp_path, GOOD)), "--out", str(out)]) == 0
    assert out.read_text().startswith(sc.REPORT_HEADER)
    assert "2/2 tasks as expected" in capsys.readouterr().out


def test_corpus_goldens(capsys):
    assert cli.main(["corpus", "--run-all"]) == 0
    out = capsys.readouterr().out
    assert "mismatch" not in out and "missing" not in out
    names = {p.stem for p in CORPUS.glob("*.scn")}
    assert len(names) >= 10
    cli.main(["corpus", "--list"])
    assert set(capsys.readouterr().out.split()) == names


def test_golden_mismatch_detected(tmp_path, monkeypatch, capsys):
    shutil.copy(CORPUS / "std_r3.scn", tmp_path)
    (tmp_path / "std_r3.report").write_text("stale\n")
    monkeypatch.setenv(cli.CORPUS_ENV, str(tmp_path))
    assert cli.main(["corpus", "--run-all"]) == 1
    assert "golden mismatch" in capsys.readouterr().out
    assert cli.main(["corpus", "--run-all", "--update-golden"]) == 0
    assert cli.main(["corpus", "--run-all"]) == 0
