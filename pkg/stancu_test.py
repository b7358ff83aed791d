# stancu_test.py
import json

import pytest

import stancu
from services.errors import ConvergenceError
from services.reports import ConvergenceReport, ReportRow


def test_moments_to_json_file(tmp_path):
    out = tmp_path / "moments.json"
    code = stancu.main(["moments", "--n", "5", "--q", "0.5", "--x", "1,2", "--format", "json", "--out", str(out)])
    assert code == stancu.EXIT_OK
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["summary"]["rows"] == 12
    assert payload["config"]["q_values"] == [0.5]


def test_csv_to_stdout(capsys):
    assert stancu.main(["moments", "--n", "5", "--q", "0.9", "--x", "1"]) == stancu.EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("command,operator,n,q,x")
    assert len(lines) == 7


def test_config_errors():
    assert stancu.main(["moments", "--q", "1.5"]) == stancu.EXIT_CONFIG
    assert stancu.main(["moments", "--grid-points", "1"]) == stancu.EXIT_CONFIG
    assert stancu.main(["bounds", "--operator", "qsb", "--n", "5", "--q", "0.5"]) == stancu.EXIT_CONFIG


def test_numeric_error(monkeypatch):
    def boom(config):
        raise ConvergenceError("series did not converge", estimate=1.0)

    monkeypatch.setattr(stancu, "get_handlers", lambda: {"moments": boom})
    assert stancu.main(["moments", "--n", "5", "--q", "0.5"]) == stancu.EXIT_NUMERIC


def test_failed_rows(monkeypatch):
    def failing(config):
        report = ConvergenceReport("moments")
        report.add(ReportRow.checked(command="moments", operator="cai", function="t", norm="sup", error=1.0, bound=0.1))
        return report

    monkeypatch.setattr(stancu, "get_handlers", lambda: {"moments": failing})
    assert stancu.main(["moments", "--n", "5", "--q", "0.5"]) == stancu.EXIT_FAILED_ROWS


def test_archive_and_history(tmp_path, capsys):
    url = f"sqlite:///{tmp_path / 'runs.db'}"
    assert stancu.main(["moments", "--n", "5", "--q", "0.5", "--x", "1", "--db", url]) == stancu.EXIT_OK
    capsys.readouterr()
    assert stancu.main(["history", "--db", url]) == stancu.EXIT_OK
    out = capsys.readouterr().out
    assert "moments" in out
    assert "✅" in out


def test_history_without_archive():
    assert stancu.main(["history"]) == stancu.EXIT_CONFIG


@pytest.mark.parametrize("args", [
    ["moments", "--n", "5,10", "--q", "0.5,0.9", "--x", "0.5,1,2"],
    ["bounds", "--n", "5", "--q", "0.9", "--grid-max", "2", "--grid-points", "21"],
    ["statistical", "--sequence", "statonly", "--horizon", "10000"],
])
def test_same_config_gives_identical_csv(tmp_path, args):
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    assert stancu.main(args + ["--out", str(first)]) == stancu.main(args + ["--out", str(second)])
    assert first.read_bytes() == second.read_bytes()
    assert first.read_bytes()


def test_moment_tolerance_from_env_sets_exit_code(tmp_path, monkeypatch):
    args = ["moments", "--n", "5", "--q", "0.9", "--x", "0.5,1,2,5", "--format", "json"]
    out = tmp_path / "ok.json"
    assert stancu.main(args + ["--out", str(out)]) == stancu.EXIT_OK
    assert json.loads(out.read_text(encoding="utf-8"))["summary"]["passed"] is True

    monkeypatch.setenv("STANCU_MOMENT_TOL", "1e-30")
    out = tmp_path / "strict.json"
    assert stancu.main(args + ["--out", str(out)]) == stancu.EXIT_FAILED_ROWS
    summary = json.loads(out.read_text(encoding="utf-8"))["summary"]
    assert summary["passed"] is False
    assert summary["failed"] > 0
