import json

import pytest

from cli_main import COMMANDS, EXIT_CODES, main
from conftest import fixture_path
from gogsep.problem import load_problem
from run_job import run_job

pytestmark = pytest.mark.usefixtures("repo_cwd")


def report_of(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main([*argv, "--output", str(out)])
    return code, json.loads(out.read_text()) if out.exists() else None


def test_help_exits_cleanly():
    assert main([]) == 0
    assert main(["--help"]) == 0


def test_validate(tmp_path):
    code, report = report_of(tmp_path, "validate", "--input", fixture_path("fix_a"))
    assert code == 0
    assert report["verdict"] == "valid"
    assert report["validation"]["facts"]["edge_pairs"] == 1


def test_validate_rejects_a_broken_group(tmp_path):
    path = tmp_path / "bad.json"
    data = json.loads(open(fixture_path("fix_d")).read())
    data["prime"] = 2
    path.write_text(json.dumps(data))
    code, report = report_of(tmp_path, "validate", "--input", str(path))
    assert code == 2
    assert report["verdict"] == "invalid"


def test_unreadable_input_exits_with_2(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("{}")
    assert main(["check", "--input", str(path)]) == 2
    assert main(["check", "--input", str(tmp_path / "absent.json")]) == 2


def test_check_reports_a_failing_holonomy(tmp_path):
    code, report = report_of(tmp_path, "check", "--input", fixture_path("fix_b"))
    assert code == 0
    assert report["verdict"] == "fail"
    assert report["compliance"]["condition_II_failure"]["holonomy"] == 2


def test_separate_with_quotient(tmp_path):
    code, report = report_of(tmp_path, "separate", "--input", fixture_path("fix_e"), "--word", "abab", "--quotient")
    assert code == 0
    assert report["format_version"] == 1
    assert report["command"] == "separate"
    assert report["verdict"] == "separated"
    assert report["depth"] == 2
    assert report["verification"]["valid"] is True
    assert report["quotient"]["order"] == 8
    assert "elapsed_seconds" in report


def test_separate_inline_word_on_the_amalgam(tmp_path):
    code, report = report_of(tmp_path, "separate", "--input", fixture_path("fix_a"), "--word", "u:a v:b")
    assert code == 0
    assert report["word"] == "u:a v:b"


def test_trivial_word_exits_with_2():
    assert main(["separate", "--input", fixture_path("fix_e"), "--word", "aa"]) == 2
    assert main(["separate", "--input", fixture_path("fix_e"), "--word", "u:zz"]) == 2


def test_search_budget_from_the_environment(monkeypatch):
    monkeypatch.setenv("GOGSEP_SEARCH_MAX_CANDIDATES", "2")
    assert main(["search", "--input", fixture_path("fix_b"), "--search-bound", "4"]) == 3


def test_search_saves_a_problem(tmp_path):
    saved = tmp_path / "with_series.json"
    code, report = report_of(tmp_path, "search", "--input", fixture_path("fix_d"), "--save", str(saved))
    assert code == 0
    assert report["verdict"] == "found"
    assert load_problem(saved).series is not None


def test_cover_writes_problem_and_dot(tmp_path):
    saved, dot = tmp_path / "cover.json", tmp_path / "cover.dot"
    code, report = report_of(tmp_path, "cover", "--input", fixture_path("fix_e"), "--save", str(saved), "--dot", str(dot))
    assert code == 0
    assert report["free_rank"] == 1
    assert load_problem(saved).validate().ok
    assert dot.read_text().startswith('graph "cover" {')


def test_tree(tmp_path):
    code, report = report_of(tmp_path, "tree", "--input", fixture_path("fix_e"), "--radius", "2")
    assert code == 0
    assert len(report["nodes"]) == 5
    assert report["degrees_match"] is True


def test_freesep(tmp_path):
    code, report = report_of(tmp_path, "freesep", "--prime", "2", "--rank", "1", "--word", "x1 x1")
    assert code == 0
    assert report["witness"]["degree"] == 2
    assert report["witness"]["monomial"] == [1, 1]


def test_fixtures_job_has_no_failures(tmp_path):
    out = tmp_path / "golden.json"
    summary = run_job("configs/fixtures_job.yaml", output=str(out))
    assert summary["failed"] == 0
    verdicts = [step["report"]["verdict"] for step in summary["steps"]]
    assert verdicts[:3] == ["valid", "pass", "separated"]
    assert "exhausted" in verdicts
    assert json.loads(out.read_text())["command"] == "run"


def test_run_command_exits_1_on_failures(tmp_path):
    job = tmp_path / "job.yaml"
    job.write_text(
        f"input: {fixture_path('fix_e')}\n"
        "steps:\n"
        "  - command: separate\n"
        "    word: aa\n"
        "  - command: check\n"
    )
    with pytest.raises(SystemExit) as info:
        main(["run", str(job)])
    assert info.value.code == 1
    summary = run_job(str(job))
    assert [step["exit_code"] for step in summary["steps"]] == [2, 0]


def test_tree_carries_conjugated_series(tmp_path):
    code, report = report_of(tmp_path, "tree", "--input", fixture_path("fix_a"), "--radius", "1")
    assert code == 0
    root = next(n for n in report["nodes"] if n["depth"] == 0)
    assert [t["order"] for t in root["series"]] == [4, 2, 1]
    assert [t["generators"] for t in root["series"]] == [["u:a"], ["u:a^2"], []]
    for node in report["nodes"]:
        assert [t["order"] for t in node["series"]] == node["series_orders"]
        assert all(t["generators"] for t in node["series"][:-1])


def test_help_lists_every_exit_code(capsys):
    assert main([]) == 0
    out = capsys.readouterr().out
    for meaning in EXIT_CODES.values():
        assert meaning in out
    assert 1 in EXIT_CODES


def test_unexpected_errors_exit_with_4(monkeypatch):
    def explode(args):
        raise RuntimeError("boom")

    monkeypatch.setattr(COMMANDS["check"], "execute", explode)
    assert main(["check", "--input", fixture_path("fix_a")]) == 4
