import json

import pytest

from conftest import fixture_path, rose_dict
from gogsep.errors import ConditionError, ProblemFileError, ValidationError
from gogsep.problem import dump_problem, load_problem, problem_from_dict
from gogsep.settings import Settings, load_settings


def test_missing_and_broken_files(tmp_path):
    with pytest.raises(ProblemFileError):
        load_problem(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ProblemFileError):
        load_problem(broken)


def test_structural_errors():
    data = rose_dict(1, 2)
    with pytest.raises(ProblemFileError):
        problem_from_dict({**data, "format_version": 7})
    with pytest.raises(ProblemFileError):
        problem_from_dict({k: v for k, v in data.items() if k != "prime"})
    with pytest.raises(ProblemFileError):
        problem_from_dict({**data, "vertex_groups": {"u": "Q"}})
    with pytest.raises(ProblemFileError):
        problem_from_dict({**data, "groups": {"T": {"shape": "round"}}})


def test_invalid_groups_raise_validation_errors():
    data = rose_dict(1, 2)
    data["groups"]["T"] = {"cyclic": 3}
    data["graph"]["edges"] = []
    with pytest.raises(ValidationError) as info:
        problem_from_dict(data)
    assert info.value.exit_code == 2
    assert not problem_from_dict(data, validate=False).validate().ok


def test_named_groups_and_label_monos():
    data = {
        "prime": 2,
        "groups": {"D": {"dihedral": 4}, "K": {"cyclic": 2, "symbol": "c"}},
        "graph": {"vertices": ["u"], "edges": []},
        "vertex_groups": {"u": "D"},
    }
    problem = problem_from_dict(data)
    assert problem.gg.vertex_group("u").order == 8
    with open(fixture_path("fix_a")) as f:
        data = json.load(f)
    data["graph"]["edges"][0]["mono"] = {"1": "1", "c": "b^2"}
    assert problem_from_dict(data).gg.mono("y").map == (0, 2)


def test_edge_series_are_derived_when_omitted(fix_a3):
    assert fix_a3.series.edges["y"].length == 2


def test_compliant_data_on_free_and_failing_problems(fix_c, fix_b):
    sa, lm = fix_c.compliant_data()
    assert sa.length_bound == 0
    with pytest.raises(ConditionError):
        fix_b.compliant_data()


def test_problem_without_series_needs_one(fix_a):
    fix_a.series = None
    with pytest.raises(ConditionError):
        fix_a.compliant_data()


def test_dump_round_trip(fix_a, tmp_path):
    data = dump_problem(fix_a)
    path = tmp_path / "again.json"
    path.write_text(json.dumps(data))
    again = load_problem(path)
    assert again.series.as_lists() == fix_a.series.as_lists()
    assert again.words == fix_a.words
    assert again.sd.base == fix_a.sd.base
    assert again.gg.mono("ybar").map == fix_a.gg.mono("ybar").map


def test_words_by_name_or_inline(fix_e):
    assert fix_e.word("abab") == fix_e.word("a b a b")


def test_settings_layering(tmp_path, monkeypatch, repo_cwd):
    assert load_settings() == Settings()
    custom = tmp_path / "settings.yaml"
    custom.write_text("max_cosets: 16\nlog_level: INFO\n")
    settings = load_settings(custom)
    assert settings.max_cosets == 16
    assert settings.log_level == "INFO"
    monkeypatch.setenv("GOGSEP_MAX_COSETS", "32")
    assert load_settings(custom).max_cosets == 32
    assert load_settings(custom).override(max_cosets=8, magnus_cap=None).max_cosets == 8


def test_settings_errors(tmp_path, repo_cwd, monkeypatch):
    with pytest.raises(ProblemFileError):
        load_settings(tmp_path / "absent.yaml")
    unknown = tmp_path / "unknown.yaml"
    unknown.write_text("max_coset: 16\n")
    with pytest.raises(ProblemFileError):
        load_settings(unknown)
    monkeypatch.setenv("GOGSEP_TREE_BUDGET", "lots")
    with pytest.raises(ProblemFileError):
        load_settings()
