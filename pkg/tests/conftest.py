"""
Shared fixtures: the shipped problem files and programmatic roses
"""

from pathlib import Path

import pytest

from gogsep.problem import Problem, load_problem, problem_from_dict

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def fixture_path(name: str) -> str:
    return str(FIXTURES / f"{name}.json")


def load_fixture(name: str) -> Problem:
    return load_problem(fixture_path(name))


def rose_dict(rank: int, prime: int) -> dict:
    """One vertex, `rank` loops, every group trivial: the free group of that rank"""
    edges = []
    for i in range(1, rank + 1):
        edges.append({"id": f"y{i}", "bar": f"z{i}", "o": "u", "t": "u", "group": "T", "mono": [0]})
        edges.append({"id": f"z{i}", "bar": f"y{i}", "o": "u", "t": "u", "group": "T", "mono": [0]})
    return {
        "format_version": 1,
        "prime": prime,
        "groups": {"T": {"table": [[0]]}},
        "graph": {"vertices": ["u"], "edges": edges},
        "vertex_groups": {"u": "T"},
    }


def rose(rank: int, prime: int) -> Problem:
    return problem_from_dict(rose_dict(rank, prime))


@pytest.fixture
def repo_cwd(monkeypatch):
    """Settings resolve configs/settings.yaml against the working directory"""
    monkeypatch.chdir(ROOT)
    for name in ("MAX_COSETS", "MAX_QUOTIENT_ORDER", "SEARCH_BOUND", "SEARCH_MAX_EXPONENT",
                 "SEARCH_MAX_CANDIDATES", "MAGNUS_CAP", "TREE_BUDGET", "LOG_LEVEL"):
        monkeypatch.delenv(f"GOGSEP_{name}", raising=False)


@pytest.fixture
def fix_a() -> Problem:
    return load_fixture("fix_a")


@pytest.fixture
def fix_a3() -> Problem:
    return load_fixture("fix_a3")


@pytest.fixture
def fix_b() -> Problem:
    return load_fixture("fix_b")


@pytest.fixture
def fix_c() -> Problem:
    return load_fixture("fix_c")


@pytest.fixture
def fix_d() -> Problem:
    return load_fixture("fix_d")


@pytest.fixture
def fix_e() -> Problem:
    return load_fixture("fix_e")
