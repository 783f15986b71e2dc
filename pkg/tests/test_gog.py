import functools
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load_fixture, rose
from oracles import amalgam_normal_form, hnn_normal_form
from gogsep.errors import BudgetExceeded, DisconnectedGraphError, MalformedWordError
from gogsep.gog import (
    Edge,
    Graph,
    GWord,
    StableLetter,
    VertexLetter,
    ball_to_dot,
    expected_degree,
    format_word,
    free_word,
    graph_to_dot,
    invert_word,
    parse_word,
    reduce_word,
    relation_words,
    spanning_tree,
    tree_ball,
    validate_gog,
    word_from_tokens,
    word_to_tokens,
    words_equal,
)
from gogsep.problem import problem_from_dict


@functools.lru_cache(maxsize=None)
def cached(name):
    return load_fixture(name)


def amalgam_letters():
    return [VertexLetter("u", k) for k in range(1, 4)] + [VertexLetter("v", k) for k in range(1, 4)]


def hnn_letters():
    return [VertexLetter("u", 1), VertexLetter("u", 2), StableLetter("y", 1), StableLetter("y", -1)]


def words_over(letters, basepoint, max_len):
    for n in range(max_len + 1):
        for combo in itertools.product(letters, repeat=n):
            yield GWord(basepoint, combo)


def word_strategy(letters, basepoint, max_size):
    return st.lists(st.sampled_from(letters), max_size=max_size).map(lambda ls: GWord(basepoint, tuple(ls)))


def test_fixtures_validate(fix_a, fix_b, fix_c, fix_d, fix_e):
    for problem in (fix_a, fix_b, fix_c, fix_d, fix_e):
        assert validate_gog(problem.gg).ok


def test_non_injective_mono_is_invalid():
    data = {
        "prime": 2,
        "groups": {"A": {"cyclic": 4}, "B": {"cyclic": 4}, "E": {"cyclic": 2}},
        "graph": {"vertices": ["u", "v"], "edges": [
            {"id": "y", "bar": "ybar", "o": "u", "t": "v", "group": "E", "mono": [0, 0]},
            {"id": "ybar", "bar": "y", "o": "v", "t": "u", "group": "E", "mono": [0, 2]},
        ]},
        "vertex_groups": {"u": "A", "v": "B"},
    }
    problem = problem_from_dict(data, validate=False)
    report = validate_gog(problem.gg)
    assert "not_injective" in {v.code for v in report.violations}


def test_bar_must_be_an_involution():
    g = Graph(["u", "v"], [Edge("y", "u", "v", "z"), Edge("z", "v", "u", "w"), Edge("w", "v", "u", "y")])
    codes = {v.code for v in g.validate().violations}
    assert "bar_involution" in codes


def test_disconnected_graph_has_no_spanning_tree():
    g = Graph(["u", "v"], [])
    assert "disconnected" in {v.code for v in g.validate().violations}
    with pytest.raises(DisconnectedGraphError):
        spanning_tree(g)


def test_spanning_tree_of_a_segment_and_a_loop(fix_a, fix_b):
    sd = fix_a.sd
    assert sd.base == "u"
    assert sd.tree_edges == {"y", "ybar"}
    assert sd.non_tree_generators() == []
    assert sd.epsilon == {"y": 0, "ybar": 1}
    assert fix_b.sd.tree_edges == frozenset()
    assert fix_b.sd.non_tree_generators() == ["y"]


def test_theta_graph_spanning_tree():
    edges = []
    for y in ("p", "q", "r"):
        edges += [Edge(y, "u", "v", y.upper()), Edge(y.upper(), "v", "u", y)]
    sd = spanning_tree(Graph(["u", "v"], edges))
    assert len(sd.tree_edges) == 2
    assert len(sd.non_tree_generators()) == 2
    assert sd.tree_path("u", "v")[0] in sd.tree_edges


def test_fix_e_square_reduces_to_identity(fix_e):
    assert reduce_word(fix_e.gg, fix_e.sd, fix_e.word("aa")).is_empty


def test_fix_e_abab_is_reduced(fix_e):
    w = fix_e.word("abab")
    reduced = reduce_word(fix_e.gg, fix_e.sd, w)
    assert reduced == w


def test_fix_a_amalgamated_squares_cancel(fix_a):
    gg, sd = fix_a.gg, fix_a.sd
    assert reduce_word(gg, sd, fix_a.word("a2b2")).is_empty
    assert words_equal(gg, sd, parse_word(gg, "a^2"), parse_word(gg, "b^2"))
    assert not reduce_word(gg, sd, fix_a.word("commutator")).is_empty


def test_fix_e_ab_differs_from_ba(fix_e):
    gg, sd = fix_e.gg, fix_e.sd
    assert not words_equal(gg, sd, parse_word(gg, "a b"), parse_word(gg, "b a"))


def test_fix_b_conjugation_relation(fix_b):
    gg, sd = fix_b.gg, fix_b.sd
    assert words_equal(gg, sd, fix_b.word("conjugate"), parse_word(gg, "a^2"))
    assert not reduce_word(gg, sd, fix_b.word("t")).is_empty


@pytest.mark.parametrize("name", ["fix_a", "fix_b", "fix_c", "fix_e"])
def test_relations_reduce_to_identity(name, request):
    problem = request.getfixturevalue(name)
    for relation in relation_words(problem.gg, problem.sd):
        assert reduce_word(problem.gg, problem.sd, relation).is_empty


@pytest.mark.parametrize("name, letters, normal_form", [
    ("fix_a", amalgam_letters(), amalgam_normal_form),
    ("fix_b", hnn_letters(), hnn_normal_form),
])
def test_words_equal_matches_normal_forms_exhaustively(name, letters, normal_form):
    problem = cached(name)
    gg, sd = problem.gg, problem.sd
    words = list(words_over(letters, "u", 3))
    forms = [normal_form(w) for w in words]
    for (u, fu), (v, fv) in itertools.product(zip(words, forms), repeat=2):
        assert words_equal(gg, sd, u, v) == (fu == fv), (u, v)


@given(word_strategy(amalgam_letters(), "u", 8), word_strategy(amalgam_letters(), "u", 8))
@settings(max_examples=300, deadline=None)
def test_words_equal_matches_amalgam_normal_form_on_longer_words(u, v):
    problem = cached("fix_a")
    assert words_equal(problem.gg, problem.sd, u, v) == (amalgam_normal_form(u) == amalgam_normal_form(v))


@given(word_strategy(hnn_letters(), "u", 8), word_strategy(hnn_letters(), "u", 8))
@settings(max_examples=300, deadline=None)
def test_words_equal_matches_hnn_normal_form_on_longer_words(u, v):
    problem = cached("fix_b")
    assert words_equal(problem.gg, problem.sd, u, v) == (hnn_normal_form(u) == hnn_normal_form(v))


@pytest.mark.parametrize("name, letters", [
    ("fix_a", amalgam_letters()),
    ("fix_b", hnn_letters()),
    ("fix_e", [VertexLetter("u", 1), VertexLetter("v", 1)]),
])
def test_reduction_is_idempotent_and_preserves_the_element(name, letters):
    problem = cached(name)
    gg, sd = problem.gg, problem.sd

    @given(word_strategy(letters, sd.base, 12))
    @settings(max_examples=1000, deadline=None)
    def check(w):
        reduced = reduce_word(gg, sd, w)
        assert reduce_word(gg, sd, reduced) == reduced
        assert words_equal(gg, sd, w, reduced)
        assert len(reduced) <= len(w)

    check()


def test_inverse_cancels(fix_b):
    gg, sd = fix_b.gg, fix_b.sd
    w = parse_word(gg, "y a y y a^2")
    assert reduce_word(gg, sd, w + invert_word(gg, w)).is_empty


def test_tree_stable_letters_are_ignored(fix_a):
    gg, sd = fix_a.gg, fix_a.sd
    w = GWord("u", (StableLetter("y", 1), VertexLetter("u", 1), StableLetter("ybar", -1)))
    assert reduce_word(gg, sd, w) == GWord("u", (VertexLetter("u", 1),))


def test_malformed_words(fix_a):
    gg, sd = fix_a.gg, fix_a.sd
    with pytest.raises(MalformedWordError):
        parse_word(gg, "c")
    with pytest.raises(MalformedWordError):
        parse_word(gg, "w:1")
    with pytest.raises(MalformedWordError):
        reduce_word(gg, sd, GWord("u", (VertexLetter("u", 9),)))
    with pytest.raises(MalformedWordError):
        reduce_word(gg, sd, GWord("u", (StableLetter("y", 2),)))


def test_parse_and_format(fix_a, fix_b):
    w = parse_word(fix_a.gg, "a u:a^3 v:b b^2")
    assert w.letters == (VertexLetter("u", 1), VertexLetter("u", 3), VertexLetter("v", 1), VertexLetter("v", 2))
    assert format_word(fix_a.gg, w) == "u:a u:a^3 v:b v:b^2"
    assert format_word(fix_a.gg, GWord("u")) == "1"
    t = parse_word(fix_b.gg, "y a y^-1")
    assert t.letters == (StableLetter("y", 1), VertexLetter("u", 1), StableLetter("y", -1))
    assert word_from_tokens(word_to_tokens(t), "u") == t


def test_free_word_on_a_rose():
    problem = rose(2, 2)
    gg, sd = problem.gg, problem.sd
    w = parse_word(gg, "y1 y2^-1 y2 y1 z2")
    letters, generators = free_word(gg, sd, w)
    assert generators == ["y1", "y2"]
    assert letters == [1, 1, 2]


def test_tree_ball_of_a_single_vertex(fix_d):
    ball = tree_ball(fix_d.gg, fix_d.sd, 3)
    assert len(ball.nodes) == 1
    assert ball.edges == []


def test_tree_ball_degrees(fix_e, fix_c, fix_a):
    ball = tree_ball(fix_e.gg, fix_e.sd, 1)
    assert ball.degree(0) == 2
    ball = tree_ball(fix_c.gg, fix_c.sd, 1)
    assert ball.degree(0) == 2
    ball = tree_ball(fix_e.gg, fix_e.sd, 2)
    assert len(ball.nodes) == 5
    for problem in (fix_e, fix_a):
        ball = tree_ball(problem.gg, problem.sd, 3)
        for node in ball.nodes:
            if node.depth < 3:
                assert ball.degree(node.id) == expected_degree(problem.gg, node.vertex)


def test_tree_ball_vertices_are_distinct_cosets(fix_a):
    gg, sd = fix_a.gg, fix_a.sd
    ball = tree_ball(gg, sd, 3)
    for a, b in itertools.combinations(ball.nodes, 2):
        if a.vertex != b.vertex:
            continue
        # g G_x = h G_x iff g^-1 h lies in G_x, i.e. reduces to at most one vertex letter
        quotient = reduce_word(gg, sd, invert_word(gg, a.label) + b.label)
        assert not (len(quotient) <= 1 and all(isinstance(x, VertexLetter) and x.vertex == a.vertex
                                               for x in quotient.letters))


def test_tree_ball_budget(fix_e):
    with pytest.raises(BudgetExceeded):
        tree_ball(fix_e.gg, fix_e.sd, 4, budget=3)


def test_dot_export(fix_e):
    dot = graph_to_dot(fix_e.gg.graph, vertex_labels={"u": "u |G|=2"})
    assert dot.startswith('graph "X" {')
    assert '"u" -- "v" [label="y"];' in dot
    assert 'label="u |G|=2"' in dot
    ball = tree_ball(fix_e.gg, fix_e.sd, 1)
    assert ball_to_dot(fix_e.gg, ball).count(" -- ") == 2
