import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import load_fixture, rose
from oracles import nielsen_schreier_rank
from gogsep.compat import SeriesAssignment, check_compliance
from gogsep.cover import (
    build_kernel_cover,
    build_level_hom,
    coset_representative,
    cover_rank,
    embed_word,
    eval_level_hom,
    generator_images,
    rewrite_into_kernel,
    shift_series,
    verify_embedding,
    verify_index,
)
from gogsep.errors import ConditionError, NotInKernelError
from gogsep.gog import GWord, StableLetter, VertexLetter, parse_word, words_equal
from gogsep.pgroups import GroupHom
from gogsep.problem import Problem, dump_problem, problem_from_dict


def kernel_cover(problem, force_surjective=False):
    sa, lm = problem.compliant_data()
    ph = build_level_hom(problem.gg, problem.sd, sa, lm, force_surjective=force_surjective)
    return ph, build_kernel_cover(problem.gg, problem.sd, sa, lm, ph)


def test_level_hom_on_fix_e(fix_e):
    sa, lm = fix_e.compliant_data()
    ph = build_level_hom(fix_e.gg, fix_e.sd, sa, lm)
    assert eval_level_hom(ph, fix_e.word("a")) == 1
    assert eval_level_hom(ph, parse_word(fix_e.gg, "b")) == 1
    assert eval_level_hom(ph, fix_e.word("abab")) == 0
    assert eval_level_hom(ph, parse_word(fix_e.gg, "a b a")) == 1


def test_level_hom_on_fix_a(fix_a):
    sa, lm = fix_a.compliant_data()
    ph = build_level_hom(fix_a.gg, fix_a.sd, sa, lm)
    assert eval_level_hom(ph, parse_word(fix_a.gg, "a")) == 1
    assert eval_level_hom(ph, parse_word(fix_a.gg, "b")) == 1
    assert eval_level_hom(ph, fix_a.word("square")) == 0


def test_level_hom_vanishes_on_free_groups(fix_c):
    sa, lm = fix_c.compliant_data()
    ph = build_level_hom(fix_c.gg, fix_c.sd, sa, lm)
    assert not ph.is_surjective
    assert eval_level_hom(ph, fix_c.word("t")) == 0
    forced = build_level_hom(fix_c.gg, fix_c.sd, sa, lm, force_surjective=True)
    assert forced.is_surjective
    assert eval_level_hom(forced, fix_c.word("t")) == 1
    # s_ybar is s_y in the presentation, so both spellings agree
    assert eval_level_hom(forced, GWord("u", (StableLetter("ybar", 1),))) == 1


def test_level_hom_requires_the_conditions(fix_b):
    with pytest.raises(ConditionError):
        build_level_hom(fix_b.gg, fix_b.sd, fix_b.series, None)


def test_fix_e_cover_is_a_circle(fix_e):
    _, kc = kernel_cover(fix_e)
    graph = kc.cover_gg.graph
    assert graph.vertices == ("u@0", "v@0")
    assert len(graph.edge_pairs()) == 2
    assert kc.cover_gg.is_free()
    assert cover_rank(kc) == 1
    assert kc.basepoint == "u@0"
    assert verify_embedding(kc) == []


def test_fix_a_cover_is_a_circle_of_c2(fix_a):
    _, kc = kernel_cover(fix_a)
    graph = kc.cover_gg.graph
    assert len(graph.vertices) == 2
    assert len(graph.edge_pairs()) == 2
    assert all(kc.cover_gg.vertex_group(x).order == 2 for x in graph.vertices)
    assert all(kc.cover_gg.edge_group(y).order == 2 for y in graph.edges)
    assert check_compliance(kc.cover_gg, kc.cover_sd, kc.shifted_series, kc.level_maps).ok
    assert verify_embedding(kc) == []
    with pytest.raises(ConditionError):
        cover_rank(kc)


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_rose_cover_rank_matches_nielsen_schreier(p, r):
    _, kc = kernel_cover(rose(r, p), force_surjective=True)
    assert len(kc.cover_gg.graph.vertices) == p
    assert cover_rank(kc) == nielsen_schreier_rank(r, p)
    assert verify_embedding(kc) == []


def test_rewriting_abab_gives_a_square(fix_e):
    ph, kc = kernel_cover(fix_e)
    w = fix_e.word("abab")
    rewritten = rewrite_into_kernel(kc, w)
    assert len(rewritten) == 2
    assert all(isinstance(letter, StableLetter) for letter in rewritten.letters)
    assert rewritten.letters[0] == rewritten.letters[1]
    assert words_equal(fix_e.gg, fix_e.sd, embed_word(kc, rewritten), w)


def test_rewriting_a_square_on_fix_a(fix_a):
    _, kc = kernel_cover(fix_a)
    rewritten = rewrite_into_kernel(kc, fix_a.word("square"))
    assert rewritten.letters == (VertexLetter("u@0", 1),)
    assert kc.vertex_inclusions["u"](1) == 2


def test_rewriting_outside_the_kernel_fails(fix_e):
    _, kc = kernel_cover(fix_e)
    with pytest.raises(NotInKernelError):
        rewrite_into_kernel(kc, fix_e.word("a"))


def test_generator_images_embed_into_the_base(fix_a):
    _, kc = kernel_cover(fix_a)
    images = generator_images(kc)
    assert "u@0:" + kc.cover_gg.vertex_group("u@0").label(1) in images
    assert len(kc.cover_sd.non_tree_generators()) == 1
    for y in kc.cover_sd.non_tree_generators():
        assert y in images


@given(st.lists(st.sampled_from(["a", "b", "a^2", "b^3", "a^3"]), min_size=1, max_size=6))
@settings(max_examples=80, deadline=None)
def test_rewriting_round_trips_through_the_embedding(tokens):
    problem = load_fixture("fix_a")
    ph, kc = kernel_cover(problem)
    w = parse_word(problem.gg, " ".join(tokens))
    if eval_level_hom(ph, w):
        w = w + parse_word(problem.gg, "a")
    rewritten = rewrite_into_kernel(kc, w)
    assert words_equal(problem.gg, problem.sd, embed_word(kc, rewritten), w)


def test_shift_series_drops_a_trivial_level(fix_a):
    sa, lm = fix_a.compliant_data()
    with pytest.raises(ConditionError):
        shift_series(sa, lm)
    gg = fix_a.gg
    padded = SeriesAssignment(
        {x: s.padded(3) for x, s in sa.vertices.items()},
        {y: s.padded(3) for y, s in sa.edges.items()},
    )
    report = check_compliance(gg, fix_a.sd, padded)
    assert report.ok
    ph = build_level_hom(gg, fix_a.sd, padded, report.level_maps)
    assert not ph.is_surjective
    shifted, shifted_maps = shift_series(padded, report.level_maps)
    assert shifted.as_lists() == sa.as_lists()
    assert check_compliance(gg, fix_a.sd, shifted, shifted_maps).ok


def test_cover_problem_round_trips(fix_e):
    _, kc = kernel_cover(fix_e)
    cover = Problem(fix_e.prime, kc.cover_gg, kc.cover_sd, kc.shifted_series, kc.level_maps)
    reloaded = problem_from_dict(dump_problem(cover))
    assert reloaded.sd.base == "u@0"
    assert reloaded.gg.graph.vertices == kc.cover_gg.graph.vertices
    assert reloaded.validate().ok


@pytest.mark.parametrize("name", ["fix_a", "fix_a3", "fix_d", "fix_e"])
def test_fibers_and_kernel_orders_follow_phi(name):
    problem = load_fixture(name)
    gg, p = problem.gg, problem.prime
    ph, kc = kernel_cover(problem)
    for x in gg.graph.vertices:
        image = len(set(ph.vertex_values[x]))
        fiber = kc.fiber(x)
        assert len(fiber) == p // image
        for c in fiber:
            assert kc.cover_gg.vertex_group(c).order == gg.vertex_group(x).order // image
    for y in gg.graph.edges:
        image = len({ph.vertex_value(gg.graph.t(y), gg.mono(y)(h)) for h in range(gg.edge_group(y).order)})
        over = [e for e, data in kc.edges.items() if data.base_edge == y]
        assert len(over) == p // image


@pytest.mark.parametrize("name", ["fix_a", "fix_a3", "fix_d", "fix_e"])
def test_cover_series_are_one_level_shorter(name):
    problem = load_fixture(name)
    sa, _ = problem.compliant_data()
    _, kc = kernel_cover(problem)
    assert kc.shifted_series.length_bound == sa.length_bound - 1


@pytest.mark.parametrize("r", [1, 2])
def test_rose_cover_fibers(r):
    _, kc = kernel_cover(rose(r, 3), force_surjective=True)
    assert len(kc.fiber("u")) == 3
    assert coset_representative(kc) == GWord("u", (StableLetter("y1", 1),))


def test_cover_generates_the_base_group(fix_a, fix_e):
    for problem in (fix_a, fix_e):
        _, kc = kernel_cover(problem)
        assert verify_index(kc) == []
    _, kc = kernel_cover(fix_a)
    assert coset_representative(kc) == GWord("u", (VertexLetter("u", 1),))
    inclusion = kc.vertex_inclusions["u"]
    kc.vertex_inclusions["u"] = GroupHom(inclusion.source, inclusion.target, (0,) * inclusion.source.order)
    assert "u:a^2" in verify_index(kc)
