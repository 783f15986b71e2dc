"""
Level homomorphism Phi: pi_1 -> F_p and the graph of groups of its kernel

The kernel H of a surjective Phi has index p. It acts on the Bass-Serre tree
with quotient a finite graph whose vertices over x are the classes
F_p / Phi(G_x) and whose vertex groups are G_x^(1). The cover is built
combinatorially from that description; every cover edge carries an embedding
word t_o^a * y * t_t^b into the base group, t_x being a fixed element of G_x
with Phi-value 1.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from gogsep.compat import LevelMaps, SeriesAssignment, check_compliance
from gogsep.errors import ConditionError, InvariantBreach, MalformedWordError, NotInKernelError
from gogsep.gog import (
    Edge,
    GraphOfGroups,
    GWord,
    Graph,
    PathReducer,
    SpanningData,
    StableLetter,
    VertexLetter,
    check_word,
    invert_word,
    path_to_word,
    relation_words,
    spanning_tree,
    validate_gog,
    word_to_path,
    words_equal,
)
from gogsep.pgroups import (
    ChiefSeries,
    FiniteGroup,
    GroupHom,
    chief_factor,
    factor_coordinate,
    fp_inv,
    make_subgroup,
    subgroup_as_group,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LevelHom:
    """Phi as tables: a value per vertex-group element and per edge traversal"""

    prime: int
    vertex_values: Dict[str, Tuple[int, ...]]
    edge_values: Dict[str, int]

    def vertex_value(self, x: str, g: int) -> int:
        return self.vertex_values[x][g]

    def edge_value(self, y: str) -> int:
        return self.edge_values[y]

    @property
    def is_surjective(self) -> bool:
        return any(any(values) for values in self.vertex_values.values()) or any(self.edge_values.values())

    @property
    def vanishes_on_vertex_groups(self) -> bool:
        return not any(any(values) for values in self.vertex_values.values())

    def to_dict(self) -> Dict:
        return {
            "vertices": {x: list(values) for x, values in sorted(self.vertex_values.items())},
            "stable_letters": {y: v for y, v in sorted(self.edge_values.items()) if v},
        }


def build_level_hom(gg: GraphOfGroups, sd: SpanningData, sa: SeriesAssignment, lm: LevelMaps,
                    force_surjective: bool = False) -> LevelHom:
    """
    Phi restricted to G_x is the projection onto the level-0 factor followed
    by phi^(0)_x. Stable letters map to 0, except that with `force_surjective`
    and Phi vanishing on every vertex group the first non-tree stable letter
    maps to 1.
    """
    report = check_compliance(gg, sd, sa, lm)
    if not report.ok:
        raise ConditionError("conditions I and II must hold before building the level homomorphism")
    p = gg.prime
    vertex_values = {}
    for x in gg.graph.vertices:
        series = sa.vertices[x]
        group = gg.vertex_group(x)
        if chief_factor(series, 0).is_trivial:
            vertex_values[x] = (0,) * group.order
            continue
        scalar = lm.vertex_scalar(x, 0)
        vertex_values[x] = tuple(scalar * factor_coordinate(series, 0, g, p) % p for g in range(group.order))
    edge_values = {y: 0 for y in gg.graph.edges}
    ph = LevelHom(p, vertex_values, edge_values)
    generators = sd.non_tree_generators()
    if force_surjective and ph.vanishes_on_vertex_groups and generators:
        y0 = generators[0]
        edge_values[y0] = 1
        edge_values[gg.graph.bar(y0)] = 1
        logger.debug("level homomorphism forced surjective through stable letter %s", y0)
    return ph


def eval_level_hom(ph: LevelHom, w: GWord) -> int:
    total = 0
    for letter in w.letters:
        if isinstance(letter, VertexLetter):
            values = ph.vertex_values.get(letter.vertex)
            if values is None or not 0 <= letter.element < len(values):
                raise MalformedWordError(f"letter ({letter.vertex}, {letter.element}) is not in a vertex group")
            total += values[letter.element]
        elif isinstance(letter, StableLetter):
            if letter.edge not in ph.edge_values or letter.exponent not in (1, -1):
                raise MalformedWordError(f"stable letter ({letter.edge}, {letter.exponent}) is malformed")
            total += letter.exponent * ph.edge_value(letter.edge)
        else:
            raise MalformedWordError("not a word letter")
    return total % ph.prime


def shift_series(sa: SeriesAssignment, lm: LevelMaps) -> Tuple[SeriesAssignment, LevelMaps]:
    """Drop level 0; only meaningful when every level-0 factor is trivial"""
    for s in sa.all_series():
        if s.term(1).order != s.term(0).order:
            raise ConditionError("cannot shift a series whose level-0 factor is nontrivial")
    shifted = SeriesAssignment(
        {x: s.shifted() for x, s in sa.vertices.items()},
        {y: s.shifted() for y, s in sa.edges.items()},
    )
    return shifted, lm.shifted()


@dataclass(frozen=True)
class CoverEdge:
    base_edge: str
    pre: int
    post: int


@dataclass
class KernelCover:
    base_gg: GraphOfGroups
    base_sd: SpanningData
    level_hom: LevelHom
    cover_gg: GraphOfGroups
    cover_sd: SpanningData
    shifted_series: SeriesAssignment
    level_maps: LevelMaps
    vertex_fibers: Dict[str, Tuple[str, int]]
    frames: Dict[str, int]
    edges: Dict[str, CoverEdge]
    transversals: Dict[str, Optional[int]]
    edge_units: Dict[str, Optional[int]]
    vertex_inclusions: Dict[str, GroupHom]
    vertex_restrictions: Dict[str, Dict[int, int]]

    @property
    def basepoint(self) -> str:
        return self.cover_sd.base

    def fiber(self, x: str) -> List[str]:
        return sorted(c for c, (v, _) in self.vertex_fibers.items() if v == x)


def _fiber_name(x: str, c: int) -> str:
    return f"{x}@{c}"


def _image_is_trivial(values) -> bool:
    return not any(values)


def _unit(group: FiniteGroup, value_of, p: int) -> Optional[int]:
    """The minimal element with nonzero value, raised to have value 1"""
    for g in range(group.order):
        v = value_of(g)
        if v:
            return group.power(g, fp_inv(v, p))
    return None


def _relabel_series(series: ChiefSeries, group: FiniteGroup, restriction: Dict[int, int]) -> ChiefSeries:
    terms = series.terms[1:] or (series.term(1),)
    return ChiefSeries(group, tuple(make_subgroup(group, (restriction[a] for a in t.elements)) for t in terms))


def build_kernel_cover(gg: GraphOfGroups, sd: SpanningData, sa: SeriesAssignment, lm: LevelMaps,
                       ph: LevelHom) -> KernelCover:
    if not ph.is_surjective:
        raise ConditionError("the level homomorphism is not surjective; there is no index-p kernel to cover")
    graph = gg.graph
    p = gg.prime

    vertex_trivial = {x: _image_is_trivial(ph.vertex_values[x]) for x in graph.vertices}
    edge_trivial = {
        y: _image_is_trivial(ph.vertex_value(graph.t(y), gg.mono(y)(h)) for h in range(gg.edge_group(y).order))
        for y in graph.edge_pairs()
    }
    transversals = {
        x: _unit(gg.vertex_group(x), lambda g, x=x: ph.vertex_value(x, g), p) for x in graph.vertices
    }
    edge_units = {
        y: _unit(gg.edge_group(y), lambda h, y=y: ph.vertex_value(graph.t(y), gg.mono(y)(h)), p)
        for y in graph.edge_pairs()
    }

    def vertex_class(x: str, c: int) -> int:
        return c % p if vertex_trivial[x] else 0

    def edge_class(y: str, d: int) -> int:
        return d % p if edge_trivial[graph.pair_key(y)] else 0

    # vertex groups G_x^(1) and edge groups G_y^(1), one table per base vertex / pair
    kernel_groups: Dict[str, FiniteGroup] = {}
    inclusions: Dict[str, GroupHom] = {}
    restrictions: Dict[str, Dict[int, int]] = {}
    for x in graph.vertices:
        group, inclusion = subgroup_as_group(sa.vertices[x].term(1), name=f"{gg.vertex_group(x).name or x}^(1)")
        kernel_groups[x], inclusions[x] = group, inclusion
        restrictions[x] = inclusion.inverse_on_image()
    edge_kernel: Dict[str, FiniteGroup] = {}
    edge_inclusions: Dict[str, GroupHom] = {}
    edge_restrictions: Dict[str, Dict[int, int]] = {}
    for y in graph.edge_pairs():
        group, inclusion = subgroup_as_group(sa.edge(gg, y).term(1), name=f"{gg.edge_group(y).name or y}^(1)")
        edge_kernel[y], edge_inclusions[y] = group, inclusion
        edge_restrictions[y] = inclusion.inverse_on_image()

    vertex_fibers: Dict[str, Tuple[str, int]] = {}
    frames: Dict[str, int] = {}
    for x in graph.vertices:
        for c in sorted({vertex_class(x, c) for c in range(p)}):
            name = _fiber_name(x, c)
            vertex_fibers[name] = (x, c)
            frames[name] = c

    edges: List[Edge] = []
    cover_edges: Dict[str, CoverEdge] = {}
    for y in graph.edge_pairs():
        ybar = graph.bar(y)
        nu = ph.edge_value(y)
        o, t = graph.o(y), graph.t(y)
        for d in sorted({edge_class(y, d) for d in range(p)}):
            r_o, r_t = vertex_class(o, d), vertex_class(t, d + nu)
            alpha = (d - r_o) % p
            beta = (r_t - d - nu) % p
            if (alpha and transversals[o] is None) or (beta and transversals[t] is None):
                raise InvariantBreach(f"cover edge over '{y}' needs a transversal at a vertex where Phi vanishes")
            forward = _fiber_name(y, d)
            backward = _fiber_name(ybar, edge_class(ybar, d + nu))
            edges.append(Edge(forward, _fiber_name(o, r_o), _fiber_name(t, r_t), backward))
            edges.append(Edge(backward, _fiber_name(t, r_t), _fiber_name(o, r_o), forward))
            cover_edges[forward] = CoverEdge(y, alpha, beta)
            cover_edges[backward] = CoverEdge(ybar, -beta, -alpha)

    cover_graph = Graph(vertex_fibers, edges)
    vertex_groups = {name: kernel_groups[x] for name, (x, _) in vertex_fibers.items()}
    edge_groups = {e.id: edge_kernel[graph.pair_key(cover_edges[e.id].base_edge)] for e in edges}
    monos = {}
    for e in edges:
        data = cover_edges[e.id]
        z = data.base_edge
        target_vertex = graph.t(z)
        target = gg.vertex_group(target_vertex)
        shift = target.power(transversals[target_vertex], data.post) if data.post else 0
        pair = graph.pair_key(z)
        f = gg.mono(z)
        images = []
        for h in edge_inclusions[pair].map:
            conjugated = target.op(target.op(target.inv(shift), f(h)), shift)
            if conjugated not in restrictions[target_vertex]:
                raise InvariantBreach(f"f_{z} does not carry G_y^(1) into G_t^(1)")
            images.append(restrictions[target_vertex][conjugated])
        monos[e.id] = GroupHom(edge_groups[e.id], vertex_groups[e.t], tuple(images))

    cover_gg = GraphOfGroups(cover_graph, vertex_groups, edge_groups, monos, p)
    report = validate_gog(cover_gg)
    if not report.ok:
        raise InvariantBreach(f"kernel cover is not a valid graph of groups: {report.violations[0].message}")
    cover_sd = spanning_tree(cover_graph, base=_fiber_name(sd.base, 0))

    shifted_vertices = {
        name: _relabel_series(sa.vertices[x], kernel_groups[x], restrictions[x])
        for name, (x, _) in vertex_fibers.items()
    }
    shifted_pairs = {}
    for key in cover_graph.edge_pairs():
        pair = graph.pair_key(cover_edges[key].base_edge)
        shifted_pairs[key] = _relabel_series(sa.edge(gg, pair), edge_kernel[pair], edge_restrictions[pair])
    shifted = SeriesAssignment(shifted_vertices, shifted_pairs)
    inherited = _inherit_level_maps(gg, sa, lm, shifted, vertex_fibers, cover_graph, cover_edges,
                                    inclusions, edge_inclusions)

    compliance = check_compliance(cover_gg, cover_sd, shifted, inherited)
    if not compliance.ok:
        raise InvariantBreach("shifted series on the kernel cover violate conditions I/II")

    kc = KernelCover(
        base_gg=gg, base_sd=sd, level_hom=ph, cover_gg=cover_gg, cover_sd=cover_sd,
        shifted_series=shifted, level_maps=inherited, vertex_fibers=vertex_fibers, frames=frames,
        edges=cover_edges, transversals=transversals, edge_units=edge_units,
        vertex_inclusions=inclusions, vertex_restrictions=restrictions,
    )
    missing = verify_index(kc)
    if missing:
        raise InvariantBreach(f"cover embedding and coset representative miss the base generator {missing[0]}")
    logger.info("kernel cover: %d vertices, %d edge pairs", len(cover_graph.vertices), len(cover_graph.edge_pairs()))
    return kc


def _inherit_level_maps(gg, sa, lm, shifted, vertex_fibers, cover_graph, cover_edges,
                        inclusions, edge_inclusions) -> LevelMaps:
    """phi'^(k) = phi^(k+1) read through the inclusion, against the cover's own factor generators"""
    p = gg.prime
    graph = gg.graph
    inherited = LevelMaps()
    for k in range(shifted.length_bound):
        for name, (x, _) in vertex_fibers.items():
            factor = chief_factor(shifted.vertices[name], k)
            if factor.is_trivial:
                continue
            coordinate = factor_coordinate(sa.vertices[x], k + 1, inclusions[x](factor.generator_coset), p)
            inherited.set_vertex(name, k, coordinate * lm.vertex_scalar(x, k + 1) % p)
        for key in cover_graph.edge_pairs():
            factor = chief_factor(shifted.edges[key], k)
            if factor.is_trivial:
                continue
            pair = graph.pair_key(cover_edges[key].base_edge)
            coordinate = factor_coordinate(sa.edge(gg, pair), k + 1, edge_inclusions[pair](factor.generator_coset), p)
            inherited.set_edge(key, k, coordinate * lm.edge_scalar(pair, k + 1) % p)
    return inherited


def cover_rank(kc: KernelCover) -> int:
    """Rank of pi_1 of the cover when all of its vertex groups are trivial"""
    if not kc.cover_gg.is_free():
        raise ConditionError("cover has nontrivial vertex groups; its fundamental group is not free")
    graph = kc.cover_gg.graph
    return len(graph.edge_pairs()) - len(graph.vertices) + 1


def embed_word(kc: KernelCover, w: GWord) -> GWord:
    """Image in the base group of a word over the cover presentation"""
    gg, sd = kc.base_gg, kc.base_sd
    cover_path = word_to_path(kc.cover_gg, kc.cover_sd, w)
    start_x, _ = kc.vertex_fibers[cover_path.start]
    reducer = PathReducer(gg, sd, start_x)
    reducer.multiply(kc.vertex_inclusions[start_x](cover_path.head))
    for e, k in cover_path.steps:
        data = kc.edges[e]
        z = data.base_edge
        o, t = gg.graph.o(z), gg.graph.t(z)
        if data.pre:
            reducer.multiply(gg.vertex_group(o).power(kc.transversals[o], data.pre))
        reducer.traverse(z)
        if data.post:
            reducer.multiply(gg.vertex_group(t).power(kc.transversals[t], data.post))
        reducer.multiply(kc.vertex_inclusions[t](k))
    return path_to_word(gg, sd, reducer.result(), sd.base)


def generator_images(kc: KernelCover) -> Dict[str, GWord]:
    """Embedding of every cover generator: vertex letters and non-tree stable letters"""
    images = {}
    cover_gg, base = kc.cover_gg, kc.basepoint
    for name in cover_gg.graph.vertices:
        group = cover_gg.vertex_group(name)
        for k in range(1, group.order):
            images[f"{name}:{group.label(k)}"] = embed_word(kc, GWord(base, (VertexLetter(name, k),)))
    for y in kc.cover_sd.non_tree_generators():
        images[y] = embed_word(kc, GWord(base, (StableLetter(y, 1),)))
    return images


def verify_embedding(kc: KernelCover) -> List[GWord]:
    """Cover relations whose embedding is not trivial in the base group (empty when sound)"""
    failures = []
    base = kc.base_gg, kc.base_sd
    for relation in relation_words(kc.cover_gg, kc.cover_sd):
        image = embed_word(kc, relation)
        if not words_equal(*base, image, GWord(image.basepoint)):
            failures.append(relation)
    return failures


def coset_representative(kc: KernelCover) -> GWord:
    """A base word with Phi-value 1: a transversal element, else the forced stable letter"""
    gg, sd, ph = kc.base_gg, kc.base_sd, kc.level_hom
    for x in gg.graph.vertices:
        if kc.transversals[x] is not None:
            return GWord(sd.base, (VertexLetter(x, kc.transversals[x]),))
    for y in sd.non_tree_generators():
        value = ph.edge_value(y)
        if value:
            return GWord(sd.base, (StableLetter(y, 1),) * fp_inv(value, gg.prime))
    raise InvariantBreach("the level homomorphism takes no nonzero value")


def verify_index(kc: KernelCover) -> List[str]:
    """
    Base generators that the cover embedding and the coset representative T
    fail to produce (empty when sound). Each generator s is checked by
    rewriting s * T^-Phi(s) into the cover and embedding it back.
    """
    gg, sd, ph = kc.base_gg, kc.base_sd, kc.level_hom
    inverse = invert_word(gg, coset_representative(kc))
    generators = []
    for x in gg.graph.vertices:
        group = gg.vertex_group(x)
        generators += [(f"{x}:{group.label(g)}", VertexLetter(x, g)) for g in range(1, group.order)]
    generators += [(y, StableLetter(y, 1)) for y in sd.non_tree_generators()]
    missing = []
    for name, letter in generators:
        s = GWord(sd.base, (letter,))
        w = s + GWord(sd.base, inverse.letters * eval_level_hom(ph, s))
        if not words_equal(gg, sd, embed_word(kc, rewrite_into_kernel(kc, w)), w):
            missing.append(name)
    return missing


def rewrite_into_kernel(kc: KernelCover, w: GWord) -> GWord:
    """
    Schreier-style rewriting of a word with Phi-value 0 into the cover
    presentation. The scan keeps the current cover vertex C and a carry
    lambda in G_x such that the prefix read so far equals
    embed(cover prefix) * lambda, with Phi(prefix) = frame(C) + Phi(lambda).
    """
    gg, sd, ph = kc.base_gg, kc.base_sd, kc.level_hom
    graph = gg.graph
    p = gg.prime
    check_word(gg, w)
    if w.basepoint != sd.base:
        raise MalformedWordError(f"word must be based at '{sd.base}' to be rewritten")
    if eval_level_hom(ph, w) != 0:
        raise NotInKernelError("word does not lie in the kernel of the level homomorphism")

    path = word_to_path(gg, sd, w)
    here = _fiber_name(path.start, 0)
    x = path.start
    carry = path.head
    reducer = PathReducer(kc.cover_gg, kc.cover_sd, here)
    for z, c in path.steps:
        group = gg.vertex_group(x)
        coordinate = (kc.frames[here] + ph.vertex_value(x, carry)) % p
        edge = next(
            (e for e in kc.cover_gg.graph.out_edges(here)
             if kc.edges[e].base_edge == z and _fits(kc, e, coordinate)),
            None,
        )
        if edge is None:
            raise InvariantBreach(f"no cover edge over '{z}' leaves {here} at coordinate {coordinate}")
        data = kc.edges[edge]
        pair = graph.pair_key(z)
        exponent = (ph.vertex_value(x, carry) - data.pre) % p
        unit = kc.edge_units[pair]
        if exponent and unit is None:
            raise InvariantBreach(f"edge '{z}' has no unit but the carry needs one")
        h = gg.edge_group(z).power(unit, exponent) if exponent else 0
        pre = group.power(kc.transversals[x], -data.pre) if data.pre else 0
        kernel_part = group.op(group.op(carry, group.inv(gg.mono(graph.bar(z))(h))), pre)
        reducer.multiply(_restrict(kc, x, kernel_part))
        reducer.traverse(edge)
        t = graph.t(z)
        target = gg.vertex_group(t)
        post = target.power(kc.transversals[t], -data.post) if data.post else 0
        carry = target.op(target.op(post, gg.mono(z)(h)), c)
        here = kc.cover_gg.graph.t(edge)
        x = t
    reducer.multiply(_restrict(kc, x, carry))
    if reducer.here != kc.basepoint:
        raise InvariantBreach(f"rewriting ended at {reducer.here}, not at the cover basepoint")
    rewritten = path_to_word(kc.cover_gg, kc.cover_sd, reducer.result(), kc.basepoint)
    logger.debug("rewrote word of length %d into cover word of length %d", len(w), len(rewritten))
    return rewritten


def _fits(kc: KernelCover, e: str, coordinate: int) -> bool:
    """Whether the cover edge e carries the given fiber coordinate"""
    data = kc.edges[e]
    start = kc.frames[kc.cover_gg.graph.o(e)]
    p = kc.base_gg.prime
    pair = kc.base_gg.graph.pair_key(data.base_edge)
    if kc.edge_units[pair] is not None:
        return True
    return (start + data.pre) % p == coordinate % p


def _restrict(kc: KernelCover, x: str, g: int) -> int:
    try:
        return kc.vertex_restrictions[x][g]
    except KeyError:
        raise InvariantBreach(f"element {g} of G_{x} left the kernel during rewriting")
