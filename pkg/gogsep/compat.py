"""
Compatibility conditions between chief series and edge monomorphisms

Condition I asks that every f_y carries the series of G_y onto the trace of
the series of G_t(y) on its image. Condition II asks for injections of the
order-p chief factors into F_p commuting with the induced edge maps; with a
fixed factor generator an injection is a nonzero scalar, so condition II is a
system of equations c_y * s_t(y) = s_{y} over F_p, solved level by level on a
maximal forest of the support graph and checked by holonomy on the remaining
edges.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx

from gogsep.errors import BudgetExceeded, ConditionError, InvariantBreach, ValidationReport
from gogsep.gog import GraphOfGroups, SpanningData
from gogsep.pgroups import (
    ChiefSeries,
    chief_factor,
    enumerate_chief_series,
    factor_coordinate,
    fp_inv,
    make_subgroup,
    verify_chief_series,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeriesAssignment:
    """Chief series per vertex and per edge pair (keyed by the smaller edge id)"""

    vertices: Dict[str, ChiefSeries]
    edges: Dict[str, ChiefSeries]

    def edge(self, gg: GraphOfGroups, y: str) -> ChiefSeries:
        return self.edges[gg.graph.pair_key(y)]

    def all_series(self) -> List[ChiefSeries]:
        return list(self.vertices.values()) + list(self.edges.values())

    @property
    def length_bound(self) -> int:
        return max((s.length for s in self.all_series()), default=0)

    def as_lists(self) -> Dict[str, Dict[str, List[List[int]]]]:
        return {
            "vertices": {x: s.as_lists() for x, s in sorted(self.vertices.items())},
            "edges": {y: s.as_lists() for y, s in sorted(self.edges.items())},
        }


@dataclass
class LevelMaps:
    """
    Scalars phi^(k) on factor generators, keyed by vertex / edge pair and then
    level. A missing entry is an absent map (trivial factor).
    """

    vertices: Dict[str, Dict[int, int]] = field(default_factory=dict)
    edges: Dict[str, Dict[int, int]] = field(default_factory=dict)

    def vertex_scalar(self, x: str, k: int) -> Optional[int]:
        return self.vertices.get(x, {}).get(k)

    def edge_scalar(self, pair: str, k: int) -> Optional[int]:
        return self.edges.get(pair, {}).get(k)

    def set_vertex(self, x: str, k: int, value: int) -> None:
        self.vertices.setdefault(x, {})[k] = value

    def set_edge(self, pair: str, k: int, value: int) -> None:
        self.edges.setdefault(pair, {})[k] = value

    def shifted(self) -> "LevelMaps":
        """Maps of levels k+1 re-indexed to k"""
        def shift(table):
            return {key: {k - 1: v for k, v in levels.items() if k > 0} for key, levels in table.items()}
        return LevelMaps(shift(self.vertices), shift(self.edges))

    def to_dict(self) -> Dict[str, Dict[str, Dict[str, int]]]:
        def dump(table):
            return {key: {str(k): v for k, v in sorted(levels.items())} for key, levels in sorted(table.items()) if levels}
        return {"vertices": dump(self.vertices), "edges": dump(self.edges)}

    @classmethod
    def from_dict(cls, data: Dict) -> "LevelMaps":
        def load(table):
            return {str(key): {int(k): int(v) for k, v in levels.items()} for key, levels in (table or {}).items()}
        return cls(load(data.get("vertices")), load(data.get("edges")))


@dataclass(frozen=True)
class ConditionIFailure:
    edge: str
    level: int
    image: Tuple[int, ...]
    intersection: Tuple[int, ...]

    def to_dict(self) -> Dict:
        return {"edge": self.edge, "level": self.level, "image": list(self.image),
                "intersection": list(self.intersection)}


@dataclass(frozen=True)
class HolonomyWitness:
    level: int
    cycle: Tuple[str, ...]
    holonomy: int

    def to_dict(self) -> Dict:
        return {"level": self.level, "cycle": list(self.cycle), "holonomy": self.holonomy}


@dataclass(frozen=True)
class EdgeMapViolation:
    edge: str
    level: int
    message: str

    def to_dict(self) -> Dict:
        return {"edge": self.edge, "level": self.level, "message": self.message}


@dataclass
class ComplianceReport:
    condition_I_failures: List[ConditionIFailure] = field(default_factory=list)
    condition_II_failure: Optional[HolonomyWitness] = None
    condition_II_violations: List[EdgeMapViolation] = field(default_factory=list)
    level_maps: Optional[LevelMaps] = None

    @property
    def condition_I(self) -> bool:
        return not self.condition_I_failures

    @property
    def condition_II(self) -> bool:
        return self.condition_I and self.condition_II_failure is None and not self.condition_II_violations

    @property
    def ok(self) -> bool:
        return self.condition_I and self.condition_II

    def to_dict(self) -> Dict:
        return {
            "condition_I": self.condition_I,
            "condition_II": self.condition_II,
            "condition_I_failures": [f.to_dict() for f in self.condition_I_failures],
            "condition_II_failure": self.condition_II_failure.to_dict() if self.condition_II_failure else None,
            "condition_II_violations": [v.to_dict() for v in self.condition_II_violations],
            "level_maps": self.level_maps.to_dict() if self.level_maps else None,
        }


def validate_assignment(gg: GraphOfGroups, sa: SeriesAssignment) -> ValidationReport:
    report = ValidationReport("series assignment")
    graph = gg.graph
    for x in graph.vertices:
        s = sa.vertices.get(x)
        if s is None:
            report.add("missing_series", f"vertex '{x}' has no series", vertex=x)
        elif s.group is not gg.vertex_group(x):
            report.add("wrong_group", f"series at '{x}' belongs to another group", vertex=x)
        else:
            for v in verify_chief_series(s, gg.prime).violations:
                report.add(v.code, f"series at '{x}': {v.message}", vertex=x, **v.witness)
    for pair in graph.edge_pairs():
        s = sa.edges.get(pair)
        if s is None:
            report.add("missing_series", f"edge pair '{pair}' has no series", edge=pair)
        elif s.group is not gg.edge_group(pair):
            report.add("wrong_group", f"series on '{pair}' belongs to another group", edge=pair)
        else:
            for v in verify_chief_series(s, gg.prime).violations:
                report.add(v.code, f"series on '{pair}': {v.message}", edge=pair, **v.witness)
    report.facts["length_bound"] = sa.length_bound if report.ok else None
    return report


def _condition_I_at(gg: GraphOfGroups, sa: SeriesAssignment, y: str, k: int) -> Optional[ConditionIFailure]:
    f = gg.mono(y)
    image = f.image(sa.edge(gg, y).term(k))
    target = sa.vertices[gg.graph.t(y)].term(k)
    intersection = tuple(sorted(set(f.map) & target.as_set))
    if image.elements != intersection:
        return ConditionIFailure(y, k, image.elements, intersection)
    return None


def check_condition_I(gg: GraphOfGroups, sa: SeriesAssignment) -> List[ConditionIFailure]:
    failures = []
    for y in gg.graph.edges:
        for k in range(sa.length_bound + 1):
            failure = _condition_I_at(gg, sa, y, k)
            if failure is not None:
                failures.append(failure)
    return failures


def induced_edge_factor_map(gg: GraphOfGroups, sa: SeriesAssignment, y: str, k: int) -> Optional[int]:
    """
    Scalar c with f_y(generator of the edge factor) = c * generator of the
    factor at t(y); None when the edge factor is trivial.
    """
    for level in (k, k + 1):
        if _condition_I_at(gg, sa, y, level) is not None:
            raise ConditionError(f"condition I fails on edge '{y}' at level {level}")
    edge_series = sa.edge(gg, y)
    factor = chief_factor(edge_series, k)
    if factor.is_trivial:
        return None
    target = sa.vertices[gg.graph.t(y)]
    c = factor_coordinate(target, k, gg.mono(y)(factor.generator_coset), gg.prime)
    if c == 0:
        raise InvariantBreach(f"induced map on edge '{y}' at level {k} is not injective")
    return c


@dataclass
class ConditionIISolution:
    level_maps: Optional[LevelMaps]
    failure: Optional[HolonomyWitness] = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def support_graph(gg: GraphOfGroups, sa: SeriesAssignment, k: int) -> nx.MultiGraph:
    """Y_k: vertices with a nontrivial level-k factor, edge pairs with a nontrivial edge factor"""
    graph = gg.graph
    yk = nx.MultiGraph()
    yk.add_nodes_from(x for x in graph.vertices if not chief_factor(sa.vertices[x], k).is_trivial)
    for pair in graph.edge_pairs():
        if not chief_factor(sa.edges[pair], k).is_trivial:
            yk.add_edge(graph.o(pair), graph.t(pair), key=pair)
    return yk


def solve_condition_II(gg: GraphOfGroups, sd: SpanningData, sa: SeriesAssignment) -> ConditionIISolution:
    graph = gg.graph
    p = gg.prime
    maps = LevelMaps()
    for k in range(sa.length_bound):
        scalars = {y: induced_edge_factor_map(gg, sa, y, k) for y in graph.edges}
        yk = support_graph(gg, sa, k)
        forest = nx.Graph()
        forest_keys = set()
        for component in sorted(nx.connected_components(yk), key=min):
            root = min(component)
            maps.set_vertex(root, k, 1)
            forest.add_node(root)
            for u, v, key in nx.edge_bfs(yk, root):
                if maps.vertex_scalar(v, k) is not None:
                    continue
                z = key if graph.o(key) == u else graph.bar(key)
                s_pair = scalars[graph.bar(z)] * maps.vertex_scalar(u, k) % p
                maps.set_vertex(v, k, s_pair * fp_inv(scalars[z], p) % p)
                maps.set_edge(key, k, s_pair)
                forest.add_edge(u, v, edge=z)
                forest_keys.add(key)
        for _, _, key in sorted(yk.edges(keys=True), key=lambda e: e[2]):
            if key in forest_keys:
                continue
            s_o, s_t = maps.vertex_scalar(graph.o(key), k), maps.vertex_scalar(graph.t(key), k)
            c_y, c_bar = scalars[key], scalars[graph.bar(key)]
            holonomy = c_bar * s_o * fp_inv(c_y * s_t % p, p) % p
            if holonomy != 1:
                cycle = (key,) + _forest_path(graph, forest, graph.t(key), graph.o(key))
                logger.info("condition II fails at level %d: holonomy %d around %s", k, holonomy, cycle)
                return ConditionIISolution(None, HolonomyWitness(k, cycle, holonomy))
            maps.set_edge(key, k, c_bar * s_o % p)
    return ConditionIISolution(maps)


def _forest_path(graph, forest: nx.Graph, u: str, v: str) -> Tuple[str, ...]:
    nodes = nx.shortest_path(forest, u, v)
    path = []
    for a, b in zip(nodes, nodes[1:]):
        z = forest.edges[a, b]["edge"]
        path.append(z if graph.o(z) == a else graph.bar(z))
    return tuple(path)


def condition_II_violations(gg: GraphOfGroups, sa: SeriesAssignment, lm: LevelMaps) -> List[EdgeMapViolation]:
    graph = gg.graph
    p = gg.prime
    violations = []
    for k in range(sa.length_bound):
        for x in graph.vertices:
            present = not chief_factor(sa.vertices[x], k).is_trivial
            value = lm.vertex_scalar(x, k)
            if present != (value is not None) or (value is not None and value % p == 0):
                violations.append(EdgeMapViolation(x, k, f"map at vertex '{x}' must be present exactly on order-p factors and nonzero"))
        for y in graph.edges:
            c = induced_edge_factor_map(gg, sa, y, k)
            pair = graph.pair_key(y)
            edge_value = lm.edge_scalar(pair, k)
            if c is None:
                if edge_value is not None:
                    violations.append(EdgeMapViolation(y, k, "map given on a trivial edge factor"))
                continue
            target = lm.vertex_scalar(graph.t(y), k)
            if edge_value is None or target is None:
                violations.append(EdgeMapViolation(y, k, "missing map on a nontrivial factor"))
            elif c * target % p != edge_value % p:
                violations.append(EdgeMapViolation(y, k, f"phi_t o f_y = {c * target % p} but phi_y = {edge_value % p}"))
    return violations


def check_condition_II(gg: GraphOfGroups, sd: SpanningData, sa: SeriesAssignment, lm: LevelMaps) -> bool:
    return not condition_II_violations(gg, sa, lm)


def check_compliance(gg: GraphOfGroups, sd: SpanningData, sa: SeriesAssignment,
                     lm: Optional[LevelMaps] = None) -> ComplianceReport:
    """Condition I, then condition II against the given maps or by solving for them"""
    report = ComplianceReport(condition_I_failures=check_condition_I(gg, sa))
    if not report.condition_I:
        return report
    if lm is not None:
        report.condition_II_violations = condition_II_violations(gg, sa, lm)
        report.level_maps = lm
        return report
    solution = solve_condition_II(gg, sd, sa)
    report.condition_II_failure = solution.failure
    report.level_maps = solution.level_maps
    return report


def derive_edge_series(gg: GraphOfGroups, vertices: Dict[str, ChiefSeries],
                       pairs: Optional[List[str]] = None) -> Dict[str, ChiefSeries]:
    """
    The only edge series compatible with condition I: preimages of the
    vertex series under f_y, which must agree from both ends of the pair.
    """
    graph = gg.graph
    edges = {}
    for pair in pairs if pairs is not None else graph.edge_pairs():
        series = _pulled_back(gg, vertices, pair)
        if series is None or series != _pulled_back(gg, vertices, graph.bar(pair)):
            raise ConditionError(f"vertex series disagree along edge pair '{pair}'")
        edges[pair] = series
    return edges


def _pulled_back(gg: GraphOfGroups, vertices: Dict[str, ChiefSeries], y: str) -> Optional[ChiefSeries]:
    target = vertices.get(gg.graph.t(y))
    if target is None:
        return None
    f = gg.mono(y)
    group = gg.edge_group(y)
    terms = tuple(make_subgroup(group, f.preimage(term).elements) for term in target.terms)
    return ChiefSeries(group, terms)


@dataclass
class SearchResult:
    found: bool
    searched_bound: int
    candidates: int
    assignment: Optional[SeriesAssignment] = None
    level_maps: Optional[LevelMaps] = None

    def to_dict(self) -> Dict:
        return {
            "found": self.found,
            "searched_bound": self.searched_bound,
            "candidates": self.candidates,
            "series": self.assignment.as_lists() if self.assignment else None,
            "level_maps": self.level_maps.to_dict() if self.level_maps else None,
        }


def _series_order_key(s: ChiefSeries) -> Tuple[int, ...]:
    return tuple(-term.order for term in s.terms)


def search_series_assignment(gg: GraphOfGroups, sd: SpanningData, bound: int = 4, max_exponent: int = 4,
                             max_candidates: int = 200000) -> SearchResult:
    """
    Exhaustive search over vertex series padded to a common number of steps L,
    for L from the largest group exponent up to `bound`. Edge series follow
    from condition I; level maps are solved for each full candidate. The first
    candidate in enumeration order that passes both conditions wins.
    """
    graph = gg.graph
    p = gg.prime
    exponents = {}
    for x in graph.vertices:
        order = gg.vertex_group(x).order
        if order > p ** max_exponent:
            raise BudgetExceeded(f"group at '{x}' has order {order} > {p}^{max_exponent}")
        exponents[x] = _log_p(order, p)
    m_max = max(exponents.values(), default=0)
    top = max(m_max, bound)
    candidates = 0

    for steps in range(m_max, top + 1):
        options = {
            x: sorted(enumerate_chief_series(gg.vertex_group(x), p, steps), key=_series_order_key)
            for x in graph.vertices
        }
        logger.debug("search at %d steps: %s", steps, {x: len(v) for x, v in options.items()})
        for vertices in _compatible_choices(gg, options):
            candidates += 1
            if candidates > max_candidates:
                raise BudgetExceeded(f"series search exceeded {max_candidates} candidates")
            sa = SeriesAssignment(vertices, derive_edge_series(gg, vertices))
            solution = solve_condition_II(gg, sd, sa)
            if solution.ok:
                logger.info("series assignment found at %d steps after %d candidates", steps, candidates)
                return SearchResult(True, steps, candidates, sa, solution.level_maps)
    logger.info("series search exhausted up to %d steps (%d candidates)", top, candidates)
    return SearchResult(False, top, candidates)


def _log_p(order: int, p: int) -> int:
    m = 0
    while order > 1:
        order //= p
        m += 1
    return m


def _compatible_choices(gg: GraphOfGroups, options: Dict[str, List[ChiefSeries]]) -> Iterator[Dict[str, ChiefSeries]]:
    """Backtracking over vertices; an edge pair is checked once both ends are chosen"""
    graph = gg.graph
    order = list(graph.vertices)
    position = {x: i for i, x in enumerate(order)}
    closing: Dict[str, List[str]] = {x: [] for x in order}
    for pair in graph.edge_pairs():
        last = max(graph.o(pair), graph.t(pair), key=position.__getitem__)
        closing[last].append(pair)

    chosen: Dict[str, ChiefSeries] = {}

    def extend(i: int) -> Iterator[Dict[str, ChiefSeries]]:
        if i == len(order):
            yield dict(chosen)
            return
        x = order[i]
        for series in options[x]:
            chosen[x] = series
            if all(_pair_agrees(gg, chosen, pair) for pair in closing[x]):
                yield from extend(i + 1)
        chosen.pop(x, None)

    yield from extend(0)


def _pair_agrees(gg: GraphOfGroups, vertices: Dict[str, ChiefSeries], pair: str) -> bool:
    return _pulled_back(gg, vertices, pair) == _pulled_back(gg, vertices, gg.graph.bar(pair))
