"""
Serre graphs, graphs of groups, spanning data and words of the fundamental group

Words are written in the presentation of pi_1(X, G) relative to a spanning tree:
vertex letters (v, g) and stable letters s_y for the non-tree edges. Internally a
word is unfolded into a path word g0 e1 g1 ... en gn along X (Serre's path
description), where reduction is a left-to-right stack scan removing pinches
e c ebar with c in f_e(G_e).
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from gogsep.errors import (
    BudgetExceeded,
    DisconnectedGraphError,
    MalformedWordError,
    ValidationReport,
)
from gogsep.pgroups import FiniteGroup, GroupHom, validate_group

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Edge:
    id: str
    o: str
    t: str
    bar: str


class Graph:
    """A graph in Serre's sense: every edge y has an opposite bar(y)"""

    def __init__(self, vertices: Iterable[str], edges: Iterable[Edge]):
        self.vertices: Tuple[str, ...] = tuple(sorted(set(vertices)))
        self.edges: Dict[str, Edge] = {e.id: e for e in sorted(edges, key=lambda e: e.id)}
        self._out: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for e in self.edges.values():
            self._out.setdefault(e.o, []).append(e.id)

    def o(self, y: str) -> str:
        return self.edges[y].o

    def t(self, y: str) -> str:
        return self.edges[y].t

    def bar(self, y: str) -> str:
        return self.edges[y].bar

    def out_edges(self, v: str) -> List[str]:
        return self._out.get(v, [])

    def pair_key(self, y: str) -> str:
        return min(y, self.bar(y))

    def edge_pairs(self) -> List[str]:
        return sorted({self.pair_key(y) for y in self.edges})

    @property
    def base(self) -> str:
        return self.vertices[0]

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for key in self.edge_pairs():
            g.add_edge(self.o(key), self.t(key), key=key)
        return g

    def validate(self) -> ValidationReport:
        report = ValidationReport("graph")
        if not self.vertices:
            report.add("empty", "graph has no vertices")
            return report
        for y, e in self.edges.items():
            if e.o not in self._out or e.t not in self._out:
                report.add("endpoint", f"edge '{y}' has an unknown endpoint", edge=y)
                continue
            if e.bar == y:
                report.add("bar_fixed", f"edge '{y}' is its own opposite", edge=y)
                continue
            if e.bar not in self.edges:
                report.add("bar_missing", f"opposite '{e.bar}' of edge '{y}' does not exist", edge=y)
                continue
            opposite = self.edges[e.bar]
            if opposite.bar != y:
                report.add("bar_involution", f"bar(bar('{y}')) != '{y}'", edge=y)
            if opposite.o != e.t or opposite.t != e.o:
                report.add("bar_endpoints", f"o(bar('{y}')) != t('{y}')", edge=y)
        if report.ok and not nx.is_connected(self.to_networkx()):
            report.add("disconnected", "graph is not connected")
        report.facts.update({"vertices": len(self.vertices), "edge_pairs": len(self.edge_pairs())})
        return report


class GraphOfGroups:
    """
    Vertex groups, edge groups (shared by y and bar(y)) and monomorphisms
    f_y: G_y -> G_t(y). Images of the f_y are kept as bitsets for the reduction
    inner loop.
    """

    def __init__(self, graph: Graph, vertex_groups: Dict[str, FiniteGroup], edge_groups: Dict[str, FiniteGroup],
                 monos: Dict[str, GroupHom], prime: int):
        self.graph = graph
        self.vertex_groups = dict(vertex_groups)
        self.edge_groups = dict(edge_groups)
        self.monos = dict(monos)
        self.prime = prime
        self._image_mask: Dict[str, int] = {}
        self._preimage: Dict[str, Dict[int, int]] = {}
        for y, f in self.monos.items():
            mask = 0
            for b in f.map:
                mask |= 1 << b
            self._image_mask[y] = mask
            self._preimage[y] = f.inverse_on_image()

    def vertex_group(self, v: str) -> FiniteGroup:
        return self.vertex_groups[v]

    def edge_group(self, y: str) -> FiniteGroup:
        return self.edge_groups[y]

    def mono(self, y: str) -> GroupHom:
        return self.monos[y]

    def in_image(self, y: str, c: int) -> bool:
        return bool((self._image_mask[y] >> c) & 1)

    def transfer(self, y: str, c: int) -> int:
        """f_bar(y)(f_y^-1(c)): moves an element of f_y(G_y) to the o(y) side"""
        return self.monos[self.graph.bar(y)](self._preimage[y][c])

    def is_free(self) -> bool:
        return all(g.order == 1 for g in self.vertex_groups.values())


def validate_gog(gg: GraphOfGroups) -> ValidationReport:
    report = ValidationReport("graph of groups")
    graph = gg.graph
    report.extend(graph.validate())
    if not report.ok:
        return report
    seen = set()
    for v in graph.vertices:
        g = gg.vertex_groups.get(v)
        if g is None:
            report.add("vertex_group", f"vertex '{v}' has no group", vertex=v)
            continue
        if id(g) not in seen:
            seen.add(id(g))
            sub = validate_group(g, gg.prime)
            for violation in sub.violations:
                report.add(violation.code, f"group at '{v}': {violation.message}", vertex=v, **violation.witness)
            if sub.ok and not sub.facts.get("is_p_group"):
                report.add("not_p_group", f"group at '{v}' has order {g.order}, not a power of {gg.prime}", vertex=v)
    for y in graph.edges:
        g = gg.edge_groups.get(y)
        if g is None:
            report.add("edge_group", f"edge '{y}' has no group", edge=y)
            continue
        if gg.edge_groups.get(graph.bar(y)) is not g:
            report.add("edge_pair_group", f"edges '{y}' and '{graph.bar(y)}' carry different groups", edge=y)
        if id(g) not in seen:
            seen.add(id(g))
            sub = validate_group(g, gg.prime)
            for violation in sub.violations:
                report.add(violation.code, f"group on '{y}': {violation.message}", edge=y, **violation.witness)
            if sub.ok and not sub.facts.get("is_p_group"):
                report.add("not_p_group", f"group on '{y}' has order {g.order}, not a power of {gg.prime}", edge=y)
        f = gg.monos.get(y)
        if f is None:
            report.add("mono_missing", f"edge '{y}' has no monomorphism", edge=y)
            continue
        if f.source is not g or f.target is not gg.vertex_groups.get(graph.t(y)):
            report.add("mono_target", f"f_{y} does not map G_{y} into G_{graph.t(y)}", edge=y)
            continue
        sub = f.validate()
        for violation in sub.violations:
            report.add(violation.code, f"f_{y}: {violation.message}", edge=y, **violation.witness)
        if sub.ok and not sub.facts["injective"]:
            report.add("not_injective", f"f_{y} is not injective", edge=y, collision=sub.facts["collision"])
    return report


@dataclass(frozen=True)
class SpanningData:
    base: str
    tree_edges: FrozenSet[str]
    plus_edges: FrozenSet[str]
    epsilon: Dict[str, int]
    up_edge: Dict[str, str] = field(default_factory=dict)

    def is_tree_edge(self, y: str) -> bool:
        return y in self.tree_edges

    def _to_base(self, v: str) -> List[str]:
        path = []
        while v in self.up_edge:
            y = self.up_edge[v]
            path.append(y)
            v = self._targets[y]
        return path

    def tree_path(self, u: str, v: str) -> List[str]:
        """Oriented tree edges of the geodesic from u to v"""
        up_u, up_v = self._to_base(u), self._to_base(v)
        while up_u and up_v and up_u[-1] == up_v[-1]:
            up_u.pop()
            up_v.pop()
        return up_u + [self._bars[y] for y in reversed(up_v)]

    def non_tree_generators(self) -> List[str]:
        return sorted(y for y in self.plus_edges if y not in self.tree_edges)


def spanning_tree(g: Graph, base: Optional[str] = None) -> SpanningData:
    """BFS tree from `base` (default the smallest vertex); E+X picks the smaller id of each pair"""
    nxg = g.to_networkx()
    if not nx.is_connected(nxg):
        raise DisconnectedGraphError("graph is not connected; no spanning tree")
    base = base if base is not None else g.base
    if base not in g.vertices:
        raise DisconnectedGraphError(f"base vertex '{base}' is not in the graph")
    visited = {base}
    tree: set = set()
    up_edge: Dict[str, str] = {}
    for u, v, key in nx.edge_bfs(nxg, base):
        if v in visited:
            continue
        visited.add(v)
        y = key if g.o(key) == u else g.bar(key)
        tree.update((y, g.bar(y)))
        up_edge[v] = g.bar(y)
    plus = frozenset(g.pair_key(y) for y in g.edges)
    sd = SpanningData(
        base=base,
        tree_edges=frozenset(tree),
        plus_edges=plus,
        epsilon={y: 0 if y in plus else 1 for y in g.edges},
        up_edge=up_edge,
    )
    object.__setattr__(sd, "_targets", {y: g.t(y) for y in g.edges})
    object.__setattr__(sd, "_bars", {y: g.bar(y) for y in g.edges})
    return sd


# Words

@dataclass(frozen=True)
class VertexLetter:
    vertex: str
    element: int


@dataclass(frozen=True)
class StableLetter:
    edge: str
    exponent: int


Letter = Union[VertexLetter, StableLetter]


@dataclass(frozen=True)
class GWord:
    basepoint: str
    letters: Tuple[Letter, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def is_empty(self) -> bool:
        return not self.letters

    def __add__(self, other: "GWord") -> "GWord":
        return GWord(self.basepoint, self.letters + other.letters)


def invert_word(gg: GraphOfGroups, w: GWord) -> GWord:
    letters = []
    for letter in reversed(w.letters):
        if isinstance(letter, VertexLetter):
            letters.append(VertexLetter(letter.vertex, gg.vertex_group(letter.vertex).inv(letter.element)))
        else:
            letters.append(StableLetter(letter.edge, -letter.exponent))
    return GWord(w.basepoint, tuple(letters))


def check_word(gg: GraphOfGroups, w: GWord) -> None:
    graph = gg.graph
    if w.basepoint not in gg.vertex_groups:
        raise MalformedWordError(f"basepoint '{w.basepoint}' is not a vertex")
    for i, letter in enumerate(w.letters):
        if isinstance(letter, VertexLetter):
            group = gg.vertex_groups.get(letter.vertex)
            if group is None:
                raise MalformedWordError(f"letter {i}: unknown vertex '{letter.vertex}'")
            if not 0 <= letter.element < group.order:
                raise MalformedWordError(f"letter {i}: element {letter.element} not in G_{letter.vertex}")
        elif isinstance(letter, StableLetter):
            if letter.edge not in graph.edges:
                raise MalformedWordError(f"letter {i}: unknown edge '{letter.edge}'")
            if letter.exponent not in (1, -1):
                raise MalformedWordError(f"letter {i}: stable letter exponent must be +1 or -1")
        else:
            raise MalformedWordError(f"letter {i}: not a word letter")


@dataclass(frozen=True)
class PathWord:
    """g0 e1 g1 ... en gn: head element at `start`, then (edge, element at t(edge))"""

    start: str
    head: int
    steps: Tuple[Tuple[str, int], ...]

    @property
    def end(self) -> str:
        return self.steps[-1][0] if self.steps else self.start

    def vertices(self, graph: Graph) -> List[str]:
        return [self.start] + [graph.t(e) for e, _ in self.steps]


class PathReducer:
    """
    Builds a path word letter by letter and removes pinches as soon as they
    appear, leftmost first. The state is always a reduced path word.
    """

    def __init__(self, gg: GraphOfGroups, sd: SpanningData, start: str):
        self.gg = gg
        self.sd = sd
        self.start = start
        self.head = 0
        self.stack: List[List] = []

    @property
    def here(self) -> str:
        return self.gg.graph.t(self.stack[-1][0]) if self.stack else self.start

    def multiply(self, g: int) -> None:
        group = self.gg.vertex_group(self.here)
        if self.stack:
            self.stack[-1][1] = group.op(self.stack[-1][1], g)
        else:
            self.head = group.op(self.head, g)

    def traverse(self, e: str) -> None:
        graph = self.gg.graph
        if self.stack:
            last, c = self.stack[-1]
            if e == graph.bar(last) and self.gg.in_image(last, c):
                self.stack.pop()
                self.multiply(self.gg.transfer(last, c))
                return
        self.stack.append([e, 0])

    def move_to(self, v: str) -> None:
        for e in self.sd.tree_path(self.here, v):
            self.traverse(e)

    def feed_letter(self, letter: Letter) -> None:
        graph = self.gg.graph
        if isinstance(letter, VertexLetter):
            self.move_to(letter.vertex)
            self.multiply(letter.element)
            return
        y = letter.edge if letter.edge in self.sd.plus_edges else graph.bar(letter.edge)
        if self.sd.is_tree_edge(y):
            return
        e = y if letter.exponent == 1 else graph.bar(y)
        self.move_to(graph.o(e))
        self.traverse(e)

    def result(self) -> PathWord:
        return PathWord(self.start, self.head, tuple((e, c) for e, c in self.stack))


def word_to_path(gg: GraphOfGroups, sd: SpanningData, w: GWord) -> PathWord:
    """Reduced closed path word at the basepoint representing w"""
    check_word(gg, w)
    reducer = PathReducer(gg, sd, w.basepoint)
    for letter in w.letters:
        reducer.feed_letter(letter)
    reducer.move_to(w.basepoint)
    return reducer.result()


def path_to_word(gg: GraphOfGroups, sd: SpanningData, path: PathWord, basepoint: Optional[str] = None) -> GWord:
    graph = gg.graph
    letters: List[Letter] = []
    if path.head:
        letters.append(VertexLetter(path.start, path.head))
    for e, c in path.steps:
        if not sd.is_tree_edge(e):
            if e in sd.plus_edges:
                letters.append(StableLetter(e, 1))
            else:
                letters.append(StableLetter(graph.bar(e), -1))
        if c:
            letters.append(VertexLetter(graph.t(e), c))
    return GWord(basepoint or path.start, tuple(letters))


def reduce_word(gg: GraphOfGroups, sd: SpanningData, w: GWord) -> GWord:
    return path_to_word(gg, sd, word_to_path(gg, sd, w), w.basepoint)


def is_trivial_word(gg: GraphOfGroups, sd: SpanningData, w: GWord) -> bool:
    return reduce_word(gg, sd, w).is_empty


def words_equal(gg: GraphOfGroups, sd: SpanningData, u: GWord, v: GWord) -> bool:
    if u.basepoint != v.basepoint:
        raise MalformedWordError(f"words have different basepoints '{u.basepoint}' and '{v.basepoint}'")
    return is_trivial_word(gg, sd, u + invert_word(gg, v))


def free_word(gg: GraphOfGroups, sd: SpanningData, w: GWord) -> Tuple[List[int], List[str]]:
    """
    For a graph of trivial groups: the reduced word as a free word over the
    non-tree stable letters, generator i+1 standing for generators[i].
    """
    generators = sd.non_tree_generators()
    index = {y: i + 1 for i, y in enumerate(generators)}
    letters = []
    for letter in reduce_word(gg, sd, w).letters:
        if isinstance(letter, VertexLetter):
            raise MalformedWordError("word has a vertex letter; the graph of groups is not free")
        letters.append(index[letter.edge] * letter.exponent)
    return letters, generators


def relation_words(gg: GraphOfGroups, sd: SpanningData) -> List[GWord]:
    """Defining relations of the presentation, each as a word equal to 1"""
    graph = gg.graph
    base = sd.base
    relations = []
    for v in graph.vertices:
        group = gg.vertex_group(v)
        for a in range(1, group.order):
            for b in range(1, group.order):
                relations.append(GWord(base, (
                    VertexLetter(v, a), VertexLetter(v, b), VertexLetter(v, group.inv(group.op(a, b))),
                )))
    for y in sorted(sd.plus_edges):
        f, fbar = gg.mono(y), gg.mono(graph.bar(y))
        source = gg.vertex_group(graph.o(y))
        for g in range(1, gg.edge_group(y).order):
            relations.append(GWord(base, (
                StableLetter(y, 1), VertexLetter(graph.t(y), f(g)), StableLetter(y, -1),
                VertexLetter(graph.o(y), source.inv(fbar(g))),
            )))
    return relations


# Text syntax for words

def parse_word(gg: GraphOfGroups, text: str, basepoint: Optional[str] = None) -> GWord:
    """
    Tokens separated by whitespace: `v:g` is a vertex letter (g a label or an
    index), `y` / `y^-1` a stable letter, and a bare label that occurs in
    exactly one vertex group is a vertex letter.
    """
    graph = gg.graph
    letters: List[Letter] = []
    for token in text.split():
        if ":" in token:
            vertex, element = token.split(":", 1)
            group = gg.vertex_groups.get(vertex)
            if group is None:
                raise MalformedWordError(f"token '{token}': unknown vertex '{vertex}'")
            try:
                letters.append(VertexLetter(vertex, group.index_of(element)))
            except KeyError:
                raise MalformedWordError(f"token '{token}': '{element}' is not an element of G_{vertex}")
            continue
        name, _, power = token.partition("^")
        if name in graph.edges:
            if power not in ("", "1", "+1", "-1"):
                raise MalformedWordError(f"token '{token}': stable letters take exponent 1 or -1")
            letters.append(StableLetter(name, -1 if power == "-1" else 1))
            continue
        matches = [
            (v, g.labels.index(token)) for v, g in sorted(gg.vertex_groups.items())
            if g.labels and token in g.labels and g.labels.index(token) != 0
        ]
        if len(matches) != 1:
            reason = "is ambiguous" if matches else "is neither an edge nor a vertex-group label"
            raise MalformedWordError(f"token '{token}' {reason}")
        letters.append(VertexLetter(*matches[0]))
    return GWord(basepoint or graph.base, tuple(letters))


def format_word(gg: GraphOfGroups, w: GWord) -> str:
    tokens = []
    for letter in w.letters:
        if isinstance(letter, VertexLetter):
            tokens.append(f"{letter.vertex}:{gg.vertex_group(letter.vertex).label(letter.element)}")
        else:
            tokens.append(letter.edge if letter.exponent == 1 else f"{letter.edge}^-1")
    return " ".join(tokens) or "1"


def word_to_tokens(w: GWord) -> List[list]:
    """Index-based JSON form: ["v", vertex, element] / ["s", edge, exponent]"""
    return [
        ["v", letter.vertex, letter.element] if isinstance(letter, VertexLetter)
        else ["s", letter.edge, letter.exponent]
        for letter in w.letters
    ]


def word_from_tokens(tokens: Sequence[Sequence], basepoint: str) -> GWord:
    letters: List[Letter] = []
    for token in tokens:
        if len(token) != 3 or token[0] not in ("v", "s"):
            raise MalformedWordError(f"bad word token {token!r}")
        kind, name, value = token
        letters.append(VertexLetter(str(name), int(value)) if kind == "v" else StableLetter(str(name), int(value)))
    return GWord(basepoint, tuple(letters))


# Bass-Serre tree balls

@dataclass(frozen=True)
class BallNode:
    id: int
    vertex: str
    depth: int
    label: GWord
    stabilizer: str


@dataclass
class TreeBall:
    nodes: List[BallNode]
    edges: List[Tuple[int, int, str]]

    def degree(self, node_id: int) -> int:
        return sum(1 for a, b, _ in self.edges if node_id in (a, b))


def left_coset_reps(group: FiniteGroup, subgroup: Iterable[int]) -> List[int]:
    members = list(subgroup)
    covered: set = set()
    reps = []
    for a in range(group.order):
        if a in covered:
            continue
        reps.append(a)
        covered.update(group.op(a, k) for k in members)
    return reps


def tree_ball(gg: GraphOfGroups, sd: SpanningData, radius: int, budget: int = 2000) -> TreeBall:
    """
    The ball of the given radius around 1*G_base in the Bass-Serre tree. A
    tree vertex over x is the coset g*G_x; g is kept as a reduced path word
    ending at x, and its neighbours through y (o(y) = x) are g*c*y for c over a
    left transversal of f_bar(y)(G_y) in G_x.
    """
    graph = gg.graph
    reps = {
        y: left_coset_reps(gg.vertex_group(graph.o(y)), gg.mono(graph.bar(y)).map)
        for y in graph.edges
    }

    def node_for(path: PathWord, depth: int, index: int) -> BallNode:
        label = path_to_word(gg, sd, path, sd.base)
        x = path.end if not path.steps else graph.t(path.steps[-1][0])
        word = format_word(gg, label)
        return BallNode(index, x, depth, label, f"({word}) G_{x} ({word})^-1")

    root = PathWord(sd.base, 0, ())
    nodes = [node_for(root, 0, 0)]
    edges: List[Tuple[int, int, str]] = []
    queue = deque([(0, root, None)])
    while queue:
        index, path, arrived_by = queue.popleft()
        node = nodes[index]
        if node.depth >= radius:
            continue
        for y in graph.out_edges(node.vertex):
            for c in reps[y]:
                if arrived_by is not None and y == graph.bar(arrived_by) and c == 0:
                    continue
                if len(nodes) >= budget:
                    raise BudgetExceeded(f"tree ball of radius {radius} exceeds {budget} vertices")
                steps = list(path.steps)
                head = path.head
                if steps:
                    e, last = steps[-1]
                    steps[-1] = (e, gg.vertex_group(node.vertex).op(last, c))
                else:
                    head = gg.vertex_group(node.vertex).op(head, c)
                child = PathWord(path.start, head, tuple(steps) + ((y, 0),))
                child_node = node_for(child, node.depth + 1, len(nodes))
                nodes.append(child_node)
                edges.append((index, child_node.id, y))
                queue.append((child_node.id, child, y))
    logger.debug("tree ball radius %d: %d vertices", radius, len(nodes))
    return TreeBall(nodes, edges)


def expected_degree(gg: GraphOfGroups, x: str) -> int:
    graph = gg.graph
    total = 0
    for y in graph.out_edges(x):
        total += gg.vertex_group(x).order // gg.edge_group(y).order
    return total


# DOT export

def _quote(text: str) -> str:
    return '"' + text.replace('"', '\\"') + '"'


def graph_to_dot(graph: Graph, name: str = "X", vertex_labels: Optional[Dict[str, str]] = None) -> str:
    lines = [f"graph {_quote(name)} {{"]
    for v in graph.vertices:
        label = (vertex_labels or {}).get(v, v)
        lines.append(f"  {_quote(v)} [label={_quote(label)}];")
    for key in graph.edge_pairs():
        lines.append(f"  {_quote(graph.o(key))} -- {_quote(graph.t(key))} [label={_quote(key)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def ball_to_dot(gg: GraphOfGroups, ball: TreeBall, name: str = "ball") -> str:
    lines = [f"graph {_quote(name)} {{"]
    for node in ball.nodes:
        label = f"{format_word(gg, node.label)} G_{node.vertex}"
        lines.append(f"  n{node.id} [label={_quote(label)}];")
    for a, b, y in ball.edges:
        lines.append(f"  n{a} -- n{b} [label={_quote(y)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
