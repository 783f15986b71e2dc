"""
Problem files: one self-contained JSON document per graph of groups

    {
      "format_version": 1,
      "prime": 2,
      "groups": {"A": {"cyclic": 4, "symbol": "a"}, "E": {"table": [[0, 1], [1, 0]]}},
      "graph": {"vertices": ["u", "v"],
                "edges": [{"id": "y", "bar": "ybar", "o": "u", "t": "v", "group": "E", "mono": [0, 2]}, ...]},
      "vertex_groups": {"u": "A", "v": "B"},
      "series": {"vertices": {"u": [[0, 1, 2, 3], [0, 2], [0]]}, "edges": {"y": [[0, 1], [0, 1], [0]]}},
      "level_maps": {"vertices": {"u": {"1": 1}}, "edges": {"y": {"1": 1}}},
      "words": {"w": "u:a v:b"}
    }

`series.edges` may be omitted; it is then derived from the vertex series.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from gogsep.compat import LevelMaps, SeriesAssignment, check_compliance, derive_edge_series, validate_assignment
from gogsep.errors import ConditionError, ProblemFileError, ValidationReport
from gogsep.gog import Edge, Graph, GraphOfGroups, GWord, SpanningData, parse_word, spanning_tree, validate_gog
from gogsep.pgroups import (
    GROUP_CONSTRUCTORS,
    FiniteGroup,
    GroupHom,
    cyclic_group,
    from_permutations,
    series_from_lists,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass
class Problem:
    prime: int
    gg: GraphOfGroups
    sd: SpanningData
    series: Optional[SeriesAssignment] = None
    level_maps: Optional[LevelMaps] = None
    words: Dict[str, str] = field(default_factory=dict)
    source: Optional[str] = None

    def word(self, name_or_text: str) -> GWord:
        """A named word from the file, or an inline word in text syntax"""
        text = self.words.get(name_or_text, name_or_text)
        return parse_word(self.gg, text, self.sd.base)

    def compliant_data(self) -> Tuple[SeriesAssignment, LevelMaps]:
        """
        Series and level maps ready for descent. A graph of trivial groups
        needs no series; missing level maps are solved for.
        """
        sa = self.series
        if sa is None:
            if not self.gg.is_free():
                raise ConditionError("problem has no chief series; run `search` or add a series section")
            sa = SeriesAssignment(
                {x: series_from_lists(g, [[0]]) for x, g in self.gg.vertex_groups.items()},
                {y: series_from_lists(self.gg.edge_group(y), [[0]]) for y in self.gg.graph.edge_pairs()},
            )
        report = check_compliance(self.gg, self.sd, sa, self.level_maps)
        if not report.ok:
            raise ConditionError("conditions I and II do not hold for the problem's series")
        return sa, report.level_maps

    def validate(self) -> ValidationReport:
        report = validate_gog(self.gg)
        if report.ok and self.series is not None:
            report.extend(validate_assignment(self.gg, self.series))
        report.facts.update({
            "prime": self.prime,
            "vertices": len(self.gg.graph.vertices),
            "edge_pairs": len(self.gg.graph.edge_pairs()),
            "basepoint": self.sd.base,
            "non_tree_edges": self.sd.non_tree_generators(),
            "series": self.series is not None,
            "level_maps": self.level_maps is not None,
        })
        return report


def _require(data: Dict, key: str, where: str) -> Any:
    if not isinstance(data, dict) or key not in data:
        raise ProblemFileError(f"{where}: missing '{key}'")
    return data[key]


def build_group(name: str, spec: Dict[str, Any]) -> FiniteGroup:
    if not isinstance(spec, dict):
        raise ProblemFileError(f"group '{name}': expected an object")
    labels = spec.get("labels")
    if "table" in spec:
        return FiniteGroup(spec["table"], labels=labels, name=name)
    if "permutations" in spec:
        group = from_permutations(spec["permutations"], name=name)
        if labels is not None:
            return FiniteGroup(group.rows(), labels=labels, name=name)
        return group
    if "cyclic" in spec:
        group = cyclic_group(int(spec["cyclic"]), symbol=spec.get("symbol", "a"), name=name)
        return FiniteGroup(group.rows(), labels=labels, name=name) if labels is not None else group
    for key, constructor in GROUP_CONSTRUCTORS.items():
        if key in spec:
            group = constructor(spec[key])
            return FiniteGroup(group.rows(), labels=labels or group.labels, name=name)
    raise ProblemFileError(f"group '{name}': give a table, permutations or one of {sorted(GROUP_CONSTRUCTORS)}")


def _build_mono(y: str, spec: Any, source: FiniteGroup, target: FiniteGroup) -> GroupHom:
    if isinstance(spec, list):
        images = spec
    elif isinstance(spec, dict):
        images = [None] * source.order
        for a, b in spec.items():
            try:
                images[source.index_of(str(a))] = target.index_of(str(b))
            except KeyError as e:
                raise ProblemFileError(f"edge '{y}': unknown element {e} in mono")
        images = [0 if b is None and a == 0 else b for a, b in enumerate(images)]
        if None in images:
            raise ProblemFileError(f"edge '{y}': mono must map every element")
    else:
        raise ProblemFileError(f"edge '{y}': mono must be a list or a mapping")
    return GroupHom(source, target, tuple(int(b) for b in images))


def problem_from_dict(data: Dict[str, Any], validate: bool = True, source: Optional[str] = None) -> Problem:
    if not isinstance(data, dict):
        raise ProblemFileError("problem file must hold a JSON object")
    version = data.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ProblemFileError(f"unsupported format_version {version!r}")
    try:
        prime = int(_require(data, "prime", "problem"))
        groups = {name: build_group(name, spec) for name, spec in _require(data, "groups", "problem").items()}
        graph_data = _require(data, "graph", "problem")
        vertices = [str(v) for v in _require(graph_data, "vertices", "graph")]
        edge_specs = graph_data.get("edges", [])
        edges = [
            Edge(str(_require(e, "id", "edge")), str(_require(e, "o", "edge")),
                 str(_require(e, "t", "edge")), str(_require(e, "bar", "edge")))
            for e in edge_specs
        ]
        graph = Graph(vertices, edges)

        def group(name: Any, where: str) -> FiniteGroup:
            if name not in groups:
                raise ProblemFileError(f"{where}: unknown group '{name}'")
            return groups[name]

        vertex_names = _require(data, "vertex_groups", "problem")
        vertex_groups = {v: group(vertex_names.get(v), f"vertex '{v}'") for v in graph.vertices}
        edge_groups, monos = {}, {}
        for spec in edge_specs:
            y = str(spec["id"])
            edge_groups[y] = group(_require(spec, "group", f"edge '{y}'"), f"edge '{y}'")
            target = vertex_groups.get(str(spec["t"]))
            if target is None:
                raise ProblemFileError(f"edge '{y}': unknown terminal vertex '{spec['t']}'")
            monos[y] = _build_mono(y, _require(spec, "mono", f"edge '{y}'"), edge_groups[y], target)
        gg = GraphOfGroups(graph, vertex_groups, edge_groups, monos, prime)
    except (TypeError, ValueError, AttributeError) as e:
        raise ProblemFileError(f"malformed problem: {e}")

    report = validate_gog(gg)
    if validate:
        report.raise_if_invalid()
    elif not report.ok:
        logger.warning("problem does not validate: %s", report.violations[0].message)
        return Problem(prime, gg, SpanningData(graph.base if graph.vertices else "", frozenset(), frozenset(), {}),
                       words=dict(data.get("words", {})), source=source)

    sd = spanning_tree(graph, base=data.get("basepoint"))
    problem = Problem(prime, gg, sd, words={str(k): str(v) for k, v in data.get("words", {}).items()}, source=source)

    series_data = data.get("series")
    if series_data is not None:
        try:
            vertex_series = {
                v: series_from_lists(vertex_groups[v], terms)
                for v, terms in _require(series_data, "vertices", "series").items()
            }
            if "edges" in series_data:
                edge_series = {
                    graph.pair_key(y): series_from_lists(edge_groups[y], terms)
                    for y, terms in series_data["edges"].items()
                }
            else:
                edge_series = derive_edge_series(gg, vertex_series)
        except KeyError as e:
            raise ProblemFileError(f"series refer to unknown vertex or edge {e}")
        except (TypeError, ValueError) as e:
            raise ProblemFileError(f"malformed series: {e}")
        problem.series = SeriesAssignment(vertex_series, edge_series)
        if validate:
            validate_assignment(gg, problem.series).raise_if_invalid()
    if data.get("level_maps") is not None:
        try:
            problem.level_maps = LevelMaps.from_dict(data["level_maps"])
        except (AttributeError, TypeError, ValueError) as e:
            raise ProblemFileError(f"malformed level maps: {e}")
    logger.debug("loaded problem with %d vertices, %d edge pairs", len(graph.vertices), len(graph.edge_pairs()))
    return problem


def load_problem(path: Union[str, Path], validate: bool = True) -> Problem:
    data = load_json(path)
    return problem_from_dict(data, validate=validate, source=str(path))


def _group_names(gg: GraphOfGroups) -> Dict[int, str]:
    names: Dict[int, str] = {}
    taken = set()
    for g in list(gg.vertex_groups.values()) + list(gg.edge_groups.values()):
        if id(g) in names:
            continue
        base = (g.name or "G").replace(" ", "")
        name, i = base, 1
        while name in taken:
            i += 1
            name = f"{base}_{i}"
        taken.add(name)
        names[id(g)] = name
    return names


def dump_problem(problem: Problem) -> Dict[str, Any]:
    """The JSON form read back by `problem_from_dict`"""
    gg = problem.gg
    graph = gg.graph
    names = _group_names(gg)
    groups: Dict[str, Any] = {}
    for g in list(gg.vertex_groups.values()) + list(gg.edge_groups.values()):
        spec: Dict[str, Any] = {"table": g.rows()}
        if g.labels:
            spec["labels"] = list(g.labels)
        groups[names[id(g)]] = spec
    data: Dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "prime": problem.prime,
        "basepoint": problem.sd.base,
        "groups": groups,
        "graph": {
            "vertices": list(graph.vertices),
            "edges": [
                {"id": y, "bar": e.bar, "o": e.o, "t": e.t, "group": names[id(gg.edge_group(y))],
                 "mono": list(gg.mono(y).map)}
                for y, e in graph.edges.items()
            ],
        },
        "vertex_groups": {v: names[id(gg.vertex_group(v))] for v in graph.vertices},
    }
    if problem.series is not None:
        data["series"] = problem.series.as_lists()
    if problem.level_maps is not None:
        data["level_maps"] = problem.level_maps.to_dict()
    if problem.words:
        data["words"] = dict(problem.words)
    return data


def write_json(data: Dict[str, Any], path: Union[str, Path]) -> None:
    with open(path, "w") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def load_json(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ProblemFileError(f"file '{path}' not found")
    except OSError as e:
        raise ProblemFileError(f"cannot read '{path}': {e}")
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"'{path}' is not valid JSON: {e}")
