"""
Directed-graph core for identifiability analysis
Simple digraphs on vertices 1..n with an optional measured-node subset, plus the
JSON and restricted-DOT codecs used by fixtures and the CLI.
"""

import logging
import re
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import networkx as nx
import orjson
from pydantic import BaseModel, Field, ValidationError

from netident.errors import GraphSyntaxError, InvariantError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


@dataclass(frozen=True, order=True)
class NodeSet:
    """Sorted, duplicate-free set of 1-based vertex indices"""

    members: Tuple[int, ...] = ()

    def __post_init__(self):
        if list(self.members) != sorted(set(self.members)):
            raise InvariantError(f"NodeSet members must be sorted and unique: {self.members}")

    @classmethod
    def of(cls, items: Iterable[int] = ()) -> "NodeSet":
        items = [int(v) for v in items]
        if len(items) != len(set(items)):
            raise InvariantError(f"duplicate vertices in {items}")
        return cls(tuple(sorted(items)))

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v: object) -> bool:
        return v in self.members

    def __or__(self, other: "NodeSet") -> "NodeSet":
        return NodeSet(tuple(sorted(set(self.members) | set(other.members))))

    def __and__(self, other: "NodeSet") -> "NodeSet":
        return NodeSet(tuple(v for v in self.members if v in other.members))

    def __sub__(self, other: "NodeSet") -> "NodeSet":
        return NodeSet(tuple(v for v in self.members if v not in other.members))

    def issubset(self, other: "NodeSet") -> bool:
        return all(v in other.members for v in self.members)

    def subsets(self, k: int) -> Iterator["NodeSet"]:
        """Size-k subsets in lexicographic order"""
        for combo in combinations(self.members, k):
            yield NodeSet(combo)

    def __str__(self) -> str:
        return "{" + ",".join(str(v) for v in self.members) + "}"


@dataclass(frozen=True)
class DiGraph:
    """
    Simple directed graph with vertex set {1..n}.
    Edges are kept in lexicographic order; no self-loops, no duplicates.
    """

    n: int
    edges: Tuple[Edge, ...] = ()
    measured: NodeSet = NodeSet()
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InvariantError(f"vertex count must be a positive integer, got {self.n!r}")
        seen = set()
        for (i, j) in self.edges:
            for v in (i, j):
                if not 1 <= v <= self.n:
                    raise InvariantError(f"edge ({i},{j}) has endpoint outside 1..{self.n}")
            if i == j:
                raise InvariantError(f"self-loop ({i},{i}) is not allowed")
            if (i, j) in seen:
                raise InvariantError(f"duplicate edge ({i},{j})")
            seen.add((i, j))
        if list(self.edges) != sorted(self.edges):
            raise InvariantError("edges must be in lexicographic order; use DiGraph.build")
        for v in self.measured:
            if not 1 <= v <= self.n:
                raise InvariantError(f"measured vertex {v} outside 1..{self.n}")
        if self.labels is not None and len(self.labels) != self.n:
            raise InvariantError(f"expected {self.n} labels, got {len(self.labels)}")

    @classmethod
    def build(
        cls,
        n: int,
        edges: Iterable[Iterable[int]] = (),
        measured: Iterable[int] = (),
        labels: Optional[Iterable[str]] = None,
    ) -> "DiGraph":
        edge_list = [tuple(int(v) for v in e) for e in edges]
        for e in edge_list:
            if len(e) != 2:
                raise InvariantError(f"edge must have two endpoints: {e}")
        if len(edge_list) != len(set(edge_list)):
            dup = next(e for e in edge_list if edge_list.count(e) > 1)
            raise InvariantError(f"duplicate edge {dup}")
        return cls(
            n=n,
            edges=tuple(sorted(edge_list)),
            measured=NodeSet.of(measured),
            labels=tuple(labels) if labels is not None else None,
        )

    @property
    def vertices(self) -> NodeSet:
        return NodeSet(tuple(range(1, self.n + 1)))

    @cached_property
    def _successors(self) -> Dict[int, Tuple[int, ...]]:
        succ: Dict[int, List[int]] = {v: [] for v in range(1, self.n + 1)}
        for (i, j) in self.edges:
            succ[i].append(j)
        return {v: tuple(sorted(ws)) for v, ws in succ.items()}

    @cached_property
    def _predecessors(self) -> Dict[int, Tuple[int, ...]]:
        pred: Dict[int, List[int]] = {v: [] for v in range(1, self.n + 1)}
        for (i, j) in self.edges:
            pred[j].append(i)
        return {v: tuple(sorted(ws)) for v, ws in pred.items()}

    @cached_property
    def _edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self._edge_set

    def successors(self, i: int) -> Tuple[int, ...]:
        self.check_vertex(i)
        return self._successors[i]

    def check_vertex(self, i: int) -> None:
        if not isinstance(i, int) or not 1 <= i <= self.n:
            raise InvariantError(f"vertex {i!r} outside 1..{self.n}")

    def check_nodes(self, s: NodeSet) -> None:
        for v in s:
            self.check_vertex(v)

    def with_measured(self, measured: Iterable[int]) -> "DiGraph":
        return DiGraph(n=self.n, edges=self.edges, measured=NodeSet.of(measured), labels=self.labels)


def out_neighbors(g: DiGraph, i: int) -> NodeSet:
    """N_i = {j : (i, j) in E}"""
    g.check_vertex(i)
    return NodeSet(g._successors[i])


def in_neighbors(g: DiGraph, i: int) -> NodeSet:
    g.check_vertex(i)
    return NodeSet(g._predecessors[i])


def complement(g: DiGraph, s: NodeSet) -> NodeSet:
    """S^c = V \\ S"""
    g.check_nodes(s)
    return g.vertices - s


def to_networkx(g: DiGraph) -> nx.DiGraph:
    h = nx.DiGraph()
    h.add_nodes_from(range(1, g.n + 1))
    h.add_edges_from(g.edges)
    return h


# --- JSON codec ---


class GraphPayload(BaseModel):
    n: int = Field(..., ge=1)
    edges: List[Tuple[int, int]] = []
    measured: List[int] = []
    labels: Optional[List[str]] = None


def graph_from_payload(payload: GraphPayload) -> DiGraph:
    return DiGraph.build(payload.n, payload.edges, payload.measured, payload.labels)


def graph_to_payload(g: DiGraph) -> GraphPayload:
    return GraphPayload(
        n=g.n,
        edges=[tuple(e) for e in g.edges],
        measured=list(g.measured),
        labels=list(g.labels) if g.labels is not None else None,
    )


def serialize_graph(g: DiGraph) -> str:
    """Canonical JSON text; parse_graph(serialize_graph(g)) == g"""
    data = graph_to_payload(g).model_dump(exclude_none=True)
    return orjson.dumps(data, option=orjson.OPT_SORT_KEYS).decode("utf-8")


def _parse_json(text: str) -> DiGraph:
    try:
        data = orjson.loads(text)
    except orjson.JSONDecodeError as e:
        raise GraphSyntaxError(f"invalid JSON: {e}") from e
    try:
        payload = GraphPayload.model_validate(data)
    except ValidationError as e:
        raise GraphSyntaxError(f"invalid graph payload: {e}") from e
    return graph_from_payload(payload)


# --- restricted DOT codec ---

_DOT_QUOTED = r'"(?:[^"\\]|\\.)*"'
_DOT_HEADER = re.compile(r"^\s*digraph\s*(?:[A-Za-z_][A-Za-z0-9_]*|" + _DOT_QUOTED + r")?\s*\{(?P<body>.*)\}\s*$", re.S)
_DOT_COMMENT = re.compile(r"(" + _DOT_QUOTED + r")|//[^\n]*")
_DOT_STMT = re.compile(r"(?:" + _DOT_QUOTED + r'|[^;\n"])+')
_DOT_ATTRS = re.compile(r"\[(?P<attrs>(?:" + _DOT_QUOTED + r'|[^\]"])*)\]\s*$')
_DOT_ATTR = re.compile(r"\s*([A-Za-z_]+)\s*=\s*(" + _DOT_QUOTED + r"|[^,;\s\"]+)\s*,?")
_DOT_NODE = re.compile(r"^\d+$")


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _unquote(value: str) -> str:
    if len(value) >= 2 and value[0] == value[-1] == '"':
        return re.sub(r"\\(.)", r"\1", value[1:-1], flags=re.S)
    return value


def _parse_attrs(text: str) -> Dict[str, str]:
    attrs = {}
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _DOT_ATTR.match(text, pos)
        if not m:
            raise GraphSyntaxError(f"bad DOT attribute list: [{text}]")
        attrs[m.group(1)] = _unquote(m.group(2))
        pos = m.end()
    return attrs


def _parse_dot(text: str) -> DiGraph:
    m = _DOT_HEADER.match(text)
    if not m:
        raise GraphSyntaxError("expected 'digraph { ... }'")
    body = _DOT_COMMENT.sub(lambda c: c.group(1) or "", m.group("body"))
    edges: List[Edge] = []
    nodes = set()
    measured = []
    labels: Dict[int, str] = {}
    for raw in _DOT_STMT.findall(body):
        stmt = raw.strip()
        if not stmt:
            continue
        attrs: Dict[str, str] = {}
        am = _DOT_ATTRS.search(stmt)
        if am:
            attrs = _parse_attrs(am.group("attrs"))
            stmt = stmt[: am.start()].strip()
        if "->" in stmt:
            chain = [p.strip() for p in stmt.split("->")]
            if not all(_DOT_NODE.match(p) for p in chain):
                raise GraphSyntaxError(f"DOT node names must be integers: {raw.strip()!r}")
            ids = [int(p) for p in chain]
            nodes.update(ids)
            edges.extend(zip(ids, ids[1:]))
            continue
        if _DOT_NODE.match(stmt):
            v = int(stmt)
            nodes.add(v)
            if attrs.get("shape") == "doublecircle":
                measured.append(v)
            if "label" in attrs:
                labels[v] = attrs["label"]
            continue
        if stmt.split("[")[0].strip() in ("graph", "node", "edge") or re.match(r"^[A-Za-z_]+\s*=", stmt):
            # global attribute statements carry no topology
            continue
        raise GraphSyntaxError(f"unsupported DOT statement: {raw.strip()!r}")
    if not nodes:
        raise GraphSyntaxError("DOT graph has no nodes")
    if min(nodes) < 1:
        raise InvariantError("DOT node ids must be 1-based")
    n = max(nodes)
    missing = sorted(set(range(1, n + 1)) - nodes)
    if missing:
        raise InvariantError(f"DOT node ids must cover 1..{n}; declare isolated vertices {missing} as node statements")
    label_tuple = None
    if labels:
        label_tuple = tuple(labels.get(v, str(v)) for v in range(1, n + 1))
    return DiGraph.build(n, edges, measured, label_tuple)


def parse_graph(text: str) -> DiGraph:
    """
    Parse a serialized graph

    Args:
        text: JSON {"n": .., "edges": [[i, j], ..], "measured": [..], "labels": [..]}
              or a restricted DOT digraph with integer node names

    Returns:
        Validated DiGraph
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        g = _parse_json(text)
    elif stripped.startswith("digraph"):
        g = _parse_dot(text)
    else:
        raise GraphSyntaxError("input is neither a JSON object nor a DOT digraph")
    logger.debug("parsed graph: n=%d, %d edges, measured %s", g.n, len(g.edges), g.measured)
    return g


def to_dot(g: DiGraph, measured: Optional[NodeSet] = None) -> str:
    """DOT export; measured nodes get shape=doublecircle"""
    highlight = measured if measured is not None else g.measured
    lines = ["digraph G {"]
    for v in range(1, g.n + 1):
        attrs = []
        if g.labels is not None:
            attrs.append(f"label={_quote(g.labels[v - 1])}")
        if v in highlight:
            attrs.append("shape=doublecircle")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {v}{suffix};")
    for (i, j) in g.edges:
        lines.append(f"  {i} -> {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
