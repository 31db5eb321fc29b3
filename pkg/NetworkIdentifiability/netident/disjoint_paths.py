"""
Vertex-disjoint paths between node sets
Maximum path counts via unit-capacity max-flow on the node-split digraph, exhaustive
enumeration of path sets, and the search for a constrained set (a path set that is the
only one between its own start and end nodes).

Overlap convention: vertices in v1 & v2 count as length-zero paths; the remaining paths
run from v1 - v2 to v2 - v1 and never touch the shared vertices, so the combined
collection stays vertex-disjoint.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import FrozenSet, Iterator, List, Optional, Set, Tuple

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from netident.errors import CapExceeded, InvariantError
from netident.graph_core import DiGraph, Edge, NodeSet, to_networkx
from netident.settings import get_settings

logger = logging.getLogger(__name__)

SOURCE = "s"
SINK = "t"


@dataclass(frozen=True)
class Path:
    """Ordered distinct vertices v1..v(k+1); a single vertex is a length-zero path"""

    vertices: Tuple[int, ...]

    def __post_init__(self):
        if not self.vertices:
            raise InvariantError("a path needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise InvariantError(f"path revisits a vertex: {self.vertices}")

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(zip(self.vertices, self.vertices[1:]))

    def validate(self, g: DiGraph) -> None:
        for v in self.vertices:
            g.check_vertex(v)
        for (i, j) in self.edges:
            if not g.has_edge(i, j):
                raise InvariantError(f"path {self} uses non-edge ({i},{j})")

    def __str__(self) -> str:
        return "→".join(str(v) for v in self.vertices)


@dataclass(frozen=True, eq=False)
class PathSet:
    """
    Pairwise vertex-disjoint paths (endpoints included).
    Two path sets are equal iff their edge sets (and length-zero vertices) are equal.
    """

    paths: Tuple[Path, ...] = ()

    def __post_init__(self):
        seen: Set[int] = set()
        for p in self.paths:
            overlap = seen.intersection(p.vertices)
            if overlap:
                raise InvariantError(f"paths share vertices {sorted(overlap)}")
            seen.update(p.vertices)

    @classmethod
    def of(cls, paths) -> "PathSet":
        return cls(tuple(sorted(paths, key=lambda p: p.vertices)))

    @property
    def start_nodes(self) -> NodeSet:
        return NodeSet.of(p.start for p in self.paths)

    @property
    def end_nodes(self) -> NodeSet:
        return NodeSet.of(p.end for p in self.paths)

    @cached_property
    def edge_set(self) -> FrozenSet[Edge]:
        return frozenset(e for p in self.paths for e in p.edges)

    @cached_property
    def trivial_vertices(self) -> NodeSet:
        return NodeSet.of(p.start for p in self.paths if p.length == 0)

    @property
    def routed(self) -> "PathSet":
        """The paths of positive length"""
        return PathSet(tuple(p for p in self.paths if p.length > 0))

    def __len__(self) -> int:
        return len(self.paths)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PathSet):
            return NotImplemented
        return self.edge_set == other.edge_set and self.trivial_vertices == other.trivial_vertices

    def __hash__(self) -> int:
        return hash((self.edge_set, self.trivial_vertices))

    def validate(self, g: DiGraph) -> None:
        for p in self.paths:
            p.validate(g)

    def describe(self) -> str:
        return ", ".join(str(p) for p in self.paths) if self.paths else "(none)"

    def __str__(self) -> str:
        return "{" + self.describe() + "}"


@dataclass(frozen=True)
class ConstrainedWitness:
    """
    path_set is the unique set of vertex-disjoint paths from source_subset to target_subset
    (enumeration_count == 1), plus length-zero paths on the shared vertices.
    """

    path_set: PathSet
    source_subset: NodeSet
    target_subset: NodeSet
    shared: NodeSet = NodeSet()
    enumeration_count: int = 1

    def __post_init__(self):
        if self.enumeration_count != 1:
            raise InvariantError(f"constrained witness must be unique, enumeration_count={self.enumeration_count}")

    @property
    def m(self) -> int:
        return len(self.path_set)


@dataclass(frozen=True)
class _Split:
    graph: nx.DiGraph = field(repr=False)
    sources: NodeSet
    targets: NodeSet


def _split_graph(g: DiGraph, sources: NodeSet, targets: NodeSet, blocked: NodeSet) -> _Split:
    """Node-split digraph: v -> (in, v) --1--> (out, v); insertion order fixes BFS tie-breaks"""
    h = nx.DiGraph()
    h.add_node(SOURCE)
    for a in sources:
        h.add_edge(SOURCE, ("in", a), capacity=1)
    for v in range(1, g.n + 1):
        if v in blocked:
            continue
        h.add_edge(("in", v), ("out", v), capacity=1)
    for (i, j) in g.edges:
        if i in blocked or j in blocked:
            continue
        h.add_edge(("out", i), ("in", j), capacity=1)
    for b in targets:
        h.add_edge(("out", b), SINK, capacity=1)
    h.add_node(SINK)
    return _Split(graph=h, sources=sources, targets=targets)


def _decompose(split: _Split, residual: nx.DiGraph) -> List[Path]:
    def carries(u, v) -> bool:
        return residual.has_edge(u, v) and residual[u][v].get("flow", 0) > 0

    paths = []
    for a in split.sources:
        if not carries(SOURCE, ("in", a)):
            continue
        walk = [a]
        v = a
        while not carries(("out", v), SINK):
            nxt = [w for w in sorted(x[1] for x in split.graph.successors(("out", v)) if x != SINK)
                   if carries(("out", v), ("in", w))]
            if not nxt:
                raise InvariantError(f"flow decomposition stalled at vertex {v}")
            v = nxt[0]
            walk.append(v)
        paths.append(Path(tuple(walk)))
    return paths


def max_disjoint_paths(g: DiGraph, v1: NodeSet, v2: NodeSet) -> Tuple[int, PathSet]:
    """
    Maximum number of vertex-disjoint paths from v1 to v2, with a realizing witness

    Args:
        g: Graph
        v1: Start-node set
        v2: End-node set

    Returns:
        (count, witness) where count = |v1 & v2| + max-flow(v1 - v2 -> v2 - v1)
    """
    g.check_nodes(v1)
    g.check_nodes(v2)
    shared = v1 & v2
    sources, targets = v1 - v2, v2 - v1
    trivial = [Path((v,)) for v in shared]
    if not sources or not targets:
        return len(shared), PathSet.of(trivial)

    split = _split_graph(g, sources, targets, blocked=shared)
    residual = edmonds_karp(split.graph, SOURCE, SINK, capacity="capacity")
    flow = int(residual.graph["flow_value"])
    routed = _decompose(split, residual)
    if len(routed) != flow:
        raise InvariantError(f"decomposed {len(routed)} paths from a flow of value {flow}")
    logger.debug("max_disjoint_paths %s -> %s: shared=%d flow=%d", v1, v2, len(shared), flow)
    return len(shared) + flow, PathSet.of(trivial + routed)


def _can_reach(g: DiGraph, targets: NodeSet, blocked: NodeSet) -> Set[int]:
    h = to_networkx(g)
    h.remove_nodes_from(blocked)
    reach: Set[int] = set(targets)
    for t in targets:
        reach |= nx.ancestors(h, t)
    return reach


def _iter_path_sets(
    g: DiGraph,
    starts: Tuple[int, ...],
    targets: NodeSet,
    blocked: NodeSet,
    terminal_targets: bool,
) -> Iterator[Tuple[Path, ...]]:
    reach = _can_reach(g, targets, blocked)
    if any(s not in reach for s in starts):
        return
    used: Set[int] = set(starts) | set(blocked)
    chosen: List[Path] = []

    def simple_paths(s: int) -> Iterator[Tuple[int, ...]]:
        walk = [s]
        on_walk = {s}

        def extend(v: int) -> Iterator[Tuple[int, ...]]:
            if v in targets:
                yield tuple(walk)
                if terminal_targets:
                    return
            for w in g.successors(v):
                if w in used or w in on_walk or w not in reach:
                    continue
                walk.append(w)
                on_walk.add(w)
                yield from extend(w)
                walk.pop()
                on_walk.discard(w)

        yield from extend(s)

    def route(k: int) -> Iterator[Tuple[Path, ...]]:
        if k == len(starts):
            yield tuple(chosen)
            return
        for walk in simple_paths(starts[k]):
            tail = walk[1:]
            used.update(tail)
            chosen.append(Path(walk))
            yield from route(k + 1)
            chosen.pop()
            used.difference_update(tail)

    yield from route(0)


def enumerate_path_sets(
    g: DiGraph,
    v1: NodeSet,
    v2: NodeSet,
    m: int,
    cap: Optional[int] = None,
    exact: bool = False,
    blocked: NodeSet = NodeSet(),
) -> List[PathSet]:
    """
    All distinct sets of exactly m vertex-disjoint paths from v1 to v2

    Args:
        g: Graph
        v1: Start-node set (disjoint from v2)
        v2: End-node set
        m: Number of paths
        cap: Abort with CapExceeded once more than cap sets are found (settings default)
        exact: Start nodes must be exactly v1 (requires |v1| == m); otherwise any size-m subset
        blocked: Vertices no path may use

    Returns:
        Path sets in deterministic order
    """
    g.check_nodes(v1)
    g.check_nodes(v2)
    g.check_nodes(blocked)
    if m < 0:
        raise InvariantError(f"m must be non-negative, got {m}")
    if len(v1 & v2):
        raise InvariantError(f"v1 and v2 must be disjoint; shared {v1 & v2}")
    if len((v1 | v2) & blocked):
        raise InvariantError("blocked vertices may not appear in v1 or v2")
    if cap is None:
        cap = get_settings().analysis.enumeration_cap
    if cap < 1:
        raise InvariantError(f"cap must be at least 1, got {cap}")
    if exact and len(v1) != m:
        raise InvariantError(f"exact mode needs |v1| == m, got |v1|={len(v1)} m={m}")
    if m == 0:
        return [PathSet()]
    if m > len(v2):
        return []

    terminal = exact and len(v2) == m
    start_choices = [v1] if exact else list(v1.subsets(m))
    found: List[PathSet] = []
    for starts in start_choices:
        for paths in _iter_path_sets(g, starts.members, v2, blocked, terminal):
            found.append(PathSet.of(paths))
            if len(found) > cap:
                raise CapExceeded(cap)
    logger.debug("enumerate_path_sets %s -> %s m=%d exact=%s: %d sets", v1, v2, m, exact, len(found))
    return found


def exists_constrained_set(
    g: DiGraph,
    v1: NodeSet,
    v2: NodeSet,
    m: int,
    cap: Optional[int] = None,
) -> Optional[ConstrainedWitness]:
    """
    First constrained set of m vertex-disjoint paths from v1 to v2, or None.
    Candidate end sets are tried in lexicographic order, then start sets.
    """
    g.check_nodes(v1)
    g.check_nodes(v2)
    if m < 0:
        raise InvariantError(f"m must be non-negative, got {m}")
    overlap = v1 & v2
    reduced = max(0, m - len(overlap))
    if reduced == 0:
        shared = NodeSet(overlap.members[:m])
        trivial = PathSet.of(Path((v,)) for v in shared)
        return ConstrainedWitness(trivial, NodeSet(), NodeSet(), shared, 1)

    sources, targets = v1 - v2, v2 - v1
    if reduced > min(len(sources), len(targets)):
        return None
    for bar_v2 in targets.subsets(reduced):
        for bar_v1 in sources.subsets(reduced):
            sets = enumerate_path_sets(g, bar_v1, bar_v2, reduced, cap=cap, exact=True, blocked=overlap)
            logger.debug("constrained search %s -> %s: %d sets", bar_v1, bar_v2, len(sets))
            if len(sets) == 1:
                trivial = [Path((v,)) for v in overlap]
                full = PathSet.of(trivial + list(sets[0].paths))
                return ConstrainedWitness(full, bar_v1, bar_v2, overlap, 1)
    return None


def is_constrained(g: DiGraph, path_set: PathSet, cap: Optional[int] = None) -> bool:
    """True iff path_set is the only set of its size between its own start and end nodes"""
    path_set.validate(g)
    routed = path_set.routed
    if not len(routed):
        return True
    sets = enumerate_path_sets(
        g, routed.start_nodes, routed.end_nodes, len(routed),
        cap=cap, exact=True, blocked=path_set.trivial_vertices,
    )
    return len(sets) == 1 and sets[0] == routed


def verify_witness(g: DiGraph, witness: ConstrainedWitness, cap: Optional[int] = None) -> bool:
    """Re-derive uniqueness of a witness by exact-mode enumeration"""
    routed = witness.path_set.routed
    if routed.start_nodes != witness.source_subset or routed.end_nodes != witness.target_subset:
        return False
    if witness.path_set.trivial_vertices != witness.shared:
        return False
    return is_constrained(g, witness.path_set, cap=cap)

